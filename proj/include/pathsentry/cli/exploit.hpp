// Copyright 2026 The PathSentry Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATHSENTRY_CLI_EXPLOIT_HPP
#define PATHSENTRY_CLI_EXPLOIT_HPP

#include <filesystem>
#include <string>

#include "pathsentry/cli/report.hpp"
#include "pathsentry/frontend/bundle.hpp"

namespace pathsentry::cli {

inline constexpr std::string_view kLaunchSchema = "pathsentry-launch/1";

struct ExploitSkeleton {
  std::string finding_id;
  json launch;
  std::string prompt;
};

/// Launch recipe and prompt for a finding. A hijacking finding without a
/// payload gets empty extras and its link-planting steps.
ExploitSkeleton make_exploit(const detect::Finding& finding, const frontend::AppBundle& bundle);

/// Writes <dir>/<finding-id>/launch.json and prompt.md.
void write_exploit(const ExploitSkeleton& skeleton, const std::filesystem::path& dir);

struct LaunchRecipe {
  std::string finding;
  std::string component;
  std::string entry;
  Payload payload;
  detect::FsModel fs;
};

LaunchRecipe parse_launch(const json& j);

}  // namespace pathsentry::cli

#endif  // PATHSENTRY_CLI_EXPLOIT_HPP
