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

#ifndef PATHSENTRY_CLI_REPORT_HPP
#define PATHSENTRY_CLI_REPORT_HPP

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathsentry/detect/detect.hpp"

namespace pathsentry::cli {

using json = nlohmann::ordered_json;
using constraints::Payload;

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kReportSchema = "pathsentry-report/1";

struct BundleReport {
  std::string bundle;  // directory name
  std::string app;
  detect::Statistics statistics;
  std::vector<detect::Finding> findings;
  std::map<std::string, std::map<std::string, std::size_t>> verdicts;  // detector -> outcome -> flows
  std::vector<Diagnostic> diagnostics;
};

struct Report {
  std::string tool_version{kToolVersion};
  std::string attacker_level;
  std::vector<BundleReport> bundles;
  std::vector<Diagnostic> diagnostics;

  std::size_t finding_count() const;
};

json to_json(const Payload& p);
json to_json(const detect::Finding& f);
json to_json(const detect::Statistics& s);
json to_json(const Report& r);

Payload payload_from_json(const json& j);

/// Inverse of to_json on the serialized fields. Throws ParseError on a
/// document of another schema.
Report report_from_json(const json& j);

/// Two-space indented with a trailing newline.
std::string dump(const json& j);

}  // namespace pathsentry::cli

#endif  // PATHSENTRY_CLI_REPORT_HPP
