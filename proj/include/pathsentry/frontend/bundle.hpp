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

#ifndef PATHSENTRY_FRONTEND_BUNDLE_HPP
#define PATHSENTRY_FRONTEND_BUNDLE_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pathsentry/frontend/alir.hpp"
#include "pathsentry/frontend/manifest.hpp"
#include "pathsentry/frontend/policy_text.hpp"

namespace pathsentry::frontend {

/// One invocable (component, entry function) pair.
struct EntryPoint {
  std::string component;
  int function = -1;

  auto operator<=>(const EntryPoint&) const = default;
};

struct AppBundle {
  std::filesystem::path dir;
  Manifest manifest;
  AlirProgram program;
  std::vector<EntryPoint> entries;  // manifest order
  std::vector<Diagnostic> diagnostics;

  const std::string& package() const { return manifest.package; }
  bool has_sinks() const;
};

/// Links a manifest against its program. Throws LinkError when an entry
/// function is missing from the program.
AppBundle link_bundle(Manifest manifest, AlirProgram program, std::filesystem::path dir = {});

/// Reads `manifest.json` and every `*.alir` file (sorted by name) from dir.
/// Throws ParseError (naming the failing file) or LinkError.
AppBundle load_bundle(const std::filesystem::path& dir);

/// Every immediate subdirectory of `dir` that holds a manifest.json, sorted.
std::vector<std::filesystem::path> find_bundles(const std::filesystem::path& dir);

struct PermissionTable {
  std::map<std::string, ProtectionLevel> levels;
  std::vector<Diagnostic> diagnostics;
};

/// Global permission table: policy declarations plus every manifest's
/// declaredPermissions. A name declared at different levels takes the
/// strongest one and is diagnosed, so the result is independent of order.
PermissionTable merge_permission_table(const PolicySet& policy,
                                       const std::vector<const Manifest*>& manifests);

/// Returns a copy of `policy` whose permission table is the merged table.
/// Subjects holding undeclared permissions are diagnosed.
PolicySet link_policy(const PolicySet& policy, const std::vector<const AppBundle*>& bundles,
                      std::vector<Diagnostic>* diagnostics = nullptr);

std::string read_file(const std::filesystem::path& path);

}  // namespace pathsentry::frontend

#endif  // PATHSENTRY_FRONTEND_BUNDLE_HPP
