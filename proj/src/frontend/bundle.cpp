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

#include "pathsentry/frontend/bundle.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace pathsentry::frontend {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool AppBundle::has_sinks() const {
  for (const auto& fn : program.functions)
    for (const auto& s : fn.body)
      if (s.op == Op::Sink) return true;
  return false;
}

AppBundle link_bundle(Manifest manifest, AlirProgram program, fs::path dir) {
  AppBundle b;
  b.dir = std::move(dir);
  b.manifest = std::move(manifest);
  b.program = std::move(program);
  for (const auto& c : b.manifest.components) {
    for (const auto& fn : c.entry_functions) {
      auto it = b.program.function_index.find(fn);
      if (it == b.program.function_index.end())
        throw LinkError(b.manifest.package + ": component '" + c.name + "' names entry function '" + fn +
                        "' which the program does not define");
      b.entries.push_back({c.name, it->second});
    }
  }
  if (!b.has_sinks())
    b.diagnostics.push_back({b.manifest.package, 0, "program has no sink statements"});
  return b;
}

AppBundle load_bundle(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::is_regular_file(manifest_path))
    throw LinkError("bundle " + dir.string() + " has no manifest.json");
  Manifest manifest = parse_manifest(read_file(manifest_path), manifest_path.string());

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".alir") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw LinkError("bundle " + dir.string() + " has no .alir program files");

  std::vector<std::pair<std::string, std::string>> sources;
  for (const auto& f : files) sources.emplace_back(f.string(), read_file(f));
  return link_bundle(std::move(manifest), parse_alir(sources), dir);
}

std::vector<fs::path> find_bundles(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory() && fs::is_regular_file(e.path() / "manifest.json")) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

PermissionTable merge_permission_table(const PolicySet& policy,
                                       const std::vector<const Manifest*>& manifests) {
  // Collect every declaration first so conflicts are resolved without
  // depending on input order.
  std::map<std::string, std::set<ProtectionLevel>> declared;
  for (const auto& [name, lvl] : policy.permission_table) declared[name].insert(lvl);
  for (const auto* m : manifests)
    for (const auto& p : m->declared_permissions) declared[p.name].insert(p.protection_level);

  PermissionTable table;
  for (const auto& [name, levels] : declared) {
    ProtectionLevel strongest = *levels.begin();
    for (auto l : levels)
      if (protection_rank(l) > protection_rank(strongest)) strongest = l;
    table.levels[name] = strongest;
    if (levels.size() > 1)
      table.diagnostics.push_back({"permissions", 0,
                                   "permission '" + name + "' declared at several protection levels; using " +
                                       std::string(to_string(strongest))});
  }
  return table;
}

PolicySet link_policy(const PolicySet& policy, const std::vector<const AppBundle*>& bundles,
                      std::vector<Diagnostic>* diagnostics) {
  std::vector<const Manifest*> manifests;
  for (const auto* b : bundles) manifests.push_back(&b->manifest);
  auto table = merge_permission_table(policy, manifests);
  PolicySet out = policy;
  out.permission_table = table.levels;
  std::vector<Diagnostic> diags = table.diagnostics;
  for (const auto& s : out.subjects)
    for (const auto& p : s.holds)
      if (!out.permission_table.count(p))
        diags.push_back({"policy", 0, "subject '" + s.id + "' holds undeclared permission '" + p + "'"});
  if (diagnostics) diagnostics->insert(diagnostics->end(), diags.begin(), diags.end());
  return out;
}

}  // namespace pathsentry::frontend
