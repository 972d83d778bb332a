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

#include "pathsentry/cli/exploit.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace pathsentry::cli {

ExploitSkeleton make_exploit(const detect::Finding& f, const frontend::AppBundle& bundle) {
  ExploitSkeleton sk;
  sk.finding_id = f.id;
  Payload payload = f.payload.value_or(Payload{f.component, {}, std::nullopt});
  payload.component = f.component;

  json& l = sk.launch;
  l["schema"] = kLaunchSchema;
  l["finding"] = f.id;
  l["class"] = to_string(f.cls);
  l["app"] = f.app;
  l["component"] = f.component;
  l["entry"] = f.entry;
  l["attackerLevel"] = policy::to_string(f.attacker_level);
  l["extras"] = to_json(payload)["extras"];
  l["uri"] = payload.uri ? json(*payload.uri) : json(nullptr);
  l["plantedLinks"] = json::array();
  for (const auto& [link, target] : f.planted_links) l["plantedLinks"].push_back({{"link", link}, {"target", target}});
  l["expect"] = {{"sink", f.sink.file + ":" + std::to_string(f.sink.line)},
                 {"kind", to_string(f.sink.kind)},
                 {"sinkPath", f.sink_path},
                 {"target", f.target}};

  const auto* comp = bundle.manifest.find_component(f.component);
  std::ostringstream p;
  p << "# " << to_string(f.cls) << " exploit for " << f.app << "/" << f.component << "\n\n";
  p << "Write an Android app component that delivers the payload below to the target component"
       " and shows that the sink opens the resource named under Expected effect.\n\n";
  p << "## Manifest entry\n\n";
  p << "- package: " << bundle.package() << "\n";
  if (comp) {
    p << "- component: " << comp->name << " (" << frontend::to_string(comp->kind) << ")\n";
    p << "- exported: " << (comp->exported ? "true" : "false") << "\n";
    p << "- permission: " << comp->permission.value_or("none") << "\n";
  }
  p << "- entry function: " << f.entry << "\n";
  p << "- attacker level: " << policy::to_string(f.attacker_level) << "\n\n";
  p << "## Method invocation path\n\n";
  for (const auto& line : f.flow_lines) p << "- " << line << "\n";
  p << "\n## Path condition\n\n";
  for (const auto& c : f.condition_summary) p << "- `" << c << "`\n";
  p << "\n## Sink\n\n" << to_string(f.sink.kind) << " at " << f.sink.file << ":" << f.sink.line << " in "
    << f.sink.function << "\n\n";
  p << "## Payload\n\n";
  if (payload.uri) p << "- uri: `" << *payload.uri << "`\n";
  for (const auto& [k, v] : payload.extras) p << "- extra `" << k << "`: `" << v << "`\n";
  if (!payload.uri && payload.extras.empty()) p << "- no input; the component only has to run\n";
  if (!f.planted_links.empty()) {
    p << "\nBefore launching, plant these symbolic links:\n\n";
    for (const auto& [link, target] : f.planted_links) p << "- `" << link << "` -> `" << target << "`\n";
  }
  p << "\n## Expected effect\n\nThe sink resolves `" << f.sink_path << "` to `" << f.target << "`.\n";

  std::set<std::string> files;
  for (const auto& fn : bundle.program.functions) files.insert(fn.file);
  p << "\n## Decompiled code\n";
  for (const auto& file : files) {
    std::string text;
    try {
      text = frontend::read_file(file);
    } catch (const std::exception&) {
      continue;
    }
    p << "\n### " << std::filesystem::path(file).filename().string() << "\n\n```\n" << text
      << (text.empty() || text.back() == '\n' ? "" : "\n") << "```\n";
  }
  sk.prompt = p.str();
  return sk;
}

void write_exploit(const ExploitSkeleton& sk, const std::filesystem::path& dir) {
  auto d = dir / sk.finding_id;
  std::filesystem::create_directories(d);
  std::ofstream(d / "launch.json") << dump(sk.launch);
  std::ofstream(d / "prompt.md") << sk.prompt;
}

LaunchRecipe parse_launch(const json& j) {
  if (j.value("schema", "") != kLaunchSchema) throw ParseError("launch.json", 0, "not a launch recipe");
  LaunchRecipe r;
  r.finding = j.at("finding").get<std::string>();
  r.component = j.at("component").get<std::string>();
  r.entry = j.at("entry").get<std::string>();
  r.payload.component = r.component;
  for (const auto& [k, v] : j.at("extras").items()) r.payload.extras[k] = v.get<std::string>();
  if (!j.at("uri").is_null()) r.payload.uri = j.at("uri").get<std::string>();
  for (const auto& link : j.at("plantedLinks"))
    r.fs.planted_links[link.at("link").get<std::string>()] = link.at("target").get<std::string>();
  return r;
}

}  // namespace pathsentry::cli
