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

#include "pathsentry/cli/report.hpp"

namespace pathsentry::cli {

using detect::Finding;
using detect::FindingClass;
using detect::Validation;

std::size_t Report::finding_count() const {
  std::size_t n = 0;
  for (const auto& b : bundles) n += b.findings.size();
  return n;
}

json to_json(const Payload& p) {
  json j;
  j["component"] = p.component;
  j["extras"] = json::object();
  for (const auto& [k, v] : p.extras) j["extras"][k] = v;
  j["uri"] = p.uri ? json(*p.uri) : json(nullptr);
  return j;
}

Payload payload_from_json(const json& j) {
  Payload p;
  p.component = j.value("component", "");
  if (j.contains("extras"))
    for (const auto& [k, v] : j.at("extras").items()) p.extras[k] = v.get<std::string>();
  if (j.contains("uri") && !j.at("uri").is_null()) p.uri = j.at("uri").get<std::string>();
  return p;
}

json to_json(const Finding& f) {
  json j;
  j["id"] = f.id;
  j["class"] = to_string(f.cls);
  j["app"] = f.app;
  j["component"] = f.component;
  j["entry"] = f.entry;
  j["attackerLevel"] = policy::to_string(f.attacker_level);
  j["requiredPermissions"] = f.required_permissions;
  j["sink"] = {{"function", f.sink.function},
               {"file", f.sink.file},
               {"line", f.sink.line},
               {"kind", to_string(f.sink.kind)},
               {"arg", f.sink.arg_index}};
  j["flow"] = f.flow_lines;
  j["conditionSummary"] = f.condition_summary;
  j["payload"] = f.payload ? to_json(*f.payload) : json(nullptr);
  j["sinkPath"] = f.sink_path;
  j["target"] = f.target;
  j["junction"] = f.junction.empty() ? json(nullptr) : json(f.junction);
  j["plantedLinks"] = json::object();
  for (const auto& [k, v] : f.planted_links) j["plantedLinks"][k] = v;
  j["validated"] = to_string(f.validated);
  j["validationDetail"] = f.validation_detail;
  j["granularity"] = {{"controlPaths", f.control_paths}, {"apps", 1}};
  return j;
}

json to_json(const detect::Statistics& s) {
  return {{"entryCount", s.entry_count},
          {"sourceCounts", {{"total", s.sources_total}, {"internal", s.sources_internal}, {"external", s.sources_external}}},
          {"attackableSourceCount", s.attackable_sources},
          {"sinkCount", s.sink_count},
          {"flowsPreConstraint", s.flows_pre},
          {"flowsPostConstraint", s.flows_post},
          {"flowsTruncated", s.flows_truncated}};
}

namespace {

json diagnostics_json(const std::vector<Diagnostic>& ds) {
  json out = json::array();
  for (const auto& d : ds) out.push_back({{"source", d.source}, {"line", d.line}, {"message", d.message}});
  return out;
}

std::vector<Diagnostic> diagnostics_from(const json& j) {
  std::vector<Diagnostic> out;
  for (const auto& d : j) out.push_back({d.at("source").get<std::string>(), d.at("line").get<int>(), d.at("message").get<std::string>()});
  return out;
}

template <class E>
E parse_enum(const std::string& text, std::initializer_list<E> values) {
  for (E v : values)
    if (detect::to_string(v) == text) return v;
  throw ParseError("report", 0, "unknown enumerator '" + text + "'");
}

}  // namespace

json to_json(const Report& r) {
  json j;
  j["schema"] = kReportSchema;
  j["toolVersion"] = r.tool_version;
  j["attackerLevel"] = r.attacker_level;
  std::size_t pre = 0, post = 0, confirmed = 0;
  json bundles = json::array();
  for (const auto& b : r.bundles) {
    json jb;
    jb["bundle"] = b.bundle;
    jb["app"] = b.app;
    jb["statistics"] = to_json(b.statistics);
    jb["findings"] = json::array();
    for (const auto& f : b.findings) {
      jb["findings"].push_back(to_json(f));
      confirmed += f.validated == Validation::Confirmed ? 1 : 0;
    }
    jb["verdicts"] = b.verdicts;
    jb["diagnostics"] = diagnostics_json(b.diagnostics);
    pre += b.statistics.flows_pre;
    post += b.statistics.flows_post;
    bundles.push_back(std::move(jb));
  }
  j["bundles"] = std::move(bundles);
  j["summary"] = {{"bundles", r.bundles.size()},
                  {"findings", r.finding_count()},
                  {"confirmed", confirmed},
                  {"flowsPreConstraint", pre},
                  {"flowsPostConstraint", post}};
  j["diagnostics"] = diagnostics_json(r.diagnostics);
  return j;
}

Report report_from_json(const json& j) {
  if (j.value("schema", "") != kReportSchema) throw ParseError("report", 0, "not a " + std::string(kReportSchema) + " document");
  Report r;
  r.tool_version = j.at("toolVersion").get<std::string>();
  r.attacker_level = j.at("attackerLevel").get<std::string>();
  for (const auto& jb : j.at("bundles")) {
    BundleReport b;
    b.bundle = jb.at("bundle").get<std::string>();
    b.app = jb.at("app").get<std::string>();
    const auto& js = jb.at("statistics");
    auto& s = b.statistics;
    s.entry_count = js.at("entryCount").get<std::size_t>();
    s.sources_total = js.at("sourceCounts").at("total").get<std::size_t>();
    s.sources_internal = js.at("sourceCounts").at("internal").get<std::size_t>();
    s.sources_external = js.at("sourceCounts").at("external").get<std::size_t>();
    s.attackable_sources = js.at("attackableSourceCount").get<std::size_t>();
    s.sink_count = js.at("sinkCount").get<std::size_t>();
    s.flows_pre = js.at("flowsPreConstraint").get<std::size_t>();
    s.flows_post = js.at("flowsPostConstraint").get<std::size_t>();
    s.flows_truncated = js.at("flowsTruncated").get<bool>();
    for (const auto& jf : jb.at("findings")) {
      Finding f;
      f.id = jf.at("id").get<std::string>();
      f.cls = parse_enum(jf.at("class").get<std::string>(),
                         {FindingClass::PathTraversal, FindingClass::Hijacking, FindingClass::Luring});
      f.app = jf.at("app").get<std::string>();
      f.component = jf.at("component").get<std::string>();
      f.entry = jf.at("entry").get<std::string>();
      auto lv = policy::parse_attacker_level(jf.at("attackerLevel").get<std::string>());
      if (!lv) throw ParseError("report", 0, "bad attacker level");
      f.attacker_level = *lv;
      f.required_permissions = jf.at("requiredPermissions").get<std::vector<std::string>>();
      const auto& js2 = jf.at("sink");
      f.sink.function = js2.at("function").get<std::string>();
      f.sink.file = js2.at("file").get<std::string>();
      f.sink.line = js2.at("line").get<int>();
      auto kind = parse_sink_kind(js2.at("kind").get<std::string>());
      if (!kind) throw ParseError("report", 0, "bad sink kind");
      f.sink.kind = *kind;
      f.sink.arg_index = js2.at("arg").get<int>();
      f.flow_lines = jf.at("flow").get<std::vector<std::string>>();
      f.condition_summary = jf.at("conditionSummary").get<std::vector<std::string>>();
      if (!jf.at("payload").is_null()) f.payload = payload_from_json(jf.at("payload"));
      f.sink_path = jf.at("sinkPath").get<std::string>();
      f.target = jf.at("target").get<std::string>();
      if (!jf.at("junction").is_null()) f.junction = jf.at("junction").get<std::string>();
      for (const auto& [k, v] : jf.at("plantedLinks").items()) f.planted_links[k] = v.get<std::string>();
      f.validated = parse_enum(jf.at("validated").get<std::string>(),
                               {Validation::Confirmed, Validation::Failed, Validation::NotRun});
      f.validation_detail = jf.at("validationDetail").get<std::string>();
      f.control_paths = jf.at("granularity").at("controlPaths").get<std::size_t>();
      b.findings.push_back(std::move(f));
    }
    b.verdicts = jb.at("verdicts").get<std::map<std::string, std::map<std::string, std::size_t>>>();
    b.diagnostics = diagnostics_from(jb.at("diagnostics"));
    r.bundles.push_back(std::move(b));
  }
  r.diagnostics = diagnostics_from(j.at("diagnostics"));
  return r;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace pathsentry::cli
