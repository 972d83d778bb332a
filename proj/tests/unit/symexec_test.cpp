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

#include <doctest.h>

#include "pathsentry/frontend/alir.hpp"
#include "pathsentry/frontend/bundle.hpp"
#include "pathsentry/graph/taint.hpp"
#include "pathsentry/policy/policy.hpp"
#include "pathsentry/symexec/symexec.hpp"
#include "support.hpp"

using namespace pathsentry;
using namespace pathsentry::symexec;
using frontend::StmtId;

namespace {

std::vector<graph::TaintFlow> external_flows(const graph::Pdg& pdg) {
  return graph::forward_taint(pdg, graph::external_sources(pdg));
}

StmtId sink_on_line(const frontend::AlirProgram& prog, int line) {
  for (const auto& fn : prog.functions)
    for (const auto& s : fn.body)
      if (s.line == line && s.op == frontend::Op::Sink) return s.id;
  FAIL("no sink on line " << line);
  return {};
}

frontend::AppBundle inline_bundle(const std::string& program, bool exported = true) {
  auto m = frontend::parse_manifest(std::string(R"({"package": "com.t", "privilegeLevel": "LV2", "components": [
    {"name": "S", "kind": "service", "exported": )") + (exported ? "true" : "false") +
                                    R"(, "permission": null, "entryFunctions": ["run"]}],
    "declaredPermissions": [], "usesPermissions": []})");
  return frontend::link_bundle(m, frontend::parse_alir(program));
}

}  // namespace

TEST_SUITE("symexec") {

TEST_CASE("pathname api summaries") {
  CHECK(api_summary("ExternalStorageDirectory", "com.x") == "/storage/emulated/0");
  CHECK(api_summary("FilesDir", "com.x") == "/data/data/com.x/files");
  CHECK(api_summary("CacheDir", "com.x") == "/data/data/com.x/cache");
  CHECK(api_summary("ExternalFilesDir", "com.x") == "/storage/emulated/0/Android/data/com.x/files");
  CHECK_THROWS_AS(api_summary("RootDir", "com.x"), std::invalid_argument);
  for (const auto& api : frontend::known_env_apis()) CHECK_NOTHROW(api_summary(api, "p"));
}

TEST_CASE("wallpaper flow condition") {
  auto b = frontend::load_bundle(testing::fixture("wallpaper"));
  auto pdg = graph::build_pdg(b.program, b.entries);
  StmtId sink = sink_on_line(b.program, 27);
  auto flows = graph::forward_taint(pdg, graph::external_sources(pdg), {sink});
  REQUIRE(flows.size() == 1);
  auto pc = exec_path(pdg, flows[0], b.package());

  REQUIRE(pc.atoms.size() == 1);
  const auto& a = pc.atoms[0];
  CHECK(a.kind == Atom::Kind::UriMatch);
  CHECK(a.table == "WALLPAPER");
  CHECK(a.code == 10);
  CHECK_FALSE(a.negated);
  CHECK(equal(a.lhs, StrExpr::sym({Symbol::Kind::Uri, ""})));

  auto leaves = concat_leaves(pc.sink_path);
  REQUIRE(leaves.size() == 3);
  CHECK(literal_prefix(pc.sink_path) == "/data/data/com.oneplus.wallpaper/files/image/");
  CHECK(equal(leaves[2], StrExpr::last_seg(StrExpr::sym({Symbol::Kind::Uri, ""}))));
  CHECK(pc.sink_kind == SinkKind::Open);
  CHECK_FALSE(pc.sanitized);
  CHECK(pc.symbols == std::set<Symbol>{{Symbol::Kind::Uri, ""}});
  CHECK(pc.uri_tables.at("WALLPAPER").size() == 2);
}

TEST_CASE("canonical before the sink marks the path sanitized") {
  auto b = inline_bundle("fn run() {\n  p = getextra \"p\"\n  q = canonical p\n  sink open q\n  return\n}\n");
  auto pdg = graph::build_pdg(b.program, b.entries);
  auto flows = external_flows(pdg);
  REQUIRE(flows.size() == 1);
  auto pc = exec_path(pdg, flows[0], b.package());
  CHECK(pc.sanitized);
  CHECK_FALSE(pc.mixed);
  CHECK(pc.atoms.empty());
  CHECK(sym_occurrences(pc.sink_path).at(0).under_canonical);
}

TEST_CASE("partly canonical sink path is mixed") {
  auto b = frontend::load_bundle(testing::fixture("mixed"));
  auto pdg = graph::build_pdg(b.program, b.entries);
  auto flows = external_flows(pdg);
  REQUIRE(flows.size() == 2);
  for (const auto& f : flows) {
    auto pc = exec_path(pdg, f, b.package());
    CHECK_FALSE(pc.sanitized);
    CHECK(pc.mixed);
  }
}

TEST_CASE("branch polarity follows the path") {
  auto b = frontend::load_bundle(testing::fixture("gameinstaller"));
  auto pdg = graph::build_pdg(b.program, b.entries);
  auto flows = external_flows(pdg);
  REQUIRE(flows.size() == 1);
  auto pc = exec_path(pdg, flows[0], b.package());
  REQUIRE(pc.atoms.size() == 2);
  CHECK(pc.atoms[0].kind == Atom::Kind::StartsWith);
  CHECK_FALSE(pc.atoms[0].negated);  // fell through "!startswith ... goto reject"
  CHECK(pc.atoms[1].kind == Atom::Kind::Contains);
  CHECK(pc.atoms[1].negated);
  CHECK(describe(pc.atoms[1]) == "!contains((sym extra:apk), \"..\")");
}

TEST_CASE("parameters carry values into callees") {
  auto b = frontend::load_bundle(testing::fixture("dualentry"));
  auto pdg = graph::build_pdg(b.program, b.entries);
  StmtId sink = sink_on_line(b.program, 36);
  auto flows = graph::forward_taint(pdg, graph::external_sources(pdg), {sink});
  REQUIRE(flows.size() == 2);
  for (const auto& f : flows) {
    auto pc = exec_path(pdg, f, b.package());
    CHECK(to_prefix(pc.sink_path) ==
          "(concat (concat (lit \"/data/data/com.oem.dualentry/files\") (lit \"/\")) (sym extra:file))");
  }
}

TEST_CASE("resetreason literal sink") {
  auto b = frontend::load_bundle(testing::fixture("resetreason"));
  auto pdg = graph::build_pdg(b.program, b.entries);
  auto flows = graph::enumerate_flows(pdg).flows;
  StmtId sink = sink_on_line(b.program, 17);
  std::set<frontend::EntryPoint> all(b.entries.begin(), b.entries.end());
  auto pcs = exec_all_entries(pdg, flows, sink, all, b.package());
  REQUIRE(pcs.size() == 1);
  CHECK(pcs[0].atoms.empty());
  CHECK(symbols_of(pcs[0].sink_path).empty());
  CHECK(to_prefix(pcs[0].sink_path) == "(lit \"/data/log/power_off_resetreason.txt\")");
}

TEST_CASE("internal sink reached from two entries") {
  auto b = frontend::load_bundle(testing::fixture("dualentry"));
  auto pdg = graph::build_pdg(b.program, b.entries);
  auto flows = graph::enumerate_flows(pdg).flows;
  StmtId sink = sink_on_line(b.program, 42);
  std::set<frontend::EntryPoint> all(b.entries.begin(), b.entries.end());
  auto pcs = exec_all_entries(pdg, flows, sink, all, b.package());
  REQUIRE(pcs.size() == 2);
  CHECK(pcs[0].flow.entry != pcs[1].flow.entry);
}

TEST_CASE("internal sink behind an unexported component") {
  auto b = inline_bundle("fn run() {\n  p = const \"/data/log/x\"\n  sink create p\n  return\n}\n", false);
  auto pdg = graph::build_pdg(b.program, b.entries);
  auto flows = graph::enumerate_flows(pdg).flows;
  auto policy = frontend::parse_policy("subject com.t level 2\n");
  auto ec = policy::entry_constraints(b, policy);
  auto reachable = policy::attacker_entries(b, ec, policy::AttackerLevel::LV2root);
  CHECK(reachable.empty());
  CHECK(exec_all_entries(pdg, flows, {0, 1}, reachable, b.package()).empty());
}

TEST_CASE("atom budget") {
  std::string text = "fn run() {\n  x = getextra \"x\"\n";
  for (int i = 0; i < 5; ++i) text += "  if x == \"v" + std::to_string(i) + "\" goto out\n";
  text += "  sink open x\n  label out\n  return\n}\n";
  auto b = inline_bundle(text);
  auto pdg = graph::build_pdg(b.program, b.entries);
  graph::TaintFlow flow;
  for (const auto& f : external_flows(pdg)) flow = f;
  CHECK(exec_path(pdg, flow, b.package()).atoms.size() == 5);
  CHECK_THROWS_AS(exec_path(pdg, flow, b.package(), ExecBudget{4}), std::length_error);
}

TEST_CASE("a path that skips a branch edge is rejected") {
  auto b = frontend::load_bundle(testing::fixture("wallpaper"));
  auto pdg = graph::build_pdg(b.program, b.entries);
  auto flows = graph::forward_taint(pdg, graph::external_sources(pdg), {sink_on_line(b.program, 27)});
  REQUIRE(flows.size() == 1);
  auto broken = flows[0];
  broken.control_path.erase(broken.control_path.begin() + 3);
  CHECK_THROWS_AS(exec_path(pdg, broken, b.package()), InternalError);
}

}  // TEST_SUITE
