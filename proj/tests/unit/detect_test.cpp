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

#include "pathsentry/constraints/pathops.hpp"
#include "pathsentry/constraints/smtlib.hpp"
#include "pathsentry/detect/detect.hpp"
#include "pathsentry/detect/interpreter.hpp"
#include "pathsentry/frontend/bundle.hpp"
#include "support.hpp"

using namespace pathsentry;
using namespace pathsentry::detect;
using policy::AttackerLevel;

namespace {

struct CorpusRun {
  cli::Inputs inputs;
  std::vector<cli::BundleResult> results;
};

const CorpusRun& corpus(AttackerLevel level) {
  static std::map<AttackerLevel, CorpusRun> cache;
  auto it = cache.find(level);
  if (it == cache.end()) {
    CorpusRun run{testing::load_corpus(), {}};
    run.results = cli::analyze_all(run.inputs, level, {}, 4);
    it = cache.emplace(level, std::move(run)).first;
  }
  return it->second;
}

const cli::BundleResult& result_for(AttackerLevel level, std::string_view bundle) {
  for (const auto& r : corpus(level).results)
    if (r.report.bundle == bundle) return r;
  FAIL("no bundle " << bundle);
  throw std::logic_error("unreachable");
}

struct Single {
  frontend::AppBundle bundle;
  frontend::PolicySet policy;
};

Single single(std::string_view name, const std::string& policy_text) {
  Single s{frontend::load_bundle(testing::fixture(name)), {}};
  s.policy = frontend::link_policy(frontend::parse_policy(policy_text), {&s.bundle});
  return s;
}

std::string base_policy_text() { return frontend::read_file(testing::base_policy()); }

std::string without_line(std::string text, const std::string& line) {
  auto pos = text.find(line + "\n");
  REQUIRE(pos != std::string::npos);
  return text.erase(pos, line.size() + 1);
}

}  // namespace

TEST_SUITE("detect") {

TEST_CASE("corpus findings match the fixture ledgers") {
  for (auto level : {AttackerLevel::LV1, AttackerLevel::LV2root}) {
    const auto& run = corpus(level);
    for (std::size_t i = 0; i < run.results.size(); ++i) {
      const auto& rep = run.results[i].report;
      CHECK_MESSAGE(testing::actual_findings(rep) ==
                        testing::expected_findings(run.inputs.bundles[i].dir, level),
                    rep.bundle << " at " << policy::to_string(level));
      for (const auto& f : rep.findings)
        CHECK_MESSAGE(f.validated == Validation::Confirmed, f.id << ": " << f.validation_detail);
    }
  }
}

TEST_CASE("wallpaper traversal reaches shared_prefs") {
  const auto& r = result_for(AttackerLevel::LV1, "wallpaper");
  REQUIRE(r.report.findings.size() == 1);
  const auto& f = r.report.findings[0];
  CHECK(f.cls == FindingClass::PathTraversal);
  CHECK(f.component == "WallpaperProvider");
  CHECK(constraints::path_covers("/data/data/com.oneplus.wallpaper/shared_prefs", f.sink_path));
  CHECK(f.required_permissions.empty());
  REQUIRE(f.payload);
  CHECK(f.payload->uri.has_value());
}

TEST_CASE("client provider needs the signature permission") {
  CHECK(result_for(AttackerLevel::LV1, "sectelephony").report.findings.empty());
  const auto& r = result_for(AttackerLevel::LV2root, "sectelephony");
  REQUIRE(r.report.findings.size() == 2);
  const auto& a = r.report.findings[0];
  const auto& b = r.report.findings[1];
  CHECK(a.sink.stmt == b.sink.stmt);
  CHECK(a.flow != b.flow);
  CHECK(a.id != b.id);
  CHECK(a.required_permissions == std::vector<std::string>{"com.oem.permission.SECURE_TELEPHONY"});
}

TEST_CASE("findings never disappear at the stronger attacker level") {
  const auto& lv1 = corpus(AttackerLevel::LV1).results;
  const auto& lv2 = corpus(AttackerLevel::LV2root).results;
  REQUIRE(lv1.size() == lv2.size());
  for (std::size_t i = 0; i < lv1.size(); ++i) {
    auto weak = testing::actual_findings(lv1[i].report);
    auto strong = testing::actual_findings(lv2[i].report);
    CHECK_MESSAGE(std::includes(strong.begin(), strong.end(), weak.begin(), weak.end()), lv1[i].report.bundle);
  }
}

TEST_CASE("canonical sanitizer removes traversal and luring findings") {
  auto inputs = testing::load_corpus();
  for (const auto& b : inputs.bundles) {
    auto patched = testing::with_canonical_sinks(b);
    for (auto level : {AttackerLevel::LV1, AttackerLevel::LV2root}) {
      auto r = cli::analyze_bundle(patched, inputs.policy, level, {});
      for (const auto& f : r.report.findings) {
        CHECK_MESSAGE(f.cls == FindingClass::Hijacking, f.id);
        CHECK_MESSAGE(symexec::symbols_of(f.condition->sink_path).empty(), f.id);
      }
      for (const auto& [detector, outcomes] : r.report.verdicts)
        if (detector != "hijacking" && outcomes.count("finding")) FAIL_CHECK(b.dir.filename() << " " << detector);
    }
  }
}

TEST_CASE("sanitized wallpaper has no findings") {
  auto inputs = testing::load_corpus();
  for (const auto& b : inputs.bundles) {
    if (b.dir.filename() != "wallpaper") continue;
    auto r = cli::analyze_bundle(testing::with_canonical_sinks(b), inputs.policy, AttackerLevel::LV1, {});
    CHECK(r.report.findings.empty());
    CHECK(r.report.verdicts.at("traversal").count("sanitized"));
  }
}

TEST_CASE("hijacking on a writable log directory") {
  auto s = single("resetreason", base_policy_text());
  auto a = prepare(s.bundle, s.policy, AttackerLevel::LV1);
  auto found = detect_hijacking(*a);
  REQUIRE(found.size() == 1);
  CHECK(found[0].target == "/data/log");
  CHECK(found[0].sink_path == "/data/log/power_off_resetreason.txt");
  CHECK_FALSE(found[0].payload->uri.has_value());
}

TEST_CASE("hijacking is pruned without the log write rule") {
  auto s = single("resetreason", without_line(base_policy_text(), "allow LV1 /data/log write"));
  auto a = prepare(s.bundle, s.policy, AttackerLevel::LV1);
  CHECK(detect_hijacking(*a).empty());
  bool pruned = false;
  for (const auto& v : a->verdicts) pruned |= v.detector == "hijacking" && v.outcome == "file-pruned";
  CHECK(pruned);
  for (const auto& c : a->solver_calls) CHECK(c.detector != "hijacking");
}

TEST_CASE("reads from legacy external storage") {
  auto s = single("sdm", base_policy_text());
  auto a = prepare(s.bundle, s.policy, AttackerLevel::LV1);
  auto found = detect_hijacking(*a);
  REQUIRE(found.size() == 1);
  CHECK(found[0].sink_path == "/storage/emulated/0/cfg.dat");
  CHECK(found[0].target == "/storage/emulated/0");
}

TEST_CASE("private literal sinks are not hijackable") {
  auto s = single("dualentry", base_policy_text());
  auto a = prepare(s.bundle, s.policy, AttackerLevel::LV1);
  CHECK(detect_hijacking(*a).empty());
}

TEST_CASE("luring through a normal-level guard") {
  auto s = single("gameinstaller", base_policy_text());
  auto a = prepare(s.bundle, s.policy, AttackerLevel::LV1);
  auto found = detect_luring(*a);
  REQUIRE(found.size() == 1);
  const auto& f = found[0];
  CHECK_FALSE(f.junction.empty());
  CHECK(constraints::path_covers("/storage/emulated/0", f.junction));
  CHECK(f.planted_links.count(f.junction));
  CHECK(constraints::path_covers("/data/app", f.target));
  CHECK(f.validated == Validation::Confirmed);
}

TEST_CASE("luring needs a writable goal directory") {
  auto text = without_line(base_policy_text(), "allow LV1 /storage/emulated/0 readwrite");
  auto s = single("gameinstaller", text);
  auto a = prepare(s.bundle, s.policy, AttackerLevel::LV1);
  CHECK(detect_luring(*a).empty());
}

TEST_CASE("luring reports independently and the report keeps the traversal") {
  auto s = single("wallpaper", base_policy_text());
  auto alone = prepare(s.bundle, s.policy, AttackerLevel::LV1);
  auto lures = detect_luring(*alone);
  REQUIRE_FALSE(lures.empty());

  auto a = prepare(s.bundle, s.policy, AttackerLevel::LV1);
  auto all = detect_all(*a);
  REQUIRE(all.size() == 1);
  CHECK(all[0].cls == FindingClass::PathTraversal);
  CHECK(all[0].sink.stmt == lures[0].sink.stmt);
  CHECK(all[0].flow == lures[0].flow);

  std::vector<Finding> mixed{lures[0], all[0]};
  auto kept = deduplicate(mixed);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].cls == FindingClass::PathTraversal);
}

TEST_CASE("every confirmed finding replays under its prescribed filesystem") {
  for (auto level : {AttackerLevel::LV1, AttackerLevel::LV2root})
    for (const auto& r : corpus(level).results)
      for (const auto& f : r.report.findings) {
        REQUIRE(f.payload);
        auto [v, detail] = validate(*r.analysis, f, *f.payload, prescribed_fs(f));
        CHECK_MESSAGE(v == Validation::Confirmed, f.id << ": " << detail);
        const testing::ConditionOracle oracle{*f.condition, f.goal};
        CHECK_MESSAGE(oracle.satisfies(*f.payload), f.id);
      }
}

TEST_CASE("interpreter opens the wallpaper's private file") {
  const auto& r = result_for(AttackerLevel::LV1, "wallpaper");
  const auto& f = r.report.findings.at(0);
  auto trace = interpret(*r.analysis->bundle, f.entry_point, *f.payload, prescribed_fs(f), r.analysis->files);
  CHECK(trace.outcome == Trace::Outcome::Completed);
  const SinkEvent* e = trace.first_at(f.sink.stmt);
  REQUIRE(e);
  CHECK(e->kind == SinkKind::Open);
  CHECK(e->canonical.at(0).rfind("/data/data/com.oneplus.wallpaper/shared_prefs/", 0) == 0);
  CHECK(e->resolved.at(0).target == e->canonical.at(0));
  CHECK(e->target_exists.at(0));
}

TEST_CASE("interpreter stops on a missing extra") {
  auto b = frontend::load_bundle(testing::fixture("gameinstaller"));
  auto inputs = testing::load_corpus();
  auto fc = policy::file_constraints(inputs.policy, b.package(), policy::make_attacker(inputs.policy, AttackerLevel::LV1));
  Payload empty;
  empty.component = "InstallProvider";
  auto trace = interpret(b, b.entries.at(0), empty, {}, fc);
  CHECK(trace.outcome == Trace::Outcome::IncompletePayload);
  CHECK(trace.sinks.empty());
}

TEST_CASE("interpreter follows a planted link") {
  auto b = frontend::load_bundle(testing::fixture("resetreason"));
  auto inputs = testing::load_corpus();
  auto fc = policy::file_constraints(inputs.policy, b.package(), policy::make_attacker(inputs.policy, AttackerLevel::LV1));
  FsModel fs;
  fs.planted_links["/data/log/power_off_resetreason.txt"] = "/data/data/com.oem.resetreason/databases/state.db";
  Payload p;
  auto trace = interpret(b, b.entries.at(0), p, fs, fc);
  REQUIRE(trace.sinks.size() == 1);
  CHECK(trace.sinks[0].resolved.at(0).target == "/data/data/com.oem.resetreason/databases/state.db");
  CHECK(trace.sinks[0].resolved.at(0).junctions == std::vector<std::string>{"/data/log/power_off_resetreason.txt"});
}

TEST_CASE("interpreter step budget") {
  auto b = frontend::load_bundle(testing::fixture("settingsdump"));
  auto inputs = testing::load_corpus();
  auto fc = policy::file_constraints(inputs.policy, b.package(), policy::make_attacker(inputs.policy, AttackerLevel::LV1));
  Payload p;
  p.extras = {{"mode", ""}, {"file", "x"}};
  int dump = b.program.function_index.at("dump");
  frontend::EntryPoint entry;
  for (const auto& e : b.entries)
    if (e.function == dump) entry = e;
  CHECK(interpret(b, entry, p, {}, fc, 5).outcome == Trace::Outcome::StepBudget);
  auto full = interpret(b, entry, p, {}, fc);
  CHECK(full.outcome == Trace::Outcome::Completed);
  CHECK(full.sinks.size() == 2);
}

TEST_CASE("literal values of internal sinks") {
  auto b = frontend::load_bundle(testing::fixture("sdm"));
  auto pdg = graph::build_pdg(b.program, b.entries);
  auto sink = *graph::sink_statements(pdg).begin();
  CHECK(literal_values(pdg, b.package(), sink, 0) == std::set<std::string>{"/storage/emulated/0/cfg.dat"});
  auto m = frontend::load_bundle(testing::fixture("mixed"));
  auto mpdg = graph::build_pdg(m.program, m.entries);
  CHECK(literal_values(mpdg, m.package(), *graph::sink_statements(mpdg).begin(), 0).empty());
}

TEST_CASE("statistics of a sink-free app") {
  const auto& r = result_for(AttackerLevel::LV1, "calculator");
  CHECK(r.report.statistics.sink_count == 0);
  CHECK(r.report.statistics.flows_pre == 0);
  CHECK(r.report.statistics.flows_post == 0);
}

TEST_CASE("statistics count flows before and after constraints") {
  const auto& s = result_for(AttackerLevel::LV1, "wallpaper").report.statistics;
  CHECK(s.entry_count == 2);
  CHECK(s.sink_count == 2);
  CHECK(s.flows_pre >= 1);
  CHECK(s.flows_post == 1);
  CHECK_FALSE(s.flows_truncated);
  CHECK(s.sources_total == s.sources_internal + s.sources_external);
}

TEST_CASE("analysis is deterministic") {
  auto s = single("sectelephony", base_policy_text());
  auto a = prepare(s.bundle, s.policy, AttackerLevel::LV2root);
  auto b = prepare(s.bundle, s.policy, AttackerLevel::LV2root);
  auto x = detect_all(*a);
  auto y = detect_all(*b);
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i].id == y[i].id);
    CHECK(x[i].payload == y[i].payload);
  }
}

TEST_CASE("unknown victim subject") {
  auto b = frontend::load_bundle(testing::fixture("calculator"));
  frontend::PolicySet empty;
  CHECK_THROWS_AS(prepare(b, empty, AttackerLevel::LV1), std::invalid_argument);
}

TEST_CASE("external solver agrees on every corpus query") {
  auto z3 = testing::z3_binary();
  if (!z3) {
    MESSAGE("z3 not found; skipped");
    return;
  }
  std::size_t compared = 0;
  for (auto level : {AttackerLevel::LV1, AttackerLevel::LV2root})
    for (const auto& r : corpus(level).results)
      for (const auto& call : r.analysis->solver_calls) {
        auto doc = constraints::emit_smtlib(call.condition, call.goal);
        auto v = constraints::run_external_solver(doc, *z3, 60);
        const bool internal_sat = call.status == constraints::SolveResult::Status::Sat;
        REQUIRE_MESSAGE(call.status != constraints::SolveResult::Status::Unknown, r.report.bundle);
        CHECK_MESSAGE(v.status == (internal_sat ? constraints::ExternalVerdict::Status::Sat
                                                : constraints::ExternalVerdict::Status::Unsat),
                      r.report.bundle << " " << call.detector << " " << symexec::to_prefix(call.condition.sink_path));
        if (v.payload) CHECK(constraints::satisfies(call.condition, call.goal, *v.payload));
        ++compared;
      }
  MESSAGE(compared << " corpus queries compared");
  CHECK(compared > 0);
}

}  // TEST_SUITE
