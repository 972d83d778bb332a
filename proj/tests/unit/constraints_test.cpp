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

#include <random>

#include "pathsentry/constraints/pathops.hpp"
#include "pathsentry/constraints/smtlib.hpp"
#include "pathsentry/constraints/solver.hpp"
#include "pathsentry/frontend/bundle.hpp"
#include "pathsentry/graph/taint.hpp"
#include "pathsentry/symexec/symexec.hpp"
#include "support.hpp"

using namespace pathsentry;
using namespace pathsentry::constraints;
using symexec::StrExpr;

namespace {

const Symbol kUri{Symbol::Kind::Uri, ""};
const char* kPrefs = "/data/data/com.oneplus.wallpaper/shared_prefs";

struct WallpaperCase {
  frontend::AppBundle bundle;
  PathCondition cond;
  Goal goal;
};

WallpaperCase wallpaper() {
  WallpaperCase w{frontend::load_bundle(testing::fixture("wallpaper")), {}, {}};
  auto pdg = graph::build_pdg(w.bundle.program, w.bundle.entries);
  for (const auto& f : graph::forward_taint(pdg, graph::external_sources(pdg)))
    if (w.bundle.program.at(f.sink).sink == SinkKind::Open) w.cond = symexec::exec_path(pdg, f, w.bundle.package());
  auto inputs = testing::load_corpus();
  auto fc = policy::file_constraints(inputs.policy, w.bundle.package(),
                                     policy::make_attacker(inputs.policy, policy::AttackerLevel::LV1));
  w.goal = make_goal(Goal::Kind::ReachPrivate, fc);
  return w;
}

ExternalVerdict::Status to_external(SolveResult::Status s) {
  switch (s) {
    case SolveResult::Status::Sat: return ExternalVerdict::Status::Sat;
    case SolveResult::Status::Unsat: return ExternalVerdict::Status::Unsat;
    case SolveResult::Status::Unknown: break;
  }
  return ExternalVerdict::Status::Unknown;
}

}  // namespace

TEST_SUITE("constraints") {

TEST_CASE("canonicalize examples") {
  CHECK(canonicalize("/data/data/app/files/image/../../shared_prefs/c.xml") == "/data/data/app/shared_prefs/c.xml");
  CHECK(canonicalize("/") == "/");
  CHECK(canonicalize("/a/./b//c") == "/a/b/c");
  CHECK(canonicalize("/..") == "/");
  CHECK(canonicalize("a/../..") == "..");
  CHECK(canonicalize("") == ".");
  CHECK(canonicalize("./") == ".");
  CHECK(escapes_origin("../x"));
  CHECK_FALSE(escapes_origin("..x"));
}

TEST_CASE("canonicalize matches the stack machine and is idempotent") {
  std::mt19937 rng(7);
  for (int i = 0; i < 20000; ++i) {
    const std::string p = testing::random_path(rng);
    const std::string c = canonicalize(p);
    REQUIRE_MESSAGE(c == testing::stack_normalize(p), "path \"" << p << "\"");
    REQUIRE_MESSAGE(canonicalize(c) == c, "path \"" << p << "\"");
  }
}

TEST_CASE("path helpers") {
  CHECK(path_covers("/a", "/a"));
  CHECK(path_covers("/a", "/a/b"));
  CHECK_FALSE(path_covers("/a", "/ab"));
  CHECK(path_covers("/", "/x"));
  CHECK(parent_dirs("/a/b/c") == std::vector<std::string>{"/", "/a", "/a/b"});
  CHECK(parent_of("/a/b") == "/a");
  CHECK(basename_of("/a/b") == "b");
  CHECK(has_dotdot_segment("a/../b"));
  CHECK_FALSE(has_dotdot_segment("a/..b"));
  CHECK(percent_decode("..%2F..%2fx%zz") == "../../x%zz");
  CHECK(encode_segment("a/b%c") == "a%2Fb%25c");
  CHECK(last_segment("/a/b/c") == "c");
  CHECK(last_segment("content://auth/image/..%2Fx") == "../x");
  CHECK(last_segment("/a/b/..%2Fx") == "..%2Fx");
}

TEST_CASE("uri matcher convention") {
  std::vector<frontend::UriEntry> t{{"auth", "image/*", 10}, {"auth", "thumb/#", 11}};
  CHECK(uri_match(t, "content://auth/image/a%2Fb") == 10);
  CHECK(uri_match(t, "content://auth/thumb/42") == 11);
  CHECK(uri_match(t, "content://auth/thumb/4x") == -1);
  CHECK(uri_match(t, "content://auth/image/a/b") == -1);
  CHECK(uri_match(t, "content://other/image/a") == -1);
  CHECK(uri_match(t, "/auth/image/a") == -1);
}

TEST_CASE("canonical sanitizer refuses dot-dot") {
  CHECK(sanitize_canonical("/a/./b") == std::optional<std::string>("/a/b"));
  CHECK_FALSE(sanitize_canonical("/a/../b").has_value());
  CHECK_FALSE(sanitize_canonical("..").has_value());
}

TEST_CASE("sink base directory") {
  auto s = StrExpr::sym({Symbol::Kind::Extra, "f"});
  CHECK(sink_base(StrExpr::concat(StrExpr::lit("/a/b/"), s)) == std::optional<std::string>("/a/b"));
  CHECK(sink_base(StrExpr::concat(StrExpr::lit("/a/b"), s)) == std::optional<std::string>("/a"));
  CHECK(sink_base(StrExpr::canonical(StrExpr::concat(StrExpr::lit("/a/./c/"), s))) ==
        std::optional<std::string>("/a/c"));
  CHECK_FALSE(sink_base(s).has_value());
  CHECK_FALSE(sink_base(StrExpr::concat(StrExpr::lit("/"), s)).has_value());
  CHECK_FALSE(sink_base(StrExpr::lit("/a/b")).has_value());
}

TEST_CASE("goal membership") {
  Goal g;
  g.kind = Goal::Kind::ReachPrivate;
  g.targets = {"/p"};
  g.excluded = {"/p/open"};
  CHECK(goal_met(g, "/p/x", std::nullopt));
  CHECK_FALSE(goal_met(g, "/p", std::nullopt));
  CHECK_FALSE(goal_met(g, "/p/open/x", std::nullopt));
  CHECK_FALSE(goal_met(g, "/p/x", std::string("/p")));
  CHECK(goal_met(g, "/p/x", std::string("/p/y")));
  g.kind = Goal::Kind::ReachSink;
  CHECK(goal_met(g, "/anything", std::string("/anything")));
}

TEST_CASE("wallpaper traversal is satisfiable") {
  auto w = wallpaper();
  CHECK(w.goal.targets.count(kPrefs));
  auto r = solve(w.cond, w.goal);
  REQUIRE(r.status == SolveResult::Status::Sat);
  REQUIRE(r.payload);
  REQUIRE(r.payload->uri);
  const std::string& uri = *r.payload->uri;
  CHECK(uri.rfind("content://com.oneplus.wallpaper/image/..%2F..%2Fshared_prefs%2F", 0) == 0);
  CHECK(last_segment(uri).rfind("../../shared_prefs/", 0) == 0);
  CHECK(path_covers(kPrefs, r.sink_path));
  CHECK(satisfies(w.cond, w.goal, *r.payload));
  const testing::ConditionOracle oracle{w.cond, w.goal};
  CHECK(oracle.satisfies(*r.payload));
}

TEST_CASE("canonical sink path cannot leave its directory") {
  auto w = wallpaper();
  w.cond.sink_path = StrExpr::canonical(w.cond.sink_path);
  auto r = solve(w.cond, w.goal);
  CHECK(r.status == SolveResult::Status::Unsat);
}

TEST_CASE("literal sink with no atoms") {
  PathCondition c;
  c.sink_path = StrExpr::lit("/data/log/x");
  auto r = solve(c, Goal{});
  REQUIRE(r.status == SolveResult::Status::Sat);
  CHECK(r.payload->extras.empty());
  CHECK_FALSE(r.payload->uri.has_value());
  CHECK(r.payload->length() == 0);
  CHECK(r.sink_path == "/data/log/x");
}

TEST_CASE("contradictory atoms") {
  PathCondition c;
  const Symbol f{Symbol::Kind::Extra, "f"};
  c.symbols = {f};
  c.sink_path = StrExpr::sym(f);
  symexec::Atom a;
  a.kind = symexec::Atom::Kind::StartsWith;
  a.lhs = StrExpr::sym(f);
  a.literal = "/x";
  c.atoms = {a, a.negate()};
  CHECK(solve(c, Goal{}).status == SolveResult::Status::Unsat);
}

TEST_CASE("candidate budget gives unknown") {
  auto w = wallpaper();
  SolveBudget tiny;
  tiny.max_candidates = 3;
  auto r = solve(w.cond, w.goal, tiny);
  CHECK(r.status == SolveResult::Status::Unknown);
  CHECK_FALSE(r.reason.empty());
}

TEST_CASE("solver agrees with brute force on random conditions") {
  auto a = testing::brute_agreement(300, 424242);
  for (const auto& f : a.failures) FAIL_CHECK(f);
  MESSAGE(a.sat << " sat, " << a.unsat << " unsat, " << a.beyond << " with witnesses beyond the brute-force domain");
  CHECK(a.sat >= 30);
  CHECK(a.unsat >= 30);
  // conditions decided the same way by both searches
  CHECK(a.decided() >= 200);
}

TEST_CASE("smt document structure") {
  PathCondition c;
  const Symbol f{Symbol::Kind::Extra, "f"}, g{Symbol::Kind::Extra, "g"};
  c.symbols = {f, g};
  c.sink_path = StrExpr::concat(StrExpr::sym(f), StrExpr::sym(g));
  auto doc = emit_smtlib(c, Goal{});
  CHECK(doc.text.find("(check-sat)") != std::string::npos);
  CHECK(doc.symbols.size() == 2);
  for (const auto& [name, sym] : doc.symbols)
    CHECK(doc.text.find("(declare-const " + name + " String)") != std::string::npos);
}

TEST_CASE("smt emission rejects unsupported literals") {
  PathCondition c;
  c.sink_path = StrExpr::lit("/a\\b");
  CHECK_THROWS_AS(emit_smtlib(c, Goal{}), UnsupportedFeature);
}

TEST_CASE("model parsing") {
  PathCondition c;
  const Symbol f{Symbol::Kind::Extra, "f"};
  c.symbols = {f, kUri};
  c.sink_path = StrExpr::concat(StrExpr::sym(f), StrExpr::sym(kUri));
  auto doc = emit_smtlib(c, Goal{});
  std::string model = "sat\n(\n";
  for (const auto& [name, sym] : doc.symbols)
    model += "  (define-fun " + name + " () String\n    \"" +
             (sym == f ? std::string("a\\u{2f}b\"\"q") : std::string("content://x/y")) + "\")\n";
  model += ")\n";
  auto p = payload_from_model(model, doc);
  CHECK(p.extras.at("f") == "a/b\"q");
  CHECK(p.uri == std::optional<std::string>("content://x/y"));
}

TEST_CASE("external solver agrees on the wallpaper condition") {
  auto z3 = testing::z3_binary();
  if (!z3) {
    MESSAGE("z3 not found; skipped");
    return;
  }
  auto w = wallpaper();
  auto v = run_external_solver(emit_smtlib(w.cond, w.goal), *z3);
  REQUIRE(v.status == ExternalVerdict::Status::Sat);
  REQUIRE(v.payload);
  CHECK(satisfies(w.cond, w.goal, *v.payload));

  w.cond.sink_path = StrExpr::canonical(w.cond.sink_path);
  CHECK(run_external_solver(emit_smtlib(w.cond, w.goal), *z3).status == ExternalVerdict::Status::Unsat);
}

TEST_CASE("external solver agrees on random conditions") {
  auto z3 = testing::z3_binary();
  if (!z3) {
    MESSAGE("z3 not found; skipped");
    return;
  }
  const SmtOptions options{8};
  std::mt19937 rng(99);
  int compared = 0;
  for (int i = 0; i < 60; ++i) {
    auto rc = testing::random_condition(rng);
    auto r = solve(rc.cond, rc.goal);
    SmtDocument doc;
    try {
      doc = emit_smtlib(rc.cond, rc.goal, options);
    } catch (const UnsupportedFeature&) {
      continue;
    }
    auto v = run_external_solver(doc, *z3, 10);
    if (v.status == ExternalVerdict::Status::Unknown) continue;
    ++compared;
    if (v.status == ExternalVerdict::Status::Sat) {
      CHECK_MESSAGE(r.status == SolveResult::Status::Sat, rc.text);
      REQUIRE(v.payload);
      CHECK_MESSAGE(satisfies(rc.cond, rc.goal, *v.payload), rc.text);
    } else if (r.status == SolveResult::Status::Sat) {
      // only a witness longer than the encoding's part bound may be missed
      std::size_t parts = 0;
      for (const auto& [key, value] : r.payload->extras) parts = std::max(parts, split(value, '/').size());
      CHECK_MESSAGE(parts > static_cast<std::size_t>(options.max_parts), rc.text);
    }
  }
  CHECK(compared >= 40);
}

}  // TEST_SUITE
