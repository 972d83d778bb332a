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

// Fixture access and independent oracles shared by the unit suites and the
// acceptance runner.

#ifndef PATHSENTRY_TESTS_SUPPORT_HPP
#define PATHSENTRY_TESTS_SUPPORT_HPP

#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pathsentry/cli/driver.hpp"
#include "pathsentry/constraints/solver.hpp"
#include "pathsentry/detect/detect.hpp"
#include "pathsentry/frontend/policy_text.hpp"

namespace pathsentry::testing {

std::filesystem::path fixture_dir();
std::filesystem::path golden_dir();
std::filesystem::path cli_binary();
std::optional<std::string> z3_binary();

std::filesystem::path fixture(std::string_view bundle);
std::filesystem::path base_policy();

/// Every fixture bundle linked against base.policy.
cli::Inputs load_corpus();

struct Expected {
  std::string cls;
  std::string component;
  int line = 0;
  auto operator<=>(const Expected&) const = default;
};

/// The bundle's expected.json entries for one attacker level.
std::multiset<Expected> expected_findings(const std::filesystem::path& bundle, policy::AttackerLevel level);
std::multiset<Expected> actual_findings(const cli::BundleReport& report);

/// Copy of the bundle whose every sink argument passes through CANONICAL
/// first.
frontend::AppBundle with_canonical_sinks(const frontend::AppBundle& bundle);

// Path normalization written as a character-level stack machine.
std::string stack_normalize(std::string_view path);

// Access to `path` granted by `rules` to the subject ids/classes in
// `classes`, computed rule by rule on segment lists.
std::uint8_t oracle_access(const std::vector<frontend::AllowRule>& rules, const std::set<std::string>& classes,
                           std::string_view path);

/// Evaluates conditions without touching the library's evaluator.
struct ConditionOracle {
  const symexec::PathCondition& cond;
  const constraints::Goal& goal;

  std::optional<std::string> eval(const symexec::ExprPtr& e, const constraints::Payload& p) const;
  bool atom(const symexec::Atom& a, const constraints::Payload& p) const;
  bool goal_met(const constraints::Payload& p) const;
  bool satisfies(const constraints::Payload& p) const;
};

/// Payload values over `segments`: "", "/", and every sequence of 1..depth
/// segments, with and without a leading and a trailing "/".
std::vector<std::string> bounded_values(const std::vector<std::string>& segments, int depth);

struct RandomCondition {
  symexec::PathCondition cond;
  constraints::Goal goal;
  std::string text;  // for failure messages
};

/// Single-sink-symbol conditions over the segments a and b. The sink depends
/// on extra "a" only; extra "b" may appear in atoms of its own.
RandomCondition random_condition(std::mt19937& rng);

/// bounded_values({"..", ".", "a", "b", "x"}, 5)
const std::vector<std::string>& brute_domain();

/// Exhaustive search of brute_domain() for each symbol; nullopt when
/// nothing in the domain satisfies.
std::optional<constraints::Payload> brute_force(const RandomCondition& rc);

/// Every absolute path of at most `depth` segments over a, b, c and d,
/// plus "/".
std::vector<std::string> path_universe(int depth);

/// Rules for subject classes v, LV1 and LV2 on /a, /a/b, /a/b/c and /d.
std::vector<frontend::AllowRule> small_rule_space(bool with_readwrite);

/// `rules` plus the level-2 subject v.
frontend::PolicySet small_policy(std::vector<frontend::AllowRule> rules);

/// Compares file_constraints for the small policy's victim v with
/// oracle_access on every path, at both attacker levels. Returns the first
/// disagreement.
std::optional<std::string> file_constraints_mismatch(const frontend::PolicySet& policy,
                                                     const std::vector<std::string>& paths);

/// Random relative or absolute path with ".", "..", empty and odd segments.
std::string random_path(std::mt19937& rng);

struct Agreement {
  int sat = 0;
  int unsat = 0;
  int beyond = 0;  // solver witnesses outside the brute-force domain
  std::vector<std::string> failures;
  int decided() const { return sat + unsat - beyond; }
};

/// solve() against brute_force() on `count` random conditions.
Agreement brute_agreement(int count, unsigned seed);

struct CliRun {
  int code = -1;
  std::string out;
};

/// Runs the pathsentry binary from the project root, so report paths stay
/// relative. `env` is prepended to the command line.
CliRun run_cli(const std::string& args, const std::string& env = "");
std::string shell_quote(const std::string& text);
std::string slurp(const std::filesystem::path& file);

/// " fixtures/<name>" for every corpus bundle.
std::string corpus_args();

/// Replays one launch recipe against the bundle it came from. Returns why
/// it failed to re-confirm the finding.
std::optional<std::string> replay_launch(const std::filesystem::path& launch_file, const detect::Finding& finding,
                                         const frontend::AppBundle& bundle, const frontend::PolicySet& policy);

}  // namespace pathsentry::testing

#endif  // PATHSENTRY_TESTS_SUPPORT_HPP
