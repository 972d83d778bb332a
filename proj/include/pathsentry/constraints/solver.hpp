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

#ifndef PATHSENTRY_CONSTRAINTS_SOLVER_HPP
#define PATHSENTRY_CONSTRAINTS_SOLVER_HPP

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pathsentry/policy/policy.hpp"
#include "pathsentry/symexec/symexec.hpp"

namespace pathsentry::constraints {

using symexec::Atom;
using symexec::ExprPtr;
using symexec::PathCondition;
using symexec::Symbol;

struct Goal {
  enum class Kind { ReachPrivate, ReachHijackable, ReachSink };

  Kind kind = Kind::ReachSink;
  std::set<std::string> targets;   // privateFiles or hijackableDirs
  std::set<std::string> excluded;  // ReachPrivate: attacker-accessible prefixes
};

std::string_view to_string(Goal::Kind kind);

Goal make_goal(Goal::Kind kind, const policy::FileConstraint& fc);

/// Directory named by the sink path's leading literal text, canonicalized,
/// when that text holds a "/". A path built directly from input has none,
/// and neither does one without input or one whose directory is the root.
/// A Canonical at the top is looked through.
std::optional<std::string> sink_base(const ExprPtr& sink_path);

/// Does the canonical sink path `p` meet the goal? It must lie strictly
/// below a target and outside every excluded prefix. `base` comes from
/// sink_base; a traversal or lure has to leave it.
bool goal_met(const Goal& goal, std::string_view p, const std::optional<std::string>& base);

struct Payload {
  std::string component;
  std::map<std::string, std::string> extras;
  std::optional<std::string> uri;

  std::size_t length() const;
  auto operator<=>(const Payload&) const = default;
};

std::optional<std::string> symbol_value(const Payload& payload, const Symbol& symbol);

/// CANONICAL as the program runs it: lexical normalization, refused (nullopt)
/// when the operand holds a ".." segment.
std::optional<std::string> sanitize_canonical(std::string_view path);

/// nullopt when a symbol is absent from the payload or a Canonical refuses.
std::optional<std::string> evaluate(const ExprPtr& e, const Payload& payload);

using UriTables = std::map<std::string, std::vector<frontend::UriEntry>>;

/// nullopt when an operand cannot be evaluated.
std::optional<bool> holds(const Atom& atom, const Payload& payload, const UriTables& tables);

/// Every atom holds and the canonical sink path meets the goal.
bool satisfies(const PathCondition& cond, const Goal& goal, const Payload& payload);

/// Characters a solver witness may use besides those of the condition's own
/// literals: lowercase alphanumerics and "/._-".
bool in_payload_alphabet(char c);

struct SolveBudget {
  std::size_t max_candidates = 2'000'000;
  int max_segments = 5;
};

struct SolveResult {
  enum class Status { Sat, Unsat, Unknown };

  Status status = Status::Unknown;
  std::optional<Payload> payload;
  std::string sink_path;     // canonical, for Sat
  std::size_t explored = 0;  // candidate payloads evaluated
  std::string reason;        // Unknown: what ran out
};

std::string_view to_string(SolveResult::Status status);

/// Template inversion plus a bounded segment search. Sat results have been
/// re-checked with `satisfies`; Unsat means no payload exists whose path
/// symbols are sequences of at most `max_segments` segments drawn from the
/// condition's vocabulary.
SolveResult solve(const PathCondition& cond, const Goal& goal, const SolveBudget& budget = {});

}  // namespace pathsentry::constraints

#endif  // PATHSENTRY_CONSTRAINTS_SOLVER_HPP
