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

#ifndef PATHSENTRY_DETECT_DETECT_HPP
#define PATHSENTRY_DETECT_DETECT_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pathsentry/constraints/solver.hpp"
#include "pathsentry/detect/interpreter.hpp"
#include "pathsentry/graph/pdg.hpp"
#include "pathsentry/graph/taint.hpp"
#include "pathsentry/policy/policy.hpp"
#include "pathsentry/symexec/symexec.hpp"

namespace pathsentry::detect {

enum class FindingClass { PathTraversal, Hijacking, Luring };
enum class Validation { Confirmed, Failed, NotRun };

std::string_view to_string(FindingClass c);
std::string_view to_string(Validation v);

struct SinkRef {
  StmtId stmt;
  std::string function;
  std::string file;
  int line = 0;
  SinkKind kind = SinkKind::Open;
  int arg_index = 0;
};

struct Finding {
  std::string id;
  FindingClass cls = FindingClass::PathTraversal;
  std::string app;
  std::string component;
  std::string entry;  // entry function name
  frontend::EntryPoint entry_point;
  policy::AttackerLevel attacker_level = policy::AttackerLevel::LV1;
  std::vector<std::string> required_permissions;
  SinkRef sink;
  std::vector<StmtId> flow;  // control path, entry to sink
  std::vector<std::string> flow_lines;  // the same path as file:line
  std::vector<std::string> condition_summary;
  std::optional<Payload> payload;
  std::string sink_path;  // canonical path the sink is steered to
  std::string target;     // resolved target, or the hijackable directory
  std::string junction;   // planted link location, if any
  std::map<std::string, std::string> planted_links;
  Validation validated = Validation::NotRun;
  std::string validation_detail;
  std::size_t control_paths = 1;  // satisfiable control paths behind the finding

  std::shared_ptr<const symexec::PathCondition> condition;
  constraints::Goal goal;
};

/// Budgets for one analysis; PATHSENTRY_BUDGET overrides the defaults.
struct Budgets {
  graph::FlowBudget flow;
  symexec::ExecBudget exec;
  constraints::SolveBudget solve;
  std::size_t interpret_steps = kDefaultStepBudget;
};

/// Why a flow did not become a finding.
struct FlowVerdict {
  graph::TaintFlow flow;
  std::string detector;  // traversal | luring | hijacking
  std::string outcome;   // finding | entry-pruned | file-pruned | sanitized | unsat | unknown | error
  std::string detail;
};

/// One question put to the solver, kept for cross-checking.
struct SolverCall {
  graph::TaintFlow flow;
  std::string detector;
  symexec::PathCondition condition;
  constraints::Goal goal;
  constraints::SolveResult::Status status = constraints::SolveResult::Status::Unknown;
};

/// Everything a detector needs for one bundle and attacker level.
struct Analysis {
  const frontend::AppBundle* bundle = nullptr;
  frontend::PolicySet policy;  // linked
  policy::AttackerProfile attacker;
  std::vector<policy::EntryConstraint> entry_constraints;
  std::set<frontend::EntryPoint> attacker_entries;
  policy::FileConstraint files;
  std::unique_ptr<graph::Pdg> pdg;
  graph::FlowEnumeration flows;
  Budgets budgets;
  std::vector<Diagnostic> diagnostics;
  std::vector<FlowVerdict> verdicts;
  std::set<graph::TaintFlow> surviving;  // flows satisfiable under some goal
  // (sink, control path) pairs with a traversal finding; luring skips them
  std::set<std::pair<frontend::StmtId, std::vector<frontend::StmtId>>> traversals;
  std::vector<std::string> condition_log;
  std::vector<SolverCall> solver_calls;
};

/// Throws std::invalid_argument when the bundle's package is not a policy
/// subject.
std::unique_ptr<Analysis> prepare(const frontend::AppBundle& bundle, const frontend::PolicySet& linked_policy,
                                  policy::AttackerLevel level, const Budgets& budgets = {});

std::vector<Finding> detect_path_traversal(Analysis& a);
std::vector<Finding> detect_hijacking(Analysis& a);
std::vector<Finding> detect_luring(Analysis& a);

/// Drops each Luring finding whose sink and control path also carry a
/// PathTraversal finding.
std::vector<Finding> deduplicate(std::vector<Finding> findings);

/// All three detectors, de-duplicated, in a stable order with ids assigned.
std::vector<Finding> detect_all(Analysis& a);

/// Interpreter run that decides a finding's validation status.
std::pair<Validation, std::string> validate(const Analysis& a, const Finding& f, const Payload& payload,
                                            const FsModel& fs);

/// The fsModel a finding prescribes.
FsModel prescribed_fs(const Finding& f);

/// Literal values a sink argument can take, by reverse dataflow over
/// internal sources. Empty when some origin is external or the value set
/// grows past `limit`.
std::set<std::string> literal_values(const graph::Pdg& pdg, std::string_view package, StmtId sink, int arg_index,
                                     std::size_t limit = 64);

struct Statistics {
  std::size_t entry_count = 0;
  std::size_t sources_total = 0;
  std::size_t sources_internal = 0;
  std::size_t sources_external = 0;
  std::size_t attackable_sources = 0;
  std::size_t sink_count = 0;
  std::size_t flows_pre = 0;
  std::size_t flows_post = 0;
  bool flows_truncated = false;
};

/// Call after detect_all so the surviving-flow count is filled in.
Statistics statistics(const Analysis& a);

}  // namespace pathsentry::detect

#endif  // PATHSENTRY_DETECT_DETECT_HPP
