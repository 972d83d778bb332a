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

#ifndef PATHSENTRY_DETECT_INTERPRETER_HPP
#define PATHSENTRY_DETECT_INTERPRETER_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pathsentry/constraints/solver.hpp"
#include "pathsentry/frontend/bundle.hpp"
#include "pathsentry/policy/policy.hpp"

namespace pathsentry::detect {

using constraints::Payload;
using frontend::StmtId;

/// Filesystem state seen by the interpreter. Private files are assumed to
/// exist; everything else exists only when listed.
struct FsModel {
  std::map<std::string, std::string> planted_links;
  std::set<std::string> existing_files;
};

struct SinkEvent {
  StmtId stmt;
  SinkKind kind = SinkKind::Open;
  std::vector<std::string> args;       // as evaluated
  std::vector<std::string> canonical;  // lexically normalized
  std::vector<policy::Resolution> resolved;
  std::vector<bool> target_exists;
};

struct Trace {
  enum class Outcome { Completed, IncompletePayload, SanitizerRejected, StepBudget };

  Outcome outcome = Outcome::Completed;
  std::string detail;
  std::vector<SinkEvent> sinks;
  std::size_t steps = 0;

  const SinkEvent* first_at(StmtId stmt) const;
};

std::string_view to_string(Trace::Outcome outcome);

inline constexpr std::size_t kDefaultStepBudget = 100000;

/// Runs `entry` concretely on the payload. Deterministic; every sink call
/// is recorded with its resolution under `fs`.
Trace interpret(const frontend::AppBundle& bundle, const frontend::EntryPoint& entry, const Payload& payload,
                const FsModel& fs, const policy::FileConstraint& fc, std::size_t step_budget = kDefaultStepBudget);

}  // namespace pathsentry::detect

#endif  // PATHSENTRY_DETECT_INTERPRETER_HPP
