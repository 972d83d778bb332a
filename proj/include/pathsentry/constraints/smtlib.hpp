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

#ifndef PATHSENTRY_CONSTRAINTS_SMTLIB_HPP
#define PATHSENTRY_CONSTRAINTS_SMTLIB_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pathsentry/constraints/solver.hpp"

namespace pathsentry::constraints {

class UnsupportedFeature : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SmtDocument {
  std::string text;
  std::vector<std::pair<std::string, Symbol>> symbols;  // declared name -> payload input
};

struct SmtOptions {
  int max_parts = 6;  // "/"-separated parts per payload value
};

/// Strings-theory encoding of `cond` and `goal` (see docs/smt-encoding.md).
/// Payload values are bounded to `max_parts` segments. Throws
/// UnsupportedFeature for literals outside printable ASCII (or with a
/// backslash), for matcher tables the condition does not carry, and for
/// shapes the segment view cannot express.
SmtDocument emit_smtlib(const PathCondition& cond, const Goal& goal, const SmtOptions& options = {});

/// Reads the symbol assignments of a `(get-model)` response.
Payload payload_from_model(const std::string& model, const SmtDocument& doc);

struct ExternalVerdict {
  enum class Status { Sat, Unsat, Unknown, Unavailable };

  Status status = Status::Unavailable;
  std::optional<Payload> payload;
  std::string output;
};

/// Z3_BIN if set, otherwise `z3` on PATH.
std::optional<std::string> find_z3();

ExternalVerdict run_external_solver(const SmtDocument& doc, const std::string& solver, int timeout_seconds = 30);

}  // namespace pathsentry::constraints

#endif  // PATHSENTRY_CONSTRAINTS_SMTLIB_HPP
