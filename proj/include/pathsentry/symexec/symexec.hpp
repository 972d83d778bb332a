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

#ifndef PATHSENTRY_SYMEXEC_SYMEXEC_HPP
#define PATHSENTRY_SYMEXEC_SYMEXEC_HPP

#include <map>
#include <string>
#include <vector>

#include "pathsentry/graph/taint.hpp"
#include "pathsentry/symexec/expr.hpp"

namespace pathsentry::symexec {

/// Concrete directory returned by a pathname API. `package` replaces the
/// `<package>` placeholder. Throws std::invalid_argument for unknown names.
///
///   ExternalStorageDirectory -> /storage/emulated/0
///   FilesDir                 -> /data/data/<package>/files
///   CacheDir                 -> /data/data/<package>/cache
///   ExternalFilesDir         -> /storage/emulated/0/Android/data/<package>/files
std::string api_summary(std::string_view api_name, std::string_view package);

struct PathCondition {
  graph::TaintFlow flow;
  std::vector<Atom> atoms;  // branch conditions in path order
  ExprPtr sink_path;
  SinkKind sink_kind = SinkKind::Open;
  bool sanitized = false;   // every Sym in sink_path sits under Canonical
  bool mixed = false;       // some, but not all, Syms sit under Canonical
  std::set<Symbol> symbols; // introduced along the path
  std::map<std::string, std::vector<frontend::UriEntry>> uri_tables;  // referenced by atoms
};

/// Bound on atoms per path condition; PATHSENTRY_BUDGET can override it.
struct ExecBudget {
  std::size_t max_atoms = 256;
};

/// Symbolically executes `flow.control_path`. Throws InternalError if the
/// path does not follow the program's control structure, and
/// std::length_error if the atom budget is exceeded.
PathCondition exec_path(const graph::Pdg& pdg, const graph::TaintFlow& flow, std::string_view package,
                        const ExecBudget& budget = {});

/// One condition per (entry, control path) reaching the internal sink.
/// `flows` is the graph's flow enumeration; only entries in `entries` count.
std::vector<PathCondition> exec_all_entries(const graph::Pdg& pdg, const std::vector<graph::TaintFlow>& flows,
                                            frontend::StmtId sink, const std::set<frontend::EntryPoint>& entries,
                                            std::string_view package, const ExecBudget& budget = {});

}  // namespace pathsentry::symexec

#endif  // PATHSENTRY_SYMEXEC_SYMEXEC_HPP
