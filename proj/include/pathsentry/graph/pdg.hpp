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

#ifndef PATHSENTRY_GRAPH_PDG_HPP
#define PATHSENTRY_GRAPH_PDG_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pathsentry/frontend/alir.hpp"
#include "pathsentry/frontend/bundle.hpp"

namespace pathsentry::graph {

using frontend::EntryPoint;
using frontend::StmtId;

enum class EdgeKind { Seq, Branch, Call, Return };

std::string_view to_string(EdgeKind kind);

/// Call and return edges carry the CALL statement they belong to, so a
/// traversal can match each return with its call site.
struct ControlEdge {
  StmtId from;
  StmtId to;
  EdgeKind kind = EdgeKind::Seq;
  StmtId call_site;

  bool operator==(const ControlEdge&) const = default;
};

/// `def` defines `var` and `use` reads it. A CALL statement acts as the
/// definition site of the callee's parameters.
struct DataEdge {
  StmtId def;
  StmtId use;
  std::string var;

  bool operator==(const DataEdge&) const = default;
};

class Pdg {
 public:
  const frontend::AlirProgram& program() const { return *program_; }
  const std::vector<EntryPoint>& entries() const { return entries_; }
  const std::set<StmtId>& nodes() const { return nodes_; }
  const std::vector<ControlEdge>& control_edges() const { return control_; }
  const std::vector<DataEdge>& data_edges() const { return data_; }
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

  bool contains(StmtId id) const { return nodes_.count(id) > 0; }
  /// Indices into control_edges() leaving `id`, in edge order.
  const std::vector<std::size_t>& successors(StmtId id) const;
  /// Indices into data_edges() arriving at `id`.
  const std::vector<std::size_t>& data_predecessors(StmtId id) const;

  /// Graphviz rendering; control edges solid, data edges dashed.
  std::string to_dot() const;

 private:
  friend Pdg build_pdg(const frontend::AlirProgram&, const std::vector<EntryPoint>&);

  const frontend::AlirProgram* program_ = nullptr;
  std::vector<EntryPoint> entries_;
  std::set<StmtId> nodes_;
  std::vector<ControlEdge> control_;
  std::vector<DataEdge> data_;
  std::map<StmtId, std::vector<std::size_t>> succ_;
  std::map<StmtId, std::vector<std::size_t>> data_in_;
  std::vector<Diagnostic> diagnostics_;
};

/// PDG over every statement reachable from `entries`. The program must
/// outlive the graph. Unreachable code is reported as diagnostics.
Pdg build_pdg(const frontend::AlirProgram& program, const std::vector<EntryPoint>& entries);

/// Intraprocedural successors of statement `index` in `fn` (fall-through
/// first, then the branch target). Falling off the end means returning.
std::vector<int> local_successors(const frontend::Function& fn, int index);

}  // namespace pathsentry::graph

#endif  // PATHSENTRY_GRAPH_PDG_HPP
