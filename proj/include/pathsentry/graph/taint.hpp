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

#ifndef PATHSENTRY_GRAPH_TAINT_HPP
#define PATHSENTRY_GRAPH_TAINT_HPP

#include <compare>
#include <set>
#include <vector>

#include "pathsentry/graph/pdg.hpp"

namespace pathsentry::graph {

enum class SourceKind { External, Internal };

std::string_view to_string(SourceKind kind);

/// One control path from an entry to a sink along which a def-use chain
/// carries `sources` into the sink's pathname argument `arg_index`.
/// External flows have exactly one GETEXTRA/GETURI source. Internal flows
/// list the CONST/ENVDIR statements feeding the argument (possibly none,
/// for a parameter the entry never binds).
struct TaintFlow {
  EntryPoint entry;
  SourceKind source_kind = SourceKind::Internal;
  std::vector<StmtId> sources;
  StmtId sink;
  int arg_index = 0;
  std::vector<StmtId> control_path;

  auto operator<=>(const TaintFlow&) const = default;
};

struct FlowBudget {
  std::size_t max_paths_per_entry = 20000;
  std::size_t max_path_length = 4096;
  int max_call_depth = 8;
};

struct FlowEnumeration {
  std::vector<TaintFlow> flows;  // sorted, unique
  bool truncated = false;        // some entry hit a budget
};

/// Enumerates every flow from every PDG entry: each loop body runs at most
/// twice along a path (unrolled once), returns match their call site.
FlowEnumeration enumerate_flows(const Pdg& pdg, const FlowBudget& budget = {});

/// Flows from an external source in `sources` to a sink in `sinks`.
/// Empty `sinks` means every sink.
std::vector<TaintFlow> forward_taint(const Pdg& pdg, const std::set<StmtId>& sources,
                                     const std::set<StmtId>& sinks = {}, const FlowBudget& budget = {});

struct ReverseDataflow {
  std::set<StmtId> internal_sources;  // CONST / ENVDIR
  std::set<StmtId> external_sources;  // GETEXTRA / GETURI met on a contributing chain

  /// External flows belong to traversal analysis, not hijacking.
  bool external() const { return !external_sources.empty(); }
};

/// Walks data edges backwards from the sink's pathname argument(s).
/// arg_index < 0 means all pathname arguments.
ReverseDataflow reverse_dataflow(const Pdg& pdg, StmtId sink, int arg_index = -1);

/// GETEXTRA/GETURI statements in the PDG.
std::set<StmtId> external_sources(const Pdg& pdg);
std::set<StmtId> sink_statements(const Pdg& pdg);

}  // namespace pathsentry::graph

#endif  // PATHSENTRY_GRAPH_TAINT_HPP
