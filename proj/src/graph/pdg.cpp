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

#include "pathsentry/graph/pdg.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace pathsentry::graph {

using frontend::AlirProgram;
using frontend::CondOp;
using frontend::Function;
using frontend::Op;
using frontend::Statement;

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Seq: return "seq";
    case EdgeKind::Branch: return "branch";
    case EdgeKind::Call: return "call";
    case EdgeKind::Return: return "return";
  }
  return "?";
}

std::vector<int> local_successors(const Function& fn, int i) {
  const Statement& s = fn.body[i];
  const int n = static_cast<int>(fn.body.size());
  std::vector<int> out;
  if (s.op == Op::Return) return out;
  if (s.op == Op::If) {
    int target = fn.labels.at(s.text);
    if (s.cond.op != CondOp::True && i + 1 < n) out.push_back(i + 1);
    if (std::find(out.begin(), out.end(), target) == out.end()) out.push_back(target);
    return out;
  }
  if (i + 1 < n) out.push_back(i + 1);
  return out;
}

namespace {

const std::vector<std::size_t> kNoEdges;

std::vector<int> exits_of(const Function& fn) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(fn.body.size()); ++i)
    if (fn.body[i].op != Op::Call && local_successors(fn, i).empty()) out.push_back(i);
  // A trailing call falls off the end after the callee returns.
  if (!fn.body.empty() && fn.body.back().op == Op::Call) out.push_back(static_cast<int>(fn.body.size()) - 1);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Reaching definitions for one function. Parameters are defined at entry by
// a marker {fn, -1} that is later expanded to the function's call sites.
using DefMap = std::map<std::string, std::set<StmtId>>;

std::vector<DefMap> reaching_definitions(const Function& fn, int fn_index) {
  const int n = static_cast<int>(fn.body.size());
  std::vector<DefMap> in(n);
  std::vector<bool> seen(n, false);
  if (n == 0) return in;
  for (const auto& p : fn.params) in[0][p].insert(StmtId{fn_index, -1});
  seen[0] = true;
  std::deque<int> work = {0};
  while (!work.empty()) {
    int i = work.front();
    work.pop_front();
    DefMap out = in[i];
    const auto& s = fn.body[i];
    if (s.defines()) out[s.dest] = {s.id};
    for (int t : local_successors(fn, i)) {
      bool changed = !seen[t];
      seen[t] = true;
      for (const auto& [var, defs] : out) {
        auto& dst = in[t][var];
        for (const auto& d : defs) changed |= dst.insert(d).second;
      }
      if (changed) work.push_back(t);
    }
  }
  return in;
}

}  // namespace

const std::vector<std::size_t>& Pdg::successors(StmtId id) const {
  auto it = succ_.find(id);
  return it == succ_.end() ? kNoEdges : it->second;
}

const std::vector<std::size_t>& Pdg::data_predecessors(StmtId id) const {
  auto it = data_in_.find(id);
  return it == data_in_.end() ? kNoEdges : it->second;
}

Pdg build_pdg(const AlirProgram& program, const std::vector<EntryPoint>& entries) {
  Pdg g;
  g.program_ = &program;
  g.entries_ = entries;

  // Functions reachable through calls from the entries.
  std::set<int> fns;
  std::deque<int> fwork;
  for (const auto& e : entries)
    if (fns.insert(e.function).second) fwork.push_back(e.function);
  while (!fwork.empty()) {
    int f = fwork.front();
    fwork.pop_front();
    for (const auto& s : program.function(f).body)
      if (s.op == Op::Call) {
        int callee = program.function_index.at(s.text);
        if (fns.insert(callee).second) fwork.push_back(callee);
      }
  }

  std::map<int, std::vector<StmtId>> call_sites;  // callee -> CALL statements
  std::vector<ControlEdge> edges;
  for (int f : fns) {
    const Function& fn = program.function(f);
    for (int i = 0; i < static_cast<int>(fn.body.size()); ++i) {
      const Statement& s = fn.body[i];
      if (s.op == Op::Call) {
        int callee_index = program.function_index.at(s.text);
        const Function& callee = program.function(callee_index);
        call_sites[callee_index].push_back(s.id);
        bool has_next = i + 1 < static_cast<int>(fn.body.size());
        if (callee.body.empty()) {
          if (has_next) edges.push_back({s.id, {f, i + 1}, EdgeKind::Seq, {}});
          continue;
        }
        edges.push_back({s.id, {callee_index, 0}, EdgeKind::Call, s.id});
        if (has_next)
          for (int e : exits_of(callee))
            edges.push_back({{callee_index, e}, {f, i + 1}, EdgeKind::Return, s.id});
        continue;
      }
      EdgeKind kind = s.op == Op::If ? EdgeKind::Branch : EdgeKind::Seq;
      for (int t : local_successors(fn, i)) edges.push_back({s.id, {f, t}, kind, {}});
    }
  }

  std::map<StmtId, std::vector<std::size_t>> all_succ;
  for (std::size_t k = 0; k < edges.size(); ++k) all_succ[edges[k].from].push_back(k);

  std::deque<StmtId> work;
  for (const auto& e : entries) {
    if (program.function(e.function).body.empty()) continue;
    StmtId start{e.function, 0};
    if (g.nodes_.insert(start).second) work.push_back(start);
  }
  while (!work.empty()) {
    StmtId id = work.front();
    work.pop_front();
    for (auto k : all_succ[id])
      if (g.nodes_.insert(edges[k].to).second) work.push_back(edges[k].to);
  }
  for (const auto& e : edges)
    if (g.nodes_.count(e.from)) g.control_.push_back(e);
  for (std::size_t k = 0; k < g.control_.size(); ++k) g.succ_[g.control_[k].from].push_back(k);

  for (int f : fns) {
    const Function& fn = program.function(f);
    auto rd = reaching_definitions(fn, f);
    for (int i = 0; i < static_cast<int>(fn.body.size()); ++i) {
      const Statement& s = fn.body[i];
      if (!g.nodes_.count(s.id)) {
        g.diagnostics_.push_back({fn.file, s.line, "unreachable statement in " + fn.name});
        continue;
      }
      for (const auto& var : s.uses()) {
        auto it = rd[i].find(var);
        if (it == rd[i].end()) continue;
        for (const auto& def : it->second) {
          if (def.index >= 0) {
            g.data_.push_back({def, s.id, var});
          } else {
            for (const auto& site : call_sites[f])
              if (g.nodes_.count(site)) g.data_.push_back({site, s.id, var});
          }
        }
      }
    }
  }
  std::sort(g.data_.begin(), g.data_.end(), [](const DataEdge& a, const DataEdge& b) {
    return std::tie(a.use, a.def, a.var) < std::tie(b.use, b.def, b.var);
  });
  g.data_.erase(std::unique(g.data_.begin(), g.data_.end()), g.data_.end());
  for (std::size_t k = 0; k < g.data_.size(); ++k) g.data_in_[g.data_[k].use].push_back(k);

  for (int f = 0; f < static_cast<int>(program.functions.size()); ++f)
    if (!fns.count(f))
      g.diagnostics_.push_back({program.function(f).file, 0,
                                "function " + program.function(f).name + " is unreachable from entries"});
  return g;
}

std::string Pdg::to_dot() const {
  std::ostringstream out;
  out << "digraph pdg {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& id : nodes_) {
    const auto& s = program_->at(id);
    std::string label = program_->describe(id) + " " + std::string(frontend::to_string(s.op));
    if (!s.dest.empty()) label += " " + s.dest;
    for (const auto& a : s.args) label += " " + a;
    if (!s.text.empty()) label += " " + s.text;
    std::string escaped;
    for (char c : label) {
      if (c == '"' || c == '\\') escaped += '\\';
      escaped += c;
    }
    out << "  \"" << program_->describe(id) << "\" [label=\"" << escaped << "\"];\n";
  }
  for (const auto& e : control_)
    out << "  \"" << program_->describe(e.from) << "\" -> \"" << program_->describe(e.to) << "\" [label=\""
        << to_string(e.kind) << "\"];\n";
  for (const auto& e : data_)
    out << "  \"" << program_->describe(e.def) << "\" -> \"" << program_->describe(e.use)
        << "\" [style=dashed, label=\"" << e.var << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace pathsentry::graph
