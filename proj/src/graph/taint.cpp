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

#include "pathsentry/graph/taint.hpp"

#include <deque>
#include <map>

namespace pathsentry::graph {

using frontend::Function;
using frontend::Op;
using frontend::Statement;

std::string_view to_string(SourceKind kind) {
  return kind == SourceKind::External ? "external" : "internal";
}

namespace {

using Origins = std::set<StmtId>;

struct Frame {
  int fn = -1;
  std::map<std::string, Origins> taint;
  StmtId call_site;
};

struct WalkState {
  std::vector<Frame> frames;
  StmtId pos;
  std::vector<StmtId> path;
  std::map<std::pair<std::vector<StmtId>, StmtId>, int> visits;
};

class FlowWalker {
 public:
  FlowWalker(const Pdg& pdg, const FlowBudget& budget) : pdg_(pdg), prog_(pdg.program()), budget_(budget) {}

  bool run(const EntryPoint& entry, std::set<TaintFlow>& out) {
    const Function& fn = prog_.function(entry.function);
    if (fn.body.empty()) return false;
    entry_ = entry;
    out_ = &out;
    WalkState init;
    Frame f;
    f.fn = entry.function;
    for (const auto& p : fn.params) f.taint[p] = {};
    init.frames.push_back(std::move(f));
    init.pos = {entry.function, 0};

    std::vector<WalkState> stack;
    stack.push_back(std::move(init));
    std::size_t paths = 0;
    bool truncated = false;
    while (!stack.empty()) {
      WalkState st = std::move(stack.back());
      stack.pop_back();
      while (true) {
        auto next = step(st);
        if (next.empty()) {
          ++paths;
          break;
        }
        if (st.path.size() >= budget_.max_path_length) {
          truncated = true;
          ++paths;
          break;
        }
        for (std::size_t k = 1; k < next.size(); ++k) stack.push_back(std::move(next[k]));
        st = std::move(next[0]);
      }
      if (paths >= budget_.max_paths_per_entry) {
        truncated = !stack.empty() || truncated;
        break;
      }
    }
    return truncated;
  }

 private:
  std::vector<StmtId> call_signature(const WalkState& st) const {
    std::vector<StmtId> sig;
    for (const auto& f : st.frames) sig.push_back(f.call_site);
    return sig;
  }

  // Executes st.pos and returns the successor states (empty = path ends).
  std::vector<WalkState> step(WalkState& st) {
    auto key = std::make_pair(call_signature(st), st.pos);
    if (++st.visits[key] > 2) return {};
    st.path.push_back(st.pos);

    const Statement& s = prog_.at(st.pos);
    Frame& fr = st.frames.back();
    switch (s.op) {
      case Op::Const:
      case Op::EnvDir:
      case Op::GetExtra:
      case Op::GetUri:
        fr.taint[s.dest] = {s.id};
        break;
      case Op::Concat: {
        Origins o = fr.taint[s.args[0]];
        const auto& b = fr.taint[s.args[1]];
        o.insert(b.begin(), b.end());
        fr.taint[s.dest] = std::move(o);
        break;
      }
      case Op::LastSeg:
      case Op::Canonical:
      case Op::UriMatch:
        fr.taint[s.dest] = fr.taint[s.args[0]];
        break;
      case Op::Sink:
        record_sink(st, s);
        break;
      default:
        break;
    }

    if (s.op == Op::Call) {
      int callee = prog_.function_index.at(s.text);
      const Function& cf = prog_.function(callee);
      if (!cf.body.empty()) {
        if (static_cast<int>(st.frames.size()) > budget_.max_call_depth) return {};
        Frame nf;
        nf.fn = callee;
        nf.call_site = s.id;
        for (std::size_t i = 0; i < cf.params.size(); ++i) nf.taint[cf.params[i]] = fr.taint[s.args[i]];
        st.frames.push_back(std::move(nf));
        st.pos = {callee, 0};
        std::vector<WalkState> out;
        out.push_back(std::move(st));
        return out;
      }
    }

    const Function& fn = prog_.function(st.pos.function);
    auto succ = s.op == Op::Call ? std::vector<int>{} : local_successors(fn, st.pos.index);
    if (s.op == Op::Call && st.pos.index + 1 < static_cast<int>(fn.body.size())) succ.push_back(st.pos.index + 1);
    if (succ.empty()) return return_from(st);

    std::vector<WalkState> out;
    for (std::size_t k = 0; k < succ.size(); ++k) {
      WalkState copy = k + 1 == succ.size() ? std::move(st) : st;
      copy.pos = {copy.frames.back().fn, succ[k]};
      out.push_back(std::move(copy));
    }
    return out;
  }

  std::vector<WalkState> return_from(WalkState& st) {
    while (true) {
      StmtId site = st.frames.back().call_site;
      st.frames.pop_back();
      if (st.frames.empty()) return {};
      const Function& caller = prog_.function(site.function);
      if (site.index + 1 < static_cast<int>(caller.body.size())) {
        st.pos = {site.function, site.index + 1};
        std::vector<WalkState> out;
        out.push_back(std::move(st));
        return out;
      }
    }
  }

  void record_sink(const WalkState& st, const Statement& s) {
    const Frame& fr = st.frames.back();
    for (int i = 0; i < static_cast<int>(s.args.size()); ++i) {
      auto it = fr.taint.find(s.args[i]);
      const Origins empty;
      const Origins& o = it == fr.taint.end() ? empty : it->second;
      std::vector<StmtId> internal;
      bool any_external = false;
      for (const auto& src : o) {
        const Statement& ss = prog_.at(src);
        if (ss.is_external_source()) {
          any_external = true;
          out_->insert(TaintFlow{entry_, SourceKind::External, {src}, s.id, i, st.path});
        } else {
          internal.push_back(src);
        }
      }
      if (!any_external) out_->insert(TaintFlow{entry_, SourceKind::Internal, internal, s.id, i, st.path});
    }
  }

  const Pdg& pdg_;
  const frontend::AlirProgram& prog_;
  FlowBudget budget_;
  EntryPoint entry_;
  std::set<TaintFlow>* out_ = nullptr;
};

}  // namespace

FlowEnumeration enumerate_flows(const Pdg& pdg, const FlowBudget& budget) {
  FlowEnumeration result;
  std::set<TaintFlow> flows;
  FlowWalker walker(pdg, budget);
  for (const auto& e : pdg.entries()) result.truncated |= walker.run(e, flows);
  result.flows.assign(flows.begin(), flows.end());
  return result;
}

std::vector<TaintFlow> forward_taint(const Pdg& pdg, const std::set<StmtId>& sources,
                                     const std::set<StmtId>& sinks, const FlowBudget& budget) {
  std::vector<TaintFlow> out;
  for (auto& f : enumerate_flows(pdg, budget).flows) {
    if (f.source_kind != SourceKind::External) continue;
    if (!sources.count(f.sources.front())) continue;
    if (!sinks.empty() && !sinks.count(f.sink)) continue;
    out.push_back(std::move(f));
  }
  return out;
}

ReverseDataflow reverse_dataflow(const Pdg& pdg, StmtId sink, int arg_index) {
  const auto& prog = pdg.program();
  ReverseDataflow result;
  const Statement& s = prog.at(sink);

  // Items are (statement, variable whose definition we need at that statement).
  std::set<std::pair<StmtId, std::string>> seen;
  std::deque<std::pair<StmtId, std::string>> work;
  for (int i = 0; i < static_cast<int>(s.args.size()); ++i)
    if (arg_index < 0 || arg_index == i) work.emplace_back(sink, s.args[i]);

  while (!work.empty()) {
    auto [use, var] = work.front();
    work.pop_front();
    if (!seen.insert({use, var}).second) continue;
    for (auto k : pdg.data_predecessors(use)) {
      const auto& e = pdg.data_edges()[k];
      if (e.var != var) continue;
      const Statement& d = prog.at(e.def);
      switch (d.op) {
        case Op::Const:
        case Op::EnvDir:
          result.internal_sources.insert(d.id);
          break;
        case Op::GetExtra:
        case Op::GetUri:
          result.external_sources.insert(d.id);
          break;
        case Op::Concat:
        case Op::LastSeg:
        case Op::Canonical:
        case Op::UriMatch:
          for (const auto& a : d.args) work.emplace_back(d.id, a);
          break;
        case Op::Call: {
          // The CALL defines callee parameter `var`; follow the matching argument.
          const auto& callee = *prog.find(d.text);
          for (std::size_t i = 0; i < callee.params.size(); ++i)
            if (callee.params[i] == var) work.emplace_back(d.id, d.args[i]);
          break;
        }
        default:
          break;
      }
    }
  }
  return result;
}

std::set<StmtId> external_sources(const Pdg& pdg) {
  std::set<StmtId> out;
  for (const auto& id : pdg.nodes())
    if (pdg.program().at(id).is_external_source()) out.insert(id);
  return out;
}

std::set<StmtId> sink_statements(const Pdg& pdg) {
  std::set<StmtId> out;
  for (const auto& id : pdg.nodes())
    if (pdg.program().at(id).op == Op::Sink) out.insert(id);
  return out;
}

}  // namespace pathsentry::graph
