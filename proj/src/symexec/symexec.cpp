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

#include "pathsentry/symexec/symexec.hpp"

#include <stdexcept>

namespace pathsentry::symexec {

using frontend::CondOp;
using frontend::Function;
using frontend::Op;
using frontend::Operand;
using frontend::Statement;
using frontend::StmtId;

std::string api_summary(std::string_view api, std::string_view package) {
  const std::string pkg(package);
  if (api == "ExternalStorageDirectory") return "/storage/emulated/0";
  if (api == "FilesDir") return "/data/data/" + pkg + "/files";
  if (api == "CacheDir") return "/data/data/" + pkg + "/cache";
  if (api == "ExternalFilesDir") return "/storage/emulated/0/Android/data/" + pkg + "/files";
  throw std::invalid_argument("no summary for pathname api '" + std::string(api) + "'");
}

namespace {

// A variable's symbolic value: a string expression, or a UriMatcher result.
struct Value {
  ExprPtr str;
  std::string match_table;  // non-empty for match results
};

struct Frame {
  int fn = -1;
  StmtId call_site;
  std::map<std::string, Value> vars;
};

[[noreturn]] void inconsistent(const frontend::AlirProgram& prog, StmtId at, const std::string& why) {
  throw InternalError("control path inconsistent at " + prog.describe(at) + ": " + why);
}

}  // namespace

PathCondition exec_path(const graph::Pdg& pdg, const graph::TaintFlow& flow, std::string_view package,
                        const ExecBudget& budget) {
  const auto& prog = pdg.program();
  const auto& path = flow.control_path;
  if (path.empty() || path.back() != flow.sink) inconsistent(prog, flow.sink, "path does not end at the sink");
  if (path.front() != StmtId{flow.entry.function, 0}) inconsistent(prog, path.front(), "path does not start at entry");

  PathCondition pc;
  pc.flow = flow;
  std::vector<Frame> frames;
  {
    Frame f;
    f.fn = flow.entry.function;
    for (const auto& p : prog.function(f.fn).params) f.vars[p] = {StrExpr::lit(""), {}};
    frames.push_back(std::move(f));
  }

  auto get = [&](StmtId at, const std::string& var) -> const Value& {
    auto& vars = frames.back().vars;
    auto it = vars.find(var);
    if (it == vars.end()) inconsistent(prog, at, "variable '" + var + "' unassigned on this path");
    return it->second;
  };
  auto str = [&](StmtId at, const std::string& var) {
    const Value& v = get(at, var);
    if (!v.str || !v.match_table.empty()) inconsistent(prog, at, "'" + var + "' is not a string");
    return v.str;
  };

  for (std::size_t k = 0; k < path.size(); ++k) {
    const StmtId id = path[k];
    const Statement& s = prog.at(id);
    if (frames.back().fn != id.function) inconsistent(prog, id, "statement outside the current frame");
    auto& vars = frames.back().vars;
    const bool last = k + 1 == path.size();
    const StmtId next = last ? StmtId{} : path[k + 1];

    switch (s.op) {
      case Op::Const: vars[s.dest] = {StrExpr::lit(s.text), {}}; break;
      case Op::EnvDir: vars[s.dest] = {StrExpr::lit(api_summary(s.text, package)), {}}; break;
      case Op::GetExtra:
        vars[s.dest] = {StrExpr::sym({Symbol::Kind::Extra, s.text}, id), {}};
        pc.symbols.insert({Symbol::Kind::Extra, s.text});
        break;
      case Op::GetUri:
        vars[s.dest] = {StrExpr::sym({Symbol::Kind::Uri, ""}, id), {}};
        pc.symbols.insert({Symbol::Kind::Uri, ""});
        break;
      case Op::Concat: vars[s.dest] = {StrExpr::concat(str(id, s.args[0]), str(id, s.args[1])), {}}; break;
      case Op::LastSeg: vars[s.dest] = {StrExpr::last_seg(str(id, s.args[0])), {}}; break;
      case Op::Canonical: vars[s.dest] = {StrExpr::canonical(str(id, s.args[0])), {}}; break;
      case Op::UriMatch:
        vars[s.dest] = {str(id, s.args[0]), s.text};
        pc.uri_tables[s.text] = prog.uri_tables.at(s.text);
        break;
      case Op::If: {
        if (last) inconsistent(prog, id, "path ends at a branch");
        const Function& fn = prog.function(id.function);
        StmtId target{id.function, fn.labels.at(s.text)};
        StmtId fall{id.function, id.index + 1};
        bool taken = next == target;
        if (!taken && !(s.cond.op != CondOp::True && next == fall))
          inconsistent(prog, id, "successor is neither branch target nor fall-through");
        if (s.cond.op == CondOp::True || target == fall) break;
        Atom atom;
        const Value& lhs = get(id, s.cond.lhs);
        bool positive = true;
        switch (s.cond.op) {
          case CondOp::Eq:
          case CondOp::Ne:
            positive = s.cond.op == CondOp::Eq;
            if (!lhs.match_table.empty()) {
              atom.kind = Atom::Kind::UriMatch;
              atom.lhs = lhs.str;
              atom.table = lhs.match_table;
              atom.code = s.cond.rhs.value;
            } else {
              atom.kind = Atom::Kind::StrEq;
              atom.lhs = lhs.str;
              atom.rhs = s.cond.rhs.kind == Operand::Kind::Var ? str(id, s.cond.rhs.text)
                                                                : StrExpr::lit(s.cond.rhs.text);
            }
            break;
          case CondOp::StartsWith:
          case CondOp::NotStartsWith:
            positive = s.cond.op == CondOp::StartsWith;
            atom.kind = Atom::Kind::StartsWith;
            atom.lhs = str(id, s.cond.lhs);
            atom.literal = s.cond.rhs.text;
            break;
          case CondOp::Contains:
          case CondOp::NotContains:
            positive = s.cond.op == CondOp::Contains;
            atom.kind = Atom::Kind::Contains;
            atom.lhs = str(id, s.cond.lhs);
            atom.literal = s.cond.rhs.text;
            break;
          case CondOp::True: break;
        }
        atom.negated = positive != taken;
        pc.atoms.push_back(std::move(atom));
        if (pc.atoms.size() > budget.max_atoms) throw std::length_error("path condition exceeds atom budget");
        break;
      }
      case Op::Sink:
        if (last) {
          pc.sink_path = str(id, s.args.at(flow.arg_index));
          pc.sink_kind = s.sink;
        }
        break;
      default: break;
    }
    if (last) break;

    // Frame bookkeeping for the transition to `next`.
    if (s.op == Op::Call && next == StmtId{prog.function_index.at(s.text), 0}) {
      const Function& callee = prog.function(next.function);
      Frame nf;
      nf.fn = next.function;
      nf.call_site = id;
      for (std::size_t i = 0; i < callee.params.size(); ++i) nf.vars[callee.params[i]] = get(id, s.args[i]);
      frames.push_back(std::move(nf));
      continue;
    }
    const Function& fn = prog.function(id.function);
    bool local = false;
    if (next.function == id.function) {
      if (s.op == Op::Call) local = next.index == id.index + 1;
      else
        for (int t : graph::local_successors(fn, id.index)) local |= next.index == t;
    }
    if (local) continue;
    while (true) {
      if (frames.size() <= 1) inconsistent(prog, next, "return past the entry frame");
      StmtId site = frames.back().call_site;
      frames.pop_back();
      if (next == StmtId{site.function, site.index + 1}) break;
      if (site.index + 1 < static_cast<int>(prog.function(site.function).body.size()))
        inconsistent(prog, next, "return does not match its call site");
    }
  }
  if (!pc.sink_path) inconsistent(prog, flow.sink, "sink not executed");

  auto occ = sym_occurrences(pc.sink_path);
  std::size_t under = 0;
  for (const auto& o : occ) under += o.under_canonical ? 1 : 0;
  pc.sanitized = !occ.empty() && under == occ.size();
  pc.mixed = under > 0 && under < occ.size();
  return pc;
}

std::vector<PathCondition> exec_all_entries(const graph::Pdg& pdg, const std::vector<graph::TaintFlow>& flows,
                                            StmtId sink, const std::set<frontend::EntryPoint>& entries,
                                            std::string_view package, const ExecBudget& budget) {
  std::vector<PathCondition> out;
  for (const auto& f : flows) {
    if (f.sink != sink || f.source_kind != graph::SourceKind::Internal) continue;
    if (!entries.count(f.entry)) continue;
    out.push_back(exec_path(pdg, f, package, budget));
  }
  return out;
}

}  // namespace pathsentry::symexec
