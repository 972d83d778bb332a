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

#include "pathsentry/detect/interpreter.hpp"

#include <variant>

#include "pathsentry/constraints/pathops.hpp"
#include "pathsentry/symexec/symexec.hpp"

namespace pathsentry::detect {

using frontend::CondOp;
using frontend::Op;
using frontend::Operand;
using frontend::Statement;

const SinkEvent* Trace::first_at(StmtId stmt) const {
  for (const auto& e : sinks)
    if (e.stmt == stmt) return &e;
  return nullptr;
}

std::string_view to_string(Trace::Outcome outcome) {
  switch (outcome) {
    case Trace::Outcome::Completed: return "completed";
    case Trace::Outcome::IncompletePayload: return "incomplete-payload";
    case Trace::Outcome::SanitizerRejected: return "sanitizer-rejected";
    case Trace::Outcome::StepBudget: return "step-budget";
  }
  return "?";
}

namespace {

using Value = std::variant<std::string, long>;

struct Frame {
  int fn = -1;
  int pc = 0;
  std::map<std::string, Value> vars;
};

struct Stop {
  Trace::Outcome outcome;
  std::string detail;
};

}  // namespace

Trace interpret(const frontend::AppBundle& bundle, const frontend::EntryPoint& entry, const Payload& payload,
                const FsModel& fs, const policy::FileConstraint& fc, std::size_t step_budget) {
  const auto& prog = bundle.program;
  Trace trace;
  std::vector<Frame> stack;
  {
    Frame f;
    f.fn = entry.function;
    for (const auto& p : prog.function(f.fn).params) f.vars[p] = std::string();
    stack.push_back(std::move(f));
  }

  auto str = [&](const Frame& f, const std::string& v) -> const std::string& { return std::get<std::string>(f.vars.at(v)); };

  try {
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& fn = prog.function(f.fn);
      if (f.pc >= static_cast<int>(fn.body.size())) {
        stack.pop_back();
        continue;
      }
      if (++trace.steps > step_budget) throw Stop{Trace::Outcome::StepBudget, "exceeded " + std::to_string(step_budget) + " steps"};
      const Statement& s = fn.body[f.pc];
      int next = f.pc + 1;
      switch (s.op) {
        case Op::Const: f.vars[s.dest] = s.text; break;
        case Op::EnvDir: f.vars[s.dest] = symexec::api_summary(s.text, bundle.package()); break;
        case Op::GetExtra: {
          auto it = payload.extras.find(s.text);
          if (it == payload.extras.end())
            throw Stop{Trace::Outcome::IncompletePayload, "no value for extra '" + s.text + "' at " + fn.file + ":" +
                                                              std::to_string(s.line)};
          f.vars[s.dest] = it->second;
          break;
        }
        case Op::GetUri:
          if (!payload.uri)
            throw Stop{Trace::Outcome::IncompletePayload, "no uri at " + fn.file + ":" + std::to_string(s.line)};
          f.vars[s.dest] = *payload.uri;
          break;
        case Op::Concat: f.vars[s.dest] = str(f, s.args[0]) + str(f, s.args[1]); break;
        case Op::LastSeg: f.vars[s.dest] = constraints::last_segment(str(f, s.args[0])); break;
        case Op::Canonical: {
          auto v = constraints::sanitize_canonical(str(f, s.args[0]));
          if (!v)
            throw Stop{Trace::Outcome::SanitizerRejected, "canonical refused " + frontend::quote(str(f, s.args[0])) +
                                                              " at " + fn.file + ":" + std::to_string(s.line)};
          f.vars[s.dest] = *v;
          break;
        }
        case Op::UriMatch: f.vars[s.dest] = constraints::uri_match(prog.uri_tables.at(s.text), str(f, s.args[0])); break;
        case Op::If: {
          bool taken = true;
          if (s.cond.op != CondOp::True) {
            const Value& lhs = f.vars.at(s.cond.lhs);
            const Operand& r = s.cond.rhs;
            switch (s.cond.op) {
              case CondOp::Eq:
              case CondOp::Ne: {
                bool eq;
                if (std::holds_alternative<long>(lhs)) {
                  long rv = r.kind == Operand::Kind::Var ? std::get<long>(f.vars.at(r.text)) : r.value;
                  eq = std::get<long>(lhs) == rv;
                } else {
                  const std::string& rv = r.kind == Operand::Kind::Var ? str(f, r.text) : r.text;
                  eq = std::get<std::string>(lhs) == rv;
                }
                taken = (s.cond.op == CondOp::Eq) == eq;
                break;
              }
              case CondOp::StartsWith:
              case CondOp::NotStartsWith:
                taken = starts_with(std::get<std::string>(lhs), r.text) == (s.cond.op == CondOp::StartsWith);
                break;
              case CondOp::Contains:
              case CondOp::NotContains:
                taken = (std::get<std::string>(lhs).find(r.text) != std::string::npos) ==
                        (s.cond.op == CondOp::Contains);
                break;
              case CondOp::True: break;
            }
          }
          if (taken) next = fn.labels.at(s.text);
          break;
        }
        case Op::Call: {
          int callee = prog.function_index.at(s.text);
          Frame nf;
          nf.fn = callee;
          const auto& cf = prog.function(callee);
          for (std::size_t i = 0; i < cf.params.size(); ++i) nf.vars[cf.params[i]] = f.vars.at(s.args[i]);
          f.pc = next;
          stack.push_back(std::move(nf));
          continue;
        }
        case Op::Sink: {
          SinkEvent ev;
          ev.stmt = s.id;
          ev.kind = s.sink;
          for (const auto& a : s.args) {
            const std::string& v = str(f, a);
            ev.args.push_back(v);
            ev.canonical.push_back(constraints::canonicalize(v));
            ev.resolved.push_back(policy::resolve(fc, ev.canonical.back(), fs.planted_links));
            const auto& t = ev.resolved.back().target;
            ev.target_exists.push_back(fs.existing_files.count(t) > 0 || fc.is_private(t));
          }
          trace.sinks.push_back(std::move(ev));
          break;
        }
        case Op::Return:
          stack.pop_back();
          continue;
        case Op::Label: break;
      }
      f.pc = next;
    }
  } catch (const Stop& stop) {
    trace.outcome = stop.outcome;
    trace.detail = stop.detail;
  }
  return trace;
}

}  // namespace pathsentry::detect
