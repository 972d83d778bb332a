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

#include "pathsentry/detect/detect.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <stdexcept>
#include <tuple>

#include "pathsentry/constraints/pathops.hpp"

namespace pathsentry::detect {

using constraints::Goal;
using constraints::SolveResult;
using frontend::Op;
using graph::SourceKind;
using graph::TaintFlow;

std::string_view to_string(FindingClass c) {
  switch (c) {
    case FindingClass::PathTraversal: return "PathTraversal";
    case FindingClass::Hijacking: return "Hijacking";
    case FindingClass::Luring: return "Luring";
  }
  return "?";
}

std::string_view to_string(Validation v) {
  switch (v) {
    case Validation::Confirmed: return "confirmed";
    case Validation::Failed: return "failed";
    case Validation::NotRun: return "not-run";
  }
  return "?";
}

std::unique_ptr<Analysis> prepare(const frontend::AppBundle& bundle, const frontend::PolicySet& linked_policy,
                                  policy::AttackerLevel level, const Budgets& budgets) {
  auto a = std::make_unique<Analysis>();
  a->bundle = &bundle;
  a->policy = linked_policy;
  a->budgets = budgets;
  a->attacker = policy::make_attacker(a->policy, level);
  a->diagnostics = bundle.diagnostics;
  a->entry_constraints = policy::entry_constraints(bundle, a->policy, &a->diagnostics);
  a->attacker_entries = policy::attacker_entries(bundle, a->entry_constraints, level);
  a->files = policy::file_constraints(a->policy, bundle.package(), a->attacker);
  a->pdg = std::make_unique<graph::Pdg>(graph::build_pdg(bundle.program, bundle.entries));
  a->diagnostics.insert(a->diagnostics.end(), a->pdg->diagnostics().begin(), a->pdg->diagnostics().end());
  a->flows = graph::enumerate_flows(*a->pdg, budgets.flow);
  if (a->flows.truncated)
    a->diagnostics.push_back({bundle.package(), 0, "flow enumeration truncated by the path budget"});
  return a;
}

namespace {

const frontend::ComponentDecl* component_of(const Analysis& a, const frontend::EntryPoint& e) {
  return a.bundle->manifest.find_component(e.component);
}

Finding base_finding(const Analysis& a, FindingClass cls, const TaintFlow& flow) {
  const auto& prog = a.bundle->program;
  const auto& s = prog.at(flow.sink);
  const auto& fn = prog.function(flow.sink.function);
  Finding f;
  f.cls = cls;
  f.app = a.bundle->package();
  f.component = flow.entry.component;
  f.entry = prog.function(flow.entry.function).name;
  f.entry_point = flow.entry;
  f.attacker_level = a.attacker.level;
  if (const auto* c = component_of(a, flow.entry); c && c->permission) f.required_permissions.push_back(*c->permission);
  f.sink = {flow.sink, fn.name, fn.file, s.line, s.sink, flow.arg_index};
  f.flow = flow.control_path;
  for (const auto& id : f.flow) {
    const auto& fn2 = prog.function(id.function);
    f.flow_lines.push_back(fn2.file + ":" + std::to_string(fn2.body[id.index].line));
  }
  return f;
}

void summarize(Finding& f, const symexec::PathCondition& pc, const Goal& goal) {
  f.condition = std::make_shared<const symexec::PathCondition>(pc);
  f.goal = goal;
  for (const auto& atom : pc.atoms) f.condition_summary.push_back(symexec::describe(atom));
  f.condition_summary.push_back("sink " + symexec::to_prefix(pc.sink_path));
}

void verdict(Analysis& a, const TaintFlow& flow, std::string detector, std::string outcome, std::string detail = {}) {
  a.verdicts.push_back({flow, std::move(detector), std::move(outcome), std::move(detail)});
}

void log_condition(Analysis& a, const std::string& detector, const TaintFlow& flow,
                   const symexec::PathCondition& pc) {
  const auto& prog = a.bundle->program;
  const auto& fn = prog.function(flow.sink.function);
  std::string line = detector + " " + flow.entry.component + " -> " + fn.file + ":" +
                     std::to_string(prog.at(flow.sink).line) + " arg " + std::to_string(flow.arg_index) + " [" +
                     std::to_string(flow.control_path.size()) + " steps]";
  for (const auto& atom : pc.atoms) line += "\n    " + symexec::describe(atom);
  line += "\n    sink " + symexec::to_prefix(pc.sink_path);
  if (pc.sanitized) line += " (sanitized)";
  a.condition_log.push_back(std::move(line));
}

// Traversal and luring share the pipeline up to the solver's verdict.
std::vector<Finding> input_flows(Analysis& a, FindingClass cls) {
  const bool luring = cls == FindingClass::Luring;
  const std::string detector = luring ? "luring" : "traversal";
  const Goal goal = constraints::make_goal(luring ? Goal::Kind::ReachHijackable : Goal::Kind::ReachPrivate, a.files);
  std::set<std::tuple<frontend::EntryPoint, StmtId, int, std::vector<StmtId>>> seen;
  std::vector<Finding> out;

  for (const auto& flow : a.flows.flows) {
    if (flow.source_kind != SourceKind::External) continue;
    if (!seen.insert({flow.entry, flow.sink, flow.arg_index, flow.control_path}).second) continue;
    if (!a.attacker_entries.count(flow.entry)) {
      verdict(a, flow, detector, "entry-pruned");
      continue;
    }
    if (luring && a.traversals.count({flow.sink, flow.control_path})) {
      verdict(a, flow, detector, "superseded", "traversal finding on the same path");
      continue;
    }
    if (goal.targets.empty()) {
      verdict(a, flow, detector, "file-pruned", luring ? "no attacker-writable directory" : "no private files");
      continue;
    }
    symexec::PathCondition pc;
    try {
      pc = symexec::exec_path(*a.pdg, flow, a.bundle->package(), a.budgets.exec);
    } catch (const std::length_error& e) {
      verdict(a, flow, detector, "unknown", e.what());
      continue;
    }
    log_condition(a, detector, flow, pc);
    if (pc.sanitized) {
      verdict(a, flow, detector, "sanitized");
      continue;
    }
    SolveResult r = constraints::solve(pc, goal, a.budgets.solve);
    a.solver_calls.push_back({flow, detector, pc, goal, r.status});
    if (r.status == SolveResult::Status::Unsat) {
      verdict(a, flow, detector, "unsat");
      continue;
    }
    if (r.status == SolveResult::Status::Unknown) {
      verdict(a, flow, detector, "unknown", r.reason);
      continue;
    }
    a.surviving.insert(flow);

    Finding f = base_finding(a, cls, flow);
    summarize(f, pc, goal);
    f.payload = *r.payload;
    f.payload->component = f.component;
    f.sink_path = r.sink_path;
    if (luring) {
      if (a.files.private_files.empty()) {
        verdict(a, flow, detector, "file-pruned", "no private target for the lure");
        continue;
      }
      f.junction = r.sink_path;
      f.planted_links[f.junction] = *a.files.private_files.begin();
      auto res = policy::resolve(a.files, f.sink_path, f.planted_links);
      if (!a.files.is_private(res.target)) {
        verdict(a, flow, detector, "unsat", "planted link does not reach a private file");
        continue;
      }
      f.target = res.target;
    } else {
      f.target = r.sink_path;
    }
    std::tie(f.validated, f.validation_detail) = validate(a, f, *f.payload, prescribed_fs(f));
    verdict(a, flow, detector, "finding");
    if (!luring) a.traversals.insert({flow.sink, flow.control_path});
    out.push_back(std::move(f));
  }
  return out;
}

// Deepest attacker-writable ancestor of an absolute canonical path.
std::optional<std::string> writable_ancestor(const policy::FileConstraint& fc, const std::string& p) {
  std::optional<std::string> best;
  for (const auto& d : constraints::parent_dirs(p))
    if (fc.attacker_writable(d)) best = d;
  return best;
}

}  // namespace

std::vector<Finding> detect_path_traversal(Analysis& a) { return input_flows(a, FindingClass::PathTraversal); }

std::vector<Finding> detect_luring(Analysis& a) { return input_flows(a, FindingClass::Luring); }

std::set<std::string> literal_values(const graph::Pdg& pdg, std::string_view package, StmtId sink, int arg_index,
                                     std::size_t limit) {
  const auto& prog = pdg.program();
  bool failed = false;
  std::function<std::set<std::string>(StmtId, const std::string&, int)> values =
      [&](StmtId use, const std::string& var, int depth) -> std::set<std::string> {
    std::set<std::string> out;
    if (failed || depth > 32) {
      failed = true;
      return out;
    }
    for (auto k : pdg.data_predecessors(use)) {
      const auto& e = pdg.data_edges()[k];
      if (e.var != var) continue;
      const auto& d = prog.at(e.def);
      std::set<std::string> vs;
      switch (d.op) {
        case Op::Const: vs = {d.text}; break;
        case Op::EnvDir: vs = {symexec::api_summary(d.text, package)}; break;
        case Op::Concat: {
          auto l = values(d.id, d.args[0], depth + 1);
          auto r = values(d.id, d.args[1], depth + 1);
          for (const auto& x : l)
            for (const auto& y : r) vs.insert(x + y);
          break;
        }
        case Op::LastSeg:
          for (const auto& x : values(d.id, d.args[0], depth + 1)) vs.insert(constraints::last_segment(x));
          break;
        case Op::Canonical:
          for (const auto& x : values(d.id, d.args[0], depth + 1))
            if (auto c = constraints::sanitize_canonical(x)) vs.insert(*c);
          break;
        case Op::Call: {
          const auto& callee = *prog.find(d.text);
          for (std::size_t i = 0; i < callee.params.size(); ++i)
            if (callee.params[i] == var) {
              auto v = values(d.id, d.args[i], depth + 1);
              vs.insert(v.begin(), v.end());
            }
          break;
        }
        default: failed = true; break;
      }
      out.insert(vs.begin(), vs.end());
      if (out.size() > limit) failed = true;
      if (failed) return {};
    }
    return out;
  };
  const auto& s = prog.at(sink);
  auto out = values(sink, s.args.at(arg_index), 0);
  if (failed) return {};
  return out;
}

std::vector<Finding> detect_hijacking(Analysis& a) {
  const auto& prog = a.bundle->program;
  std::vector<Finding> out;
  const Goal goal = constraints::make_goal(Goal::Kind::ReachSink, a.files);

  for (const auto& sink : graph::sink_statements(*a.pdg)) {
    const auto& s = prog.at(sink);
    for (int arg = 0; arg < static_cast<int>(s.args.size()); ++arg) {
      std::vector<const TaintFlow*> flows;
      for (const auto& f : a.flows.flows)
        if (f.sink == sink && f.arg_index == arg && f.source_kind == SourceKind::Internal) flows.push_back(&f);
      if (flows.empty()) continue;
      if (!graph::reverse_dataflow(*a.pdg, sink, arg).external_sources.empty()) continue;

      bool hijackable = false;
      for (const auto& v : literal_values(*a.pdg, a.bundle->package(), sink, arg)) {
        auto p = constraints::canonicalize(v);
        if (!p.empty() && p.front() == '/' && writable_ancestor(a.files, p)) hijackable = true;
      }
      if (!hijackable) {
        for (const auto* f : flows) verdict(a, *f, "hijacking", "file-pruned", "no attacker-writable directory on the path");
        continue;
      }

      // One finding per component; the first satisfiable path speaks for it.
      std::map<std::string, Finding> by_component;
      for (const auto* flow : flows) {
        if (!a.attacker_entries.count(flow->entry)) {
          verdict(a, *flow, "hijacking", "entry-pruned");
          continue;
        }
        symexec::PathCondition pc;
        try {
          pc = symexec::exec_path(*a.pdg, *flow, a.bundle->package(), a.budgets.exec);
        } catch (const std::length_error& e) {
          verdict(a, *flow, "hijacking", "unknown", e.what());
          continue;
        }
        log_condition(a, "hijacking", *flow, pc);
        SolveResult r = constraints::solve(pc, goal, a.budgets.solve);
        a.solver_calls.push_back({*flow, "hijacking", pc, goal, r.status});
        if (r.status != SolveResult::Status::Sat) {
          verdict(a, *flow, "hijacking", r.status == SolveResult::Status::Unsat ? "unsat" : "unknown", r.reason);
          continue;
        }
        const std::string p = r.sink_path;
        auto dir = p.empty() || p.front() != '/' ? std::nullopt : writable_ancestor(a.files, p);
        if (!dir) {
          verdict(a, *flow, "hijacking", "file-pruned", "path " + p + " has no attacker-writable directory");
          continue;
        }
        a.surviving.insert(*flow);
        verdict(a, *flow, "hijacking", "finding");
        auto it = by_component.find(flow->entry.component);
        if (it != by_component.end()) {
          ++it->second.control_paths;
          continue;
        }
        Finding f = base_finding(a, FindingClass::Hijacking, *flow);
        summarize(f, pc, goal);
        f.payload = *r.payload;
        f.payload->component = f.component;
        f.sink_path = p;
        for (const auto& h : a.files.hijackable_dirs)
          if (constraints::path_covers(h, *dir)) f.target = h;
        std::string rest = p.substr(*dir == "/" ? 1 : dir->size() + 1);
        f.junction = (*dir == "/" ? "" : *dir) + "/" + rest.substr(0, rest.find('/'));
        if (!a.files.private_files.empty()) {
          const std::string& priv = *a.files.private_files.begin();
          f.planted_links[f.junction] = f.junction == p ? priv + "/" + constraints::basename_of(p) : priv;
        }
        std::tie(f.validated, f.validation_detail) = validate(a, f, *f.payload, prescribed_fs(f));
        by_component.emplace(flow->entry.component, std::move(f));
      }
      for (auto& [c, f] : by_component) out.push_back(std::move(f));
    }
  }
  return out;
}

FsModel prescribed_fs(const Finding& f) {
  FsModel fs;
  fs.planted_links = f.planted_links;
  return fs;
}

std::pair<Validation, std::string> validate(const Analysis& a, const Finding& f, const Payload& payload,
                                            const FsModel& fs) {
  Trace trace = interpret(*a.bundle, f.entry_point, payload, fs, a.files, a.budgets.interpret_steps);
  const int i = f.sink.arg_index;
  for (const auto& ev : trace.sinks) {
    if (ev.stmt != f.sink.stmt) continue;
    const auto& res = ev.resolved.at(i);
    const bool linked = std::find(res.junctions.begin(), res.junctions.end(), f.junction) != res.junctions.end();
    bool ok = false;
    switch (f.cls) {
      case FindingClass::PathTraversal: ok = ev.canonical.at(i) == f.sink_path && a.files.is_private(res.target); break;
      case FindingClass::Luring: ok = linked && a.files.is_private(res.target); break;
      case FindingClass::Hijacking:
        ok = ev.canonical.at(i) == f.sink_path &&
             (f.planted_links.empty() ? writable_ancestor(a.files, f.sink_path).has_value()
                                      : linked && res.target != f.sink_path);
        break;
    }
    if (ok) return {Validation::Confirmed, "sink " + std::string(to_string(ev.kind)) + " reached " + res.target};
  }
  std::string why = "sink not invoked on the expected resource";
  if (trace.outcome != Trace::Outcome::Completed) why += " (" + std::string(to_string(trace.outcome)) + ": " + trace.detail + ")";
  return {Validation::Failed, why};
}

std::vector<Finding> deduplicate(std::vector<Finding> findings) {
  std::set<std::pair<StmtId, std::vector<StmtId>>> traversal;
  for (const auto& f : findings)
    if (f.cls == FindingClass::PathTraversal) traversal.insert({f.sink.stmt, f.flow});
  std::vector<Finding> out;
  for (auto& f : findings)
    if (f.cls != FindingClass::Luring || !traversal.count({f.sink.stmt, f.flow})) out.push_back(std::move(f));
  return out;
}

std::vector<Finding> detect_all(Analysis& a) {
  std::vector<Finding> all = detect_path_traversal(a);
  for (auto* part : {&detect_hijacking, &detect_luring}) {
    auto more = (*part)(a);
    std::move(more.begin(), more.end(), std::back_inserter(all));
  }
  all = deduplicate(std::move(all));
  std::stable_sort(all.begin(), all.end(), [](const Finding& x, const Finding& y) {
    return std::tie(x.cls, x.component, x.sink.stmt, x.sink.arg_index, x.flow) <
           std::tie(y.cls, y.component, y.sink.stmt, y.sink.arg_index, y.flow);
  });
  std::map<std::string, int> counter;
  for (auto& f : all) {
    std::string cls(to_string(f.cls));
    std::transform(cls.begin(), cls.end(), cls.begin(), [](unsigned char c) { return std::tolower(c); });
    std::string stem = cls + "-" + f.app + "-" + f.component + "-L" + std::to_string(f.sink.line);
    f.id = stem + "-" + std::to_string(++counter[stem]);
  }
  return all;
}

Statistics statistics(const Analysis& a) {
  Statistics st;
  const auto& prog = a.bundle->program;
  st.entry_count = a.bundle->entries.size();
  for (const auto& id : a.pdg->nodes()) {
    const auto& s = prog.at(id);
    if (s.is_internal_source()) ++st.sources_internal;
    if (s.is_external_source()) ++st.sources_external;
    if (s.op == Op::Sink) ++st.sink_count;
  }
  st.sources_total = st.sources_internal + st.sources_external;

  std::set<StmtId> reach;
  std::deque<StmtId> work;
  for (const auto& e : a.attacker_entries)
    if (!prog.function(e.function).body.empty()) work.push_back({e.function, 0});
  while (!work.empty()) {
    StmtId id = work.front();
    work.pop_front();
    if (!reach.insert(id).second) continue;
    for (auto k : a.pdg->successors(id)) work.push_back(a.pdg->control_edges()[k].to);
  }
  for (const auto& id : reach)
    if (prog.at(id).is_external_source()) ++st.attackable_sources;

  st.flows_pre = a.flows.flows.size();
  st.flows_post = a.surviving.size();
  st.flows_truncated = a.flows.truncated;
  return st;
}

}  // namespace pathsentry::detect
