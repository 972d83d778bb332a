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

#include "support.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pathsentry/cli/exploit.hpp"
#include "pathsentry/constraints/smtlib.hpp"
#include "pathsentry/frontend/alir.hpp"
#include "pathsentry/frontend/bundle.hpp"

namespace pathsentry::testing {

namespace fs = std::filesystem;
using constraints::Goal;
using constraints::Payload;
using symexec::Atom;
using symexec::ExprPtr;
using symexec::StrExpr;
using symexec::Symbol;

fs::path fixture_dir() { return PATHSENTRY_FIXTURE_DIR; }
fs::path golden_dir() { return PATHSENTRY_GOLDEN_DIR; }
fs::path cli_binary() { return PATHSENTRY_CLI; }

std::optional<std::string> z3_binary() {
  std::string configured = PATHSENTRY_Z3;
  if (!configured.empty()) return configured;
  return constraints::find_z3();
}

fs::path fixture(std::string_view bundle) { return fixture_dir() / std::string(bundle); }
fs::path base_policy() { return fixture_dir() / "base.policy"; }

cli::Inputs load_corpus() { return cli::load_inputs(frontend::find_bundles(fixture_dir()), base_policy()); }

std::multiset<Expected> expected_findings(const fs::path& bundle, policy::AttackerLevel level) {
  std::ifstream in(bundle / "expected.json");
  auto j = nlohmann::json::parse(in);
  std::multiset<Expected> out;
  for (const auto& e : j.at(std::string(policy::to_string(level))))
    out.insert({e.at("class").get<std::string>(), e.at("component").get<std::string>(), e.at("sinkLine").get<int>()});
  return out;
}

std::multiset<Expected> actual_findings(const cli::BundleReport& report) {
  std::multiset<Expected> out;
  for (const auto& f : report.findings) out.insert({std::string(detect::to_string(f.cls)), f.component, f.sink.line});
  return out;
}

frontend::AppBundle with_canonical_sinks(const frontend::AppBundle& bundle) {
  std::istringstream in(frontend::print_alir(bundle.program));
  std::ostringstream out;
  std::string line;
  int fresh = 0;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::string op, kind;
    words >> op >> kind;
    if (op != "sink") {
      out << line << "\n";
      continue;
    }
    std::string rewritten = "  sink " + kind;
    std::string arg;
    while (words >> arg) {
      std::string v = "canon" + std::to_string(fresh++);
      out << "  " << v << " = canonical " << arg << "\n";
      rewritten += " " + v;
    }
    out << rewritten << "\n";
  }
  return frontend::link_bundle(bundle.manifest, frontend::parse_alir(out.str(), "sanitized.alir"), bundle.dir);
}

std::string stack_normalize(std::string_view path) {
  const bool absolute = !path.empty() && path[0] == '/';
  std::vector<std::string> stack;
  int ups = 0;
  std::string cur;
  auto flush = [&] {
    if (cur == "..") {
      if (!stack.empty()) stack.pop_back();
      else if (!absolute) ++ups;
    } else if (!cur.empty() && cur != ".") {
      stack.push_back(cur);
    }
    cur.clear();
  };
  for (char c : path) {
    if (c == '/') flush();
    else cur += c;
  }
  flush();
  std::vector<std::string> parts(static_cast<std::size_t>(ups), "..");
  parts.insert(parts.end(), stack.begin(), stack.end());
  std::string out = absolute ? "/" : "";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "/" : "") + parts[i];
  return out.empty() ? "." : out;
}

namespace {

std::vector<std::string> segments_of(std::string_view p) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : p) {
    if (c == '/') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Both absolute; prefix segments lead path segments.
bool under(std::string_view prefix, std::string_view path, bool strict) {
  if (path.empty() || path[0] != '/' || prefix.empty() || prefix[0] != '/') return false;
  auto a = segments_of(prefix), b = segments_of(path);
  if (a.size() > b.size() || (strict && a.size() == b.size())) return false;
  return std::equal(a.begin(), a.end(), b.begin());
}

std::string decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

bool matches(const frontend::UriEntry& e, const std::string& uri) {
  const std::string head = "content://" + e.authority;
  if (uri.compare(0, head.size(), head) != 0) return false;
  std::string rest = uri.substr(head.size());
  auto pat = segments_of(e.path_pattern);
  std::vector<std::string> got;
  if (!rest.empty()) {
    if (rest[0] != '/') return false;
    std::string cur;
    for (char c : rest.substr(1)) {
      if (c == '/') {
        got.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    got.push_back(cur);
  }
  if (got.size() != pat.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i].empty()) return false;
    if (pat[i] == "*") continue;
    if (pat[i] == "#") {
      for (char c : got[i])
        if (c < '0' || c > '9') return false;
      continue;
    }
    if (pat[i] != got[i]) return false;
  }
  return true;
}

void leading_literal(const ExprPtr& e, std::string& out, bool& stopped) {
  if (stopped) return;
  if (e->kind == StrExpr::Kind::Concat) {
    leading_literal(e->lhs, out, stopped);
    leading_literal(e->rhs, out, stopped);
  } else if (e->kind == StrExpr::Kind::Lit) {
    out += e->literal;
  } else {
    stopped = true;
  }
}

}  // namespace

std::uint8_t oracle_access(const std::vector<frontend::AllowRule>& rules, const std::set<std::string>& classes,
                           std::string_view path) {
  std::uint8_t acc = 0;
  for (const auto& r : rules)
    if (classes.count(r.subject_class) && under(r.path_prefix, path, false)) acc |= r.access;
  return acc;
}

std::optional<std::string> ConditionOracle::eval(const ExprPtr& e, const Payload& p) const {
  switch (e->kind) {
    case StrExpr::Kind::Lit: return e->literal;
    case StrExpr::Kind::Sym: {
      if (e->symbol.kind == Symbol::Kind::Uri) return p.uri;
      auto it = p.extras.find(e->symbol.key);
      if (it == p.extras.end()) return std::nullopt;
      return it->second;
    }
    case StrExpr::Kind::Concat: {
      auto a = eval(e->lhs, p), b = eval(e->rhs, p);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case StrExpr::Kind::LastSeg: {
      auto a = eval(e->lhs, p);
      if (!a) return std::nullopt;
      std::string last = a->substr(a->find_last_of('/') == std::string::npos ? 0 : a->find_last_of('/') + 1);
      return a->rfind("content://", 0) == 0 ? decode(last) : last;
    }
    case StrExpr::Kind::Canonical: {
      auto a = eval(e->lhs, p);
      if (!a) return std::nullopt;
      std::string padded = "/" + *a + "/";
      if (padded.find("/../") != std::string::npos) return std::nullopt;
      return stack_normalize(*a);
    }
  }
  return std::nullopt;
}

bool ConditionOracle::atom(const Atom& a, const Payload& p) const {
  auto lhs = eval(a.lhs, p);
  if (!lhs) return false;
  bool v = false;
  switch (a.kind) {
    case Atom::Kind::StrEq: {
      auto rhs = eval(a.rhs, p);
      if (!rhs) return false;
      v = *lhs == *rhs;
      break;
    }
    case Atom::Kind::StartsWith: v = lhs->rfind(a.literal, 0) == 0; break;
    case Atom::Kind::Contains: v = lhs->find(a.literal) != std::string::npos; break;
    case Atom::Kind::UriMatch: {
      long code = -1;
      for (const auto& e : cond.uri_tables.at(a.table))
        if (matches(e, *lhs)) {
          code = e.code;
          break;
        }
      v = code == a.code;
      break;
    }
  }
  return v != a.negated;
}

bool ConditionOracle::goal_met(const Payload& p) const {
  auto raw = eval(cond.sink_path, p);
  if (!raw) return false;
  if (goal.kind == Goal::Kind::ReachSink) return true;
  const std::string c = stack_normalize(*raw);
  if (c[0] != '/') return false;

  ExprPtr top = cond.sink_path;
  while (top->kind == StrExpr::Kind::Canonical) top = top->lhs;
  std::string lit;
  bool stopped = false;
  leading_literal(top, lit, stopped);
  // The directory given by the leading literal text, unless it is the root
  // or the path has no input at all.
  if (auto slash = lit.find_last_of('/'); stopped && slash != std::string::npos) {
    const std::string dir = stack_normalize(lit.substr(0, slash + 1));
    if (dir != "/" && under(dir, c, false)) return false;
  }

  for (const auto& x : goal.excluded)
    if (under(x, c, false)) return false;
  for (const auto& t : goal.targets)
    if (under(t, c, true)) return true;
  return false;
}

bool ConditionOracle::satisfies(const Payload& p) const {
  for (const auto& a : cond.atoms)
    if (!atom(a, p)) return false;
  return goal_met(p);
}

std::vector<std::string> bounded_values(const std::vector<std::string>& segments, int depth) {
  std::vector<std::string> out{"", "/"};
  std::vector<std::string> level{""};
  for (int d = 1; d <= depth; ++d) {
    std::vector<std::string> next;
    for (const auto& prefix : level)
      for (const auto& s : segments) next.push_back(prefix.empty() ? s : prefix + "/" + s);
    for (const auto& v : next) {
      out.push_back(v);
      out.push_back("/" + v);
      out.push_back(v + "/");
      out.push_back("/" + v + "/");
    }
    level = std::move(next);
  }
  return out;
}

RandomCondition random_condition(std::mt19937& rng) {
  auto pick = [&](const auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
  static const std::vector<std::string> bases{"/a/", "/a/b/", "/b/", "/", "/a/b", "/b/a/", ""};
  static const std::vector<std::string> lits{"..", "a", "b", "/", "/a", "a/", "./", "a/b", "/a/b", "../", "b/..", "/b/"};
  static const std::vector<std::string> targets{"/a", "/b", "/a/b", "/b/a", "/"};
  static const std::vector<std::string> excluded{"/a/a", "/b/b", "/a/b/b", "/b"};

  RandomCondition rc;
  const Symbol a{Symbol::Kind::Extra, "a"}, b{Symbol::Kind::Extra, "b"};
  rc.cond.symbols.insert(a);
  ExprPtr sa = StrExpr::sym(a);
  const std::string base = pick(bases);
  ExprPtr value = sa;
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 1: value = StrExpr::canonical(sa); break;
    case 2: value = StrExpr::last_seg(sa); break;
    default: break;
  }
  ExprPtr path = base.empty() ? value : StrExpr::concat(StrExpr::lit(base), value);
  if (chance(0.25)) path = StrExpr::concat(path, StrExpr::lit("/b"));
  rc.cond.sink_path = path;

  int n_atoms = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int i = 0; i < n_atoms; ++i) {
    Atom at;
    const bool on_b = chance(0.25);
    if (on_b) rc.cond.symbols.insert(b);
    at.lhs = StrExpr::sym(on_b ? b : a);
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: at.kind = Atom::Kind::StartsWith; at.literal = pick(lits); break;
      case 1: at.kind = Atom::Kind::Contains; at.literal = pick(lits); break;
      default: at.kind = Atom::Kind::StrEq; at.rhs = StrExpr::lit(pick(lits)); break;
    }
    at.negated = chance(0.5);
    rc.cond.atoms.push_back(at);
  }

  rc.goal.kind = chance(0.6) ? Goal::Kind::ReachPrivate : Goal::Kind::ReachHijackable;
  std::set<std::string> t;
  while (t.empty())
    for (const auto& x : targets)
      if (chance(0.3)) t.insert(x);
  rc.goal.targets = t;
  for (const auto& x : excluded)
    if (chance(0.25)) rc.goal.excluded.insert(x);

  rc.text = "sink " + symexec::to_prefix(rc.cond.sink_path);
  for (const auto& at : rc.cond.atoms) rc.text += "; " + symexec::describe(at);
  rc.text += "; goal " + std::string(constraints::to_string(rc.goal.kind)) + " targets";
  for (const auto& x : rc.goal.targets) rc.text += " " + x;
  rc.text += " excluded";
  for (const auto& x : rc.goal.excluded) rc.text += " " + x;
  return rc;
}

const std::vector<std::string>& brute_domain() {
  static const auto domain = bounded_values({"..", ".", "a", "b", "x"}, 5);
  return domain;
}

std::optional<Payload> brute_force(const RandomCondition& rc) {
  const auto& domain = brute_domain();
  ConditionOracle oracle{rc.cond, rc.goal};
  const Symbol b{Symbol::Kind::Extra, "b"};

  Payload p;
  for (const auto& s : rc.cond.symbols) p.extras[s.key] = "";
  // Atoms on b never touch a, so b is searched on its own first.
  if (rc.cond.symbols.count(b)) {
    bool found = false;
    for (const auto& v : domain) {
      p.extras["b"] = v;
      bool ok = true;
      for (const auto& at : rc.cond.atoms)
        if (at.lhs->symbol == b && !oracle.atom(at, p)) ok = false;
      if (ok) {
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  for (const auto& v : domain) {
    p.extras["a"] = v;
    if (oracle.satisfies(p)) return p;
  }
  return std::nullopt;
}

}  // namespace pathsentry::testing

namespace pathsentry::testing {

std::vector<std::string> path_universe(int depth) {
  std::vector<std::string> out{"/"};
  std::vector<std::string> frontier{""};
  for (int d = 0; d < depth; ++d) {
    std::vector<std::string> next;
    for (const auto& p : frontier)
      for (const char* s : {"a", "b", "c", "d"}) next.push_back(p + "/" + s);
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

std::vector<frontend::AllowRule> small_rule_space(bool with_readwrite) {
  std::vector<frontend::AllowRule> out;
  for (const char* c : {"v", "LV1", "LV2"})
    for (const char* p : {"/a", "/a/b", "/a/b/c", "/d"}) {
      out.push_back({c, p, kRead});
      out.push_back({c, p, kWrite});
      if (with_readwrite) out.push_back({c, p, kReadWrite});
    }
  return out;
}

frontend::PolicySet small_policy(std::vector<frontend::AllowRule> rules) {
  frontend::PolicySet p;
  p.subjects.push_back({"v", PrivilegeLevel::LV2, {}});
  p.allow_rules = std::move(rules);
  return p;
}

std::optional<std::string> file_constraints_mismatch(const frontend::PolicySet& p,
                                                     const std::vector<std::string>& paths) {
  const std::string victim = "v";
  const std::set<std::string> victim_classes{"v", "LV2"};
  const std::set<std::string> attacker{std::string(policy::kAttackerSubjectClass)};
  for (auto level : {policy::AttackerLevel::LV1, policy::AttackerLevel::LV2root}) {
    auto fc = policy::file_constraints(p, victim, policy::make_attacker(p, level));
    std::set<std::string> want_private, want_hijackable;
    for (const auto& r : p.allow_rules) {
      std::uint8_t v = oracle_access(p.allow_rules, victim_classes, r.path_prefix);
      std::uint8_t a = oracle_access(p.allow_rules, attacker, r.path_prefix);
      if (victim_classes.count(r.subject_class) && v != 0 && a == 0) want_private.insert(r.path_prefix);
      if (attacker.count(r.subject_class) && (a & kWrite)) want_hijackable.insert(r.path_prefix);
    }
    if (fc.private_files != want_private) return "private files differ under\n" + frontend::print_policy(p);
    if (fc.hijackable_dirs != want_hijackable) return "hijackable dirs differ under\n" + frontend::print_policy(p);
    for (const auto& u : paths) {
      std::uint8_t v = oracle_access(p.allow_rules, victim_classes, u);
      std::uint8_t a = oracle_access(p.allow_rules, attacker, u);
      if (fc.victim_access.at(u) != v || fc.attacker_access.at(u) != a || fc.is_private(u) != (v != 0 && a == 0) ||
          fc.attacker_writable(u) != ((a & kWrite) != 0))
        return "disagreement at " + u + " under\n" + frontend::print_policy(p);
    }
  }
  return std::nullopt;
}

Agreement brute_agreement(int count, unsigned seed) {
  const std::set<std::string> domain(brute_domain().begin(), brute_domain().end());
  std::mt19937 rng(seed);
  Agreement out;
  for (int i = 0; i < count; ++i) {
    auto rc = random_condition(rng);
    auto r = constraints::solve(rc.cond, rc.goal);
    auto bf = brute_force(rc);
    if (r.status == constraints::SolveResult::Status::Unknown) {
      out.failures.push_back("unknown: " + rc.text);
      continue;
    }
    const bool sat = r.status == constraints::SolveResult::Status::Sat;
    if (bf && !sat) out.failures.push_back("brute force found a=" + bf->extras["a"] + ": " + rc.text);
    if (!sat) {
      ++out.unsat;
      continue;
    }
    ++out.sat;
    const ConditionOracle oracle{rc.cond, rc.goal};
    if (!oracle.satisfies(*r.payload)) out.failures.push_back("witness rejected by the oracle: " + rc.text);
    if (!bf) {
      bool inside = true;
      for (const auto& [key, value] : r.payload->extras) inside = inside && domain.count(value);
      if (inside) out.failures.push_back("brute force missed an in-domain witness: " + rc.text);
      ++out.beyond;
    }
  }
  return out;
}

std::string random_path(std::mt19937& rng) {
  static const std::vector<std::string> pieces{"a", "bc", "..", ".", "", "d.e", "...", "x"};
  std::uniform_int_distribution<int> len(0, 9), coin(0, 1);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::string p = coin(rng) ? "/" : "";
  int n = len(rng);
  for (int i = 0; i < n; ++i) {
    p += pieces[pick(rng)];
    if (i + 1 < n || coin(rng)) p += std::string(1 + (coin(rng) && coin(rng)), '/');
  }
  return p;
}

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

CliRun run_cli(const std::string& args, const std::string& env) {
  std::string cmd = "cd " + shell_quote(fixture_dir().parent_path().string()) + " && " + env + " " +
                    shell_quote(cli_binary().string()) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string corpus_args() {
  std::string out;
  for (const auto& b : frontend::find_bundles(fixture_dir())) out += " fixtures/" + b.filename().string();
  return out;
}

std::optional<std::string> replay_launch(const fs::path& launch_file, const detect::Finding& f,
                                         const frontend::AppBundle& bundle, const frontend::PolicySet& policy) {
  cli::LaunchRecipe recipe;
  try {
    recipe = cli::parse_launch(cli::json::parse(slurp(launch_file)));
  } catch (const std::exception& e) {
    return std::string("unreadable recipe: ") + e.what();
  }
  if (recipe.finding != f.id) return "recipe names " + recipe.finding;
  std::optional<frontend::EntryPoint> entry;
  for (const auto& e : bundle.entries)
    if (e.component == recipe.component && bundle.program.function(e.function).name == recipe.entry) entry = e;
  if (!entry) return "no entry " + recipe.component + "." + recipe.entry;
  auto fc = policy::file_constraints(policy, bundle.package(), policy::make_attacker(policy, f.attacker_level));
  auto trace = detect::interpret(bundle, *entry, recipe.payload, recipe.fs, fc);
  // reports name sinks by function and line
  for (const auto& e : trace.sinks) {
    if (bundle.program.at(e.stmt).line != f.sink.line || bundle.program.function(e.stmt.function).name != f.sink.function)
      continue;
    const auto& res = e.resolved.at(static_cast<std::size_t>(f.sink.arg_index));
    if (res.target.rfind(f.sink_path, 0) != 0 && res.junctions.empty()) return "sink resolved to " + res.target;
    if (f.cls == detect::FindingClass::PathTraversal && !fc.is_private(res.target))
      return res.target + " is not private";
    if (f.cls != detect::FindingClass::PathTraversal && res.junctions.empty()) return "no planted link was followed";
    return std::nullopt;
  }
  return std::string("sink not reached: ") + std::string(detect::to_string(trace.outcome));
}

}  // namespace pathsentry::testing
