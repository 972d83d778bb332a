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

#include "pathsentry/constraints/solver.hpp"

#include <algorithm>
#include <numeric>

#include "pathsentry/constraints/pathops.hpp"

namespace pathsentry::constraints {

using symexec::StrExpr;

std::string_view to_string(Goal::Kind kind) {
  switch (kind) {
    case Goal::Kind::ReachPrivate: return "ReachPrivate";
    case Goal::Kind::ReachHijackable: return "ReachHijackable";
    case Goal::Kind::ReachSink: return "ReachSink";
  }
  return "?";
}

std::string_view to_string(SolveResult::Status status) {
  switch (status) {
    case SolveResult::Status::Sat: return "sat";
    case SolveResult::Status::Unsat: return "unsat";
    case SolveResult::Status::Unknown: return "unknown";
  }
  return "?";
}

Goal make_goal(Goal::Kind kind, const policy::FileConstraint& fc) {
  Goal g;
  g.kind = kind;
  if (kind == Goal::Kind::ReachPrivate) {
    g.targets = fc.private_files;
    for (const auto& r : fc.attacker_access.rules()) g.excluded.insert(r.path_prefix);
  } else if (kind == Goal::Kind::ReachHijackable) {
    g.targets = fc.hijackable_dirs;
  }
  return g;
}

std::optional<std::string> sink_base(const ExprPtr& sink_path) {
  if (sink_path->kind == StrExpr::Kind::Canonical) return sink_base(sink_path->lhs);
  std::string lit = symexec::literal_prefix(sink_path);
  auto pos = lit.rfind('/');
  if (pos == std::string::npos) return std::nullopt;
  std::string dir = lit.substr(0, pos);
  if (dir.empty() || symexec::symbols_of(sink_path).empty()) return std::nullopt;
  std::string c = canonicalize(dir);
  if (c == "/") return std::nullopt;
  return c;
}

bool goal_met(const Goal& goal, std::string_view p, const std::optional<std::string>& base) {
  if (goal.kind == Goal::Kind::ReachSink) return true;
  if (p.empty() || p.front() != '/') return false;
  if (base && path_covers(*base, p)) return false;
  for (const auto& e : goal.excluded)
    if (path_covers(e, p)) return false;
  for (const auto& t : goal.targets)
    if (p != t && path_covers(t, p)) return true;
  return false;
}

std::size_t Payload::length() const {
  std::size_t n = uri ? uri->size() : 0;
  for (const auto& [k, v] : extras) n += v.size();
  return n;
}

std::optional<std::string> symbol_value(const Payload& payload, const Symbol& symbol) {
  if (symbol.kind == Symbol::Kind::Uri) return payload.uri;
  auto it = payload.extras.find(symbol.key);
  if (it == payload.extras.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> sanitize_canonical(std::string_view path) {
  if (has_dotdot_segment(path)) return std::nullopt;
  return canonicalize(path);
}

std::optional<std::string> evaluate(const ExprPtr& e, const Payload& payload) {
  switch (e->kind) {
    case StrExpr::Kind::Lit: return e->literal;
    case StrExpr::Kind::Sym: return symbol_value(payload, e->symbol);
    case StrExpr::Kind::Concat: {
      auto a = evaluate(e->lhs, payload);
      if (!a) return std::nullopt;
      auto b = evaluate(e->rhs, payload);
      if (!b) return std::nullopt;
      return *a + *b;
    }
    case StrExpr::Kind::LastSeg: {
      auto a = evaluate(e->lhs, payload);
      if (!a) return std::nullopt;
      return last_segment(*a);
    }
    case StrExpr::Kind::Canonical: {
      auto a = evaluate(e->lhs, payload);
      if (!a) return std::nullopt;
      return sanitize_canonical(*a);
    }
  }
  return std::nullopt;
}

std::optional<bool> holds(const Atom& atom, const Payload& payload, const UriTables& tables) {
  auto lhs = evaluate(atom.lhs, payload);
  if (!lhs) return std::nullopt;
  bool v = false;
  switch (atom.kind) {
    case Atom::Kind::StrEq: {
      auto rhs = evaluate(atom.rhs, payload);
      if (!rhs) return std::nullopt;
      v = *lhs == *rhs;
      break;
    }
    case Atom::Kind::StartsWith: v = starts_with(*lhs, atom.literal); break;
    case Atom::Kind::Contains: v = lhs->find(atom.literal) != std::string::npos; break;
    case Atom::Kind::UriMatch: {
      auto it = tables.find(atom.table);
      if (it == tables.end()) return std::nullopt;
      v = uri_match(it->second, *lhs) == atom.code;
      break;
    }
  }
  return v != atom.negated;
}

bool satisfies(const PathCondition& cond, const Goal& goal, const Payload& payload) {
  for (const auto& a : cond.atoms) {
    auto h = holds(a, payload, cond.uri_tables);
    if (!h || !*h) return false;
  }
  auto p = evaluate(cond.sink_path, payload);
  if (!p) return false;
  return goal_met(goal, canonicalize(*p), sink_base(cond.sink_path));
}

bool in_payload_alphabet(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '/' || c == '.' || c == '_' || c == '-';
}

namespace {

void literals_of(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->kind == StrExpr::Kind::Lit) out.push_back(e->literal);
  literals_of(e->lhs, out);
  literals_of(e->rhs, out);
}

std::set<Symbol> atom_symbols(const Atom& a) {
  auto s = symexec::symbols_of(a.lhs);
  if (a.rhs) {
    auto r = symexec::symbols_of(a.rhs);
    s.insert(r.begin(), r.end());
  }
  return s;
}

std::string repeat_up(std::size_t k) {
  std::string out;
  for (std::size_t i = 0; i < k; ++i) out += "../";
  return out;
}

// Ancestors of an absolute canonical dir, nearest first: "/a/b" -> /a/b, /a, /.
std::vector<std::string> ancestors(const std::string& dir) {
  std::vector<std::string> out{dir};
  std::string cur = dir;
  while (cur != "/") {
    cur = parent_of(cur);
    out.push_back(cur);
  }
  return out;
}

struct Vocabulary {
  std::vector<std::string> segments;
  std::string fresh;
  std::vector<std::string> literals;
};

Vocabulary build_vocabulary(const PathCondition& cond, const Goal& goal) {
  Vocabulary v;
  for (const auto& a : cond.atoms) {
    literals_of(a.lhs, v.literals);
    literals_of(a.rhs, v.literals);
    if (a.kind == Atom::Kind::StartsWith || a.kind == Atom::Kind::Contains) v.literals.push_back(a.literal);
  }
  literals_of(cond.sink_path, v.literals);
  std::vector<std::string> context(goal.targets.begin(), goal.targets.end());
  context.insert(context.end(), goal.excluded.begin(), goal.excluded.end());
  for (const auto& [name, table] : cond.uri_tables)
    for (const auto& e : table) {
      context.push_back(e.authority);
      context.push_back(e.path_pattern);
    }

  std::set<std::string> segs{"..", "."};
  for (const auto* group : {&v.literals, &context})
    for (const auto& lit : *group)
      for (auto& s : split(lit, '/'))
        if (!s.empty() && s != "*" && s != "#") segs.insert(s);

  auto clashes = [&](const std::string& f) {
    if (segs.count(f)) return true;
    for (const auto* group : {&v.literals, &context})
      for (const auto& lit : *group)
        if (lit.find(f) != std::string::npos) return true;
    return false;
  };
  for (std::string f : {"x", "y", "z", "w", "q", "k"})
    if (!clashes(f)) {
      v.fresh = f;
      break;
    }
  for (int n = 0; v.fresh.empty(); ++n)
    if (!clashes("x" + std::to_string(n))) v.fresh = "x" + std::to_string(n);
  segs.insert(v.fresh);
  v.segments.assign(segs.begin(), segs.end());
  return v;
}

// Every sequence of at most `depth` vocabulary segments, relative and absolute.
void systematic(const std::vector<std::string>& vocab, int depth, std::vector<std::string>& out) {
  std::vector<std::string> level{""};
  out.push_back("");
  out.push_back("/");
  for (int d = 1; d <= depth; ++d) {
    std::vector<std::string> next;
    next.reserve(level.size() * vocab.size());
    for (const auto& prefix : level)
      for (const auto& s : vocab) next.push_back(prefix.empty() ? s : prefix + "/" + s);
    for (const auto& p : next) {
      out.push_back(p);
      out.push_back("/" + p);
    }
    level = std::move(next);
  }
}

std::size_t systematic_size(std::size_t v, int depth) {
  std::size_t total = 2, level = 1;
  for (int d = 1; d <= depth; ++d) {
    level *= v;
    total += 2 * level;
  }
  return total;
}

// Role of a symbol in the sink path: plain, under LastSeg, or absent.
struct SinkRole {
  bool present = false;
  bool last_seg = false;
  std::optional<std::string> prefix;  // literal text before it, when known
};

SinkRole sink_role(const ExprPtr& sink, const Symbol& s) {
  SinkRole role;
  std::string lit;
  bool known = true;
  for (const auto& leaf : symexec::concat_leaves(sink)) {
    const bool direct = leaf->kind == StrExpr::Kind::Sym && leaf->symbol == s;
    const bool under_last = leaf->kind == StrExpr::Kind::LastSeg && leaf->lhs->kind == StrExpr::Kind::Sym &&
                            leaf->lhs->symbol == s;
    if (direct || under_last) {
      role.present = true;
      role.last_seg = under_last;
      if (known) role.prefix = lit;
      return role;
    }
    if (leaf->kind == StrExpr::Kind::Lit) lit += leaf->literal;
    else known = false;
  }
  for (const auto& o : symexec::sym_occurrences(sink))
    if (o.symbol == s) role.present = true;
  return role;
}

// Goal-directed values: "../" chains from the literal prefix toward each
// target, then a fresh leaf.
std::vector<std::string> templates(const SinkRole& role, const PathCondition& cond, const Goal& goal,
                                   const Symbol& s, const std::string& leaf) {
  std::vector<std::string> out;
  if (goal.kind == Goal::Kind::ReachSink) return out;
  std::vector<std::string> bases{""};
  for (const auto& a : cond.atoms)
    if (a.kind == Atom::Kind::StartsWith && !a.negated && a.lhs->kind == StrExpr::Kind::Sym && a.lhs->symbol == s)
      bases.push_back(a.literal);

  for (const auto& b : bases) {
    const std::string eff = role.prefix ? *role.prefix + b : b;
    for (const auto& t : goal.targets) {
      const std::string tail_abs = t == "/" ? "/" + leaf : t + "/" + leaf;
      if (!role.prefix || eff.empty()) {
        out.push_back(b.empty() ? tail_abs : b + repeat_up(32) + tail_abs.substr(1));
        continue;
      }
      if (eff.front() != '/') continue;
      const std::string sep = eff.back() == '/' ? "" : "/";
      const std::string dir = canonicalize(eff);
      out.push_back(b + sep + leaf);
      const auto anc = ancestors(dir);
      for (std::size_t k = 0; k < anc.size(); ++k) {
        if (!path_covers(anc[k], t)) continue;
        std::string rel = t.substr(anc[k] == "/" ? 1 : anc[k].size());
        if (!rel.empty() && rel.front() == '/') rel.erase(0, 1);
        out.push_back(b + sep + repeat_up(k) + (rel.empty() ? "" : rel + "/") + leaf);
      }
    }
  }
  return out;
}

std::vector<std::string> atom_values(const PathCondition& cond, const Symbol& s, const Vocabulary& vocab) {
  std::vector<std::string> out{"", vocab.fresh};
  for (const auto& a : cond.atoms) {
    if (!atom_symbols(a).count(s)) continue;
    switch (a.kind) {
      case Atom::Kind::StartsWith:
        out.push_back(a.literal);
        out.push_back(a.literal + vocab.fresh);
        break;
      case Atom::Kind::Contains: out.push_back(a.literal); break;
      case Atom::Kind::StrEq: {
        std::vector<std::string> lits;
        literals_of(a.rhs, lits);
        literals_of(a.lhs, lits);
        out.insert(out.end(), lits.begin(), lits.end());
        break;
      }
      case Atom::Kind::UriMatch: break;
    }
  }
  return out;
}

// URIs carrying each inner value as their last segment, one family per
// matcher entry plus an authority no table knows.
std::vector<std::string> wrap_uris(const PathCondition& cond, const std::vector<std::string>& inner,
                                   const Vocabulary& vocab) {
  std::vector<std::string> out;
  const std::string scheme(kUriScheme);
  auto instantiate = [&](const std::string& seg) {
    if (seg == "*") return vocab.fresh;
    if (seg == "#") return std::string("1");
    return seg;
  };
  for (const auto& [name, table] : cond.uri_tables)
    for (const auto& e : table) {
      std::vector<std::string> pat;
      for (auto& seg : split(e.path_pattern, '/'))
        if (!seg.empty()) pat.push_back(seg);
      std::string head = scheme + e.authority;
      if (pat.empty()) {
        out.push_back(head);
        continue;
      }
      for (std::size_t i = 0; i + 1 < pat.size(); ++i) head += "/" + instantiate(pat[i]);
      head += "/";
      out.push_back(head + instantiate(pat.back()));
      if (pat.back() == "*")
        for (const auto& v : inner) out.push_back(head + encode_segment(v));
    }
  const std::string generic = scheme + vocab.fresh + "/";
  out.push_back(scheme + vocab.fresh);
  for (const auto& v : inner) out.push_back(generic + encode_segment(v));
  return out;
}

// Stable bucket sort by length; lexicographic ties are settled during the search.
void sort_by_length(std::vector<std::string>& v) {
  std::size_t longest = 0;
  for (const auto& x : v) longest = std::max(longest, x.size());
  std::vector<std::size_t> start(longest + 2, 0);
  for (const auto& x : v) ++start[x.size() + 1];
  for (std::size_t i = 1; i < start.size(); ++i) start[i] += start[i - 1];
  std::vector<std::string> out(v.size());
  for (auto& x : v) {
    std::size_t n = x.size();
    out[start[n]++] = std::move(x);
  }
  v = std::move(out);
}

struct Group {
  std::vector<Symbol> symbols;
  std::vector<const Atom*> atoms;
  bool has_sink = false;
};

std::vector<Group> partition(const PathCondition& cond, const Goal& goal, const std::vector<Symbol>& syms) {
  std::map<Symbol, int> parent;
  for (std::size_t i = 0; i < syms.size(); ++i) parent[syms[i]] = static_cast<int>(i);
  std::vector<int> uf(syms.size());
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  auto unite = [&](const std::set<Symbol>& group) {
    if (group.empty()) return;
    int root = find(parent.at(*group.begin()));
    for (const auto& s : group) uf[find(parent.at(s))] = root;
  };
  for (const auto& a : cond.atoms) unite(atom_symbols(a));
  const auto sink_syms = symexec::symbols_of(cond.sink_path);
  if (goal.kind != Goal::Kind::ReachSink) unite(sink_syms);

  std::map<int, Group> groups;
  for (const auto& s : syms) groups[find(parent.at(s))].symbols.push_back(s);
  for (const auto& a : cond.atoms) {
    auto as = atom_symbols(a);
    if (!as.empty()) groups[find(parent.at(*as.begin()))].atoms.push_back(&a);
  }
  if (goal.kind != Goal::Kind::ReachSink && !sink_syms.empty())
    groups[find(parent.at(*sink_syms.begin()))].has_sink = true;
  std::vector<Group> out;
  for (auto& [root, g] : groups) out.push_back(std::move(g));
  return out;
}

void lastseg_operands(const ExprPtr& e, bool under, std::set<Symbol>& out) {
  if (!e) return;
  if (e->kind == StrExpr::Kind::Sym) {
    if (under) out.insert(e->symbol);
    return;
  }
  const bool below = under || e->kind == StrExpr::Kind::LastSeg;
  lastseg_operands(e->lhs, below, out);
  lastseg_operands(e->rhs, below, out);
}

// Symbols whose value can matter as a URI: lastseg decodes URIs and
// urimatch only accepts them.
std::set<Symbol> uri_shaped(const PathCondition& cond) {
  std::set<Symbol> out;
  lastseg_operands(cond.sink_path, false, out);
  for (const auto& a : cond.atoms) {
    lastseg_operands(a.lhs, a.kind == Atom::Kind::UriMatch, out);
    lastseg_operands(a.rhs, false, out);
  }
  return out;
}

void assign(Payload& p, const Symbol& s, const std::string& v) {
  if (s.kind == Symbol::Kind::Uri) p.uri = v;
  else p.extras[s.key] = v;
}

}  // namespace

SolveResult solve(const PathCondition& cond, const Goal& goal, const SolveBudget& budget) {
  SolveResult result;
  const auto base = sink_base(cond.sink_path);

  std::set<Symbol> all = cond.symbols;
  for (const auto& a : cond.atoms) {
    auto s = atom_symbols(a);
    all.insert(s.begin(), s.end());
  }
  for (const auto& s : symexec::symbols_of(cond.sink_path)) all.insert(s);
  const std::vector<Symbol> syms(all.begin(), all.end());

  // Ground atoms and a ground sink decide on their own.
  Payload empty;
  for (const auto& a : cond.atoms) {
    if (!atom_symbols(a).empty()) continue;
    auto h = holds(a, empty, cond.uri_tables);
    if (!h || !*h) {
      result.status = SolveResult::Status::Unsat;
      return result;
    }
  }
  if (symexec::symbols_of(cond.sink_path).empty() && goal.kind != Goal::Kind::ReachSink) {
    auto p = evaluate(cond.sink_path, empty);
    if (!p || !goal_met(goal, canonicalize(*p), base)) {
      result.status = SolveResult::Status::Unsat;
      return result;
    }
  }

  // CANONICAL refuses "..", so a canonical path never leaves the directory
  // its literal text names.
  if (goal.kind != Goal::Kind::ReachSink && base && cond.sink_path->kind == StrExpr::Kind::Canonical) {
    result.status = SolveResult::Status::Unsat;
    return result;
  }

  const Vocabulary vocab = build_vocabulary(cond, goal);
  const auto as_uri = uri_shaped(cond);
  bool exhaustive = true;
  Payload witness;

  for (const auto& group : partition(cond, goal, syms)) {
    // Candidate lists at the deepest segment bound the budget allows.
    std::vector<std::vector<std::string>> fixed(group.symbols.size());
    std::vector<bool> uri(group.symbols.size());
    for (std::size_t i = 0; i < group.symbols.size(); ++i) {
      const Symbol& s = group.symbols[i];
      uri[i] = s.kind == Symbol::Kind::Uri || as_uri.count(s);
      fixed[i] = atom_values(cond, s, vocab);
      if (group.has_sink) {
        auto role = sink_role(cond.sink_path, s);
        if (role.present) {
          auto t = templates(role, cond, goal, s, vocab.fresh);
          fixed[i].insert(fixed[i].end(), t.begin(), t.end());
        }
      }
    }
    auto lists_at = [&](int depth) {
      std::vector<std::vector<std::string>> lists(group.symbols.size());
      for (std::size_t i = 0; i < lists.size(); ++i) {
        std::vector<std::string> inner = fixed[i];
        systematic(vocab.segments, depth, inner);
        if (uri[i]) {
          auto wrapped = wrap_uris(cond, inner, vocab);
          inner.insert(inner.end(), wrapped.begin(), wrapped.end());
        }
        sort_by_length(inner);
        lists[i] = std::move(inner);
      }
      return lists;
    };
    auto estimate = [&](int depth) {
      double total = 1;
      for (std::size_t i = 0; i < group.symbols.size(); ++i) {
        double n = static_cast<double>(fixed[i].size() + systematic_size(vocab.segments.size(), depth));
        total *= uri[i] ? 2 * n + 4 : n;
      }
      return total;
    };
    int depth = budget.max_segments;
    while (depth > 0 && estimate(depth) > static_cast<double>(budget.max_candidates)) --depth;
    if (depth < budget.max_segments) exhaustive = false;
    const auto lists = lists_at(depth);

    std::optional<std::vector<std::size_t>> best;
    std::size_t best_len = 0;
    std::vector<std::size_t> idx(lists.size(), 0);
    bool done = lists.empty();
    std::vector<const Atom*> atoms = group.atoms;
    Payload p;
    std::vector<std::string*> slots;
    for (const auto& s : group.symbols) {
      assign(p, s, "");
      slots.push_back(s.kind == Symbol::Kind::Uri ? &*p.uri : &p.extras[s.key]);
    }
    while (!done) {
      if (result.explored >= budget.max_candidates) {
        exhaustive = false;
        result.reason = "candidate budget of " + std::to_string(budget.max_candidates) + " exhausted";
        break;
      }
      ++result.explored;
      std::size_t len = 0;
      for (std::size_t i = 0; i < lists.size(); ++i) {
        *slots[i] = lists[i][idx[i]];
        len += lists[i][idx[i]].size();
      }
      if (best && lists.size() == 1 && len > best_len) break;
      bool ok = !best || len <= best_len;
      for (const Atom* a : atoms) {
        if (!ok) break;
        auto h = holds(*a, p, cond.uri_tables);
        ok = h && *h;
      }
      if (ok && group.has_sink) {
        auto v = evaluate(cond.sink_path, p);
        ok = v && goal_met(goal, canonicalize(*v), base);
      }
      // Least total length wins, then the lexicographically least values.
      if (ok && best && len == best_len) {
        bool less = false;
        for (std::size_t i = 0; i < lists.size(); ++i) {
          const auto& x = lists[i][idx[i]];
          const auto& y = lists[i][(*best)[i]];
          if (x != y) {
            less = x < y;
            break;
          }
        }
        ok = less;
      }
      if (ok) {
        best = idx;
        best_len = len;
      }
      for (std::size_t i = lists.size(); i-- > 0;) {
        if (++idx[i] < lists[i].size()) break;
        idx[i] = 0;
        if (i == 0) done = true;
      }
    }
    if (!best) {
      result.status = exhaustive ? SolveResult::Status::Unsat : SolveResult::Status::Unknown;
      if (!exhaustive && result.reason.empty())
        result.reason = "segment bound lowered to " + std::to_string(depth) + " by the candidate budget";
      return result;
    }
    for (std::size_t i = 0; i < lists.size(); ++i) assign(witness, group.symbols[i], lists[i][(*best)[i]]);
  }

  for (const auto& s : cond.symbols)
    if (!symbol_value(witness, s)) assign(witness, s, "");
  if (!satisfies(cond, goal, witness))
    throw InternalError("solver witness failed re-evaluation: " + symexec::to_prefix(cond.sink_path));
  result.status = SolveResult::Status::Sat;
  result.sink_path = canonicalize(*evaluate(cond.sink_path, witness));
  result.payload = std::move(witness);
  return result;
}

}  // namespace pathsentry::constraints
