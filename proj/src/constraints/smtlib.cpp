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

#include "pathsentry/constraints/smtlib.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "pathsentry/constraints/pathops.hpp"

namespace pathsentry::constraints {

using symexec::StrExpr;

namespace {

std::string smt_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c < 0x20 || c > 0x7e || c == '\\')
      throw UnsupportedFeature("literal outside the encodable character set: " + frontend::quote(s));
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

std::string smt_int(long v) {
  return v < 0 ? "(- " + std::to_string(-v) + ")" : std::to_string(v);
}

// A string as its "/"-separated parts. Parts past `count` are "" and take
// no part in the string.
struct Split {
  std::vector<std::string> parts;
  std::string count;  // Int term: number of separators
};

// A path as a sequence of segment terms in order. Some may be empty and
// inactive; `last` marks the segment a following concatenation extends.
struct Piece {
  std::string term;
  std::string last;  // Bool term
};
struct Sequence {
  std::vector<Piece> pieces;
  std::string count;  // Int term: separators in the string
};

std::string smt_and(const std::vector<std::string>& v) {
  if (v.empty()) return "true";
  if (v.size() == 1) return v[0];
  std::string out = "(and";
  for (const auto& x : v) out += " " + x;
  return out + ")";
}

std::string smt_or(const std::vector<std::string>& v) {
  if (v.empty()) return "false";
  if (v.size() == 1) return v[0];
  std::string out = "(or";
  for (const auto& x : v) out += " " + x;
  return out + ")";
}

const std::string kEmpty = "\"\"";

class Encoder {
 public:
  Encoder(const PathCondition& cond, const SmtOptions& opt) : cond_(cond), opt_(opt) {}

  std::string aux(const std::string& sort = "String") {
    std::string name = "a" + std::to_string(next_aux_++);
    decls_ << "(declare-const " << name << " " << sort << ")\n";
    return name;
  }

  void assert_(const std::string& f) { asserts_ << "(assert " << f << ")\n"; }
  void comment(const std::string& c) { asserts_ << "; " << c << "\n"; }

  std::string define(const std::string& value, const std::string& sort = "String") {
    std::string n = aux(sort);
    assert_("(= " + n + " " + value + ")");
    return n;
  }

  // Fresh parts p0..pM, none holding `sep`, with `count` separators in use.
  Split fresh_split() {
    Split sp;
    sp.count = aux("Int");
    assert_("(<= 0 " + sp.count + " " + std::to_string(opt_.max_parts - 1) + ")");
    for (int i = 0; i < opt_.max_parts; ++i) {
      sp.parts.push_back(aux());
      assert_("(not (str.contains " + sp.parts.back() + " \"/\"))");
      if (i > 0) assert_("(=> (< " + sp.count + " " + std::to_string(i) + ") (= " + sp.parts.back() + " \"\"))");
    }
    return sp;
  }

  static std::string join(const Split& sp, const std::string& sep, std::size_t i = 1) {
    if (i >= sp.parts.size()) return kEmpty;
    return "(ite (>= " + sp.count + " " + std::to_string(i) + ") (str.++ " + sep + " " + sp.parts[i] + " " +
           join(sp, sep, i + 1) + ") \"\")";
  }
  static std::string joined(const Split& sp, const std::string& sep) {
    return sp.parts.size() == 1 ? sp.parts[0] : "(str.++ " + sp.parts[0] + " " + join(sp, sep) + ")";
  }

  void declare_symbols(const std::set<Symbol>& syms) {
    for (const auto& s : syms) {
      std::string name = "s" + std::to_string(symbols_.size());
      symbols_.emplace_back(name, s);
      decls_ << "(declare-const " << name << " String) ; " << s.name() << "\n";
      names_[s] = name;
      Split sp = fresh_split();
      assert_("(= " + name + " " + joined(sp, "\"/\"") + ")");
      splits_[s] = std::move(sp);
    }
  }

  // Exact part structure of a symbol or a last segment; nullopt otherwise.
  std::optional<Split> positional(const ExprPtr& e) {
    if (e->kind == StrExpr::Kind::Sym) return splits_.at(e->symbol);
    if (e->kind == StrExpr::Kind::LastSeg) return last_seg(e).first;
    return std::nullopt;
  }

  // Parts and string term of a decoded last segment.
  std::pair<Split, std::string> last_seg(const ExprPtr& e) {
    const std::string key = symexec::to_prefix(e);
    if (auto it = last_segs_.find(key); it != last_segs_.end()) return it->second;
    const ExprPtr& x = e->lhs;
    std::string raw, uri;
    if (auto sp = positional(x)) {
      std::string chain = kEmpty;
      for (std::size_t i = sp->parts.size(); i-- > 0;)
        chain = "(ite (= " + sp->count + " " + std::to_string(i) + ") " + sp->parts[i] + " " + chain + ")";
      raw = define(chain);
      uri = "(and (>= " + sp->count + " 2) (= " + sp->parts[0] + " \"content:\") (= " + sp->parts[1] + " \"\"))";
    } else {
      Sequence seq = sequence(x);
      std::string chain = kEmpty;
      for (std::size_t i = seq.pieces.size(); i-- > 0;)
        chain = "(ite " + seq.pieces[i].last + " " + seq.pieces[i].term + " " + chain + ")";
      raw = define(chain);
      uri = "(str.prefixof " + smt_quote(kUriScheme) + " " + term(x) + ")";
    }
    Split h = fresh_split();
    // Only %2F escapes are modelled inside a URI's last segment.
    for (const auto& part : h.parts) assert_("(=> " + uri + " (not (str.contains " + part + " \"%\")))");
    assert_("(ite " + uri + " (= " + raw + " " + joined(h, "\"%2F\"") + ") (and (= " + h.count + " 0) (= " +
            h.parts[0] + " " + raw + ")))");
    std::string value = define(joined(h, "\"/\""));
    last_segs_[key] = {h, value};
    return {h, value};
  }

  // Plain string term; Canonical has none.
  std::string term(const ExprPtr& e) {
    switch (e->kind) {
      case StrExpr::Kind::Lit: return smt_quote(e->literal);
      case StrExpr::Kind::Sym: return names_.at(e->symbol);
      case StrExpr::Kind::Concat: return "(str.++ " + term(e->lhs) + " " + term(e->rhs) + ")";
      case StrExpr::Kind::LastSeg: return last_seg(e).second;
      case StrExpr::Kind::Canonical:
        if (symexec::symbols_of(e).empty()) {
          auto v = evaluate(e, Payload{});
          if (!v) return "\"\"";
          return smt_quote(*v);
        }
        throw UnsupportedFeature("canonical value used outside the sink path");
    }
    return kEmpty;
  }

  static Sequence literal_sequence(const std::string& text) {
    Sequence seq;
    auto parts = split(text, '/');
    for (std::size_t i = 0; i < parts.size(); ++i)
      seq.pieces.push_back({smt_quote(parts[i]), i + 1 == parts.size() ? "true" : "false"});
    seq.count = std::to_string(parts.size() - 1);
    return seq;
  }

  static Sequence split_sequence(const Split& sp) {
    Sequence seq;
    for (std::size_t i = 0; i < sp.parts.size(); ++i)
      seq.pieces.push_back({sp.parts[i], "(= " + sp.count + " " + std::to_string(i) + ")"});
    seq.count = sp.count;
    return seq;
  }

  Sequence sequence(const ExprPtr& e) {
    switch (e->kind) {
      case StrExpr::Kind::Lit: return literal_sequence(e->literal);
      case StrExpr::Kind::Sym: return split_sequence(splits_.at(e->symbol));
      case StrExpr::Kind::LastSeg: return split_sequence(last_seg(e).first);
      case StrExpr::Kind::Canonical: {
        if (symexec::symbols_of(e).empty()) {
          auto v = evaluate(e, Payload{});
          if (!v) {
            assert_("false");
            return literal_sequence("");
          }
          return literal_sequence(*v);
        }
        // Refused on a ".." segment; otherwise the segments pass through.
        Sequence inner = sequence(e->lhs);
        for (const auto& p : inner.pieces) assert_("(not (= " + p.term + " \"..\"))");
        return inner;
      }
      case StrExpr::Kind::Concat: {
        Sequence a = sequence(e->lhs);
        Sequence b = sequence(e->rhs);
        const Piece head = b.pieces.front();
        Sequence out;
        for (auto& p : a.pieces) {
          Piece q = p;
          if (head.term != kEmpty && p.last != "false") {
            q.term = p.last == "true" ? define("(str.++ " + p.term + " " + head.term + ")")
                                      : define("(str.++ " + p.term + " (ite " + p.last + " " + head.term + " \"\"))");
          }
          if (p.last != "false") {
            if (head.last == "true") q.last = p.last;
            else if (head.last == "false") q.last = "false";
            else q.last = p.last == "true" ? head.last : "(and " + p.last + " " + head.last + ")";
          }
          out.pieces.push_back(std::move(q));
        }
        for (std::size_t i = 1; i < b.pieces.size(); ++i) out.pieces.push_back(b.pieces[i]);
        out.count = "(+ " + a.count + " " + b.count + ")";
        return out;
      }
    }
    return {};
  }

  // Literal split into parts l0..lj, compared against exact parts.
  static std::string starts_with(const Split& sp, const std::string& lit) {
    auto l = split(lit, '/');
    const std::size_t j = l.size() - 1;
    if (j >= sp.parts.size()) return "false";
    std::vector<std::string> c{"(>= " + sp.count + " " + std::to_string(j) + ")"};
    for (std::size_t i = 0; i < j; ++i) c.push_back("(= " + sp.parts[i] + " " + smt_quote(l[i]) + ")");
    if (!l[j].empty()) c.push_back("(str.prefixof " + smt_quote(l[j]) + " " + sp.parts[j] + ")");
    return smt_and(c);
  }

  static std::string equals(const Split& sp, const std::string& lit) {
    auto l = split(lit, '/');
    const std::size_t j = l.size() - 1;
    if (j >= sp.parts.size()) return "false";
    std::vector<std::string> c{"(= " + sp.count + " " + std::to_string(j) + ")"};
    for (std::size_t i = 0; i <= j; ++i) c.push_back("(= " + sp.parts[i] + " " + smt_quote(l[i]) + ")");
    return smt_and(c);
  }

  static std::string contains(const Split& sp, const std::string& lit) {
    if (lit.empty()) return "true";
    auto l = split(lit, '/');
    const std::size_t j = l.size() - 1;
    std::vector<std::string> any;
    for (std::size_t start = 0; start + j < sp.parts.size(); ++start) {
      if (j == 0) {
        any.push_back("(str.contains " + sp.parts[start] + " " + smt_quote(l[0]) + ")");
        continue;
      }
      std::vector<std::string> c{"(>= " + sp.count + " " + std::to_string(start + j) + ")"};
      c.push_back("(str.suffixof " + smt_quote(l[0]) + " " + sp.parts[start] + ")");
      for (std::size_t i = 1; i < j; ++i) c.push_back("(= " + sp.parts[start + i] + " " + smt_quote(l[i]) + ")");
      c.push_back("(str.prefixof " + smt_quote(l[j]) + " " + sp.parts[start + j] + ")");
      any.push_back(smt_and(c));
    }
    return smt_or(any);
  }

  static std::string entry_matches(const Split& sp, const frontend::UriEntry& e) {
    if (e.authority.find('/') != std::string::npos)
      throw UnsupportedFeature("matcher authority holds '/': " + frontend::quote(e.authority));
    std::vector<std::string> pattern;
    for (auto& seg : split(e.path_pattern, '/'))
      if (!seg.empty()) pattern.push_back(seg);
    const std::size_t n = 2 + pattern.size();
    if (n >= sp.parts.size()) return "false";
    std::vector<std::string> c{"(= " + sp.count + " " + std::to_string(n) + ")",
                               "(= " + sp.parts[0] + " \"content:\")", "(= " + sp.parts[1] + " \"\")",
                               "(= " + sp.parts[2] + " " + smt_quote(e.authority) + ")"};
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      const std::string& part = sp.parts[3 + i];
      if (pattern[i] == "*") c.push_back("(not (= " + part + " \"\"))");
      else if (pattern[i] == "#") c.push_back("(>= (str.to_int " + part + ") 0)");
      else c.push_back("(= " + part + " " + smt_quote(pattern[i]) + ")");
    }
    return smt_and(c);
  }

  std::string atom(const Atom& a) {
    std::string f;
    auto sp = positional(a.lhs);
    switch (a.kind) {
      case Atom::Kind::StrEq:
        if (sp && a.rhs->kind == StrExpr::Kind::Lit) f = equals(*sp, a.rhs->literal);
        else f = "(= " + term(a.lhs) + " " + term(a.rhs) + ")";
        break;
      case Atom::Kind::StartsWith:
        f = sp ? starts_with(*sp, a.literal) : "(str.prefixof " + smt_quote(a.literal) + " " + term(a.lhs) + ")";
        break;
      case Atom::Kind::Contains:
        f = sp ? contains(*sp, a.literal) : "(str.contains " + term(a.lhs) + " " + smt_quote(a.literal) + ")";
        break;
      case Atom::Kind::UriMatch: {
        auto it = cond_.uri_tables.find(a.table);
        if (it == cond_.uri_tables.end()) throw UnsupportedFeature("matcher table '" + a.table + "' not in condition");
        if (!sp) throw UnsupportedFeature("matcher applied to a composite value");
        std::string chain = smt_int(-1);
        for (auto e = it->second.rbegin(); e != it->second.rend(); ++e)
          chain = "(ite " + entry_matches(*sp, *e) + " " + smt_int(e->code) + " " + chain + ")";
        f = "(= " + chain + " " + smt_int(a.code) + ")";
        break;
      }
    }
    return a.negated ? "(not " + f + ")" : f;
  }

  // Segment depths over the sink path; e_k is segment k of its normal form.
  struct Normal {
    std::string depth;              // Int term
    std::vector<std::string> segs;  // e_1..e_K
  };

  Normal normalize(const Sequence& seq, std::size_t k_max) {
    Normal n;
    std::vector<std::pair<std::string, std::string>> pushes;  // (segment, depth after it)
    std::string d = "0";
    for (const auto& p : seq.pieces) {
      const std::string& g = p.term;
      if (g == kEmpty || g == "\".\"") continue;
      std::string next;
      if (g == "\"..\"") next = define("(ite (> " + d + " 0) (- " + d + " 1) 0)", "Int");
      else if (g.front() == '"') next = define("(+ " + d + " 1)", "Int");
      else
        next = define("(ite (or (= " + g + " \"\") (= " + g + " \".\")) " + d + " (ite (= " + g + " \"..\") (ite (> " +
                          d + " 0) (- " + d + " 1) 0) (+ " + d + " 1)))",
                      "Int");
      pushes.emplace_back(g, next);
      d = next;
    }
    n.depth = d;
    for (std::size_t k = 1; k <= k_max; ++k) {
      std::string chain = kEmpty;
      for (const auto& [g, dep] : pushes) {
        if (g == "\"..\"") continue;
        std::string normal = g.front() == '"' ? "true" : "(not (or (= " + g + " \"\") (= " + g + " \".\") (= " + g + " \"..\")))";
        chain = "(ite (and " + normal + " (= " + dep + " " + std::to_string(k) + ")) " + g + " " + chain + ")";
      }
      n.segs.push_back(define(chain));
    }
    return n;
  }

  static std::string covers(const Normal& n, const std::string& prefix, bool strict) {
    std::vector<std::string> segs;
    for (auto& s : split(prefix, '/'))
      if (!s.empty()) segs.push_back(s);
    std::vector<std::string> c{"(" + std::string(strict ? ">" : ">=") + " " + n.depth + " " +
                               std::to_string(segs.size()) + ")"};
    for (std::size_t i = 0; i < segs.size(); ++i) c.push_back("(= " + n.segs[i] + " " + smt_quote(segs[i]) + ")");
    return smt_and(c);
  }

  std::string text() const { return decls_.str() + asserts_.str(); }
  const std::vector<std::pair<std::string, Symbol>>& symbols() const { return symbols_; }

 private:
  const PathCondition& cond_;
  SmtOptions opt_;
  std::ostringstream decls_, asserts_;
  std::vector<std::pair<std::string, Symbol>> symbols_;
  std::map<Symbol, std::string> names_;
  std::map<Symbol, Split> splits_;
  std::map<std::string, std::pair<Split, std::string>> last_segs_;
  int next_aux_ = 0;
};

// Canonical operands must be delimited by "/" on both sides, where the
// segment view and the string view of the path agree.
void check_canonical_boundaries(const ExprPtr& sink) {
  auto leaves = symexec::concat_leaves(sink);
  if (leaves.size() == 1) return;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i]->kind != StrExpr::Kind::Canonical || symexec::symbols_of(leaves[i]).empty()) continue;
    bool before = i > 0 && leaves[i - 1]->kind == StrExpr::Kind::Lit && leaves[i - 1]->literal.ends_with("/");
    bool after = i + 1 == leaves.size() ||
                 (leaves[i + 1]->kind == StrExpr::Kind::Lit && starts_with(leaves[i + 1]->literal, "/"));
    if (!before || !after) throw UnsupportedFeature("canonical value not delimited by '/' in the sink path");
  }
}

}  // namespace

SmtDocument emit_smtlib(const PathCondition& cond, const Goal& goal, const SmtOptions& options) {
  Encoder enc(cond, options);
  std::set<Symbol> syms = cond.symbols;
  for (const auto& s : symexec::symbols_of(cond.sink_path)) syms.insert(s);
  for (const auto& a : cond.atoms) {
    for (const auto& s : symexec::symbols_of(a.lhs)) syms.insert(s);
    if (a.rhs)
      for (const auto& s : symexec::symbols_of(a.rhs)) syms.insert(s);
  }
  check_canonical_boundaries(cond.sink_path);

  enc.comment("payload inputs");
  enc.declare_symbols(syms);

  enc.comment("branch conditions");
  for (const auto& a : cond.atoms) enc.assert_(enc.atom(a));

  enc.comment("sink path, goal " + std::string(to_string(goal.kind)));
  const Sequence seq = enc.sequence(cond.sink_path);
  if (goal.kind != Goal::Kind::ReachSink) {
    enc.assert_("(= " + seq.pieces.front().term + " \"\")");
    enc.assert_("(>= " + seq.count + " 1)");
    const auto base = sink_base(cond.sink_path);
    std::size_t k = 0;
    auto depth_of = [](const std::string& p) {
      std::size_t n = 0;
      for (auto& s : split(p, '/')) n += s.empty() ? 0 : 1;
      return n;
    };
    for (const auto* set : {&goal.targets, &goal.excluded})
      for (const auto& t : *set) k = std::max(k, depth_of(t));
    if (base) k = std::max(k, depth_of(*base));
    const auto norm = enc.normalize(seq, k);
    std::vector<std::string> any;
    for (const auto& t : goal.targets) any.push_back(Encoder::covers(norm, t, true));
    enc.assert_(smt_or(any));
    for (const auto& e : goal.excluded) enc.assert_("(not " + Encoder::covers(norm, e, false) + ")");
    if (base) enc.assert_("(not " + Encoder::covers(norm, *base, false) + ")");
  }

  SmtDocument doc;
  doc.text = "(set-logic ALL)\n" + enc.text() + "(check-sat)\n(get-model)\n";
  doc.symbols = enc.symbols();
  return doc;
}

Payload payload_from_model(const std::string& model, const SmtDocument& doc) {
  std::map<std::string, std::string> values;
  static const std::regex def(R"(\(define-fun\s+(\w+)\s+\(\)\s+String\s+\"((?:[^\"]|\"\")*)\"\s*\))");
  for (auto it = std::sregex_iterator(model.begin(), model.end(), def); it != std::sregex_iterator(); ++it) {
    std::string v = (*it)[2];
    std::string unq;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == '\\' && v.compare(i, 3, "\\u{") == 0) {
        auto close = v.find('}', i);
        if (close != std::string::npos) {
          unq += static_cast<char>(std::stoul(v.substr(i + 3, close - i - 3), nullptr, 16));
          i = close;
          continue;
        }
      }
      unq += v[i];
      if (v[i] == '"' && i + 1 < v.size() && v[i + 1] == '"') ++i;
    }
    values[(*it)[1]] = unq;
  }
  Payload p;
  for (const auto& [name, sym] : doc.symbols) {
    auto it = values.find(name);
    std::string v = it == values.end() ? "" : it->second;
    if (sym.kind == Symbol::Kind::Uri) p.uri = v;
    else p.extras[sym.key] = v;
  }
  return p;
}

std::optional<std::string> find_z3() {
  if (const char* env = std::getenv("Z3_BIN"); env && *env) return std::string(env);
  if (const char* path = std::getenv("PATH")) {
    for (auto& dir : split(path, ':')) {
      if (dir.empty()) continue;
      std::filesystem::path cand = std::filesystem::path(dir) / "z3";
      std::error_code ec;
      if (std::filesystem::is_regular_file(cand, ec)) return cand.string();
    }
  }
  return std::nullopt;
}

ExternalVerdict run_external_solver(const SmtDocument& doc, const std::string& solver, int timeout_seconds) {
  ExternalVerdict v;
  static std::atomic<unsigned> counter{0};
  auto file = std::filesystem::temp_directory_path() /
              ("pathsentry-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".smt2");
  {
    std::ofstream out(file);
    out << doc.text;
  }
  std::string cmd = "\"" + solver + "\" -T:" + std::to_string(timeout_seconds) + " \"" + file.string() + "\" 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    std::filesystem::remove(file);
    return v;
  }
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) v.output.append(buf, n);
  ::pclose(pipe);
  std::filesystem::remove(file);

  std::string first = v.output.substr(0, v.output.find('\n'));
  first = std::string(trim(first));
  if (first == "sat") {
    v.status = ExternalVerdict::Status::Sat;
    v.payload = payload_from_model(v.output, doc);
  } else if (first == "unsat") {
    v.status = ExternalVerdict::Status::Unsat;
  } else {
    v.status = ExternalVerdict::Status::Unknown;
  }
  return v;
}

}  // namespace pathsentry::constraints
