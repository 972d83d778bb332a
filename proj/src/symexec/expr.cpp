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

#include "pathsentry/symexec/expr.hpp"

namespace pathsentry::symexec {

ExprPtr StrExpr::lit(std::string value) {
  auto e = std::make_shared<StrExpr>();
  e->kind = Kind::Lit;
  e->literal = std::move(value);
  return e;
}

ExprPtr StrExpr::sym(Symbol symbol, frontend::StmtId source) {
  auto e = std::make_shared<StrExpr>();
  e->kind = Kind::Sym;
  e->symbol = std::move(symbol);
  e->source = source;
  return e;
}

ExprPtr StrExpr::concat(ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<StrExpr>();
  e->kind = Kind::Concat;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

ExprPtr StrExpr::last_seg(ExprPtr a) {
  auto e = std::make_shared<StrExpr>();
  e->kind = Kind::LastSeg;
  e->lhs = std::move(a);
  return e;
}

ExprPtr StrExpr::canonical(ExprPtr a) {
  auto e = std::make_shared<StrExpr>();
  e->kind = Kind::Canonical;
  e->lhs = std::move(a);
  return e;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case StrExpr::Kind::Lit: return a->literal == b->literal;
    case StrExpr::Kind::Sym: return a->symbol == b->symbol;
    case StrExpr::Kind::Concat: return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    case StrExpr::Kind::LastSeg:
    case StrExpr::Kind::Canonical: return equal(a->lhs, b->lhs);
  }
  return false;
}

std::string to_prefix(const ExprPtr& e) {
  switch (e->kind) {
    case StrExpr::Kind::Lit: return "(lit " + frontend::quote(e->literal) + ")";
    case StrExpr::Kind::Sym: return "(sym " + e->symbol.name() + ")";
    case StrExpr::Kind::Concat: return "(concat " + to_prefix(e->lhs) + " " + to_prefix(e->rhs) + ")";
    case StrExpr::Kind::LastSeg: return "(lastseg " + to_prefix(e->lhs) + ")";
    case StrExpr::Kind::Canonical: return "(canonical " + to_prefix(e->lhs) + ")";
  }
  return "?";
}

namespace {

void collect(const ExprPtr& e, bool under, std::vector<SymOccurrence>& out) {
  switch (e->kind) {
    case StrExpr::Kind::Lit: return;
    case StrExpr::Kind::Sym: out.push_back({e->symbol, under}); return;
    case StrExpr::Kind::Concat:
      collect(e->lhs, under, out);
      collect(e->rhs, under, out);
      return;
    case StrExpr::Kind::LastSeg: collect(e->lhs, under, out); return;
    case StrExpr::Kind::Canonical: collect(e->lhs, true, out); return;
  }
}

void leaves(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (e->kind == StrExpr::Kind::Concat) {
    leaves(e->lhs, out);
    leaves(e->rhs, out);
  } else {
    out.push_back(e);
  }
}

}  // namespace

std::vector<SymOccurrence> sym_occurrences(const ExprPtr& e) {
  std::vector<SymOccurrence> out;
  collect(e, false, out);
  return out;
}

std::set<Symbol> symbols_of(const ExprPtr& e) {
  std::set<Symbol> out;
  for (const auto& o : sym_occurrences(e)) out.insert(o.symbol);
  return out;
}

std::vector<ExprPtr> concat_leaves(const ExprPtr& e) {
  std::vector<ExprPtr> out;
  leaves(e, out);
  return out;
}

std::string literal_prefix(const ExprPtr& e) {
  std::string out;
  for (const auto& leaf : concat_leaves(e)) {
    if (leaf->kind != StrExpr::Kind::Lit) break;
    out += leaf->literal;
  }
  return out;
}

std::string describe(const Atom& a) {
  std::string neg = a.negated ? "!" : "";
  switch (a.kind) {
    case Atom::Kind::StrEq:
      return to_prefix(a.lhs) + (a.negated ? " != " : " == ") + to_prefix(a.rhs);
    case Atom::Kind::StartsWith:
      return neg + "startswith(" + to_prefix(a.lhs) + ", " + frontend::quote(a.literal) + ")";
    case Atom::Kind::Contains:
      return neg + "contains(" + to_prefix(a.lhs) + ", " + frontend::quote(a.literal) + ")";
    case Atom::Kind::UriMatch:
      return "urimatch(" + a.table + ", " + to_prefix(a.lhs) + (a.negated ? ") != " : ") == ") +
             std::to_string(a.code);
  }
  return "?";
}

}  // namespace pathsentry::symexec
