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

#ifndef PATHSENTRY_SYMEXEC_EXPR_HPP
#define PATHSENTRY_SYMEXEC_EXPR_HPP

#include <compare>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pathsentry/frontend/alir.hpp"

namespace pathsentry::symexec {

/// A payload input: an intent extra by key, or the provider's incoming URI.
struct Symbol {
  enum class Kind { Extra, Uri };
  Kind kind = Kind::Extra;
  std::string key;  // empty for Uri

  std::string name() const { return kind == Kind::Uri ? "uri" : "extra:" + key; }
  auto operator<=>(const Symbol&) const = default;
};

struct StrExpr;
using ExprPtr = std::shared_ptr<const StrExpr>;

/// Immutable string expression tree.
struct StrExpr {
  enum class Kind { Lit, Sym, Concat, LastSeg, Canonical };

  Kind kind = Kind::Lit;
  std::string literal;        // Lit
  Symbol symbol;              // Sym
  frontend::StmtId source;    // Sym: introducing statement
  ExprPtr lhs;                // Concat left, or the operand of LastSeg/Canonical
  ExprPtr rhs;                // Concat right

  static ExprPtr lit(std::string value);
  static ExprPtr sym(Symbol symbol, frontend::StmtId source = {});
  static ExprPtr concat(ExprPtr a, ExprPtr b);
  static ExprPtr last_seg(ExprPtr a);
  static ExprPtr canonical(ExprPtr a);
};

/// Structural equality (symbols compare by payload name, not source).
bool equal(const ExprPtr& a, const ExprPtr& b);

/// Prefix-form rendering, e.g. (concat (lit "/a/") (lastseg (sym uri))).
std::string to_prefix(const ExprPtr& e);

std::set<Symbol> symbols_of(const ExprPtr& e);

/// Every Sym occurrence, with whether a Canonical node lies above it.
struct SymOccurrence {
  Symbol symbol;
  bool under_canonical = false;
};
std::vector<SymOccurrence> sym_occurrences(const ExprPtr& e);

/// Flattens nested Concat into its left-to-right leaves.
std::vector<ExprPtr> concat_leaves(const ExprPtr& e);

/// Literal text preceding the first non-literal leaf.
std::string literal_prefix(const ExprPtr& e);

struct Atom {
  enum class Kind { StrEq, StartsWith, Contains, UriMatch };

  Kind kind = Kind::StrEq;
  bool negated = false;
  ExprPtr lhs;
  ExprPtr rhs;           // StrEq
  std::string literal;   // StartsWith / Contains
  std::string table;     // UriMatch
  long code = 0;         // UriMatch: match(table, lhs) == code (negated: !=)

  Atom negate() const {
    Atom a = *this;
    a.negated = !a.negated;
    return a;
  }
};

/// Readable form, e.g. startswith(sym extra:path, "/a") or !urimatch(T, ...) == 10.
std::string describe(const Atom& atom);

}  // namespace pathsentry::symexec

#endif  // PATHSENTRY_SYMEXEC_EXPR_HPP
