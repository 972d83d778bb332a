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

#ifndef PATHSENTRY_FRONTEND_ALIR_HPP
#define PATHSENTRY_FRONTEND_ALIR_HPP

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pathsentry/common.hpp"

namespace pathsentry::frontend {

/// Program-wide statement identity: function ordinal plus index in its body.
struct StmtId {
  int function = -1;
  int index = -1;

  auto operator<=>(const StmtId&) const = default;
  bool valid() const { return function >= 0 && index >= 0; }
};

enum class Op {
  Const,      // v = const "lit"
  GetExtra,   // v = getextra "key"
  GetUri,     // v = geturi
  Concat,     // v = concat a b
  LastSeg,    // v = lastseg a
  Canonical,  // v = canonical a
  EnvDir,     // v = envdir ApiName
  UriMatch,   // m = urimatch TABLE a
  If,         // if <cond> goto L
  Label,      // label L
  Call,       // call f(a, b)
  Sink,       // sink kind v [v2]
  Return,     // return
};

std::string_view to_string(Op op);

enum class CondOp { True, Eq, Ne, StartsWith, NotStartsWith, Contains, NotContains };

std::string_view to_string(CondOp op);

struct Operand {
  enum class Kind { Var, Str, Int };
  Kind kind = Kind::Var;
  std::string text;  // variable name or string literal
  long value = 0;    // integer literal

  bool operator==(const Operand&) const = default;
};

struct Condition {
  CondOp op = CondOp::True;
  std::string lhs;  // variable; empty for True
  Operand rhs;

  bool operator==(const Condition&) const = default;
};

struct Statement {
  StmtId id;
  int line = 0;  // source line in the .alir file
  Op op = Op::Return;
  std::string dest;               // assigned variable, if any
  std::vector<std::string> args;  // variable operands (concat a b, call args, sink paths)
  std::string text;               // literal | extra key | api | table | label | callee
  Condition cond;                 // If only
  SinkKind sink = SinkKind::Open; // Sink only

  bool defines() const { return !dest.empty(); }
  bool is_external_source() const { return op == Op::GetExtra || op == Op::GetUri; }
  bool is_internal_source() const { return op == Op::Const || op == Op::EnvDir; }
  std::vector<std::string> uses() const;

  bool operator==(const Statement& o) const {
    return op == o.op && dest == o.dest && args == o.args && text == o.text && cond == o.cond &&
           sink == o.sink;
  }
};

struct Function {
  std::string name;
  std::string file;
  std::vector<std::string> params;
  std::vector<Statement> body;
  std::map<std::string, int> labels;  // label -> statement index

  bool operator==(const Function& o) const {
    return name == o.name && params == o.params && body == o.body;
  }
};

struct UriEntry {
  std::string authority;
  std::string path_pattern;
  long code = 0;

  bool operator==(const UriEntry&) const = default;
};

struct AlirProgram {
  std::vector<Function> functions;
  std::map<std::string, int> function_index;
  std::map<std::string, std::vector<UriEntry>> uri_tables;

  const Function* find(std::string_view name) const;
  const Function& function(int index) const { return functions.at(index); }
  const Statement& at(StmtId id) const { return functions.at(id.function).body.at(id.index); }
  std::string describe(StmtId id) const;  // "fn#idx"

  bool operator==(const AlirProgram& o) const {
    return functions == o.functions && uri_tables == o.uri_tables;
  }
};

/// ENVDIR API names accepted by the parser; the summary table in symexec
/// maps exactly these names.
const std::vector<std::string>& known_env_apis();

/// Parses one or more ALIR sources into a linked program. Each source is
/// (file name, text). Throws ParseError on malformed statements, undefined
/// labels or functions, use-before-def, or type confusion.
AlirProgram parse_alir(const std::vector<std::pair<std::string, std::string>>& sources);
AlirProgram parse_alir(std::string_view text, const std::string& source = "program.alir");

/// Prints the program in canonical ALIR text (all functions in one file).
std::string print_alir(const AlirProgram& program);

/// Quotes a literal using ALIR string syntax (\" \\ \n escapes).
std::string quote(std::string_view text);

}  // namespace pathsentry::frontend

#endif  // PATHSENTRY_FRONTEND_ALIR_HPP
