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

#include "pathsentry/frontend/alir.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace pathsentry::frontend {

std::string_view to_string(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::GetExtra: return "getextra";
    case Op::GetUri: return "geturi";
    case Op::Concat: return "concat";
    case Op::LastSeg: return "lastseg";
    case Op::Canonical: return "canonical";
    case Op::EnvDir: return "envdir";
    case Op::UriMatch: return "urimatch";
    case Op::If: return "if";
    case Op::Label: return "label";
    case Op::Call: return "call";
    case Op::Sink: return "sink";
    case Op::Return: return "return";
  }
  return "?";
}

std::string_view to_string(CondOp op) {
  switch (op) {
    case CondOp::True: return "true";
    case CondOp::Eq: return "==";
    case CondOp::Ne: return "!=";
    case CondOp::StartsWith: return "startswith";
    case CondOp::NotStartsWith: return "!startswith";
    case CondOp::Contains: return "contains";
    case CondOp::NotContains: return "!contains";
  }
  return "?";
}

const std::vector<std::string>& known_env_apis() {
  static const std::vector<std::string> apis = {"ExternalStorageDirectory", "FilesDir", "CacheDir",
                                                "ExternalFilesDir"};
  return apis;
}

std::vector<std::string> Statement::uses() const {
  std::vector<std::string> out = args;
  if (op == Op::If && cond.op != CondOp::True) {
    out.push_back(cond.lhs);
    if (cond.rhs.kind == Operand::Kind::Var) out.push_back(cond.rhs.text);
  }
  return out;
}

const Function* AlirProgram::find(std::string_view name) const {
  auto it = function_index.find(std::string(name));
  return it == function_index.end() ? nullptr : &functions[it->second];
}

std::string AlirProgram::describe(StmtId id) const {
  return functions.at(id.function).name + "#" + std::to_string(id.index);
}

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

namespace {

struct Token {
  enum class Kind { Ident, Str, Int, Punct } kind;
  std::string text;
  long value = 0;
};

class LineLexer {
 public:
  LineLexer(std::string_view line, const std::string& file, int lineno)
      : line_(line), file_(file), lineno_(lineno) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line_.size()) {
      char c = line_[i];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
      } else if (c == '#') {
        break;
      } else if (c == '"') {
        std::string s;
        ++i;
        bool closed = false;
        while (i < line_.size()) {
          char d = line_[i++];
          if (d == '"') {
            closed = true;
            break;
          }
          if (d == '\\') {
            if (i >= line_.size()) fail("dangling escape in string literal");
            char e = line_[i++];
            if (e == 'n') s += '\n';
            else if (e == '"' || e == '\\') s += e;
            else fail(std::string("unknown escape \\") + e);
          } else {
            s += d;
          }
        }
        if (!closed) fail("unterminated string literal");
        out.push_back({Token::Kind::Str, std::move(s)});
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && i + 1 < line_.size() &&
                  std::isdigit(static_cast<unsigned char>(line_[i + 1])))) {
        std::size_t j = i + 1;
        while (j < line_.size() && std::isdigit(static_cast<unsigned char>(line_[j]))) ++j;
        std::string digits(line_.substr(i, j - i));
        out.push_back({Token::Kind::Int, digits, std::stol(digits)});
        i = j;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i + 1;
        while (j < line_.size() && (std::isalnum(static_cast<unsigned char>(line_[j])) ||
                                    line_[j] == '_' || line_[j] == '.'))
          ++j;
        out.push_back({Token::Kind::Ident, std::string(line_.substr(i, j - i))});
        i = j;
      } else if ((c == '=' || c == '!') && i + 1 < line_.size() && line_[i + 1] == '=') {
        out.push_back({Token::Kind::Punct, std::string(line_.substr(i, 2))});
        i += 2;
      } else if (c == '!' && i + 1 < line_.size() &&
                 std::isalpha(static_cast<unsigned char>(line_[i + 1]))) {
        std::size_t j = i + 1;
        while (j < line_.size() && std::isalpha(static_cast<unsigned char>(line_[j]))) ++j;
        out.push_back({Token::Kind::Ident, std::string(line_.substr(i, j - i))});
        i = j;
      } else if (std::string_view("(){},=").find(c) != std::string_view::npos) {
        out.push_back({Token::Kind::Punct, std::string(1, c)});
        ++i;
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(file_, lineno_, msg); }

  std::string_view line_;
  const std::string& file_;
  int lineno_;
};

// Cursor over one line's tokens with expectation helpers.
class Cursor {
 public:
  Cursor(std::vector<Token> toks, const std::string& file, int line)
      : toks_(std::move(toks)), file_(file), line_(line) {}

  bool done() const { return pos_ >= toks_.size(); }
  const Token* peek(std::size_t ahead = 0) const {
    return pos_ + ahead < toks_.size() ? &toks_[pos_ + ahead] : nullptr;
  }
  bool peek_punct(std::string_view p, std::size_t ahead = 0) const {
    auto* t = peek(ahead);
    return t && t->kind == Token::Kind::Punct && t->text == p;
  }
  std::string ident(const char* what) {
    auto* t = peek();
    if (!t || t->kind != Token::Kind::Ident) fail(std::string("expected ") + what);
    ++pos_;
    return t->text;
  }
  std::string str(const char* what) {
    auto* t = peek();
    if (!t || t->kind != Token::Kind::Str) fail(std::string("expected string literal for ") + what);
    ++pos_;
    return t->text;
  }
  long integer(const char* what) {
    auto* t = peek();
    if (!t || t->kind != Token::Kind::Int) fail(std::string("expected integer for ") + what);
    ++pos_;
    return t->value;
  }
  void punct(std::string_view p) {
    if (!peek_punct(p)) fail("expected '" + std::string(p) + "'");
    ++pos_;
  }
  void keyword(std::string_view k) {
    auto* t = peek();
    if (!t || t->kind != Token::Kind::Ident || t->text != k) fail("expected '" + std::string(k) + "'");
    ++pos_;
  }
  Token next(const char* what) {
    auto* t = peek();
    if (!t) fail(std::string("expected ") + what);
    ++pos_;
    return *t;
  }
  void end() {
    if (!done()) fail("unexpected trailing token '" + toks_[pos_].text + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(file_, line_, msg); }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::string& file_;
  int line_;
};

std::vector<std::string> parse_name_list(Cursor& cur) {
  std::vector<std::string> out;
  cur.punct("(");
  if (cur.peek_punct(")")) {
    cur.punct(")");
    return out;
  }
  while (true) {
    out.push_back(cur.ident("name"));
    if (cur.peek_punct(",")) {
      cur.punct(",");
      continue;
    }
    cur.punct(")");
    return out;
  }
}

Statement parse_statement(Cursor& cur) {
  Statement s;
  auto* first = cur.peek();
  if (!first) cur.fail("empty statement");
  if (first->kind == Token::Kind::Ident && cur.peek_punct("=", 1)) {
    s.dest = cur.ident("variable");
    cur.punct("=");
    std::string op = cur.ident("operation");
    if (op == "const") {
      s.op = Op::Const;
      s.text = cur.str("const");
    } else if (op == "getextra") {
      s.op = Op::GetExtra;
      s.text = cur.str("getextra key");
    } else if (op == "geturi") {
      s.op = Op::GetUri;
    } else if (op == "concat") {
      s.op = Op::Concat;
      s.args.push_back(cur.ident("concat operand"));
      s.args.push_back(cur.ident("concat operand"));
    } else if (op == "lastseg") {
      s.op = Op::LastSeg;
      s.args.push_back(cur.ident("lastseg operand"));
    } else if (op == "canonical") {
      s.op = Op::Canonical;
      s.args.push_back(cur.ident("canonical operand"));
    } else if (op == "envdir") {
      s.op = Op::EnvDir;
      s.text = cur.ident("api name");
      const auto& apis = known_env_apis();
      if (std::find(apis.begin(), apis.end(), s.text) == apis.end())
        cur.fail("unknown envdir api '" + s.text + "'");
    } else if (op == "urimatch") {
      s.op = Op::UriMatch;
      s.text = cur.ident("uri table");
      s.args.push_back(cur.ident("urimatch operand"));
    } else {
      cur.fail("unknown operation '" + op + "'");
    }
    cur.end();
    return s;
  }

  std::string kw = cur.ident("statement keyword");
  if (kw == "if") {
    s.op = Op::If;
    auto* t = cur.peek();
    if (t && t->kind == Token::Kind::Ident && t->text == "true") {
      cur.ident("true");
      s.cond.op = CondOp::True;
    } else {
      s.cond.lhs = cur.ident("condition variable");
      Token op = cur.next("condition operator");
      if (op.text == "==") s.cond.op = CondOp::Eq;
      else if (op.text == "!=") s.cond.op = CondOp::Ne;
      else if (op.text == "startswith") s.cond.op = CondOp::StartsWith;
      else if (op.text == "!startswith") s.cond.op = CondOp::NotStartsWith;
      else if (op.text == "contains") s.cond.op = CondOp::Contains;
      else if (op.text == "!contains") s.cond.op = CondOp::NotContains;
      else cur.fail("unknown condition operator '" + op.text + "'");
      Token rhs = cur.next("condition operand");
      switch (rhs.kind) {
        case Token::Kind::Ident: s.cond.rhs = {Operand::Kind::Var, rhs.text, 0}; break;
        case Token::Kind::Str: s.cond.rhs = {Operand::Kind::Str, rhs.text, 0}; break;
        case Token::Kind::Int: s.cond.rhs = {Operand::Kind::Int, "", rhs.value}; break;
        default: cur.fail("bad condition operand");
      }
      if ((s.cond.op != CondOp::Eq && s.cond.op != CondOp::Ne) &&
          s.cond.rhs.kind != Operand::Kind::Str)
        cur.fail("startswith/contains take a string literal");
    }
    cur.keyword("goto");
    s.text = cur.ident("label");
  } else if (kw == "label") {
    s.op = Op::Label;
    s.text = cur.ident("label name");
  } else if (kw == "call") {
    s.op = Op::Call;
    s.text = cur.ident("function name");
    s.args = parse_name_list(cur);
  } else if (kw == "sink") {
    s.op = Op::Sink;
    std::string kind = cur.ident("sink kind");
    auto k = parse_sink_kind(kind);
    if (!k) cur.fail("unknown sink kind '" + kind + "'");
    s.sink = *k;
    s.args.push_back(cur.ident("sink path"));
    if (!cur.done()) s.args.push_back(cur.ident("second sink path"));
  } else if (kw == "return") {
    s.op = Op::Return;
  } else {
    cur.fail("unknown statement '" + kw + "'");
  }
  cur.end();
  return s;
}

enum class VarType { Str, Int };

std::vector<int> successors(const Function& fn, int i) {
  const auto& s = fn.body[i];
  std::vector<int> out;
  int n = static_cast<int>(fn.body.size());
  if (s.op == Op::Return) return out;
  if (s.op == Op::If) {
    int target = fn.labels.at(s.text);
    if (s.cond.op != CondOp::True && i + 1 < n) out.push_back(i + 1);
    if (std::find(out.begin(), out.end(), target) == out.end()) out.push_back(target);
    return out;
  }
  if (i + 1 < n) out.push_back(i + 1);
  return out;
}

// Must-defined analysis plus typing. Throws on use-before-def.
void check_function(const Function& fn, const AlirProgram& prog) {
  const int n = static_cast<int>(fn.body.size());
  std::map<std::string, VarType> types;
  for (const auto& p : fn.params) types[p] = VarType::Str;

  auto fail = [&](const Statement& s, const std::string& msg) -> void {
    throw ParseError(fn.file, s.line, msg);
  };

  // Typing pass (flow-insensitive; a variable keeps one type).
  for (const auto& s : fn.body) {
    if (!s.defines()) continue;
    VarType t = s.op == Op::UriMatch ? VarType::Int : VarType::Str;
    auto [it, inserted] = types.emplace(s.dest, t);
    if (!inserted && it->second != t) fail(s, "variable '" + s.dest + "' redefined with another type");
  }
  auto type_of = [&](const Statement& s, const std::string& v) {
    auto it = types.find(v);
    if (it == types.end()) fail(s, "use-before-def: variable '" + v + "' is never defined");
    return it->second;
  };
  for (const auto& s : fn.body) {
    switch (s.op) {
      case Op::Concat:
      case Op::LastSeg:
      case Op::Canonical:
      case Op::UriMatch:
      case Op::Sink:
      case Op::Call:
        for (const auto& a : s.args)
          if (type_of(s, a) != VarType::Str) fail(s, "'" + a + "' is an integer match result, not a string");
        break;
      case Op::If:
        if (s.cond.op == CondOp::True) break;
        if (type_of(s, s.cond.lhs) == VarType::Int) {
          if (s.cond.rhs.kind != Operand::Kind::Int)
            fail(s, "match result '" + s.cond.lhs + "' must be compared with an integer");
        } else {
          if (s.cond.rhs.kind == Operand::Kind::Int)
            fail(s, "string '" + s.cond.lhs + "' compared with an integer");
          if (s.cond.rhs.kind == Operand::Kind::Var && type_of(s, s.cond.rhs.text) != VarType::Str)
            fail(s, "string compared with match result");
        }
        break;
      default: break;
    }
    if (s.op == Op::UriMatch && !prog.uri_tables.count(s.text))
      fail(s, "undefined uri table '" + s.text + "'");
    if (s.op == Op::Call) {
      const Function* callee = prog.find(s.text);
      if (!callee) fail(s, "call to undefined function '" + s.text + "'");
      if (callee->params.size() != s.args.size())
        fail(s, "call to '" + s.text + "' passes " + std::to_string(s.args.size()) + " args, expected " +
                    std::to_string(callee->params.size()));
    }
  }

  if (n == 0) return;
  // Must-defined sets; nullopt means "unvisited" (top).
  std::vector<std::optional<std::set<std::string>>> in(n);
  in[0] = std::set<std::string>(fn.params.begin(), fn.params.end());
  std::vector<int> work = {0};
  while (!work.empty()) {
    int i = work.back();
    work.pop_back();
    std::set<std::string> out = *in[i];
    if (fn.body[i].defines()) out.insert(fn.body[i].dest);
    for (int succ : successors(fn, i)) {
      if (!in[succ]) {
        in[succ] = out;
        work.push_back(succ);
      } else {
        std::set<std::string> meet;
        std::set_intersection(in[succ]->begin(), in[succ]->end(), out.begin(), out.end(),
                              std::inserter(meet, meet.begin()));
        if (meet != *in[succ]) {
          in[succ] = std::move(meet);
          work.push_back(succ);
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!in[i]) continue;  // unreachable
    for (const auto& v : fn.body[i].uses())
      if (!in[i]->count(v))
        fail(fn.body[i], "use-before-def: variable '" + v + "' may be unassigned here");
  }
}

}  // namespace

AlirProgram parse_alir(const std::vector<std::pair<std::string, std::string>>& sources) {
  AlirProgram prog;
  std::set<std::string> table_entries;
  for (const auto& [file, text] : sources) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    Function* current = nullptr;
    int fn_line = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      auto toks = LineLexer(raw, file, lineno).run();
      if (toks.empty()) continue;
      Cursor cur(std::move(toks), file, lineno);
      if (!current) {
        std::string kw = cur.ident("'fn' or 'urimap'");
        if (kw == "urimap") {
          std::string table = cur.ident("table id");
          UriEntry e;
          e.authority = cur.str("authority");
          e.path_pattern = cur.str("path pattern");
          e.code = cur.integer("match code");
          cur.end();
          prog.uri_tables[table].push_back(std::move(e));
        } else if (kw == "fn") {
          Function fn;
          fn.name = cur.ident("function name");
          fn.file = file;
          fn.params = parse_name_list(cur);
          cur.punct("{");
          cur.end();
          if (prog.function_index.count(fn.name))
            throw ParseError(file, lineno, "duplicate function '" + fn.name + "'");
          std::set<std::string> ps(fn.params.begin(), fn.params.end());
          if (ps.size() != fn.params.size()) throw ParseError(file, lineno, "duplicate parameter name");
          prog.function_index[fn.name] = static_cast<int>(prog.functions.size());
          prog.functions.push_back(std::move(fn));
          current = &prog.functions.back();
          fn_line = lineno;
        } else {
          cur.fail("expected 'fn' or 'urimap', got '" + kw + "'");
        }
        continue;
      }
      if (cur.peek_punct("}")) {
        cur.punct("}");
        cur.end();
        current = nullptr;
        continue;
      }
      Statement s = parse_statement(cur);
      s.line = lineno;
      s.id = {prog.function_index[current->name], static_cast<int>(current->body.size())};
      if (s.op == Op::Label) {
        if (current->labels.count(s.text))
          throw ParseError(file, lineno, "duplicate label '" + s.text + "'");
        current->labels[s.text] = s.id.index;
      }
      current->body.push_back(std::move(s));
    }
    if (current) throw ParseError(file, fn_line, "function '" + current->name + "' is not closed");
  }

  for (const auto& fn : prog.functions)
    for (const auto& s : fn.body)
      if (s.op == Op::If && !fn.labels.count(s.text))
        throw ParseError(fn.file, s.line, "undefined label '" + s.text + "'");
  for (const auto& fn : prog.functions) check_function(fn, prog);
  return prog;
}

AlirProgram parse_alir(std::string_view text, const std::string& source) {
  return parse_alir({{source, std::string(text)}});
}

std::string print_alir(const AlirProgram& prog) {
  std::ostringstream out;
  for (const auto& [table, entries] : prog.uri_tables)
    for (const auto& e : entries)
      out << "urimap " << table << " " << quote(e.authority) << " " << quote(e.path_pattern) << " "
          << e.code << "\n";
  for (const auto& fn : prog.functions) {
    out << "fn " << fn.name << "(" << join(fn.params, ", ") << ") {\n";
    for (const auto& s : fn.body) {
      out << "  ";
      switch (s.op) {
        case Op::Const: out << s.dest << " = const " << quote(s.text); break;
        case Op::GetExtra: out << s.dest << " = getextra " << quote(s.text); break;
        case Op::GetUri: out << s.dest << " = geturi"; break;
        case Op::Concat: out << s.dest << " = concat " << s.args[0] << " " << s.args[1]; break;
        case Op::LastSeg: out << s.dest << " = lastseg " << s.args[0]; break;
        case Op::Canonical: out << s.dest << " = canonical " << s.args[0]; break;
        case Op::EnvDir: out << s.dest << " = envdir " << s.text; break;
        case Op::UriMatch: out << s.dest << " = urimatch " << s.text << " " << s.args[0]; break;
        case Op::If:
          out << "if ";
          if (s.cond.op == CondOp::True) {
            out << "true";
          } else {
            out << s.cond.lhs << " " << to_string(s.cond.op) << " ";
            switch (s.cond.rhs.kind) {
              case Operand::Kind::Var: out << s.cond.rhs.text; break;
              case Operand::Kind::Str: out << quote(s.cond.rhs.text); break;
              case Operand::Kind::Int: out << s.cond.rhs.value; break;
            }
          }
          out << " goto " << s.text;
          break;
        case Op::Label: out << "label " << s.text; break;
        case Op::Call: out << "call " << s.text << "(" << join(s.args, ", ") << ")"; break;
        case Op::Sink:
          out << "sink " << to_string(s.sink);
          for (const auto& a : s.args) out << " " << a;
          break;
        case Op::Return: out << "return"; break;
      }
      out << "\n";
    }
    out << "}\n";
  }
  return out.str();
}

}  // namespace pathsentry::frontend
