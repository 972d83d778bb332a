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

#include "pathsentry/frontend/policy_text.hpp"

#include <sstream>

#include "pathsentry/constraints/pathops.hpp"

namespace pathsentry::frontend {

const Subject* PolicySet::find_subject(std::string_view id) const {
  for (const auto& s : subjects)
    if (s.id == id) return &s;
  return nullptr;
}

namespace {

std::vector<std::string> words(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

PolicySet parse_policy(std::string_view text, const std::string& source) {
  PolicySet policy;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto w = words(line);
    if (w.empty()) continue;
    auto fail = [&](const std::string& msg) { throw ParseError(source, lineno, msg); };

    if (w[0] == "perm") {
      if (w.size() != 4 || w[2] != "level") fail("expected 'perm NAME level normal|dangerous|signature'");
      auto lvl = parse_protection_level(w[3]);
      if (!lvl) fail("unknown protection level '" + w[3] + "'");
      auto [it, inserted] = policy.permission_table.emplace(w[1], *lvl);
      if (!inserted && it->second != *lvl) fail("conflicting protection levels for '" + w[1] + "'");
    } else if (w[0] == "subject") {
      if (w.size() < 4 || w[2] != "level") fail("expected 'subject ID level 1|2|3 [holds P1,P2]'");
      auto lvl = parse_privilege_level(w[3]);
      if (!lvl) fail("bad subject level '" + w[3] + "'");
      Subject s{w[1], *lvl, {}};
      if (w.size() > 4) {
        if (w[4] != "holds") fail("expected 'holds'");
        std::string list;
        for (std::size_t i = 5; i < w.size(); ++i) list += w[i];
        for (auto& p : split(list, ','))
          if (!p.empty()) s.holds.insert(p);
      }
      if (policy.find_subject(s.id)) fail("duplicate subject '" + s.id + "'");
      policy.subjects.push_back(std::move(s));
    } else if (w[0] == "allow") {
      if (w.size() != 4) fail("expected 'allow CLASS /path/prefix read|write|readwrite'");
      if (w[2].empty() || w[2].front() != '/') fail("path prefix '" + w[2] + "' is not absolute");
      auto access = parse_access(w[3]);
      if (!access) fail("unknown access '" + w[3] + "'");
      AllowRule rule{w[1], constraints::canonicalize(w[2]), *access};
      bool duplicate = false;
      for (const auto& r : policy.allow_rules) {
        if (r.subject_class == rule.subject_class && r.path_prefix == rule.path_prefix) {
          if (r.access != rule.access)
            fail("conflicting rule for " + rule.subject_class + " " + rule.path_prefix);
          duplicate = true;
        }
      }
      if (!duplicate) policy.allow_rules.push_back(std::move(rule));
    } else {
      fail("unknown policy statement '" + w[0] + "'");
    }
  }
  return policy;
}

std::string print_policy(const PolicySet& policy) {
  std::ostringstream out;
  for (const auto& [name, lvl] : policy.permission_table)
    out << "perm " << name << " level " << to_string(lvl) << "\n";
  for (const auto& s : policy.subjects) {
    out << "subject " << s.id << " level " << static_cast<int>(s.level);
    if (!s.holds.empty())
      out << " holds " << join(std::vector<std::string>(s.holds.begin(), s.holds.end()), ",");
    out << "\n";
  }
  for (const auto& r : policy.allow_rules)
    out << "allow " << r.subject_class << " " << r.path_prefix << " " << access_to_string(r.access) << "\n";
  return out.str();
}

}  // namespace pathsentry::frontend
