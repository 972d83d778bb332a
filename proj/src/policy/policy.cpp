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

#include "pathsentry/policy/policy.hpp"

#include <sstream>
#include <stdexcept>

#include "pathsentry/constraints/pathops.hpp"

namespace pathsentry::policy {

using constraints::canonicalize;
using constraints::path_covers;
using frontend::AllowRule;
using frontend::PolicySet;

std::string_view to_string(AttackerLevel level) {
  return level == AttackerLevel::LV1 ? "LV1" : "LV2root";
}

std::optional<AttackerLevel> parse_attacker_level(std::string_view text) {
  if (text == "1" || text == "LV1") return AttackerLevel::LV1;
  if (text == "2root" || text == "LV2root") return AttackerLevel::LV2root;
  return std::nullopt;
}

AttackerProfile make_attacker(const PolicySet& policy, AttackerLevel level) {
  AttackerProfile out;
  out.level = level;
  for (const auto& [name, prot] : policy.permission_table)
    if (prot != ProtectionLevel::Signature || level == AttackerLevel::LV2root) out.granted_permissions.insert(name);
  return out;
}

std::vector<EntryConstraint> entry_constraints(const frontend::AppBundle& bundle, const PolicySet& policy,
                                               std::vector<Diagnostic>* diagnostics) {
  std::vector<EntryConstraint> out;
  for (const auto& c : bundle.manifest.components) {
    EntryConstraint ec;
    ec.component = c.name;
    if (c.permission) {
      RequiredPermission rp{*c.permission, std::nullopt};
      auto it = policy.permission_table.find(*c.permission);
      if (it != policy.permission_table.end()) rp.level = it->second;
      ec.required_permission = rp;
      for (const auto& s : policy.subjects)
        if (s.holds.count(*c.permission)) ec.holders.push_back(s.id);
    }
    if (c.exported) {
      if (!ec.required_permission) {
        ec.accessible_by = {AttackerLevel::LV1, AttackerLevel::LV2root};
      } else if (!ec.required_permission->level) {
        if (diagnostics)
          diagnostics->push_back({bundle.package(), 0,
                                  "component " + c.name + " is guarded by unknown permission " +
                                      ec.required_permission->name + "; treated as inaccessible"});
      } else {
        for (auto lv : {AttackerLevel::LV1, AttackerLevel::LV2root})
          if (make_attacker(policy, lv).granted_permissions.count(ec.required_permission->name))
            ec.accessible_by.insert(lv);
      }
    }
    out.push_back(std::move(ec));
  }
  return out;
}

std::set<frontend::EntryPoint> attacker_entries(const frontend::AppBundle& bundle,
                                                const std::vector<EntryConstraint>& constraints,
                                                AttackerLevel level) {
  std::set<std::string> open;
  for (const auto& ec : constraints)
    if (ec.accessible(level)) open.insert(ec.component);
  std::set<frontend::EntryPoint> out;
  for (const auto& e : bundle.entries)
    if (open.count(e.component)) out.insert(e);
  return out;
}

AccessSet::AccessSet(std::vector<AllowRule> rules) : rules_(std::move(rules)) {}

std::uint8_t AccessSet::at(std::string_view path) const {
  std::uint8_t acc = kNone;
  for (const auto& r : rules_)
    if (path_covers(r.path_prefix, path)) acc |= r.access;
  return acc;
}

std::map<std::string, std::uint8_t> AccessSet::entries() const {
  std::map<std::string, std::uint8_t> out;
  for (const auto& r : rules_) out[r.path_prefix] = at(r.path_prefix);
  return out;
}

namespace {

AccessSet rules_for(const PolicySet& policy, const std::set<std::string>& classes) {
  std::vector<AllowRule> rules;
  for (const auto& r : policy.allow_rules)
    if (classes.count(r.subject_class)) rules.push_back(r);
  return AccessSet(std::move(rules));
}

}  // namespace

AccessSet accessible_set(const PolicySet& policy, const frontend::Subject& subject) {
  return rules_for(policy, {subject.id, std::string(to_string(subject.level))});
}

AccessSet accessible_set(const PolicySet& policy, const AttackerProfile&) {
  return rules_for(policy, {std::string(kAttackerSubjectClass)});
}

bool FileConstraint::is_private(std::string_view path) const {
  return victim_access.at(path) != kNone && attacker_access.at(path) == kNone;
}

bool FileConstraint::attacker_writable(std::string_view dir) const {
  return (attacker_access.at(dir) & kWrite) != 0;
}

FileConstraint file_constraints(const PolicySet& policy, std::string_view victim, const AttackerProfile& attacker) {
  const frontend::Subject* subject = policy.find_subject(victim);
  if (!subject) throw std::invalid_argument("unknown victim subject '" + std::string(victim) + "'");
  FileConstraint fc;
  fc.victim = subject->id;
  fc.attacker = attacker;
  fc.victim_access = accessible_set(policy, *subject);
  fc.attacker_access = accessible_set(policy, attacker);
  for (const auto& r : fc.victim_access.rules())
    if (fc.is_private(r.path_prefix)) fc.private_files.insert(r.path_prefix);
  for (const auto& r : fc.attacker_access.rules())
    if (fc.attacker_writable(r.path_prefix)) fc.hijackable_dirs.insert(r.path_prefix);
  return fc;
}

Resolution resolve(const FileConstraint& fc, std::string_view path,
                   const std::map<std::string, std::string>& planted_links) {
  Resolution res;
  std::string current = canonicalize(path);
  int hops = 0;
  bool restarted = true;
  while (restarted) {
    restarted = false;
    auto segs = split(current, '/');
    std::string walked;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (segs[i].empty()) continue;
      const std::string parent = walked.empty() ? "/" : walked;
      walked += "/" + segs[i];
      auto link = planted_links.find(walked);
      if (link == planted_links.end() || !fc.attacker_writable(parent)) continue;
      if (++hops > kMaxLinkHops) {
        res.loop = true;
        res.target = current;
        return res;
      }
      res.junctions.push_back(walked);
      std::string target = link->second;
      if (target.empty() || target.front() != '/') target = parent + "/" + target;
      for (std::size_t k = i + 1; k < segs.size(); ++k) target += "/" + segs[k];
      current = canonicalize(target);
      restarted = true;
      break;
    }
  }
  res.target = current;
  return res;
}

std::string explain(const PolicySet& policy, std::string_view subject) {
  AccessSet set;
  std::ostringstream out;
  if (auto lv = parse_attacker_level(subject); lv && subject != "1" && subject != "2root") {
    AttackerProfile a = make_attacker(policy, *lv);
    set = accessible_set(policy, a);
    out << "attacker " << to_string(*lv) << "\n";
    out << "permissions:";
    for (const auto& p : a.granted_permissions) out << " " << p;
    out << "\n";
  } else if (const auto* s = policy.find_subject(subject)) {
    set = accessible_set(policy, *s);
    out << "subject " << s->id << " level " << to_string(s->level) << "\n";
    out << "holds:";
    for (const auto& p : s->holds) out << " " << p;
    out << "\n";
  } else {
    throw std::invalid_argument("unknown subject '" + std::string(subject) + "'");
  }
  out << "accessible:\n";
  for (const auto& [prefix, acc] : set.entries()) out << "  " << prefix << " " << access_to_string(acc) << "\n";
  return out.str();
}

}  // namespace pathsentry::policy
