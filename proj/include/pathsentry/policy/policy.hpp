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

#ifndef PATHSENTRY_POLICY_POLICY_HPP
#define PATHSENTRY_POLICY_POLICY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pathsentry/frontend/bundle.hpp"

namespace pathsentry::policy {

enum class AttackerLevel { LV1, LV2root };

std::string_view to_string(AttackerLevel level);

/// Accepts "1", "LV1", "2root" and "LV2root".
std::optional<AttackerLevel> parse_attacker_level(std::string_view text);

/// Worst-case attacker at a level. LV1 holds every normal and dangerous
/// permission of the table; LV2root adds every signature permission. Both
/// act on the filesystem through the "LV1" allow rules: LV2root is an LV1
/// app on a rooted test device, not a platform process.
struct AttackerProfile {
  AttackerLevel level = AttackerLevel::LV1;
  std::set<std::string> granted_permissions;
};

AttackerProfile make_attacker(const frontend::PolicySet& policy, AttackerLevel level);

inline constexpr std::string_view kAttackerSubjectClass = "LV1";

struct RequiredPermission {
  std::string name;
  std::optional<ProtectionLevel> level;  // nullopt: not in the permission table
};

struct EntryConstraint {
  std::string component;
  std::set<AttackerLevel> accessible_by;
  std::optional<RequiredPermission> required_permission;
  std::vector<std::string> holders;  // policy subjects holding the guard

  bool accessible(AttackerLevel level) const { return accessible_by.count(level) > 0; }
};

/// One constraint per manifest component, in manifest order. Unknown guard
/// permissions make the component inaccessible and are diagnosed.
std::vector<EntryConstraint> entry_constraints(const frontend::AppBundle& bundle, const frontend::PolicySet& policy,
                                               std::vector<Diagnostic>* diagnostics = nullptr);

/// Entry points of components the attacker can invoke.
std::set<frontend::EntryPoint> attacker_entries(const frontend::AppBundle& bundle,
                                                const std::vector<EntryConstraint>& constraints,
                                                AttackerLevel level);

/// The allow rules that apply to one subject, with prefix-union lookup.
class AccessSet {
 public:
  AccessSet() = default;
  explicit AccessSet(std::vector<frontend::AllowRule> rules);

  /// Union of the access bits of every rule whose prefix covers `path`.
  std::uint8_t at(std::string_view path) const;

  /// Each applicable rule prefix with its effective access, so a prefix
  /// nested below another also carries the outer rule's bits.
  std::map<std::string, std::uint8_t> entries() const;

  const std::vector<frontend::AllowRule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

 private:
  std::vector<frontend::AllowRule> rules_;
};

/// Rules for a subject id (its own rules plus those of its level class),
/// or for an attacker profile.
AccessSet accessible_set(const frontend::PolicySet& policy, const frontend::Subject& subject);
AccessSet accessible_set(const frontend::PolicySet& policy, const AttackerProfile& attacker);

struct FileConstraint {
  std::string victim;
  AttackerProfile attacker;
  AccessSet victim_access;
  AccessSet attacker_access;
  std::set<std::string> private_files;    // private rule prefixes
  std::set<std::string> hijackable_dirs;  // attacker-writable rule prefixes

  /// Accessible to the victim (any access) and not to the attacker.
  bool is_private(std::string_view path) const;
  bool attacker_writable(std::string_view dir) const;
};

/// Throws std::invalid_argument when `victim` is not a policy subject.
FileConstraint file_constraints(const frontend::PolicySet& policy, std::string_view victim,
                                const AttackerProfile& attacker);

struct Resolution {
  std::string target;
  std::vector<std::string> junctions;  // planted links followed, in order
  bool loop = false;                   // hop limit reached
};

inline constexpr int kMaxLinkHops = 40;

/// Name resolution of an absolute canonical path, component by component.
/// A planted link (link path -> target) is followed only when its parent
/// directory is attacker-writable; following it replaces the prefix and
/// resolution restarts on the result.
Resolution resolve(const FileConstraint& fc, std::string_view path,
                   const std::map<std::string, std::string>& planted_links);

/// Human-readable accessible set for `pathsentry policy --explain`. The
/// subject may be a policy subject id, "LV1" or "LV2root".
std::string explain(const frontend::PolicySet& policy, std::string_view subject);

}  // namespace pathsentry::policy

#endif  // PATHSENTRY_POLICY_POLICY_HPP
