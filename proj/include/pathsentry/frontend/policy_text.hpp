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

#ifndef PATHSENTRY_FRONTEND_POLICY_TEXT_HPP
#define PATHSENTRY_FRONTEND_POLICY_TEXT_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pathsentry/common.hpp"

namespace pathsentry::frontend {

struct Subject {
  std::string id;
  PrivilegeLevel level = PrivilegeLevel::LV1;
  std::set<std::string> holds;

  bool operator==(const Subject&) const = default;
};

/// `subject_class` is either a level pattern ("LV1", "LV2", "LV3") or a
/// subject id. `path_prefix` is absolute and lexically canonical.
struct AllowRule {
  std::string subject_class;
  std::string path_prefix;
  std::uint8_t access = kNone;

  bool operator==(const AllowRule&) const = default;
};

struct PolicySet {
  std::map<std::string, ProtectionLevel> permission_table;
  std::vector<Subject> subjects;
  std::vector<AllowRule> allow_rules;

  const Subject* find_subject(std::string_view id) const;

  bool operator==(const PolicySet&) const = default;
};

/// Parses the line-oriented policy format. Throws ParseError on a
/// non-absolute prefix, unknown protection level, or conflicting duplicate.
PolicySet parse_policy(std::string_view text, const std::string& source = "policy");

std::string print_policy(const PolicySet& policy);

}  // namespace pathsentry::frontend

#endif  // PATHSENTRY_FRONTEND_POLICY_TEXT_HPP
