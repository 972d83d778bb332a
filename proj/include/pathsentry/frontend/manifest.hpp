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

#ifndef PATHSENTRY_FRONTEND_MANIFEST_HPP
#define PATHSENTRY_FRONTEND_MANIFEST_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pathsentry/common.hpp"

namespace pathsentry::frontend {

enum class ComponentKind { Activity, Service, Receiver, Provider };

std::string_view to_string(ComponentKind kind);
std::optional<ComponentKind> parse_component_kind(std::string_view text);

struct ComponentDecl {
  std::string name;
  ComponentKind kind = ComponentKind::Activity;
  bool exported = false;
  std::optional<std::string> permission;
  std::vector<std::string> entry_functions;

  bool operator==(const ComponentDecl&) const = default;
};

struct DeclaredPermission {
  std::string name;
  ProtectionLevel protection_level = ProtectionLevel::Normal;

  bool operator==(const DeclaredPermission&) const = default;
};

// Mirrors the AndroidManifest attributes that matter for entry constraints.
struct Manifest {
  std::string package;
  PrivilegeLevel privilege_level = PrivilegeLevel::LV1;
  std::vector<ComponentDecl> components;
  std::vector<DeclaredPermission> declared_permissions;
  std::vector<std::string> uses_permissions;

  const ComponentDecl* find_component(std::string_view name) const;

  bool operator==(const Manifest&) const = default;
};

/// Parses the JSON manifest. Guard permissions stay unresolved until the
/// bundle set is linked. Throws ParseError.
Manifest parse_manifest(std::string_view text, const std::string& source = "manifest.json");

/// Serializes in the same JSON schema, pretty-printed with stable key order.
std::string print_manifest(const Manifest& manifest);

}  // namespace pathsentry::frontend

#endif  // PATHSENTRY_FRONTEND_MANIFEST_HPP
