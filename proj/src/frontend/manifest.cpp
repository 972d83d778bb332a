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

#include "pathsentry/frontend/manifest.hpp"

#include <set>

#include <json.hpp>

namespace pathsentry::frontend {

using nlohmann::ordered_json;

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Activity: return "activity";
    case ComponentKind::Service: return "service";
    case ComponentKind::Receiver: return "receiver";
    case ComponentKind::Provider: return "provider";
  }
  return "?";
}

std::optional<ComponentKind> parse_component_kind(std::string_view text) {
  if (text == "activity") return ComponentKind::Activity;
  if (text == "service") return ComponentKind::Service;
  if (text == "receiver") return ComponentKind::Receiver;
  if (text == "provider") return ComponentKind::Provider;
  return std::nullopt;
}

const ComponentDecl* Manifest::find_component(std::string_view name) const {
  for (const auto& c : components)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

// Line of a byte offset, for position-reported syntax errors.
int line_of(std::string_view text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

const ordered_json& field(const ordered_json& obj, const char* key, const std::string& source,
                          const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(source, 0, where + ": missing field '" + key + "'");
  return *it;
}

std::string string_field(const ordered_json& obj, const char* key, const std::string& source,
                         const std::string& where) {
  const auto& v = field(obj, key, source, where);
  if (!v.is_string()) throw ParseError(source, 0, where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Manifest parse_manifest(std::string_view text, const std::string& source) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text.begin(), text.end());
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(source, line_of(text, e.byte), std::string("syntax error: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError(source, 1, "manifest must be a JSON object");

  Manifest m;
  m.package = string_field(doc, "package", source, "manifest");
  if (m.package.empty()) throw ParseError(source, 0, "manifest: package must be non-empty");

  auto level = parse_privilege_level(string_field(doc, "privilegeLevel", source, "manifest"));
  if (!level) throw ParseError(source, 0, "manifest: privilegeLevel must be LV1, LV2 or LV3");
  m.privilege_level = *level;

  std::set<std::string> seen;
  if (auto it = doc.find("components"); it != doc.end()) {
    if (!it->is_array()) throw ParseError(source, 0, "manifest: components must be an array");
    for (const auto& jc : *it) {
      if (!jc.is_object()) throw ParseError(source, 0, "manifest: component must be an object");
      ComponentDecl c;
      c.name = string_field(jc, "name", source, "component");
      const std::string where = "component '" + c.name + "'";
      auto kind = parse_component_kind(string_field(jc, "kind", source, where));
      if (!kind)
        throw ParseError(source, 0, where + ": unknown component kind '" +
                                        jc["kind"].get<std::string>() + "'");
      c.kind = *kind;
      const auto& exported = field(jc, "exported", source, where);
      if (!exported.is_boolean()) throw ParseError(source, 0, where + ": exported must be a bool");
      c.exported = exported.get<bool>();
      if (auto p = jc.find("permission"); p != jc.end() && !p->is_null()) {
        if (!p->is_string()) throw ParseError(source, 0, where + ": permission must be a string or null");
        c.permission = p->get<std::string>();
      }
      const auto& fns = field(jc, "entryFunctions", source, where);
      if (!fns.is_array()) throw ParseError(source, 0, where + ": entryFunctions must be an array");
      for (const auto& f : fns) {
        if (!f.is_string()) throw ParseError(source, 0, where + ": entry function must be a string");
        c.entry_functions.push_back(f.get<std::string>());
      }
      if (c.entry_functions.empty())
        throw ParseError(source, 0, where + ": entryFunctions must be non-empty");
      if (!seen.insert(c.name).second)
        throw ParseError(source, 0, "duplicate component name '" + c.name + "'");
      m.components.push_back(std::move(c));
    }
  }

  if (auto it = doc.find("declaredPermissions"); it != doc.end()) {
    if (!it->is_array()) throw ParseError(source, 0, "manifest: declaredPermissions must be an array");
    for (const auto& jp : *it) {
      DeclaredPermission p;
      p.name = string_field(jp, "name", source, "declared permission");
      auto lvl = parse_protection_level(string_field(jp, "protectionLevel", source, p.name));
      if (!lvl) throw ParseError(source, 0, "permission '" + p.name + "': unknown protection level");
      p.protection_level = *lvl;
      m.declared_permissions.push_back(std::move(p));
    }
  }

  if (auto it = doc.find("usesPermissions"); it != doc.end()) {
    if (!it->is_array()) throw ParseError(source, 0, "manifest: usesPermissions must be an array");
    for (const auto& p : *it) {
      if (!p.is_string()) throw ParseError(source, 0, "usesPermissions entries must be strings");
      m.uses_permissions.push_back(p.get<std::string>());
    }
  }
  return m;
}

std::string print_manifest(const Manifest& m) {
  ordered_json doc;
  doc["package"] = m.package;
  doc["privilegeLevel"] = std::string(to_string(m.privilege_level));
  doc["components"] = ordered_json::array();
  for (const auto& c : m.components) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["kind"] = std::string(to_string(c.kind));
    jc["exported"] = c.exported;
    jc["permission"] = c.permission ? ordered_json(*c.permission) : ordered_json(nullptr);
    jc["entryFunctions"] = c.entry_functions;
    doc["components"].push_back(std::move(jc));
  }
  doc["declaredPermissions"] = ordered_json::array();
  for (const auto& p : m.declared_permissions)
    doc["declaredPermissions"].push_back(
        {{"name", p.name}, {"protectionLevel", std::string(to_string(p.protection_level))}});
  doc["usesPermissions"] = m.uses_permissions;
  return doc.dump(2) + "\n";
}

}  // namespace pathsentry::frontend
