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

#include "pathsentry/common.hpp"

namespace pathsentry {

ParseError::ParseError(std::string source, int line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message),
      source_(std::move(source)),
      line_(line),
      detail_(message) {}

std::string_view to_string(PrivilegeLevel level) {
  switch (level) {
    case PrivilegeLevel::LV1: return "LV1";
    case PrivilegeLevel::LV2: return "LV2";
    case PrivilegeLevel::LV3: return "LV3";
  }
  return "?";
}

std::string_view to_string(ProtectionLevel level) {
  switch (level) {
    case ProtectionLevel::Normal: return "normal";
    case ProtectionLevel::Dangerous: return "dangerous";
    case ProtectionLevel::Signature: return "signature";
  }
  return "?";
}

std::string_view to_string(SinkKind kind) {
  switch (kind) {
    case SinkKind::Open: return "open";
    case SinkKind::Read: return "read";
    case SinkKind::Create: return "create";
    case SinkKind::Delete: return "delete";
    case SinkKind::Move: return "move";
    case SinkKind::LoadImage: return "loadImage";
  }
  return "?";
}

std::string access_to_string(std::uint8_t access) {
  switch (access & kReadWrite) {
    case kRead: return "read";
    case kWrite: return "write";
    case kReadWrite: return "readwrite";
    default: return "none";
  }
}

std::optional<PrivilegeLevel> parse_privilege_level(std::string_view text) {
  if (text == "LV1" || text == "1") return PrivilegeLevel::LV1;
  if (text == "LV2" || text == "2") return PrivilegeLevel::LV2;
  if (text == "LV3" || text == "3") return PrivilegeLevel::LV3;
  return std::nullopt;
}

std::optional<ProtectionLevel> parse_protection_level(std::string_view text) {
  if (text == "normal") return ProtectionLevel::Normal;
  if (text == "dangerous") return ProtectionLevel::Dangerous;
  if (text == "signature") return ProtectionLevel::Signature;
  return std::nullopt;
}

std::optional<SinkKind> parse_sink_kind(std::string_view text) {
  if (text == "open") return SinkKind::Open;
  if (text == "read") return SinkKind::Read;
  if (text == "create") return SinkKind::Create;
  if (text == "delete") return SinkKind::Delete;
  if (text == "move") return SinkKind::Move;
  if (text == "loadImage") return SinkKind::LoadImage;
  return std::nullopt;
}

std::optional<std::uint8_t> parse_access(std::string_view text) {
  if (text == "read") return kRead;
  if (text == "write") return kWrite;
  if (text == "readwrite") return kReadWrite;
  return std::nullopt;
}

int protection_rank(ProtectionLevel level) {
  return static_cast<int>(level);
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      return out;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string_view trim(std::string_view text) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

bool starts_with(std::string_view text, std::string_view prefix) {
  return text.substr(0, prefix.size()) == prefix;
}

}  // namespace pathsentry
