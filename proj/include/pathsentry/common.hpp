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

#ifndef PATHSENTRY_COMMON_HPP
#define PATHSENTRY_COMMON_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pathsentry {

/// Raised for malformed inputs. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, int line, const std::string& message);

  const std::string& source() const { return source_; }
  int line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string source_;
  int line_;
  std::string detail_;
};

/// Raised when linked structures disagree (dangling names, bad references).
class LinkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal invariant violation; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class PrivilegeLevel { LV1 = 1, LV2 = 2, LV3 = 3 };
enum class ProtectionLevel { Normal, Dangerous, Signature };
enum class SinkKind { Open, Read, Create, Delete, Move, LoadImage };

/// Access bits for filesystem allow-rules.
enum Access : std::uint8_t { kNone = 0, kRead = 1, kWrite = 2, kReadWrite = 3 };

std::string_view to_string(PrivilegeLevel level);
std::string_view to_string(ProtectionLevel level);
std::string_view to_string(SinkKind kind);
std::string access_to_string(std::uint8_t access);

std::optional<PrivilegeLevel> parse_privilege_level(std::string_view text);
std::optional<ProtectionLevel> parse_protection_level(std::string_view text);
std::optional<SinkKind> parse_sink_kind(std::string_view text);
std::optional<std::uint8_t> parse_access(std::string_view text);

/// Strength order used when two manifests disagree on a protection level.
int protection_rank(ProtectionLevel level);

/// A non-fatal problem surfaced to the report.
struct Diagnostic {
  std::string source;
  int line = 0;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

std::vector<std::string> split(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view text);
bool starts_with(std::string_view text, std::string_view prefix);

}  // namespace pathsentry

#endif  // PATHSENTRY_COMMON_HPP
