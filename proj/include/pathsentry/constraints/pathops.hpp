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

// Concrete string semantics shared by the solver, the SMT encoder and the
// interpreter. Keep these three in agreement; the SMT encoding documents
// the same definitions in strings-theory form.

#ifndef PATHSENTRY_CONSTRAINTS_PATHOPS_HPP
#define PATHSENTRY_CONSTRAINTS_PATHOPS_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pathsentry/frontend/alir.hpp"

namespace pathsentry::constraints {

/// Lexical path normalization. Empty and "." segments collapse; ".." pops
/// one segment. At the root of an absolute path ".." stays at the root. A
/// relative path that climbs above its origin keeps its leading ".."
/// segments, which is the escape marker (see escapes_origin). The empty
/// relative result is ".". Idempotent.
std::string canonicalize(std::string_view path);

/// True for a canonical relative path starting with "..".
bool escapes_origin(std::string_view canonical_path);

/// True if `path` has a ".." segment.
bool has_dotdot_segment(std::string_view path);

/// Path-component prefix test: "/a" covers "/a" and "/a/b" but not "/ab".
bool path_covers(std::string_view prefix, std::string_view path);

/// Directories of an absolute canonical path, root first, excluding the
/// path itself: "/a/b/c" -> {"/", "/a", "/a/b"}.
std::vector<std::string> parent_dirs(std::string_view path);

std::string parent_of(std::string_view path);
std::string basename_of(std::string_view path);

/// Strings starting with this scheme take URI semantics in lastseg/urimatch.
inline constexpr std::string_view kUriScheme = "content://";

bool is_uri(std::string_view text);

/// Decodes every %XX escape; malformed escapes are kept verbatim.
std::string percent_decode(std::string_view text);

/// Encodes the characters a URI path segment cannot carry ("/" and "%").
std::string encode_segment(std::string_view text);

/// Substring after the last "/" (whole string when there is none). For URI
/// strings the result is percent-decoded.
std::string last_segment(std::string_view text);

/// Standard UriMatcher convention: authority must be equal; the path is split
/// on "/" and must have exactly as many non-empty segments as the pattern;
/// "*" matches any one segment, "#" one all-digit segment, other pattern
/// segments match literally (raw, undecoded).
bool uri_entry_matches(const frontend::UriEntry& entry, std::string_view uri);

/// Code of the first matching entry, or -1 (UriMatcher.NO_MATCH).
long uri_match(const std::vector<frontend::UriEntry>& table, std::string_view uri);

}  // namespace pathsentry::constraints

#endif  // PATHSENTRY_CONSTRAINTS_PATHOPS_HPP
