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

#include "pathsentry/constraints/pathops.hpp"

#include <algorithm>
#include <cctype>

namespace pathsentry::constraints {

std::string canonicalize(std::string_view path) {
  const bool absolute = !path.empty() && path.front() == '/';
  std::vector<std::string_view> stack;
  std::size_t leading_up = 0;  // ".." kept for relative escapes
  std::size_t i = 0;
  while (i <= path.size()) {
    std::size_t j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    std::string_view seg = path.substr(i, j - i);
    i = j + 1;
    if (seg.empty() || seg == ".") continue;
    if (seg == "..") {
      if (!stack.empty()) stack.pop_back();
      else if (!absolute) ++leading_up;
      continue;
    }
    stack.push_back(seg);
  }
  std::string out;
  if (absolute) out = "/";
  for (std::size_t k = 0; k < leading_up; ++k) {
    if (!out.empty() && out.back() != '/') out += '/';
    out += "..";
  }
  for (auto seg : stack) {
    if (!out.empty() && out.back() != '/') out += '/';
    out += seg;
  }
  if (out.empty()) out = ".";
  return out;
}

bool escapes_origin(std::string_view p) {
  return p == ".." || starts_with(p, "../");
}

bool has_dotdot_segment(std::string_view path) {
  std::size_t i = 0;
  while (i <= path.size()) {
    std::size_t j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    if (path.substr(i, j - i) == "..") return true;
    i = j + 1;
  }
  return false;
}

bool path_covers(std::string_view prefix, std::string_view path) {
  if (prefix == "/") return !path.empty() && path.front() == '/';
  if (!starts_with(path, prefix)) return false;
  return path.size() == prefix.size() || path[prefix.size()] == '/';
}

std::vector<std::string> parent_dirs(std::string_view path) {
  std::vector<std::string> out;
  if (path.empty() || path.front() != '/' || path == "/") return out;
  out.emplace_back("/");
  for (std::size_t i = 1; i < path.size(); ++i)
    if (path[i] == '/') out.emplace_back(path.substr(0, i));
  return out;
}

std::string parent_of(std::string_view path) {
  auto pos = path.rfind('/');
  if (pos == std::string_view::npos) return ".";
  if (pos == 0) return "/";
  return std::string(path.substr(0, pos));
}

std::string basename_of(std::string_view path) {
  auto pos = path.rfind('/');
  return std::string(pos == std::string_view::npos ? path : path.substr(pos + 1));
}

bool is_uri(std::string_view text) {
  return starts_with(text, kUriScheme);
}

std::string percent_decode(std::string_view text) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size()) {
      int hi = hex(text[i + 1]);
      int lo = hex(text[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += text[i];
  }
  return out;
}

std::string encode_segment(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '/') out += "%2F";
    else if (c == '%') out += "%25";
    else out += c;
  }
  return out;
}

std::string last_segment(std::string_view text) {
  auto pos = text.rfind('/');
  std::string_view raw = pos == std::string_view::npos ? text : text.substr(pos + 1);
  return is_uri(text) ? percent_decode(raw) : std::string(raw);
}

bool uri_entry_matches(const frontend::UriEntry& entry, std::string_view uri) {
  if (!is_uri(uri)) return false;
  std::string_view rest = uri.substr(kUriScheme.size());
  if (!starts_with(rest, entry.authority)) return false;
  rest.remove_prefix(entry.authority.size());

  std::vector<std::string> pattern;
  for (auto& seg : split(entry.path_pattern, '/'))
    if (!seg.empty()) pattern.push_back(seg);

  std::vector<std::string> segs;
  if (!rest.empty()) {
    if (rest.front() != '/') return false;
    segs = split(rest.substr(1), '/');
  }
  if (segs.size() != pattern.size()) return false;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    if (s.empty()) return false;
    if (pattern[i] == "*") continue;
    if (pattern[i] == "#") {
      if (!std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) return false;
      continue;
    }
    if (s != pattern[i]) return false;
  }
  return true;
}

long uri_match(const std::vector<frontend::UriEntry>& table, std::string_view uri) {
  for (const auto& e : table)
    if (uri_entry_matches(e, uri)) return e.code;
  return -1;
}

}  // namespace pathsentry::constraints
