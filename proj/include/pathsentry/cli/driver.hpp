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

#ifndef PATHSENTRY_CLI_DRIVER_HPP
#define PATHSENTRY_CLI_DRIVER_HPP

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pathsentry/cli/report.hpp"

namespace pathsentry::cli {

inline constexpr int kExitClean = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitInputError = 2;

/// Parses a PATHSENTRY_BUDGET value: comma-separated key=value pairs with
/// keys paths, length, depth, atoms, candidates, segments and steps. A bare
/// integer sets paths. Throws std::invalid_argument.
detect::Budgets parse_budget(std::string_view spec, detect::Budgets base = {});

/// Defaults overridden by PATHSENTRY_BUDGET when it is set.
detect::Budgets budgets_from_env();

struct Inputs {
  std::vector<frontend::AppBundle> bundles;
  frontend::PolicySet policy;  // linked against every bundle
  std::vector<Diagnostic> diagnostics;
};

/// Throws ParseError, LinkError or std::runtime_error for unreadable input.
Inputs load_inputs(const std::vector<std::filesystem::path>& bundle_dirs, const std::filesystem::path& policy_file);

struct BundleResult {
  BundleReport report;
  std::unique_ptr<detect::Analysis> analysis;
};

BundleResult analyze_bundle(const frontend::AppBundle& bundle, const frontend::PolicySet& policy,
                            policy::AttackerLevel level, const detect::Budgets& budgets);

/// Analyzes every bundle, up to `jobs` at a time; results keep input order.
std::vector<BundleResult> analyze_all(const Inputs& inputs, policy::AttackerLevel level,
                                      const detect::Budgets& budgets, int jobs);

Report make_report(const Inputs& inputs, policy::AttackerLevel level, const std::vector<BundleResult>& results);

/// Writes one SMT-LIB file per finding; returns the paths written.
std::vector<std::filesystem::path> emit_smt(const std::vector<BundleResult>& results, const std::filesystem::path& dir);

struct CorpusRow {
  std::string bundle;
  std::size_t pre = 0;
  std::size_t post = 0;
};

struct CorpusStats {
  std::vector<CorpusRow> rows;
  std::size_t pre = 0;
  std::size_t post = 0;

  double ratio() const { return pre == 0 ? 0.0 : static_cast<double>(post) / static_cast<double>(pre); }
};

CorpusStats corpus_stats(const std::vector<BundleResult>& results);
std::string format_stats(const CorpusStats& stats);

struct AnalyzeOptions {
  std::vector<std::filesystem::path> bundles;
  std::filesystem::path policy;
  std::string attacker_level;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> emit_smt;
  std::optional<std::filesystem::path> emit_exploit;
  bool dump_pdg = false;
  bool dump_conditions = false;
  int jobs = 1;
};

int run_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);
int run_stats(const std::filesystem::path& corpus, const std::filesystem::path& policy, const std::string& level,
              int jobs, std::ostream& out, std::ostream& err);
int run_policy_explain(const std::string& subject, const std::filesystem::path& policy, std::ostream& out,
                       std::ostream& err);

}  // namespace pathsentry::cli

#endif  // PATHSENTRY_CLI_DRIVER_HPP
