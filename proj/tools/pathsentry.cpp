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

#include <iostream>

#include <CLI11.hpp>

#include "pathsentry/cli/driver.hpp"

int main(int argc, char** argv) {
  using namespace pathsentry::cli;

  CLI::App app{"pathsentry: filesystem vulnerability analysis for app bundles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  AnalyzeOptions analyze;
  std::string out, smt, exploit;
  auto* a = app.add_subcommand("analyze", "analyze bundles and write a report");
  a->add_option("bundles", analyze.bundles, "bundle directories")->required();
  a->add_option("--policy", analyze.policy, "policy file")->required();
  a->add_option("--attacker-level", analyze.attacker_level, "1 or 2root")->required();
  a->add_option("--out", out, "report file (default: stdout)");
  a->add_option("--emit-smt", smt, "write one SMT-LIB file per finding into DIR");
  a->add_option("--emit-exploit", exploit, "write launch.json and prompt.md per finding into DIR");
  a->add_flag("--dump-pdg", analyze.dump_pdg, "print each bundle's PDG (Graphviz) on stderr");
  a->add_flag("--dump-conditions", analyze.dump_conditions, "print every path condition on stderr");
  a->add_option("--jobs", analyze.jobs, "bundles analyzed in parallel")->check(CLI::PositiveNumber);

  std::string corpus, stats_policy, stats_level;
  int stats_jobs = 1;
  auto* s = app.add_subcommand("stats", "pre/post-constraint flow counts over a corpus");
  s->add_option("corpus", corpus, "directory of bundles")->required();
  s->add_option("--policy", stats_policy, "policy file")->required();
  s->add_option("--attacker-level", stats_level, "1 or 2root")->required();
  s->add_option("--jobs", stats_jobs, "bundles analyzed in parallel")->check(CLI::PositiveNumber);

  std::string subject, explain_policy;
  auto* p = app.add_subcommand("policy", "inspect a policy");
  p->add_option("--explain", subject, "subject id, LV1 or LV2root")->required();
  p->add_option("--policy", explain_policy, "policy file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInputError;
  }

  if (*a) {
    if (!out.empty()) analyze.out = out;
    if (!smt.empty()) analyze.emit_smt = smt;
    if (!exploit.empty()) analyze.emit_exploit = exploit;
    return run_analyze(analyze, std::cout, std::cerr);
  }
  if (*s) return run_stats(corpus, stats_policy, stats_level, stats_jobs, std::cout, std::cerr);
  return run_policy_explain(subject, explain_policy, std::cout, std::cerr);
}
