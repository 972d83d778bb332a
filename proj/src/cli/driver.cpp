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

#include "pathsentry/cli/driver.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "pathsentry/cli/exploit.hpp"
#include "pathsentry/constraints/smtlib.hpp"

namespace pathsentry::cli {

namespace fs = std::filesystem;

detect::Budgets parse_budget(std::string_view spec, detect::Budgets b) {
  auto number = [](std::string_view text) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || v == 0)
      throw std::invalid_argument("PATHSENTRY_BUDGET: '" + std::string(text) + "' is not a positive integer");
    return v;
  };
  for (auto& raw : split(spec, ',')) {
    std::string item(trim(raw));
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      b.flow.max_paths_per_entry = number(item);
      continue;
    }
    std::string key(trim(item.substr(0, eq)));
    std::size_t v = number(trim(item.substr(eq + 1)));
    if (key == "paths") b.flow.max_paths_per_entry = v;
    else if (key == "length") b.flow.max_path_length = v;
    else if (key == "depth") b.flow.max_call_depth = static_cast<int>(v);
    else if (key == "atoms") b.exec.max_atoms = v;
    else if (key == "candidates") b.solve.max_candidates = v;
    else if (key == "segments") b.solve.max_segments = static_cast<int>(v);
    else if (key == "steps") b.interpret_steps = v;
    else throw std::invalid_argument("PATHSENTRY_BUDGET: unknown key '" + key + "'");
  }
  return b;
}

detect::Budgets budgets_from_env() {
  const char* env = std::getenv("PATHSENTRY_BUDGET");
  return env ? parse_budget(env) : detect::Budgets{};
}

Inputs load_inputs(const std::vector<fs::path>& dirs, const fs::path& policy_file) {
  Inputs in;
  auto policy = frontend::parse_policy(frontend::read_file(policy_file), policy_file.filename().string());
  for (const auto& d : dirs) in.bundles.push_back(frontend::load_bundle(d));
  std::vector<const frontend::AppBundle*> ptrs;
  for (const auto& b : in.bundles) ptrs.push_back(&b);
  in.policy = frontend::link_policy(policy, ptrs, &in.diagnostics);
  return in;
}

BundleResult analyze_bundle(const frontend::AppBundle& bundle, const frontend::PolicySet& policy,
                            policy::AttackerLevel level, const detect::Budgets& budgets) {
  BundleResult r;
  r.analysis = detect::prepare(bundle, policy, level, budgets);
  auto& a = *r.analysis;
  r.report.findings = detect::detect_all(a);
  r.report.bundle = bundle.dir.filename().string();
  if (r.report.bundle.empty()) r.report.bundle = bundle.dir.parent_path().filename().string();
  r.report.app = bundle.package();
  r.report.statistics = detect::statistics(a);
  for (const auto& v : a.verdicts) ++r.report.verdicts[v.detector][v.outcome];
  r.report.diagnostics = a.diagnostics;
  return r;
}

std::vector<BundleResult> analyze_all(const Inputs& inputs, policy::AttackerLevel level,
                                      const detect::Budgets& budgets, int jobs) {
  std::vector<BundleResult> results(inputs.bundles.size());
  std::vector<std::exception_ptr> errors(inputs.bundles.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < inputs.bundles.size();) {
      try {
        results[i] = analyze_bundle(inputs.bundles[i], inputs.policy, level, budgets);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(inputs.bundles.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

Report make_report(const Inputs& inputs, policy::AttackerLevel level, const std::vector<BundleResult>& results) {
  Report rep;
  rep.attacker_level = std::string(policy::to_string(level));
  rep.diagnostics = inputs.diagnostics;
  for (const auto& r : results) rep.bundles.push_back(r.report);
  return rep;
}

std::vector<fs::path> emit_smt(const std::vector<BundleResult>& results, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  std::map<std::string, int> seen;
  for (const auto& r : results)
    for (const auto& f : r.report.findings) {
      if (!f.condition) continue;
      std::string stem = f.app + "." + f.component + "." + std::to_string(f.sink.line);
      int k = ++seen[stem];
      fs::path file = dir / (stem + (k > 1 ? "." + std::to_string(k) : "") + ".smt2");
      auto doc = constraints::emit_smtlib(*f.condition, f.goal);
      std::ofstream(file) << "; " << f.id << "\n" << doc.text;
      written.push_back(file);
    }
  return written;
}

CorpusStats corpus_stats(const std::vector<BundleResult>& results) {
  CorpusStats st;
  for (const auto& r : results) {
    st.rows.push_back({r.report.bundle, r.report.statistics.flows_pre, r.report.statistics.flows_post});
    st.pre += r.report.statistics.flows_pre;
    st.post += r.report.statistics.flows_post;
  }
  return st;
}

std::string format_stats(const CorpusStats& st) {
  std::ostringstream out;
  std::size_t w = 6;
  for (const auto& r : st.rows) w = std::max(w, r.bundle.size());
  auto ratio = [](std::size_t pre, std::size_t post) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << (pre ? static_cast<double>(post) / static_cast<double>(pre) : 0.0);
    return s.str();
  };
  out << std::left << std::setw(static_cast<int>(w)) << "bundle" << "  " << std::right << std::setw(8) << "pre"
      << std::setw(8) << "post" << std::setw(8) << "ratio" << "\n";
  for (const auto& r : st.rows)
    out << std::left << std::setw(static_cast<int>(w)) << r.bundle << "  " << std::right << std::setw(8) << r.pre
        << std::setw(8) << r.post << std::setw(8) << ratio(r.pre, r.post) << "\n";
  out << std::left << std::setw(static_cast<int>(w)) << "TOTAL" << "  " << std::right << std::setw(8) << st.pre
      << std::setw(8) << st.post << std::setw(8) << ratio(st.pre, st.post) << "\n";
  return out.str();
}

namespace {

void print_diagnostics(const std::vector<Diagnostic>& ds, std::ostream& err) {
  for (const auto& d : ds)
    err << "note: " << d.source << (d.line ? ":" + std::to_string(d.line) : "") << ": " << d.message << "\n";
}

}  // namespace

int run_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
  auto level = policy::parse_attacker_level(opt.attacker_level);
  if (!level) {
    err << "error: --attacker-level must be 1 or 2root\n";
    return kExitInputError;
  }
  Inputs inputs;
  detect::Budgets budgets;
  try {
    budgets = budgets_from_env();
    inputs = load_inputs(opt.bundles, opt.policy);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  std::vector<BundleResult> results;
  try {
    results = analyze_all(inputs, *level, budgets, opt.jobs);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInputError;
  }

  for (const auto& r : results) {
    if (opt.dump_pdg) err << r.analysis->pdg->to_dot();
    if (opt.dump_conditions)
      for (const auto& c : r.analysis->condition_log) err << c << "\n";
  }
  Report rep = make_report(inputs, *level, results);
  const std::string text = dump(to_json(rep));
  if (opt.out) {
    std::ofstream f(*opt.out);
    if (!f) {
      err << "error: cannot write " << opt.out->string() << "\n";
      return kExitInputError;
    }
    f << text;
  } else {
    out << text;
  }
  try {
    if (opt.emit_smt) emit_smt(results, *opt.emit_smt);
    if (opt.emit_exploit)
      for (std::size_t i = 0; i < results.size(); ++i)
        for (const auto& f : results[i].report.findings)
          write_exploit(make_exploit(f, inputs.bundles[i]), *opt.emit_exploit);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  print_diagnostics(inputs.diagnostics, err);
  return rep.finding_count() > 0 ? kExitFindings : kExitClean;
}

int run_stats(const fs::path& corpus, const fs::path& policy, const std::string& level_text, int jobs,
              std::ostream& out, std::ostream& err) {
  auto level = policy::parse_attacker_level(level_text);
  if (!level) {
    err << "error: --attacker-level must be 1 or 2root\n";
    return kExitInputError;
  }
  try {
    auto dirs = frontend::find_bundles(corpus);
    if (dirs.empty()) {
      err << "error: no bundles under " << corpus.string() << "\n";
      return kExitInputError;
    }
    auto inputs = load_inputs(dirs, policy);
    auto results = analyze_all(inputs, *level, budgets_from_env(), jobs);
    out << format_stats(corpus_stats(results));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitClean;
}

int run_policy_explain(const std::string& subject, const fs::path& policy_file, std::ostream& out, std::ostream& err) {
  try {
    auto policy = frontend::parse_policy(frontend::read_file(policy_file), policy_file.filename().string());
    out << policy::explain(policy, subject);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitClean;
}

}  // namespace pathsentry::cli
