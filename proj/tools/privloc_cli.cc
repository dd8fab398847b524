/*
 * Copyright 2026 The privloc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Command-line driver: private sweeps, the plaintext baseline and the
// acceptance suite.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "privloc/acceptance.h"
#include "privloc/experiment.h"
#include "privloc/status.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAcceptance = 2;

struct SweepFlags {
  std::string config_path;
  std::string out = "-";
  std::string format = "csv";
  std::optional<uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<size_t> threads;
  bool timing = false;
};

void AddSweepFlags(CLI::App* cmd, SweepFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output path, - for stdout");
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", f.seed, "Override the config seed");
  cmd->add_option("--mode", f.mode, "Accounting mode")
      ->check(CLI::IsMember({"paper", "strict"}));
  cmd->add_option("--threads", f.threads, "Parallel trials");
  cmd->add_flag("--timing", f.timing, "Serial run with per-phase CPU times");
}

privloc::ExperimentConfig BuildConfig(const SweepFlags& f) {
  privloc::ExperimentConfig cfg =
      f.config_path.empty() ? privloc::ExperimentConfig{}
                            : privloc::ExperimentConfig::Load(f.config_path);
  if (f.seed) cfg.seed = *f.seed;
  if (f.mode) cfg.mode = privloc::ParseAccountingMode(*f.mode);
  if (f.threads) cfg.threads = *f.threads;
  if (f.timing) cfg.timing = true;
  cfg.Validate();
  return cfg;
}

void Emit(const SweepFlags& f, const privloc::ExperimentConfig& cfg,
          const privloc::SweepResult& result) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (f.out != "-") {
    file.open(f.out);
    if (!file) throw privloc::Error(privloc::ErrorCode::kIo, "cannot write '" + f.out + "'");
    out = &file;
  }
  if (f.format == "csv") {
    privloc::WriteCsv(result.records, *out);
  } else {
    *out << privloc::Summarize(cfg, result).dump(2) << '\n';
  }
  if (!*out) throw privloc::Error(privloc::ErrorCode::kIo, "write to '" + f.out + "' failed");
  for (const auto& fail : result.failures) {
    std::cerr << "trial failed: m=" << fail.m << " n=" << privloc::SelectionLabel(fail.n)
              << " trial=" << fail.trial << ": " << fail.error << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving ToA localization simulator"};
  app.require_subcommand(1);

  SweepFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Private localization sweep");
  AddSweepFlags(run, run_flags);

  SweepFlags oracle_flags;
  CLI::App* oracle = app.add_subcommand("oracle", "Plaintext raw ToA baseline only");
  AddSweepFlags(oracle, oracle_flags);

  uint64_t check_seed = privloc::AcceptanceOptions{}.seed;
  std::vector<int> check_only;
  CLI::App* check = app.add_subcommand("check", "Acceptance property suite");
  check->add_option("--seed", check_seed, "Suite seed");
  check->add_option("--criteria", check_only, "Criterion ids to run (default all)")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      const auto cfg = BuildConfig(run_flags);
      Emit(run_flags, cfg, privloc::RunSweep(cfg));
    } else if (*oracle) {
      const auto cfg = BuildConfig(oracle_flags);
      Emit(oracle_flags, cfg, privloc::RunOracleSweep(cfg));
    } else if (*check) {
      privloc::AcceptanceOptions opts;
      opts.seed = check_seed;
      opts.only = check_only;
      opts.on_result = [](const privloc::CriterionResult& r) {
        std::cout << privloc::FormatResult(r) << std::endl;
      };
      bool all = true;
      for (const auto& r : privloc::RunAcceptance(opts)) all = all && r.passed;
      return all ? kExitOk : kExitAcceptance;
    }
  } catch (const privloc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
