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


#ifndef PRIVLOC_EXPERIMENT_H_
#define PRIVLOC_EXPERIMENT_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "privloc/random.h"
#include "privloc/session.h"
#include "privloc/toa.h"

namespace privloc {

enum class AccountingMode {
  kPaper,   // bounded noise, 24-bit masked and plain values
  kStrict,  // uniform noise over Z_n, masked values at modulus width
};

const char* AccountingModeName(AccountingMode mode);
AccountingMode ParseAccountingMode(const std::string& name);

struct ExperimentConfig {
  std::array<double, 3> field_dims{1000.0, 1000.0, 100.0};
  std::vector<size_t> anchor_counts{6, 9, 12, 15, 18, 21, 24, 27, 30};
  // nullopt means no selection.
  std::vector<std::optional<size_t>> selection_n{10, 15, 20, 25, std::nullopt};
  double sigma_ns = 6.1;
  size_t trials = 50;
  double duration_s = 10.0;
  double round_interval_s = 1.0;
  double min_speed = 0.0;
  double max_speed = 10.0;
  size_t key_bits = 512;
  int frac_bits = kDefaultFracBits;
  AccountingMode mode = AccountingMode::kPaper;
  int noise_bound_bits = 23;
  uint64_t seed = 1;
  // Worker threads for independent trials. Forced to 1 when timing is on.
  size_t threads = 1;
  // Serial calibration mode: record per-phase CPU time. Off by default so
  // output is byte-identical across runs.
  bool timing = false;

  size_t rounds() const;
  // Throws Error(kConfig) on any invalid field.
  void Validate() const;
  ProtocolConfig Protocol(std::optional<size_t> n) const;
  WireFormat Wire() const;

  nlohmann::json ToJson() const;
  // Unknown keys are rejected; missing keys keep their defaults.
  static ExperimentConfig FromJson(const nlohmann::json& j);
  static ExperimentConfig Load(const std::string& path);
};

struct Scenario {
  Position target;
  std::vector<double> round_times;            // seconds
  std::vector<std::vector<Position>> anchors;  // [round][anchor index]
  std::vector<Position> start;
  std::vector<Eigen::Vector3d> velocity;       // m/s
};

// Uniform placement in the field; each anchor moves at a constant speed in
// a uniformly random 3-D direction and reflects off the field walls.
Scenario GenerateScenario(const ExperimentConfig& config, size_t anchor_count, Rng& rng);

// Position at time t under constant velocity with reflecting walls.
Position ReflectedPosition(const Position& start, const Eigen::Vector3d& velocity,
                           double t, const std::array<double, 3>& dims);

// Ranging exchanges for one round, one per anchor. Transmit times are drawn
// on a round-local clock in [0, 1 ms).
std::vector<RangeObservation> SimulateRound(const Position& target,
                                            const std::vector<Position>& anchors,
                                            double sigma_ns, Rng& rng);

struct MetricsRecord {
  size_t m = 0;
  std::optional<size_t> n;
  size_t trial = 0;
  double rmse_m = 0.0;
  std::vector<double> errors;  // per round
  double p50_err = 0.0;
  double p90_err = 0.0;
  uint64_t total_bits = 0;
  PhaseTimes times;
  double compute_ms = 0.0;
  // Raw ToA baseline over all anchors on the same measurements.
  double raw_rmse_m = 0.0;
  std::vector<double> raw_errors;
};

struct TrialFailure {
  size_t m = 0;
  std::optional<size_t> n;
  size_t trial = 0;
  std::string error;
};

struct SweepResult {
  std::vector<MetricsRecord> records;
  std::vector<TrialFailure> failures;
};

// Linear-interpolation percentile, q in [0, 1].
double Percentile(std::vector<double> values, double q);
double Rmse(const std::vector<double>& errors);

// One private trial. Scenario and measurement noise depend only on
// (seed, m, trial), so every n sees the same world.
MetricsRecord RunTrial(const ExperimentConfig& config, size_t m,
                       std::optional<size_t> n, size_t trial);
// Plaintext raw ToA only.
MetricsRecord RunOracleTrial(const ExperimentConfig& config, size_t m, size_t trial);

SweepResult RunSweep(const ExperimentConfig& config);
SweepResult RunOracleSweep(const ExperimentConfig& config);

std::string SelectionLabel(std::optional<size_t> n);
void WriteCsv(const std::vector<MetricsRecord>& records, std::ostream& out);
nlohmann::json Summarize(const ExperimentConfig& config, const SweepResult& result);

}  // namespace privloc

#endif  // PRIVLOC_EXPERIMENT_H_
