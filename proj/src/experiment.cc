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


#include "privloc/experiment.h"

#include <time.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

#include "privloc/status.h"

namespace privloc {
namespace {

using nlohmann::json;

constexpr uint64_t kScenarioStream = 0;
constexpr uint64_t kMeasurementStream = 1;
constexpr uint64_t kProtocolStream = 2;
constexpr uint64_t kNoiseStream = 3;
// Round-local transmit window.
constexpr double kSendWindowS = 1e-3;

uint64_t SelectionStream(std::optional<size_t> n) { return n ? *n : 0; }

double ThreadCpuMs() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) * 1e3 + static_cast<double>(ts.tv_nsec) * 1e-6;
}

double Fold(double u, double length) {
  const double period = 2.0 * length;
  double r = std::fmod(u, period);
  if (r < 0.0) r += period;
  return r > length ? period - r : r;
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json SelectionToJson(std::optional<size_t> n) { return n ? json(*n) : json(nullptr); }

std::optional<size_t> SelectionFromJson(const json& j) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "none")) {
    return std::nullopt;
  }
  if (!j.is_number_integer()) {
    throw Error(ErrorCode::kConfig, "selection_n entries must be integers or \"none\"");
  }
  const auto v = j.get<int64_t>();
  if (v < 0) throw Error(ErrorCode::kConfig, "selection_n entries must be positive");
  return static_cast<size_t>(v);
}

template <typename Fn>
void ParallelFor(size_t count, size_t threads, Fn&& fn) {
  threads = std::max<size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

const char* AccountingModeName(AccountingMode mode) {
  return mode == AccountingMode::kPaper ? "paper" : "strict";
}

AccountingMode ParseAccountingMode(const std::string& name) {
  if (name == "paper") return AccountingMode::kPaper;
  if (name == "strict") return AccountingMode::kStrict;
  throw Error(ErrorCode::kConfig, "unknown accounting mode '" + name + "'");
}

size_t ExperimentConfig::rounds() const {
  if (!(round_interval_s > 0.0) || !(duration_s > 0.0)) return 0;
  return static_cast<size_t>(std::floor(duration_s / round_interval_s + 1e-9));
}

void ExperimentConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfig, msg); };
  for (double d : field_dims) {
    if (!(d > 0.0) || !std::isfinite(d)) fail("field_dims must be positive");
  }
  if (anchor_counts.empty()) fail("anchor_counts is empty");
  for (size_t m : anchor_counts) {
    if (m < 4) fail("anchor_counts entries must be at least 4");
  }
  if (selection_n.empty()) fail("selection_n is empty");
  for (const auto& n : selection_n) {
    if (n && *n < 4) fail("selection_n entries must be at least 4 or none");
  }
  if (!(sigma_ns >= 0.0) || !std::isfinite(sigma_ns)) fail("sigma_ns must be non-negative");
  if (trials == 0) fail("trials must be positive");
  if (rounds() == 0) fail("duration_s / round_interval_s must allow one round");
  if (!(min_speed >= 0.0) || !(max_speed >= min_speed) || !std::isfinite(max_speed)) {
    fail("speeds must satisfy 0 <= min_speed <= max_speed");
  }
  if (key_bits < 128) fail("key_bits must be at least 128");
  if (frac_bits < 0 || frac_bits > 30) fail("frac_bits must lie in [0, 30]");
  if (noise_bound_bits < 1 || static_cast<size_t>(noise_bound_bits) + 2 >= key_bits) {
    fail("noise_bound_bits does not fit the key size");
  }
  if (threads == 0) fail("threads must be positive");
}

ProtocolConfig ExperimentConfig::Protocol(std::optional<size_t> n) const {
  ProtocolConfig p;
  p.key_bits = key_bits;
  p.frac_bits = frac_bits;
  p.noise.distribution = mode == AccountingMode::kPaper ? NoiseDistribution::kBounded
                                                        : NoiseDistribution::kUniform;
  p.noise.bound_bits = noise_bound_bits;
  p.selection_n = n;
  return p;
}

WireFormat ExperimentConfig::Wire() const {
  return mode == AccountingMode::kPaper ? WireFormat::Paper(key_bits)
                                        : WireFormat::Strict(key_bits);
}

json ExperimentConfig::ToJson() const {
  json sel = json::array();
  for (const auto& n : selection_n) sel.push_back(SelectionToJson(n));
  return json{{"field_dims", field_dims},
              {"anchor_counts", anchor_counts},
              {"selection_n", sel},
              {"sigma_ns", sigma_ns},
              {"trials", trials},
              {"duration_s", duration_s},
              {"round_interval_s", round_interval_s},
              {"min_speed", min_speed},
              {"max_speed", max_speed},
              {"key_bits", key_bits},
              {"frac_bits", frac_bits},
              {"mode", AccountingModeName(mode)},
              {"noise_bound_bits", noise_bound_bits},
              {"seed", seed},
              {"threads", threads},
              {"timing", timing}};
}

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "field_dims") {
        c.field_dims = value.get<std::array<double, 3>>();
      } else if (key == "anchor_counts") {
        c.anchor_counts = value.get<std::vector<size_t>>();
      } else if (key == "selection_n") {
        if (!value.is_array()) throw Error(ErrorCode::kConfig, "selection_n must be a list");
        c.selection_n.clear();
        for (const auto& e : value) c.selection_n.push_back(SelectionFromJson(e));
      } else if (key == "sigma_ns") {
        c.sigma_ns = value.get<double>();
      } else if (key == "trials") {
        c.trials = value.get<size_t>();
      } else if (key == "duration_s") {
        c.duration_s = value.get<double>();
      } else if (key == "round_interval_s") {
        c.round_interval_s = value.get<double>();
      } else if (key == "min_speed") {
        c.min_speed = value.get<double>();
      } else if (key == "max_speed") {
        c.max_speed = value.get<double>();
      } else if (key == "key_bits") {
        c.key_bits = value.get<size_t>();
      } else if (key == "frac_bits") {
        c.frac_bits = value.get<int>();
      } else if (key == "mode") {
        c.mode = ParseAccountingMode(value.get<std::string>());
      } else if (key == "noise_bound_bits") {
        c.noise_bound_bits = value.get<int>();
      } else if (key == "seed") {
        c.seed = value.get<uint64_t>();
      } else if (key == "threads") {
        c.threads = value.get<size_t>();
      } else if (key == "timing") {
        c.timing = value.get<bool>();
      } else {
        throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  c.Validate();
  return c;
}

ExperimentConfig ExperimentConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
  return FromJson(j);
}

Position ReflectedPosition(const Position& start, const Eigen::Vector3d& velocity,
                           double t, const std::array<double, 3>& dims) {
  return {Fold(start.x + velocity.x() * t, dims[0]),
          Fold(start.y + velocity.y() * t, dims[1]),
          Fold(start.z + velocity.z() * t, dims[2])};
}

Scenario GenerateScenario(const ExperimentConfig& config, size_t anchor_count, Rng& rng) {
  const auto& d = config.field_dims;
  auto place = [&] {
    return Position{rng.Uniform(0.0, d[0]), rng.Uniform(0.0, d[1]), rng.Uniform(0.0, d[2])};
  };
  Scenario s;
  s.target = place();
  for (size_t k = 0; k < anchor_count; ++k) {
    s.start.push_back(place());
    Eigen::Vector3d dir;
    do {
      dir = {rng.Normal(0.0, 1.0), rng.Normal(0.0, 1.0), rng.Normal(0.0, 1.0)};
    } while (dir.norm() < 1e-12);
    s.velocity.push_back(dir.normalized() * rng.Uniform(config.min_speed, config.max_speed));
  }
  const size_t rounds = config.rounds();
  for (size_t r = 0; r < rounds; ++r) {
    const double t = static_cast<double>(r) * config.round_interval_s;
    s.round_times.push_back(t);
    std::vector<Position> at;
    for (size_t k = 0; k < anchor_count; ++k) {
      at.push_back(ReflectedPosition(s.start[k], s.velocity[k], t, d));
    }
    s.anchors.push_back(std::move(at));
  }
  return s;
}

std::vector<RangeObservation> SimulateRound(const Position& target,
                                            const std::vector<Position>& anchors,
                                            double sigma_ns, Rng& rng) {
  std::vector<RangeObservation> out;
  out.reserve(anchors.size());
  for (size_t k = 0; k < anchors.size(); ++k) {
    const double t_send = rng.Uniform(0.0, kSendWindowS);
    out.push_back(
        SimulateRange(target, anchors[k], static_cast<int>(k) + 1, t_send, sigma_ns, rng));
  }
  return out;
}

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double Rmse(const std::vector<double>& errors) {
  if (errors.empty()) return 0.0;
  double sum = 0.0;
  for (double e : errors) sum += e * e;
  return std::sqrt(sum / static_cast<double>(errors.size()));
}

namespace {

void FinishRecord(MetricsRecord& rec) {
  rec.rmse_m = Rmse(rec.errors);
  rec.p50_err = Percentile(rec.errors, 0.5);
  rec.p90_err = Percentile(rec.errors, 0.9);
  rec.raw_rmse_m = Rmse(rec.raw_errors);
}

}  // namespace

MetricsRecord RunTrial(const ExperimentConfig& config, size_t m,
                       std::optional<size_t> n, size_t trial) {
  const Rng base = Rng(config.seed).Fork(m).Fork(trial);
  Rng scenario_rng = base.Fork(kScenarioStream);
  const Scenario scenario = GenerateScenario(config, m, scenario_rng);
  const uint64_t sel = SelectionStream(n);
  const uint64_t protocol_seed = base.Fork(kProtocolStream).Fork(sel).NextU64();
  const uint64_t noise_seed = base.Fork(kNoiseStream).Fork(sel).NextU64();

  MetricsRecord rec;
  rec.m = m;
  rec.n = n;
  rec.trial = trial;
  Transcript transcript(config.Wire(), /*retain_payloads=*/false);
  const double start = ThreadCpuMs();
  PrivateLocalizationSession session(config.Protocol(n), m, protocol_seed, noise_seed,
                                     &transcript);
  std::vector<int> selection;
  for (size_t r = 0; r < scenario.anchors.size(); ++r) {
    Rng meas = base.Fork(kMeasurementStream).Fork(r);
    RoundInputs in;
    in.round = static_cast<int>(r);
    in.anchors = scenario.anchors[r];
    in.observations = SimulateRound(scenario.target, in.anchors, config.sigma_ns, meas);
    const RoundOutput out = session.RunRound(in, selection);
    selection = out.next_selection;
    rec.errors.push_back(Distance(out.estimate, scenario.target));
    rec.times.zsng_ms += out.times.zsng_ms;
    rec.times.nsa_ms += out.times.nsa_ms;
    rec.times.loc_ms += out.times.loc_ms;
    const LsSolution raw = LocalizePlain(in.observations, in.anchors);
    rec.raw_errors.push_back(Distance(raw.position, scenario.target));
  }
  rec.compute_ms = ThreadCpuMs() - start;
  rec.total_bits = transcript.total_bits();
  if (!config.timing) {
    rec.times = PhaseTimes{};
    rec.compute_ms = 0.0;
  }
  FinishRecord(rec);
  return rec;
}

MetricsRecord RunOracleTrial(const ExperimentConfig& config, size_t m, size_t trial) {
  const Rng base = Rng(config.seed).Fork(m).Fork(trial);
  Rng scenario_rng = base.Fork(kScenarioStream);
  const Scenario scenario = GenerateScenario(config, m, scenario_rng);
  MetricsRecord rec;
  rec.m = m;
  rec.trial = trial;
  const double start = ThreadCpuMs();
  for (size_t r = 0; r < scenario.anchors.size(); ++r) {
    Rng meas = base.Fork(kMeasurementStream).Fork(r);
    const auto obs = SimulateRound(scenario.target, scenario.anchors[r], config.sigma_ns, meas);
    const LsSolution raw = LocalizePlain(obs, scenario.anchors[r]);
    rec.raw_errors.push_back(Distance(raw.position, scenario.target));
  }
  rec.errors = rec.raw_errors;
  rec.compute_ms = config.timing ? ThreadCpuMs() - start : 0.0;
  rec.times.loc_ms = rec.compute_ms;
  FinishRecord(rec);
  return rec;
}

namespace {

struct Task {
  size_t m;
  std::optional<size_t> n;
  size_t trial;
};

template <typename Run>
SweepResult RunTasks(const ExperimentConfig& config, const std::vector<Task>& tasks,
                     Run&& run) {
  std::vector<std::optional<MetricsRecord>> records(tasks.size());
  std::vector<std::optional<TrialFailure>> failures(tasks.size());
  ParallelFor(tasks.size(), config.timing ? 1 : config.threads, [&](size_t i) {
    const Task& t = tasks[i];
    try {
      records[i] = run(t);
    } catch (const std::exception& e) {
      failures[i] = TrialFailure{t.m, t.n, t.trial, e.what()};
    }
  });
  SweepResult out;
  for (size_t i = 0; i < tasks.size(); ++i) {
    if (records[i]) out.records.push_back(std::move(*records[i]));
    if (failures[i]) out.failures.push_back(std::move(*failures[i]));
  }
  return out;
}

}  // namespace

SweepResult RunSweep(const ExperimentConfig& config) {
  config.Validate();
  std::vector<Task> tasks;
  for (size_t m : config.anchor_counts) {
    for (const auto& n : config.selection_n) {
      for (size_t t = 0; t < config.trials; ++t) tasks.push_back({m, n, t});
    }
  }
  return RunTasks(config, tasks,
                  [&](const Task& t) { return RunTrial(config, t.m, t.n, t.trial); });
}

SweepResult RunOracleSweep(const ExperimentConfig& config) {
  config.Validate();
  std::vector<Task> tasks;
  for (size_t m : config.anchor_counts) {
    for (size_t t = 0; t < config.trials; ++t) tasks.push_back({m, std::nullopt, t});
  }
  return RunTasks(config, tasks,
                  [&](const Task& t) { return RunOracleTrial(config, t.m, t.trial); });
}

std::string SelectionLabel(std::optional<size_t> n) {
  return n ? std::to_string(*n) : "none";
}

void WriteCsv(const std::vector<MetricsRecord>& records, std::ostream& out) {
  out << "m,n,trial,rmse_m,p50_err,p90_err,total_bits,t_zsng_ms,t_nsa_ms,t_loc_ms\n";
  for (const auto& r : records) {
    out << r.m << ',' << SelectionLabel(r.n) << ',' << r.trial << ','
        << FormatDouble(r.rmse_m) << ',' << FormatDouble(r.p50_err) << ','
        << FormatDouble(r.p90_err) << ',' << r.total_bits << ','
        << FormatDouble(r.times.zsng_ms) << ',' << FormatDouble(r.times.nsa_ms) << ','
        << FormatDouble(r.times.loc_ms) << '\n';
  }
}

json Summarize(const ExperimentConfig& config, const SweepResult& result) {
  struct Group {
    size_t m;
    std::optional<size_t> n;
    std::vector<const MetricsRecord*> records;
    size_t failures = 0;
  };
  std::vector<Group> groups;
  std::map<std::pair<size_t, uint64_t>, size_t> index;
  auto group_for = [&](size_t m, std::optional<size_t> n) -> Group& {
    const auto key = std::make_pair(m, n ? *n + 1 : 0);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      groups.push_back(Group{m, n, {}, 0});
    }
    return groups[it->second];
  };
  for (const auto& r : result.records) group_for(r.m, r.n).records.push_back(&r);
  for (const auto& f : result.failures) ++group_for(f.m, f.n).failures;

  json out_groups = json::array();
  for (const auto& g : groups) {
    double sq = 0.0, raw_sq = 0.0, bits = 0.0, zsng = 0.0, nsa = 0.0, loc = 0.0;
    std::vector<double> pooled;
    for (const auto* r : g.records) {
      sq += r->rmse_m * r->rmse_m;
      raw_sq += r->raw_rmse_m * r->raw_rmse_m;
      bits += static_cast<double>(r->total_bits);
      zsng += r->times.zsng_ms;
      nsa += r->times.nsa_ms;
      loc += r->times.loc_ms;
      pooled.insert(pooled.end(), r->errors.begin(), r->errors.end());
    }
    const double k = static_cast<double>(std::max<size_t>(1, g.records.size()));
    out_groups.push_back(json{{"m", g.m},
                              {"n", SelectionToJson(g.n)},
                              {"trials", g.records.size()},
                              {"failures", g.failures},
                              {"rmse_m", std::sqrt(sq / k)},
                              {"raw_rmse_m", std::sqrt(raw_sq / k)},
                              {"p50_err", Percentile(pooled, 0.5)},
                              {"p90_err", Percentile(pooled, 0.9)},
                              {"mean_total_bits", bits / k},
                              {"mean_t_zsng_ms", zsng / k},
                              {"mean_t_nsa_ms", nsa / k},
                              {"mean_t_loc_ms", loc / k}});
  }
  json failures = json::array();
  for (const auto& f : result.failures) {
    failures.push_back(json{{"m", f.m}, {"n", SelectionToJson(f.n)}, {"trial", f.trial},
                            {"error", f.error}});
  }
  return json{{"config", config.ToJson()}, {"groups", out_groups}, {"failures", failures}};
}

}  // namespace privloc
