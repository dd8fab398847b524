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

#include "privloc/toa.h"

#include <cmath>
#include <limits>
#include <string>

#include "privloc/fixed_codec.h"
#include "privloc/status.h"

namespace privloc {
namespace {

mpz_class QuantizeToLattice(double x, int frac_bits) {
  return mpz_class(std::round(std::ldexp(x, frac_bits)));
}

void CheckSystemShape(size_t observations, size_t anchors) {
  if (observations != anchors) {
    throw Error(ErrorCode::kDimensionMismatch,
                "observation count differs from anchor count");
  }
  if (observations < 4) {
    throw Error(ErrorCode::kUnderdetermined,
                "need at least 4 anchors, got " + std::to_string(observations));
  }
}

}  // namespace

double Distance(const Position& a, const Position& b) {
  return (a.vec() - b.vec()).norm();
}

RangeObservation SimulateRange(const Position& target, const Position& anchor,
                               int anchor_id, double t_send, double sigma_ns,
                               Rng& rng) {
  if (sigma_ns < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "sigma_ns must be non-negative");
  }
  RangeObservation obs;
  obs.anchor_id = anchor_id;
  obs.t_send = t_send;
  const double flight = Distance(target, anchor) / kSpeedOfLight;
  obs.t_recv = t_send + flight + rng.Normal(0.0, sigma_ns * 1e-9);
  obs.tau_send = kSpeedOfLight * obs.t_send;
  obs.tau_recv = kSpeedOfLight * obs.t_recv;
  return obs;
}

DesignRow MakeDesignRow(const RangeObservation& obs, const Position& anchor) {
  DesignRow row;
  row.alpha << -2.0 * anchor.x, -2.0 * anchor.y, -2.0 * anchor.z, 1.0;
  const double d = obs.range();
  const double r = anchor.SquaredNorm();
  row.b = d * d - r;
  row.gamma = obs.tau_recv * obs.tau_recv - r;
  return row;
}

double SplitRangeTerm(const RangeObservation& obs, const Position& anchor) {
  const double v2 = kSpeedOfLight * kSpeedOfLight;
  const double gamma = v2 * obs.t_recv * obs.t_recv - anchor.SquaredNorm();
  return v2 * obs.t_send * obs.t_send - 2.0 * v2 * obs.t_recv * obs.t_send + gamma;
}

LinearSystem BuildSystem(std::span<const RangeObservation> observations,
                         std::span<const Position> anchors) {
  CheckSystemShape(observations.size(), anchors.size());
  const Eigen::Index m = static_cast<Eigen::Index>(observations.size());
  LinearSystem sys;
  sys.a.resize(m, 4);
  sys.b.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const DesignRow row = MakeDesignRow(observations[i], anchors[i]);
    sys.a.row(i) = row.alpha.transpose();
    sys.b(i) = row.b;
  }
  return sys;
}

LsSolution SolveNormalEquations(const Eigen::Matrix4d& gram,
                                const Eigen::Vector4d& atb) {
  // Jacobi equilibration: the ones column and the coordinate columns differ
  // by three orders of magnitude.
  const Eigen::Vector4d diag = gram.diagonal();
  if ((diag.array() <= 0.0).any() || !diag.allFinite()) {
    throw GeometryError("normal matrix has a non-positive diagonal",
                        std::numeric_limits<double>::infinity());
  }
  const Eigen::Vector4d d = diag.cwiseSqrt().cwiseInverse();
  const Eigen::Matrix4d scaled = d.asDiagonal() * gram * d.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(scaled, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double condition =
      lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxGramCondition)) {
    throw GeometryError("A^T A is ill-conditioned (cond " +
                            std::to_string(condition) + ")",
                        condition);
  }

  const Eigen::Vector4d y = scaled.ldlt().solve(d.asDiagonal() * atb);
  const Eigen::Vector4d x = d.asDiagonal() * y;
  LsSolution sol;
  sol.position = Position{x(0), x(1), x(2)};
  sol.r0 = x(3);
  sol.condition = condition;
  return sol;
}

LsSolution LsSolve(const LinearSystem& system) {
  if (system.a.rows() < 4) {
    throw Error(ErrorCode::kUnderdetermined, "need at least 4 rows");
  }
  const Eigen::Matrix4d gram = system.a.transpose() * system.a;
  const Eigen::Vector4d atb = system.a.transpose() * system.b;
  return SolveNormalEquations(gram, atb);
}

LsSolution LocalizePlain(std::span<const RangeObservation> observations,
                         std::span<const Position> anchors) {
  return LsSolve(BuildSystem(observations, anchors));
}

Eigen::Matrix4d QuantizedNormalEquations::GramAsDouble() const {
  Eigen::Matrix4d g;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) g(r, c) = ScaledToDouble(gram[r * 4 + c], 2 * frac_bits);
  }
  return g;
}

Eigen::Vector4d QuantizedNormalEquations::AtbAsDouble() const {
  Eigen::Vector4d v;
  for (int j = 0; j < 4; ++j) v(j) = ScaledToDouble(atb[j], 3 * frac_bits);
  return v;
}

QuantizedNormalEquations BuildQuantizedNormalEquations(
    std::span<const RangeObservation> observations,
    std::span<const Position> anchors, int frac_bits) {
  CheckSystemShape(observations.size(), anchors.size());
  QuantizedNormalEquations ne;
  ne.frac_bits = frac_bits;
  for (auto& g : ne.gram) g = 0;
  for (auto& v : ne.atb) v = 0;
  mpz_class s;
  mpz_ui_pow_ui(s.get_mpz_t(), 2, static_cast<unsigned long>(frac_bits));
  for (size_t i = 0; i < observations.size(); ++i) {
    const mpz_class xq = QuantizeToLattice(anchors[i].x, frac_bits);
    const mpz_class yq = QuantizeToLattice(anchors[i].y, frac_bits);
    const mpz_class zq = QuantizeToLattice(anchors[i].z, frac_bits);
    const std::array<mpz_class, 4> alpha{-2 * xq, -2 * yq, -2 * zq, s};
    const mpz_class d = QuantizeToLattice(observations[i].tau_recv, frac_bits) -
                        QuantizeToLattice(observations[i].tau_send, frac_bits);
    const mpz_class b = d * d - (xq * xq + yq * yq + zq * zq);
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) ne.gram[r * 4 + c] += alpha[r] * alpha[c];
      ne.atb[r] += alpha[r] * b;
    }
  }
  return ne;
}

LsSolution LocalizeQuantized(std::span<const RangeObservation> observations,
                             std::span<const Position> anchors, int frac_bits) {
  const auto ne = BuildQuantizedNormalEquations(observations, anchors, frac_bits);
  return SolveNormalEquations(ne.GramAsDouble(), ne.AtbAsDouble());
}

}  // namespace privloc
