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

#ifndef PRIVLOC_TOA_H_
#define PRIVLOC_TOA_H_

#include <gmpxx.h>

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "privloc/random.h"

namespace privloc {

// Propagation speed (m/s).
inline constexpr double kSpeedOfLight = 299792458.0;
// Condition number of A^T A beyond which the geometry is rejected.
inline constexpr double kMaxGramCondition = 1e12;

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static Position FromVec(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
  // R = x^2 + y^2 + z^2
  double SquaredNorm() const { return x * x + y * y + z * z; }

  friend bool operator==(const Position&, const Position&) = default;
};

double Distance(const Position& a, const Position& b);

// One target->anchor ranging exchange. Timestamps are on a shared ideal
// clock; tau_* are their distance-domain equivalents v*T.
struct RangeObservation {
  int anchor_id = 0;
  double t_send = 0.0;  // target transmit time T_0i (s)
  double t_recv = 0.0;  // anchor receive time T_i (s)
  double tau_send = 0.0;
  double tau_recv = 0.0;

  double range() const { return tau_recv - tau_send; }
};

RangeObservation SimulateRange(const Position& target, const Position& anchor,
                               int anchor_id, double t_send, double sigma_ns,
                               Rng& rng);

// Per-anchor linearized row: alpha = [-2x, -2y, -2z, 1], b = d^2 - R and
// Gamma = v^2 T_i^2 - R (distance domain: tau_recv^2 - R).
struct DesignRow {
  Eigen::Vector4d alpha;
  double b = 0.0;
  double gamma = 0.0;
};

DesignRow MakeDesignRow(const RangeObservation& obs, const Position& anchor);

// b through the split b = v^2 T_0^2 - 2 v^2 T_i T_0 + Gamma, with v^2 kept
// explicit. Agrees with DesignRow::b in exact arithmetic.
double SplitRangeTerm(const RangeObservation& obs, const Position& anchor);

struct LinearSystem {
  Eigen::Matrix<double, Eigen::Dynamic, 4> a;
  Eigen::VectorXd b;
};

// Requires at least 4 observations; observation k pairs with anchors[k].
LinearSystem BuildSystem(std::span<const RangeObservation> observations,
                         std::span<const Position> anchors);

struct LsSolution {
  Position position;
  double r0 = 0.0;
  double condition = 0.0;
};

// Solves gram * x = atb with an LDLT factorization; throws GeometryError
// when cond(gram) exceeds kMaxGramCondition.
LsSolution SolveNormalEquations(const Eigen::Matrix4d& gram,
                                const Eigen::Vector4d& atb);

// x = (A^T A)^-1 A^T b.
LsSolution LsSolve(const LinearSystem& system);

// Raw ToA baseline: BuildSystem followed by LsSolve.
LsSolution LocalizePlain(std::span<const RangeObservation> observations,
                         std::span<const Position> anchors);

// Normal equations assembled in exact integer arithmetic from inputs
// quantized at 2^-frac_bits: gram at scale S^2, atb at scale S^3.
struct QuantizedNormalEquations {
  std::array<mpz_class, 16> gram;
  std::array<mpz_class, 4> atb;
  int frac_bits = 0;

  Eigen::Matrix4d GramAsDouble() const;
  Eigen::Vector4d AtbAsDouble() const;
};

QuantizedNormalEquations BuildQuantizedNormalEquations(
    std::span<const RangeObservation> observations,
    std::span<const Position> anchors, int frac_bits);

// Plaintext solve on the quantized lattice; the private pipeline must match
// this bit for bit.
LsSolution LocalizeQuantized(std::span<const RangeObservation> observations,
                             std::span<const Position> anchors, int frac_bits);

}  // namespace privloc

#endif  // PRIVLOC_TOA_H_
