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

#include "privloc/gdop.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>

#include "privloc/status.h"

namespace privloc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (H^T H)^-1, or nullopt when rank deficient.
std::optional<Eigen::Matrix3d> InverseGram(const ObservationMatrix& h) {
  if (h.size() < 3) return std::nullopt;
  const Eigen::Matrix3d gram = h.rows().transpose() * h.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(gram);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > hi * 1e-12)) return std::nullopt;
  const Eigen::Vector3d inv = eig.eigenvalues().cwiseInverse();
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

double ContributionWith(const ObservationMatrix& h, const Eigen::Matrix3d& g,
                        size_t row) {
  const Eigen::RowVector3d hi = h.rows().row(static_cast<Eigen::Index>(row));
  const double denom = 1.0 - (hi * g * hi.transpose())(0, 0);
  if (denom <= kEssentialAnchorTolerance) return kInf;
  const Eigen::Vector3d gh = g * hi.transpose();
  // trace(G h^T h G) = |G h^T|^2 for symmetric G.
  return gh.squaredNorm() / denom;
}

}  // namespace

ObservationMatrix::ObservationMatrix(Eigen::Matrix<double, Eigen::Dynamic, 3> rows,
                                     std::vector<int> anchor_ids)
    : rows_(std::move(rows)), anchor_ids_(std::move(anchor_ids)) {
  if (static_cast<size_t>(rows_.rows()) != anchor_ids_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "row count differs from id count");
  }
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    if (std::abs(rows_.row(i).norm() - 1.0) > 1e-9) {
      throw Error(ErrorCode::kInvalidArgument,
                  "observation row " + std::to_string(i) + " is not a unit vector");
    }
  }
}

ObservationMatrix ObservationMatrix::FromPositions(
    const Position& target_estimate, std::span<const Position> anchors,
    std::span<const int> anchor_ids) {
  if (anchors.size() != anchor_ids.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "anchor positions vs ids");
  }
  Eigen::Matrix<double, Eigen::Dynamic, 3> rows(anchors.size(), 3);
  for (size_t i = 0; i < anchors.size(); ++i) {
    const Eigen::Vector3d diff = target_estimate.vec() - anchors[i].vec();
    const double d = diff.norm();
    if (d == 0.0) {
      throw Error(ErrorCode::kDegenerateGeometry,
                  "target estimate coincides with anchor " +
                      std::to_string(anchor_ids[i]));
    }
    rows.row(static_cast<Eigen::Index>(i)) = (diff / d).transpose();
  }
  return ObservationMatrix(std::move(rows),
                           std::vector<int>(anchor_ids.begin(), anchor_ids.end()));
}

ObservationMatrix ObservationMatrix::WithoutRow(size_t row) const {
  Eigen::Matrix<double, Eigen::Dynamic, 3> out(rows_.rows() - 1, 3);
  std::vector<int> ids;
  ids.reserve(anchor_ids_.size() - 1);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    if (static_cast<size_t>(i) == row) continue;
    out.row(k++) = rows_.row(i);
    ids.push_back(anchor_ids_[i]);
  }
  return ObservationMatrix(std::move(out), std::move(ids));
}

double Gdop(const ObservationMatrix& h) {
  const auto g = InverseGram(h);
  if (!g) return kInf;
  return std::sqrt(g->trace());
}

double Contribution(const ObservationMatrix& h, size_t row) {
  if (row >= h.size()) {
    throw Error(ErrorCode::kInvalidArgument, "row index out of range");
  }
  if (h.size() < 4) return kInf;
  const auto g = InverseGram(h);
  if (!g) return kInf;
  return ContributionWith(h, *g, row);
}

SelectionResult NsaGreedy(const ObservationMatrix& h, size_t n) {
  if (n < 3) {
    throw Error(ErrorCode::kConfig, "selection size must keep 3 direction rows");
  }
  SelectionResult result;
  ObservationMatrix current = h;
  while (current.size() > n) {
    const auto g = InverseGram(current);
    size_t best = 0;
    double best_value = kInf;
    bool have_best = false;
    for (size_t i = 0; i < current.size(); ++i) {
      const double c = (g && current.size() >= 4) ? ContributionWith(current, *g, i)
                                                  : kInf;
      const int id = current.anchor_ids()[i];
      if (!have_best) {
        best = i;
        best_value = c;
        have_best = true;
        continue;
      }
      const int best_id = current.anchor_ids()[best];
      const double slack =
          std::isfinite(best_value)
              ? kContributionTieTolerance * std::max(1.0, std::abs(best_value))
              : 0.0;
      const bool strictly_less = std::isfinite(c) && c < best_value - slack;
      const bool tied = std::isfinite(c) ? std::abs(c - best_value) <= slack
                                         : !std::isfinite(best_value);
      if (strictly_less || (tied && id < best_id)) {
        best = i;
        best_value = c;
      }
    }
    result.removal_trace.emplace_back(current.anchor_ids()[best], best_value);
    current = current.WithoutRow(best);
  }
  result.selected = current.anchor_ids();
  return result;
}

Eigen::Vector3d ReconstructDirection(std::span<const MaskedDirection> messages,
                                     int candidate,
                                     std::span<const int> participants,
                                     const SignedFixedCodec& codec) {
  std::set<EntityId> expected{EntityId::Target()};
  for (int id : participants) expected.insert(EntityId::Anchor(id));
  if (!expected.contains(EntityId::Anchor(candidate))) {
    throw Error(ErrorCode::kInvalidArgument,
                "candidate " + std::to_string(candidate) + " is not a participant");
  }
  std::set<EntityId> seen;
  std::array<mpz_class, 3> sum{0, 0, 0};
  for (const auto& msg : messages) {
    if (!expected.contains(msg.sender) || !seen.insert(msg.sender).second) {
      throw Error(ErrorCode::kProtocolIncomplete,
                  "unexpected or duplicate direction share from " +
                      msg.sender.ToString());
    }
    for (int k = 0; k < 3; ++k) sum[k] += msg.values[k];
  }
  if (seen.size() != expected.size()) {
    throw Error(ErrorCode::kProtocolIncomplete,
                "missing direction shares for candidate " + std::to_string(candidate));
  }
  Eigen::Vector3d diff;
  for (int k = 0; k < 3; ++k) diff(k) = codec.Decode(sum[k], 1);
  const double norm = diff.norm();
  if (norm == 0.0) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "target estimate coincides with anchor " + std::to_string(candidate));
  }
  return diff / norm;
}

}  // namespace privloc
