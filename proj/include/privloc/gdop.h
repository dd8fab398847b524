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

#ifndef PRIVLOC_GDOP_H_
#define PRIVLOC_GDOP_H_

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "privloc/fixed_codec.h"
#include "privloc/toa.h"
#include "privloc/zero_sum_noise.h"

namespace privloc {

// 1 - h G h^T at or below this marks an anchor whose removal collapses rank.
inline constexpr double kEssentialAnchorTolerance = 1e-12;
// Relative gap under which two contributions count as tied.
inline constexpr double kContributionTieTolerance = 1e-12;

// Unit direction rows, one per anchor, in anchor_ids order.
class ObservationMatrix {
 public:
  ObservationMatrix() = default;
  // Rows must have unit norm (checked to 1e-9).
  ObservationMatrix(Eigen::Matrix<double, Eigen::Dynamic, 3> rows,
                    std::vector<int> anchor_ids);

  // h_i = (target - anchor_i) / |target - anchor_i|.
  static ObservationMatrix FromPositions(const Position& target_estimate,
                                         std::span<const Position> anchors,
                                         std::span<const int> anchor_ids);

  const Eigen::Matrix<double, Eigen::Dynamic, 3>& rows() const { return rows_; }
  const std::vector<int>& anchor_ids() const { return anchor_ids_; }
  size_t size() const { return anchor_ids_.size(); }

  ObservationMatrix WithoutRow(size_t row) const;

 private:
  Eigen::Matrix<double, Eigen::Dynamic, 3> rows_;
  std::vector<int> anchor_ids_;
};

// sqrt(trace((H^T H)^-1)); +inf when H^T H is singular.
double Gdop(const ObservationMatrix& h);

// Increase in GDOP^2 from dropping row i, via the rank-one downdate
// trace(G h^T h G) / (1 - h G h^T). +inf for essential rows.
double Contribution(const ObservationMatrix& h, size_t row);

struct SelectionResult {
  std::vector<int> selected;
  std::vector<std::pair<int, double>> removal_trace;  // (anchor id, delta GDOP^2)
};

// Reverse-star greedy: drop the least-contributing anchor until n remain.
// Ties go to the lowest anchor id; +inf contributions are only removed when
// nothing finite is left. If size <= n the input is returned unchanged.
SelectionResult NsaGreedy(const ObservationMatrix& h, size_t n);

// One masked direction vector for candidate `candidate`, as the aggregator
// receives it.
struct MaskedDirection {
  EntityId sender;
  DirectionMask values;
};

// Sums the target's Q_0 + p0, the candidate's Q_i - p_i and every other
// anchor's raw Q_j, then normalizes. `participants` lists the anchors that
// must each contribute exactly once.
Eigen::Vector3d ReconstructDirection(std::span<const MaskedDirection> messages,
                                     int candidate,
                                     std::span<const int> participants,
                                     const SignedFixedCodec& codec);

}  // namespace privloc

#endif  // PRIVLOC_GDOP_H_
