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

#ifndef PRIVLOC_RANDOM_H_
#define PRIVLOC_RANDOM_H_

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <vector>

namespace privloc {

// Deterministic randomness source. Each Rng is identified by a path of
// 64-bit words (root seed followed by stream ids); Fork() derives a child
// stream from the path alone, so forking never perturbs the parent.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  Rng Fork(uint64_t stream_id) const;

  uint64_t NextU64() { return engine_(); }
  double Uniform(double lo, double hi);
  double Normal(double mean, double stddev);

  // Uniform over [0, 2^bits).
  mpz_class RandomBits(size_t bits);
  // Uniform over [0, bound) by rejection sampling; bound must be positive.
  mpz_class RandomBelow(const mpz_class& bound);

  std::mt19937_64& engine() { return engine_; }

 private:
  explicit Rng(std::vector<uint64_t> path);

  std::vector<uint64_t> path_;
  std::mt19937_64 engine_;
};

}  // namespace privloc

#endif  // PRIVLOC_RANDOM_H_
