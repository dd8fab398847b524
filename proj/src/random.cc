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

#include "privloc/random.h"

#include <utility>

#include "privloc/status.h"

namespace privloc {
namespace {

std::seed_seq MakeSeedSeq(const std::vector<uint64_t>& path) {
  std::vector<uint32_t> words;
  words.reserve(path.size() * 2);
  for (uint64_t w : path) {
    words.push_back(static_cast<uint32_t>(w));
    words.push_back(static_cast<uint32_t>(w >> 32));
  }
  return std::seed_seq(words.begin(), words.end());
}

}  // namespace

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kRange: return "range error";
    case ErrorCode::kKeyMismatch: return "key mismatch";
    case ErrorCode::kCorruptCiphertext: return "corrupted ciphertext";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kUnderdetermined: return "underdetermined system";
    case ErrorCode::kDegenerateGeometry: return "degenerate geometry";
    case ErrorCode::kProtocolIncomplete: return "protocol incomplete";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kIo: return "io error";
  }
  return "unknown error";
}

Rng::Rng(uint64_t seed) : Rng(std::vector<uint64_t>{seed}) {}

Rng::Rng(std::vector<uint64_t> path) : path_(std::move(path)) {
  auto seq = MakeSeedSeq(path_);
  engine_.seed(seq);
}

Rng Rng::Fork(uint64_t stream_id) const {
  std::vector<uint64_t> child = path_;
  child.push_back(stream_id);
  return Rng(std::move(child));
}

double Rng::Uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::Normal(double mean, double stddev) {
  if (stddev == 0.0) return mean;
  return std::normal_distribution<double>(mean, stddev)(engine_);
}

mpz_class Rng::RandomBits(size_t bits) {
  if (bits == 0) return 0;
  const size_t words = (bits + 63) / 64;
  std::vector<uint64_t> buf(words);
  for (auto& w : buf) w = engine_();
  const size_t excess = words * 64 - bits;
  if (excess > 0) buf.back() >>= excess;
  mpz_class out;
  // Least significant word first, native endianness within a word.
  mpz_import(out.get_mpz_t(), words, -1, sizeof(uint64_t), 0, 0, buf.data());
  return out;
}

mpz_class Rng::RandomBelow(const mpz_class& bound) {
  if (bound <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "RandomBelow bound must be positive");
  }
  const size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  while (true) {
    mpz_class candidate = RandomBits(bits);
    if (candidate < bound) return candidate;
  }
}

}  // namespace privloc
