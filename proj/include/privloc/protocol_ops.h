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

#ifndef PRIVLOC_PROTOCOL_OPS_H_
#define PRIVLOC_PROTOCOL_OPS_H_

#include <gmpxx.h>

#include <Eigen/Dense>
#include <array>
#include <span>

#include "privloc/fixed_codec.h"
#include "privloc/paillier.h"
#include "privloc/random.h"
#include "privloc/toa.h"
#include "privloc/zero_sum_noise.h"

namespace privloc {

// Scale powers of the fixed-point quantities exchanged in a round.
inline constexpr int kAlphaScale = 1;
inline constexpr int kGramScale = 2;
inline constexpr int kChiScale = 2;
inline constexpr int kGammaScale = 3;  // alpha * Gamma
inline constexpr int kEScale = 3;

using ResidueVec4 = std::array<mpz_class, 4>;
using CipherVec4 = std::array<Ciphertext, 4>;

// Anchor-private quantities on the fixed-point lattice, as signed integers.
struct QuantizedAnchor {
  mpz_class x, y, z;    // scale S
  ResidueVec4 alpha;    // [-2x, -2y, -2z, S], scale S
  mpz_class tau;        // v * T_i, scale S
  mpz_class gamma;      // tau^2 - (x^2 + y^2 + z^2), scale S^2
};

QuantizedAnchor QuantizeAnchor(const Position& position, double tau_recv,
                               const SignedFixedCodec& codec);

// P_i+ = encode(alpha alpha^T) + P_i (mod n), scale S^2.
GramMask AnchorMaskedGram(const ResidueVec4& alpha, const GramMask& mask,
                          const SignedFixedCodec& codec);

// Centered integer sum of all masked Gram terms plus the target's own mask,
// scale S^2. Every anchor of the P family must be present.
std::array<mpz_class, 16> TargetRecoverGramInteger(std::span<const GramMask> masked,
                                                   const GramMask& target_mask,
                                                   const SignedFixedCodec& codec);
Eigen::Matrix4d TargetRecoverGram(std::span<const GramMask> masked,
                                  const GramMask& target_mask,
                                  const SignedFixedCodec& codec);

// V_i+ = encode(alpha * Gamma) + V_i (mod n), scale S^3.
GammaMask AnchorMaskedGamma(const ResidueVec4& alpha, const mpz_class& gamma,
                            const GammaMask& mask, const SignedFixedCodec& codec);

ResidueVec4 TargetRecoverCInteger(std::span<const GammaMask> masked,
                                  const GammaMask& target_mask,
                                  const SignedFixedCodec& codec);
Eigen::Vector4d TargetRecoverC(std::span<const GammaMask> masked,
                               const GammaMask& target_mask,
                               const SignedFixedCodec& codec);

struct ChiOutput {
  Ciphertext t_ii;  // Enc(-2 tau_i)
  CipherVec4 chi;   // chi_j = alpha_j (x) (t_0i (+) t_ii), scale S^2
};

ChiOutput AnchorComputeChi(const ResidueVec4& alpha, const Ciphertext& t_0i,
                           const mpz_class& tau, const PaillierPublicKey& pk,
                           const SignedFixedCodec& codec, Rng& rng);

// e = (+)_i tau_0i (x) chi_i, given encoded plaintext tau_0i per anchor.
// Element j decrypts to sum_i alpha_ij tau_0i (tau_0i - 2 tau_i), scale S^3.
CipherVec4 AggregatorComputeE(const PaillierPublicKey& pk,
                              std::span<const CipherVec4> chis,
                              std::span<const mpz_class> encoded_tau0);

// x = gram^-1 (c + Decr(e)). Timestamps are already in meters, so the
// propagation-speed factor is 1 here.
LsSolution TargetFinalize(const std::array<mpz_class, 16>& gram,
                          const ResidueVec4& c, const CipherVec4& e,
                          const PaillierPrivateKey& sk,
                          const SignedFixedCodec& codec);

}  // namespace privloc

#endif  // PRIVLOC_PROTOCOL_OPS_H_
