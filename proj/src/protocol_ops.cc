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

#include "privloc/protocol_ops.h"

#include <string>

#include "privloc/status.h"

namespace privloc {
namespace {

mpz_class AddMod(const mpz_class& a, const mpz_class& b, const mpz_class& n) {
  mpz_class r = (a + b) % n;
  if (r < 0) r += n;
  return r;
}

void RequireNonEmpty(size_t count, const char* what) {
  if (count == 0) {
    throw Error(ErrorCode::kProtocolIncomplete, std::string("no ") + what + " received");
  }
}

}  // namespace

QuantizedAnchor QuantizeAnchor(const Position& position, double tau_recv,
                               const SignedFixedCodec& codec) {
  QuantizedAnchor q;
  q.x = codec.Quantize(position.x);
  q.y = codec.Quantize(position.y);
  q.z = codec.Quantize(position.z);
  q.alpha = {-2 * q.x, -2 * q.y, -2 * q.z, codec.scale()};
  q.tau = codec.Quantize(tau_recv);
  q.gamma = q.tau * q.tau - (q.x * q.x + q.y * q.y + q.z * q.z);
  return q;
}

GramMask AnchorMaskedGram(const ResidueVec4& alpha, const GramMask& mask,
                          const SignedFixedCodec& codec) {
  GramMask out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      out[r * 4 + c] = AddMod(codec.EncodeInteger(alpha[r] * alpha[c]),
                              mask[r * 4 + c], codec.modulus());
    }
  }
  return out;
}

std::array<mpz_class, 16> TargetRecoverGramInteger(std::span<const GramMask> masked,
                                                   const GramMask& target_mask,
                                                   const SignedFixedCodec& codec) {
  RequireNonEmpty(masked.size(), "masked Gram terms");
  std::array<mpz_class, 16> out;
  for (int e = 0; e < 16; ++e) {
    mpz_class sum = target_mask[e];
    for (const auto& m : masked) sum += m[e];
    out[e] = codec.Lift(sum);
  }
  return out;
}

Eigen::Matrix4d TargetRecoverGram(std::span<const GramMask> masked,
                                  const GramMask& target_mask,
                                  const SignedFixedCodec& codec) {
  const auto ints = TargetRecoverGramInteger(masked, target_mask, codec);
  Eigen::Matrix4d g;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      g(r, c) = ScaledToDouble(ints[r * 4 + c], kGramScale * codec.frac_bits());
    }
  }
  return g;
}

GammaMask AnchorMaskedGamma(const ResidueVec4& alpha, const mpz_class& gamma,
                            const GammaMask& mask, const SignedFixedCodec& codec) {
  GammaMask out;
  for (int j = 0; j < 4; ++j) {
    out[j] = AddMod(codec.EncodeInteger(alpha[j] * gamma), mask[j], codec.modulus());
  }
  return out;
}

ResidueVec4 TargetRecoverCInteger(std::span<const GammaMask> masked,
                                  const GammaMask& target_mask,
                                  const SignedFixedCodec& codec) {
  RequireNonEmpty(masked.size(), "masked Gamma terms");
  ResidueVec4 out;
  for (int j = 0; j < 4; ++j) {
    mpz_class sum = target_mask[j];
    for (const auto& m : masked) sum += m[j];
    out[j] = codec.Lift(sum);
  }
  return out;
}

Eigen::Vector4d TargetRecoverC(std::span<const GammaMask> masked,
                               const GammaMask& target_mask,
                               const SignedFixedCodec& codec) {
  const auto ints = TargetRecoverCInteger(masked, target_mask, codec);
  Eigen::Vector4d c;
  for (int j = 0; j < 4; ++j) {
    c(j) = ScaledToDouble(ints[j], kGammaScale * codec.frac_bits());
  }
  return c;
}

ChiOutput AnchorComputeChi(const ResidueVec4& alpha, const Ciphertext& t_0i,
                           const mpz_class& tau, const PaillierPublicKey& pk,
                           const SignedFixedCodec& codec, Rng& rng) {
  pk.CheckBound(t_0i);
  ChiOutput out;
  out.t_ii = Encrypt(pk, codec.EncodeInteger(-2 * tau), rng);
  const Ciphertext t_i = HomAdd(pk, t_0i, out.t_ii);
  for (int j = 0; j < 4; ++j) {
    out.chi[j] = HomScalarMul(pk, codec.EncodeInteger(alpha[j]), t_i);
  }
  return out;
}

CipherVec4 AggregatorComputeE(const PaillierPublicKey& pk,
                              std::span<const CipherVec4> chis,
                              std::span<const mpz_class> encoded_tau0) {
  if (chis.size() != encoded_tau0.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(chis.size()) + " chi vectors vs " +
                    std::to_string(encoded_tau0.size()) + " timestamps");
  }
  RequireNonEmpty(chis.size(), "chi vectors");
  CipherVec4 e;
  for (int j = 0; j < 4; ++j) {
    e[j] = HomScalarMul(pk, encoded_tau0[0], chis[0][j]);
    for (size_t i = 1; i < chis.size(); ++i) {
      e[j] = HomAdd(pk, e[j], HomScalarMul(pk, encoded_tau0[i], chis[i][j]));
    }
  }
  return e;
}

LsSolution TargetFinalize(const std::array<mpz_class, 16>& gram,
                          const ResidueVec4& c, const CipherVec4& e,
                          const PaillierPrivateKey& sk,
                          const SignedFixedCodec& codec) {
  const int f = codec.frac_bits();
  Eigen::Matrix4d g;
  for (int r = 0; r < 4; ++r) {
    for (int k = 0; k < 4; ++k) g(r, k) = ScaledToDouble(gram[r * 4 + k], kGramScale * f);
  }
  Eigen::Vector4d atb;
  for (int j = 0; j < 4; ++j) {
    const mpz_class e_int = codec.Lift(Decrypt(sk, e[j]));
    atb(j) = ScaledToDouble(c[j] + e_int, kEScale * f);
  }
  return SolveNormalEquations(g, atb);
}

}  // namespace privloc
