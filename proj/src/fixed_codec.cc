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

#include "privloc/fixed_codec.h"

#include <cmath>

#include "privloc/status.h"

namespace privloc {

double ScaledToDouble(const mpz_class& value, int frac_bits) {
  mpz_class denom;
  mpz_ui_pow_ui(denom.get_mpz_t(), 2, static_cast<unsigned long>(frac_bits));
  const mpq_class q(value, denom);
  return q.get_d();
}

SignedFixedCodec::SignedFixedCodec(int frac_bits, mpz_class modulus)
    : frac_bits_(frac_bits), modulus_(std::move(modulus)) {
  if (frac_bits_ < 0 || frac_bits_ > 52) {
    throw Error(ErrorCode::kInvalidArgument, "frac_bits must lie in [0, 52]");
  }
  if (modulus_ < 3) throw Error(ErrorCode::kInvalidArgument, "modulus too small");
  half_ = modulus_ / 2;
}

mpz_class SignedFixedCodec::scale() const {
  mpz_class s;
  mpz_ui_pow_ui(s.get_mpz_t(), 2, static_cast<unsigned long>(frac_bits_));
  return s;
}

mpz_class SignedFixedCodec::Quantize(double x) const {
  if (!std::isfinite(x)) throw Error(ErrorCode::kRange, "non-finite value");
  const double scaled = std::round(std::ldexp(x, frac_bits_));
  return mpz_class(scaled);
}

mpz_class SignedFixedCodec::EncodeInteger(const mpz_class& v) const {
  mpz_class mag = abs(v);
  // |v| < n/2 keeps the centered decode unambiguous.
  if (2 * mag >= modulus_) {
    throw Error(ErrorCode::kRange, "fixed-point magnitude exceeds n/2");
  }
  return v < 0 ? mpz_class(modulus_ - mag) : v;
}

mpz_class SignedFixedCodec::Lift(const mpz_class& residue) const {
  mpz_class r = residue % modulus_;
  if (r < 0) r += modulus_;
  if (r > half_) r -= modulus_;
  return r;
}

double SignedFixedCodec::Decode(const mpz_class& residue, int scale_power) const {
  return ScaledToDouble(Lift(residue), frac_bits_ * scale_power);
}

}  // namespace privloc
