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

#ifndef PRIVLOC_FIXED_CODEC_H_
#define PRIVLOC_FIXED_CODEC_H_

#include <gmpxx.h>

#include <utility>

namespace privloc {

inline constexpr int kDefaultFracBits = 12;

// Converts an exact integer at scale 2^frac_bits to double. Every decode in
// the library funnels through here so that two pipelines holding the same
// integer produce bit-identical doubles.
double ScaledToDouble(const mpz_class& value, int frac_bits);

// Signed fixed-point representation in Z_n. A real x is quantized to
// round(x * 2^f); negatives are stored as n - |q| (centered residues).
// Products of encoded values carry scale 2^(k*f); decoding takes the
// scale power k explicitly.
class SignedFixedCodec {
 public:
  SignedFixedCodec(int frac_bits, mpz_class modulus);

  int frac_bits() const { return frac_bits_; }
  const mpz_class& modulus() const { return modulus_; }
  const mpz_class& half_modulus() const { return half_; }
  // S = 2^f as an integer.
  mpz_class scale() const;

  // round(x * 2^f) as a signed integer; throws kRange on non-finite x.
  mpz_class Quantize(double x) const;
  // Signed integer -> residue; throws kRange if |v| >= n/2.
  mpz_class EncodeInteger(const mpz_class& v) const;
  mpz_class Encode(double x) const { return EncodeInteger(Quantize(x)); }

  // Residue -> centered signed integer in (-n/2, n/2].
  mpz_class Lift(const mpz_class& residue) const;
  double Decode(const mpz_class& residue, int scale_power = 1) const;

 private:
  int frac_bits_;
  mpz_class modulus_;
  mpz_class half_;
};

}  // namespace privloc

#endif  // PRIVLOC_FIXED_CODEC_H_
