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

#ifndef PRIVLOC_PAILLIER_H_
#define PRIVLOC_PAILLIER_H_

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "privloc/random.h"

namespace privloc {

// Miller-Rabin rounds used for every prime candidate.
inline constexpr int kPrimalityRounds = 64;
inline constexpr size_t kMinKeyBits = 16;

class Ciphertext {
 public:
  Ciphertext() = default;
  Ciphertext(mpz_class value, uint64_t key_id)
      : value_(std::move(value)), key_id_(key_id) {}

  const mpz_class& value() const { return value_; }
  uint64_t key_id() const { return key_id_; }

  friend bool operator==(const Ciphertext& a, const Ciphertext& b) {
    return a.key_id_ == b.key_id_ && a.value_ == b.value_;
  }

 private:
  mpz_class value_;
  uint64_t key_id_ = 0;
};

class PaillierPublicKey {
 public:
  PaillierPublicKey() = default;
  PaillierPublicKey(mpz_class n, mpz_class g);

  const mpz_class& n() const { return n_; }
  const mpz_class& g() const { return g_; }
  const mpz_class& n_squared() const { return n_sq_; }
  uint64_t key_id() const { return key_id_; }
  // Bit length of n.
  size_t bit_length() const { return bits_; }
  // Fixed wire width of one ciphertext.
  size_t ciphertext_bits() const { return 2 * bits_; }

  // Throws kKeyMismatch unless c was produced under this key.
  void CheckBound(const Ciphertext& c) const;

  std::string ToJson() const;
  static PaillierPublicKey FromJson(const std::string& json);

 private:
  mpz_class n_;
  mpz_class g_;
  mpz_class n_sq_;
  uint64_t key_id_ = 0;
  size_t bits_ = 0;
};

class PaillierPrivateKey {
 public:
  PaillierPrivateKey() = default;
  PaillierPrivateKey(mpz_class n, mpz_class lambda, mpz_class alpha);

  const mpz_class& n() const { return n_; }
  const mpz_class& lambda() const { return lambda_; }
  const mpz_class& alpha() const { return alpha_; }
  uint64_t key_id() const { return key_id_; }

  std::string ToJson() const;
  static PaillierPrivateKey FromJson(const std::string& json);

 private:
  mpz_class n_;
  mpz_class n_sq_;
  mpz_class lambda_;
  mpz_class alpha_;
  uint64_t key_id_ = 0;
};

struct PaillierKeyPair {
  PaillierPublicKey public_key;
  PaillierPrivateKey private_key;
};

// Identifier binding ciphertexts to the modulus they were created under.
uint64_t KeyIdFor(const mpz_class& n);

// Random probable prime with exactly `bits` bits and the top two bits set,
// so a product of two such primes has exactly 2*bits bits.
mpz_class RandomPrime(size_t bits, Rng& rng);

// n = p*q with |p| = |q| = bit_length/2 and g = n + 1. Prime pairs are
// redrawn until gcd(pq, (p-1)(q-1)) = 1 and p != q.
PaillierKeyPair GenerateKeyPair(size_t bit_length, Rng& rng);

// Builds the keypair from caller-supplied primes (test vectors).
PaillierKeyPair KeyPairFromPrimes(const mpz_class& p, const mpz_class& q);

// L(x) = (x - 1) / n; throws kCorruptCiphertext if n does not divide x - 1.
mpz_class PaillierL(const mpz_class& x, const mpz_class& n);

// c = g^m * r^n mod n^2 with r uniform over the units of Z_n.
Ciphertext Encrypt(const PaillierPublicKey& pk, const mpz_class& m, Rng& rng);
// Same with an explicit nonce r (must be a unit of Z_n).
Ciphertext EncryptWithNonce(const PaillierPublicKey& pk, const mpz_class& m,
                            const mpz_class& r);

mpz_class Decrypt(const PaillierPrivateKey& sk, const Ciphertext& c);

// Decrypts to m1 + m2 mod n.
Ciphertext HomAdd(const PaillierPublicKey& pk, const Ciphertext& c1,
                  const Ciphertext& c2);
// Decrypts to k * m mod n; 0 <= k < n.
Ciphertext HomScalarMul(const PaillierPublicKey& pk, const mpz_class& k,
                        const Ciphertext& c);
// Left fold of HomAdd; throws kInvalidArgument on an empty list.
Ciphertext HomSum(const PaillierPublicKey& pk, std::span<const Ciphertext> cts);

// Plaintext matrix (rows of residues) times ciphertext vector: output j
// decrypts to sum_k A[j][k] * m_k mod n.
std::vector<Ciphertext> CiphertextMatVec(
    const PaillierPublicKey& pk, const std::vector<std::vector<mpz_class>>& a,
    std::span<const Ciphertext> v);

}  // namespace privloc

#endif  // PRIVLOC_PAILLIER_H_
