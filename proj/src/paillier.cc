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

#include "privloc/paillier.h"

#include <openssl/sha.h>

#include <array>
#include <nlohmann/json.hpp>

#include "privloc/status.h"

namespace privloc {
namespace {

mpz_class LcmOf(const mpz_class& a, const mpz_class& b) {
  mpz_class out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

mpz_class GcdOf(const mpz_class& a, const mpz_class& b) {
  mpz_class out;
  mpz_gcd(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

mpz_class PowMod(const mpz_class& base, const mpz_class& exp,
                 const mpz_class& mod) {
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return out;
}

mpz_class ParseDecimal(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_string()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("key json missing decimal field '") + field + "'");
  }
  mpz_class out;
  if (out.set_str(j[field].get<std::string>(), 10) != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("key json field '") + field + "' is not decimal");
  }
  return out;
}

}  // namespace

uint64_t KeyIdFor(const mpz_class& n) {
  size_t count = 0;
  void* raw = mpz_export(nullptr, &count, 1, 1, 1, 0, n.get_mpz_t());
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(static_cast<const unsigned char*>(raw), count, digest.data());
  void (*free_fn)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &free_fn);
  free_fn(raw, count);
  uint64_t id = 0;
  for (int i = 0; i < 8; ++i) id = (id << 8) | digest[i];
  return id;
}

PaillierPublicKey::PaillierPublicKey(mpz_class n, mpz_class g)
    : n_(std::move(n)), g_(std::move(g)) {
  if (n_ <= 1) throw Error(ErrorCode::kInvalidArgument, "modulus must exceed 1");
  n_sq_ = n_ * n_;
  key_id_ = KeyIdFor(n_);
  bits_ = mpz_sizeinbase(n_.get_mpz_t(), 2);
}

void PaillierPublicKey::CheckBound(const Ciphertext& c) const {
  if (c.key_id() != key_id_) {
    throw Error(ErrorCode::kKeyMismatch, "ciphertext bound to a different key");
  }
}

std::string PaillierPublicKey::ToJson() const {
  nlohmann::json j;
  j["n"] = n_.get_str(10);
  j["g"] = g_.get_str(10);
  return j.dump();
}

PaillierPublicKey PaillierPublicKey::FromJson(const std::string& json) {
  auto j = nlohmann::json::parse(json);
  return PaillierPublicKey(ParseDecimal(j, "n"), ParseDecimal(j, "g"));
}

PaillierPrivateKey::PaillierPrivateKey(mpz_class n, mpz_class lambda,
                                       mpz_class alpha)
    : n_(std::move(n)), lambda_(std::move(lambda)), alpha_(std::move(alpha)) {
  n_sq_ = n_ * n_;
  key_id_ = KeyIdFor(n_);
}

std::string PaillierPrivateKey::ToJson() const {
  nlohmann::json j;
  j["n"] = n_.get_str(10);
  j["lambda"] = lambda_.get_str(10);
  j["alpha"] = alpha_.get_str(10);
  return j.dump();
}

PaillierPrivateKey PaillierPrivateKey::FromJson(const std::string& json) {
  auto j = nlohmann::json::parse(json);
  return PaillierPrivateKey(ParseDecimal(j, "n"), ParseDecimal(j, "lambda"),
                            ParseDecimal(j, "alpha"));
}

mpz_class RandomPrime(size_t bits, Rng& rng) {
  if (bits < 3) throw Error(ErrorCode::kInvalidArgument, "prime too short");
  while (true) {
    mpz_class candidate = rng.RandomBits(bits);
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_setbit(candidate.get_mpz_t(), 0);
    if (mpz_probab_prime_p(candidate.get_mpz_t(), kPrimalityRounds) > 0) {
      return candidate;
    }
  }
}

PaillierKeyPair KeyPairFromPrimes(const mpz_class& p, const mpz_class& q) {
  if (p == q) throw Error(ErrorCode::kInvalidArgument, "p and q must differ");
  const mpz_class n = p * q;
  const mpz_class pm1 = p - 1;
  const mpz_class qm1 = q - 1;
  if (GcdOf(n, pm1 * qm1) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "gcd(pq, (p-1)(q-1)) != 1");
  }
  const mpz_class lambda = LcmOf(pm1, qm1);
  PaillierPublicKey pk(n, n + 1);
  const mpz_class l = PaillierL(PowMod(pk.g(), lambda, pk.n_squared()), n);
  mpz_class alpha;
  if (mpz_invert(alpha.get_mpz_t(), l.get_mpz_t(), n.get_mpz_t()) == 0) {
    throw Error(ErrorCode::kInvalidArgument, "L(g^lambda) not invertible mod n");
  }
  return PaillierKeyPair{std::move(pk), PaillierPrivateKey(n, lambda, alpha)};
}

PaillierKeyPair GenerateKeyPair(size_t bit_length, Rng& rng) {
  if (bit_length < kMinKeyBits) {
    throw Error(ErrorCode::kInvalidArgument,
                "key bit length must be at least " + std::to_string(kMinKeyBits));
  }
  const size_t half = bit_length / 2;
  const size_t other = bit_length - half;
  while (true) {
    mpz_class p = RandomPrime(half, rng);
    mpz_class q = RandomPrime(other, rng);
    if (p == q) continue;
    const mpz_class n = p * q;
    if (GcdOf(n, (p - 1) * (q - 1)) != 1) continue;
    return KeyPairFromPrimes(p, q);
  }
}

mpz_class PaillierL(const mpz_class& x, const mpz_class& n) {
  mpz_class numerator = x - 1;
  if (!mpz_divisible_p(numerator.get_mpz_t(), n.get_mpz_t())) {
    throw Error(ErrorCode::kCorruptCiphertext, "L argument not divisible by n");
  }
  mpz_class out;
  mpz_divexact(out.get_mpz_t(), numerator.get_mpz_t(), n.get_mpz_t());
  return out;
}

Ciphertext EncryptWithNonce(const PaillierPublicKey& pk, const mpz_class& m,
                            const mpz_class& r) {
  if (m < 0 || m >= pk.n()) {
    throw Error(ErrorCode::kDomain, "plaintext outside [0, n)");
  }
  mpz_class gm;
  if (pk.g() == pk.n() + 1) {
    // (1 + n)^m = 1 + m*n mod n^2
    gm = (1 + m * pk.n()) % pk.n_squared();
  } else {
    gm = PowMod(pk.g(), m, pk.n_squared());
  }
  mpz_class c = (gm * PowMod(r, pk.n(), pk.n_squared())) % pk.n_squared();
  return Ciphertext(std::move(c), pk.key_id());
}

Ciphertext Encrypt(const PaillierPublicKey& pk, const mpz_class& m, Rng& rng) {
  mpz_class r;
  do {
    r = rng.RandomBelow(pk.n());
  } while (r == 0 || GcdOf(r, pk.n()) != 1);
  return EncryptWithNonce(pk, m, r);
}

mpz_class Decrypt(const PaillierPrivateKey& sk, const Ciphertext& c) {
  if (c.key_id() != sk.key_id()) {
    throw Error(ErrorCode::kKeyMismatch, "ciphertext bound to a different key");
  }
  const mpz_class n_sq = sk.n() * sk.n();
  if (c.value() <= 0 || c.value() >= n_sq) {
    throw Error(ErrorCode::kCorruptCiphertext, "ciphertext outside (0, n^2)");
  }
  const mpz_class l = PaillierL(PowMod(c.value(), sk.lambda(), n_sq), sk.n());
  return (l * sk.alpha()) % sk.n();
}

Ciphertext HomAdd(const PaillierPublicKey& pk, const Ciphertext& c1,
                  const Ciphertext& c2) {
  pk.CheckBound(c1);
  pk.CheckBound(c2);
  mpz_class out = (c1.value() * c2.value()) % pk.n_squared();
  return Ciphertext(std::move(out), pk.key_id());
}

Ciphertext HomScalarMul(const PaillierPublicKey& pk, const mpz_class& k,
                        const Ciphertext& c) {
  pk.CheckBound(c);
  if (k < 0 || k >= pk.n()) {
    throw Error(ErrorCode::kDomain, "scalar outside [0, n)");
  }
  return Ciphertext(PowMod(c.value(), k, pk.n_squared()), pk.key_id());
}

Ciphertext HomSum(const PaillierPublicKey& pk, std::span<const Ciphertext> cts) {
  if (cts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot sum an empty ciphertext list");
  }
  pk.CheckBound(cts[0]);
  Ciphertext acc = cts[0];
  for (size_t i = 1; i < cts.size(); ++i) acc = HomAdd(pk, acc, cts[i]);
  return acc;
}

std::vector<Ciphertext> CiphertextMatVec(
    const PaillierPublicKey& pk, const std::vector<std::vector<mpz_class>>& a,
    std::span<const Ciphertext> v) {
  for (const auto& c : v) pk.CheckBound(c);
  std::vector<Ciphertext> out;
  out.reserve(a.size());
  for (const auto& row : a) {
    if (row.size() != v.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "matrix row width " + std::to_string(row.size()) +
                      " != vector length " + std::to_string(v.size()));
    }
    if (row.empty()) {
      throw Error(ErrorCode::kDimensionMismatch, "empty matrix row");
    }
    Ciphertext acc = HomScalarMul(pk, row[0], v[0]);
    for (size_t k = 1; k < row.size(); ++k) {
      acc = HomAdd(pk, acc, HomScalarMul(pk, row[k], v[k]));
    }
    out.push_back(std::move(acc));
  }
  return out;
}

}  // namespace privloc
