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

#include <gtest/gtest.h>

#include "privloc/random.h"
#include "privloc/status.h"

namespace privloc {
namespace {

mpz_class PowMod(const mpz_class& b, const mpz_class& e, const mpz_class& m) {
  mpz_class out;
  mpz_powm(out.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return out;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kIo;
}

class ToyKey : public ::testing::Test {
 protected:
  PaillierKeyPair kp = KeyPairFromPrimes(5, 7);
};

TEST_F(ToyKey, Parameters) {
  EXPECT_EQ(kp.public_key.n(), 35);
  EXPECT_EQ(kp.public_key.g(), 36);
  EXPECT_EQ(kp.public_key.n_squared(), 1225);
  EXPECT_EQ(kp.private_key.lambda(), 12);  // lcm(4, 6)
  // L(36^12 mod 1225) = L(421) = 12, and 12^-1 mod 35 = 3.
  EXPECT_EQ(kp.private_key.alpha(), 3);
}

TEST_F(ToyKey, EncryptWithUnitNonce) {
  // 36^3 mod 1225 = 106.
  const Ciphertext c = EncryptWithNonce(kp.public_key, 3, 1);
  EXPECT_EQ(c.value(), 106);
  EXPECT_EQ(Decrypt(kp.private_key, c), 3);
}

TEST_F(ToyKey, HomomorphicAddition) {
  const Ciphertext a(106, kp.public_key.key_id());
  const Ciphertext b(141, kp.public_key.key_id());
  EXPECT_EQ(Decrypt(kp.private_key, b), 4);
  const Ciphertext sum = HomAdd(kp.public_key, a, b);
  EXPECT_EQ(sum.value(), 246);  // 106 * 141 mod 1225
  EXPECT_EQ(Decrypt(kp.private_key, sum), 7);
}

TEST_F(ToyKey, ScalarMultiplication) {
  const Ciphertext c(106, kp.public_key.key_id());
  const Ciphertext twice = HomScalarMul(kp.public_key, 2, c);
  EXPECT_EQ(twice.value(), 211);  // 106^2 mod 1225
  EXPECT_EQ(Decrypt(kp.private_key, twice), 6);
}

TEST_F(ToyKey, EveryPlaintextAndNonceRoundTrips) {
  for (int m = 0; m < 35; ++m) {
    for (int r = 1; r < 35; ++r) {
      if (std::gcd(r, 35) != 1) continue;
      const Ciphertext c = EncryptWithNonce(kp.public_key, m, r);
      // Generic g^m r^n without the (1 + n) shortcut.
      EXPECT_EQ(c.value(), mpz_class(PowMod(36, m, 1225) * PowMod(r, 35, 1225) % 1225));
      EXPECT_EQ(Decrypt(kp.private_key, c), m);
    }
  }
}

TEST_F(ToyKey, DomainErrors) {
  EXPECT_EQ(CodeOf([&] { EncryptWithNonce(kp.public_key, 35, 1); }), ErrorCode::kDomain);
  EXPECT_EQ(CodeOf([&] { EncryptWithNonce(kp.public_key, -1, 1); }), ErrorCode::kDomain);
  const Ciphertext c(106, kp.public_key.key_id());
  EXPECT_EQ(CodeOf([&] { HomScalarMul(kp.public_key, 35, c); }), ErrorCode::kDomain);
  EXPECT_EQ(CodeOf([&] { Decrypt(kp.private_key, Ciphertext(1225, c.key_id())); }),
            ErrorCode::kCorruptCiphertext);
  EXPECT_EQ(CodeOf([&] { PaillierL(5, 35); }), ErrorCode::kCorruptCiphertext);
  EXPECT_EQ(CodeOf([&] { HomSum(kp.public_key, {}); }), ErrorCode::kInvalidArgument);
}

TEST_F(ToyKey, KeyMismatch) {
  const PaillierKeyPair other = KeyPairFromPrimes(11, 13);
  const Ciphertext c = EncryptWithNonce(kp.public_key, 3, 1);
  EXPECT_EQ(CodeOf([&] { Decrypt(other.private_key, c); }), ErrorCode::kKeyMismatch);
  const Ciphertext d = EncryptWithNonce(other.public_key, 3, 1);
  EXPECT_EQ(CodeOf([&] { HomAdd(kp.public_key, c, d); }), ErrorCode::kKeyMismatch);
}

TEST_F(ToyKey, MatVecMatchesPlaintext) {
  const std::vector<Ciphertext> v{EncryptWithNonce(kp.public_key, 2, 2),
                                  EncryptWithNonce(kp.public_key, 5, 3)};
  const std::vector<std::vector<mpz_class>> a{{1, 3}, {4, 0}, {34, 7}};
  const auto out = CiphertextMatVec(kp.public_key, a, v);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(Decrypt(kp.private_key, out[0]), 17);
  EXPECT_EQ(Decrypt(kp.private_key, out[1]), 8);
  EXPECT_EQ(Decrypt(kp.private_key, out[2]), (34 * 2 + 7 * 5) % 35);
  EXPECT_EQ(CodeOf([&] { CiphertextMatVec(kp.public_key, {{1}}, v); }),
            ErrorCode::kDimensionMismatch);
}

TEST(KeyPairFromPrimes, RejectsBadPrimes) {
  EXPECT_THROW(KeyPairFromPrimes(7, 7), Error);
  // 3 | (7 - 1) and 3 = p, so gcd(pq, (p-1)(q-1)) = 3.
  EXPECT_THROW(KeyPairFromPrimes(3, 7), Error);
}

TEST(GenerateKeyPair, ProducesExactWidthAndPrimeFactors) {
  Rng rng(7);
  const PaillierKeyPair kp = GenerateKeyPair(512, rng);
  EXPECT_EQ(kp.public_key.bit_length(), 512u);
  EXPECT_EQ(kp.public_key.ciphertext_bits(), 1024u);
  EXPECT_EQ(kp.public_key.g(), kp.public_key.n() + 1);
  EXPECT_EQ(kp.public_key.key_id(), kp.private_key.key_id());
  EXPECT_THROW(GenerateKeyPair(8, rng), Error);
}

TEST(GenerateKeyPair, DeterministicPerSeed) {
  Rng a(11), b(11), c(12);
  EXPECT_EQ(GenerateKeyPair(128, a).public_key.n(), GenerateKeyPair(128, b).public_key.n());
  Rng a2(11);
  EXPECT_NE(GenerateKeyPair(128, a2).public_key.n(), GenerateKeyPair(128, c).public_key.n());
}

TEST(RandomPrime, TopBitsSetAndPrime) {
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const mpz_class p = RandomPrime(64, rng);
    EXPECT_EQ(mpz_sizeinbase(p.get_mpz_t(), 2), 64u);
    EXPECT_TRUE(mpz_tstbit(p.get_mpz_t(), 62));
    EXPECT_GT(mpz_probab_prime_p(p.get_mpz_t(), 30), 0);
  }
}

class RandomKey : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    Rng rng(2024);
    kp_ = new PaillierKeyPair(GenerateKeyPair(512, rng));
  }
  static void TearDownTestSuite() { delete kp_; }
  static PaillierKeyPair* kp_;
};
PaillierKeyPair* RandomKey::kp_ = nullptr;

TEST_F(RandomKey, RandomizedHomomorphism) {
  Rng rng(99);
  const auto& pk = kp_->public_key;
  const auto& sk = kp_->private_key;
  for (int i = 0; i < 200; ++i) {
    const mpz_class a = rng.RandomBelow(pk.n()), b = rng.RandomBelow(pk.n());
    const mpz_class k = rng.RandomBelow(pk.n());
    const Ciphertext ca = Encrypt(pk, a, rng), cb = Encrypt(pk, b, rng);
    ASSERT_EQ(Decrypt(sk, ca), a);
    ASSERT_EQ(Decrypt(sk, HomAdd(pk, ca, cb)), mpz_class((a + b) % pk.n()));
    ASSERT_EQ(Decrypt(sk, HomScalarMul(pk, k, ca)), mpz_class((a * k) % pk.n()));
  }
}

TEST_F(RandomKey, CarmichaelIdentities) {
  Rng rng(5);
  const mpz_class& n = kp_->public_key.n();
  const mpz_class n2 = n * n;
  for (int i = 0; i < 50; ++i) {
    mpz_class w;
    do {
      w = rng.RandomBelow(n2);
    } while (gcd(w, n2) != 1);
    EXPECT_EQ(PowMod(w, kp_->private_key.lambda(), n), 1);
    EXPECT_EQ(PowMod(w, n * kp_->private_key.lambda(), n2), 1);
  }
}

TEST_F(RandomKey, EncryptionIsRandomized) {
  Rng rng(1);
  const Ciphertext a = Encrypt(kp_->public_key, 42, rng);
  const Ciphertext b = Encrypt(kp_->public_key, 42, rng);
  EXPECT_NE(a.value(), b.value());
  EXPECT_EQ(Decrypt(kp_->private_key, a), Decrypt(kp_->private_key, b));
}

TEST_F(RandomKey, JsonRoundTrip) {
  const auto pk = PaillierPublicKey::FromJson(kp_->public_key.ToJson());
  const auto sk = PaillierPrivateKey::FromJson(kp_->private_key.ToJson());
  EXPECT_EQ(pk.n(), kp_->public_key.n());
  EXPECT_EQ(pk.key_id(), kp_->public_key.key_id());
  EXPECT_EQ(sk.lambda(), kp_->private_key.lambda());
  Rng rng(8);
  EXPECT_EQ(Decrypt(sk, Encrypt(pk, 1234, rng)), 1234);
  EXPECT_THROW(PaillierPublicKey::FromJson(R"({"n": 35})"), Error);
}

}  // namespace
}  // namespace privloc
