#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <vector>

namespace pstrust {

// Additively homomorphic Paillier cryptosystem over Z_N with generator N+1.
// Plaintext space [0, N), ciphertext space: units of Z_{N^2}.

class PublicKey {
  public:
    PublicKey() = default;
    explicit PublicKey(mpz_class modulus);

    bool valid() const { return sgn(modulus_) > 0; }
    const mpz_class& modulus() const { return modulus_; }
    const mpz_class& generator() const { return generator_; }
    const mpz_class& modulus_squared() const { return modulus_squared_; }

    // Short identifier derived from the modulus; every ciphertext carries it
    // so cross-key operations fail loudly instead of producing garbage.
    std::uint64_t tag() const { return tag_; }

    int bit_length() const;

    std::vector<std::uint8_t> serialize() const;
    static PublicKey deserialize(std::span<const std::uint8_t> bytes);

  private:
    mpz_class modulus_;          // N = p*q
    mpz_class generator_;        // N + 1
    mpz_class modulus_squared_;  // N^2
    std::uint64_t tag_ = 0;
};

class SecretKey {
  public:
    SecretKey() = default;
    SecretKey(mpz_class p, mpz_class q);

    const PublicKey& public_key() const { return pub_; }
    const mpz_class& prime_p() const { return p_; }
    const mpz_class& prime_q() const { return q_; }
    const mpz_class& lambda() const { return lambda_; }
    const mpz_class& mu() const { return mu_; }

    std::vector<std::uint8_t> serialize() const;
    static SecretKey deserialize(std::span<const std::uint8_t> bytes);

  private:
    PublicKey pub_;
    mpz_class p_, q_;
    mpz_class lambda_;  // lcm(p-1, q-1)
    mpz_class mu_;      // lambda^-1 mod N (generator is N+1)
};

struct Keypair {
    PublicKey pub;
    SecretKey sec;
};

struct Ciphertext {
    mpz_class value;
    std::uint64_t key_tag = 0;

    bool operator==(const Ciphertext&) const = default;
};

// Two distinct odd primes of bit_length/2 bits each; the modulus has exactly
// bit_length bits. bit_length must be even and at least 64.
Keypair keygen(int bit_length);

// Fresh uniform nonce. m must lie in [0, N).
Ciphertext encrypt(const PublicKey& pk, const mpz_class& m);

// Caller-supplied nonce r in [1, N) coprime with N; deterministic.
Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, const mpz_class& r);

mpz_class decrypt(const SecretKey& sk, const Ciphertext& c);

// Homomorphic evaluation on ciphertexts under one key:
//   add: D(hom_add(E(a), E(b)))        = a + b   mod N
//   sub: D(hom_sub(E(a), E(b)))        = a - b   mod N
//   scalar_mul: D(hom_scalar_mul(E(a), k)) = k*a mod N
Ciphertext hom_add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext hom_sub(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext hom_scalar_mul(const PublicKey& pk, const Ciphertext& a, const mpz_class& k);

// Same plaintext, fresh nonce (self-blinding).
Ciphertext rerandomize(const PublicKey& pk, const Ciphertext& c);

}  // namespace pstrust
