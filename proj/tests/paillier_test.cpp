#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>

#include "pstrust/errors.hpp"
#include "pstrust/paillier.hpp"
#include "pstrust/rng.hpp"

using namespace pstrust;

namespace {

mpz_class random_plaintext(const PublicKey& pk) {
    return secure_rng().uniform_below(pk.modulus());
}

}  // namespace

TEST_CASE("keygen produces moduli of exactly the requested size") {
    for (int bits : {64, 96, 128, 256}) {
        Keypair kp = keygen(bits);
        CHECK(kp.pub.bit_length() == bits);
        CHECK(kp.sec.prime_p() != kp.sec.prime_q());
        CHECK(kp.sec.prime_p() * kp.sec.prime_q() == kp.pub.modulus());
        CHECK(kp.pub.generator() == kp.pub.modulus() + 1);
    }
    CHECK_THROWS_AS(keygen(63), InputError);   // odd
    CHECK_THROWS_AS(keygen(32), InputError);   // too small
    CHECK_THROWS_AS(keygen(-8), InputError);
}

TEST_CASE("encrypt/decrypt round-trips the full plaintext range") {
    Keypair kp = keygen(128);
    const mpz_class& n = kp.pub.modulus();

    for (const mpz_class& m : {mpz_class(0), mpz_class(1), mpz_class(2), mpz_class(n - 1)})
        CHECK(decrypt(kp.sec, encrypt(kp.pub, m)) == m);

    for (int i = 0; i < 200; ++i) {
        mpz_class m = random_plaintext(kp.pub);
        CHECK(decrypt(kp.sec, encrypt(kp.pub, m)) == m);
    }

    CHECK_THROWS_AS(encrypt(kp.pub, n), InputError);
    CHECK_THROWS_AS(encrypt(kp.pub, mpz_class(-1)), InputError);
}

TEST_CASE("homomorphic add, subtract and scalar multiply") {
    Keypair kp = keygen(128);
    const mpz_class& n = kp.pub.modulus();
    for (int i = 0; i < 200; ++i) {
        mpz_class a = random_plaintext(kp.pub);
        mpz_class b = random_plaintext(kp.pub);
        mpz_class k = random_plaintext(kp.pub);
        Ciphertext ca = encrypt(kp.pub, a);
        Ciphertext cb = encrypt(kp.pub, b);
        CHECK(decrypt(kp.sec, hom_add(kp.pub, ca, cb)) == (a + b) % n);
        CHECK(decrypt(kp.sec, hom_sub(kp.pub, ca, cb)) == ((a - b) % n + n) % n);
        CHECK(decrypt(kp.sec, hom_scalar_mul(kp.pub, ca, k)) == (k * a) % n);
    }
    Ciphertext c1 = encrypt(kp.pub, 7);
    CHECK(decrypt(kp.sec, hom_scalar_mul(kp.pub, c1, 0)) == 0);
    CHECK_THROWS_AS(hom_scalar_mul(kp.pub, c1, mpz_class(-2)), InputError);
}

TEST_CASE("encryption is probabilistic and rerandomization preserves plaintexts") {
    Keypair kp = keygen(96);
    const mpz_class m = 42;
    std::set<std::string> seen;
    for (int i = 0; i < 10000; ++i)
        seen.insert(encrypt(kp.pub, m).value.get_str(16));
    CHECK(seen.size() == 10000);  // every fresh encryption is distinct

    Ciphertext c = encrypt(kp.pub, m);
    for (int i = 0; i < 100; ++i) {
        Ciphertext r = rerandomize(kp.pub, c);
        CHECK(r.value != c.value);
        CHECK(decrypt(kp.sec, r) == m);
    }
}

TEST_CASE("explicit nonces are deterministic and validated") {
    Keypair kp = keygen(96);
    const mpz_class& n = kp.pub.modulus();
    mpz_class m = 123456789;
    mpz_class r = 987654321;
    Ciphertext c1 = encrypt(kp.pub, m, r);
    Ciphertext c2 = encrypt(kp.pub, m, r);
    CHECK(c1.value == c2.value);
    CHECK(decrypt(kp.sec, c1) == m);

    CHECK_THROWS_AS(encrypt(kp.pub, m, mpz_class(0)), InputError);
    CHECK_THROWS_AS(encrypt(kp.pub, m, n), InputError);
    // A nonce sharing a factor with N is not a unit mod N^2.
    CHECK_THROWS_AS(encrypt(kp.pub, m, kp.sec.prime_p()), InputError);
}

TEST_CASE("ciphertexts are bound to their key") {
    Keypair kp1 = keygen(96);
    Keypair kp2 = keygen(96);
    REQUIRE(kp1.pub.modulus() != kp2.pub.modulus());
    Ciphertext c = encrypt(kp1.pub, 5);
    CHECK(c.key_tag == kp1.pub.tag());
    CHECK(kp1.pub.tag() != kp2.pub.tag());
    CHECK_THROWS_AS(decrypt(kp2.sec, c), KeyError);
    CHECK_THROWS_AS(hom_add(kp2.pub, c, encrypt(kp2.pub, 1)), KeyError);
    CHECK_THROWS_AS(hom_sub(kp2.pub, encrypt(kp2.pub, 1), c), KeyError);
    CHECK_THROWS_AS(hom_scalar_mul(kp2.pub, c, 3), KeyError);
    CHECK_THROWS_AS(rerandomize(kp2.pub, c), KeyError);
}

TEST_CASE("decrypt rejects out-of-range and structurally invalid ciphertexts") {
    Keypair kp = keygen(96);
    CHECK_THROWS_AS(decrypt(kp.sec, Ciphertext{mpz_class(0), kp.pub.tag()}), InputError);
    CHECK_THROWS_AS(
        decrypt(kp.sec, Ciphertext{kp.pub.modulus_squared(), kp.pub.tag()}), InputError);
    // A multiple of p is not a unit mod N^2; its decryption cannot land in
    // the valid coset.
    CHECK_THROWS_AS(decrypt(kp.sec, Ciphertext{kp.sec.prime_p(), kp.pub.tag()}),
                    CorruptionError);
}

TEST_CASE("key serialization round-trips") {
    Keypair kp = keygen(128);

    PublicKey pk2 = PublicKey::deserialize(kp.pub.serialize());
    CHECK(pk2.modulus() == kp.pub.modulus());
    CHECK(pk2.tag() == kp.pub.tag());

    SecretKey sk2 = SecretKey::deserialize(kp.sec.serialize());
    CHECK(sk2.prime_p() == kp.sec.prime_p());
    CHECK(sk2.prime_q() == kp.sec.prime_q());
    mpz_class m = 77;
    CHECK(decrypt(sk2, encrypt(pk2, m)) == m);

    std::vector<std::uint8_t> garbage{0x00};
    CHECK_THROWS_AS(PublicKey::deserialize(garbage), CodecError);
    CHECK_THROWS_AS(SecretKey::deserialize(garbage), CodecError);
}

TEST_CASE("secret key construction validates its factors") {
    Keypair kp = keygen(96);
    CHECK_THROWS_AS(SecretKey(kp.sec.prime_p(), kp.sec.prime_p()), KeyError);
    CHECK_THROWS_AS(SecretKey(kp.sec.prime_p(), mpz_class(91)), KeyError);  // 91 = 7 * 13
}
