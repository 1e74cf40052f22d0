#include "pstrust/paillier.hpp"

#include "pstrust/errors.hpp"
#include "pstrust/rng.hpp"
#include "pstrust/wire.hpp"

namespace pstrust {

namespace {

mpz_class powm(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return r;
}

std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

void check_tag(const PublicKey& pk, const Ciphertext& c, const char* op) {
    if (c.key_tag != pk.tag())
        throw KeyError(std::string(op) + ": ciphertext belongs to a different key");
}

// Random prime in [2^(bits-1), 2^bits). The top two bits are forced so the
// product of two such primes has exactly 2*bits bits.
mpz_class random_prime(int bits) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        mpz_class start = secure_rng().uniform_bits(bits);
        mpz_setbit(start.get_mpz_t(), static_cast<mp_bitcnt_t>(bits - 1));
        mpz_setbit(start.get_mpz_t(), static_cast<mp_bitcnt_t>(bits - 2));
        mpz_class p;
        mpz_nextprime(p.get_mpz_t(), start.get_mpz_t());
        if (mpz_sizeinbase(p.get_mpz_t(), 2) == static_cast<std::size_t>(bits)) return p;
    }
    throw SetupError("prime search failed to stay within the requested bit length");
}

}  // namespace

PublicKey::PublicKey(mpz_class modulus) : modulus_(std::move(modulus)) {
    if (sgn(modulus_) <= 0) throw KeyError("public key modulus must be positive");
    generator_ = modulus_ + 1;
    modulus_squared_ = modulus_ * modulus_;
    tag_ = fnv1a64(wire::magnitude_bytes(modulus_));
}

int PublicKey::bit_length() const {
    return valid() ? static_cast<int>(mpz_sizeinbase(modulus_.get_mpz_t(), 2)) : 0;
}

std::vector<std::uint8_t> PublicKey::serialize() const {
    std::vector<std::uint8_t> out;
    wire::put_bigint(out, modulus_);
    return out;
}

PublicKey PublicKey::deserialize(std::span<const std::uint8_t> bytes) {
    wire::Reader r(bytes);
    mpz_class n = r.bigint();
    r.expect_end();
    return PublicKey(n);
}

SecretKey::SecretKey(mpz_class p, mpz_class q) : p_(std::move(p)), q_(std::move(q)) {
    if (p_ == q_) throw KeyError("secret key primes must be distinct");
    if (mpz_probab_prime_p(p_.get_mpz_t(), 30) == 0 || mpz_probab_prime_p(q_.get_mpz_t(), 30) == 0)
        throw KeyError("secret key factor is not prime");
    pub_ = PublicKey(p_ * q_);
    mpz_class pm1 = p_ - 1, qm1 = q_ - 1;
    mpz_lcm(lambda_.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
    // With generator N+1, L(g^lambda mod N^2) = lambda mod N, so mu = lambda^-1.
    if (mpz_invert(mu_.get_mpz_t(), lambda_.get_mpz_t(), pub_.modulus().get_mpz_t()) == 0)
        throw KeyError("lambda not invertible mod N");
}

std::vector<std::uint8_t> SecretKey::serialize() const {
    std::vector<std::uint8_t> out;
    wire::put_bigint(out, p_);
    wire::put_bigint(out, q_);
    return out;
}

SecretKey SecretKey::deserialize(std::span<const std::uint8_t> bytes) {
    wire::Reader r(bytes);
    mpz_class p = r.bigint();
    mpz_class q = r.bigint();
    r.expect_end();
    return SecretKey(std::move(p), std::move(q));
}

Keypair keygen(int bit_length) {
    if (bit_length < 64 || bit_length % 2 != 0)
        throw InputError("key bit length must be even and at least 64");
    for (int attempt = 0; attempt < 64; ++attempt) {
        mpz_class p = random_prime(bit_length / 2);
        mpz_class q = random_prime(bit_length / 2);
        if (p == q) continue;
        SecretKey sk(std::move(p), std::move(q));
        if (sk.public_key().bit_length() != bit_length) continue;
        PublicKey pk = sk.public_key();
        return Keypair{std::move(pk), std::move(sk)};
    }
    throw SetupError("key generation failed after bounded retries");
}

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, const mpz_class& r) {
    if (!pk.valid()) throw KeyError("encrypt: invalid public key");
    if (sgn(m) < 0 || m >= pk.modulus()) throw InputError("encrypt: plaintext outside [0, N)");
    if (r < 1 || r >= pk.modulus()) throw InputError("encrypt: nonce outside [1, N)");
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), pk.modulus().get_mpz_t());
    if (g != 1) throw InputError("encrypt: nonce shares a factor with N");
    // (N+1)^m = 1 + m*N mod N^2, so one exponentiation suffices.
    mpz_class gm = (1 + m * pk.modulus()) % pk.modulus_squared();
    mpz_class c = (gm * powm(r, pk.modulus(), pk.modulus_squared())) % pk.modulus_squared();
    return Ciphertext{std::move(c), pk.tag()};
}

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m) {
    if (!pk.valid()) throw KeyError("encrypt: invalid public key");
    mpz_class r;
    mpz_class g;
    do {
        r = secure_rng().uniform_below(pk.modulus());
        if (sgn(r) == 0) continue;
        mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), pk.modulus().get_mpz_t());
    } while (sgn(r) == 0 || g != 1);
    return encrypt(pk, m, r);
}

mpz_class decrypt(const SecretKey& sk, const Ciphertext& c) {
    const PublicKey& pk = sk.public_key();
    check_tag(pk, c, "decrypt");
    if (sgn(c.value) <= 0 || c.value >= pk.modulus_squared())
        throw InputError("decrypt: ciphertext outside (0, N^2)");
    mpz_class u = powm(c.value, sk.lambda(), pk.modulus_squared());
    // L(u) = (u - 1) / N must be exact for a well-formed ciphertext.
    mpz_class um1 = u - 1;
    mpz_class l, rem;
    mpz_fdiv_qr(l.get_mpz_t(), rem.get_mpz_t(), um1.get_mpz_t(), pk.modulus().get_mpz_t());
    if (sgn(rem) != 0) throw CorruptionError("decrypt: ciphertext is not in the valid coset");
    return (l * sk.mu()) % pk.modulus();
}

Ciphertext hom_add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
    check_tag(pk, a, "hom_add");
    check_tag(pk, b, "hom_add");
    return Ciphertext{(a.value * b.value) % pk.modulus_squared(), pk.tag()};
}

Ciphertext hom_sub(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
    check_tag(pk, a, "hom_sub");
    check_tag(pk, b, "hom_sub");
    // E(a) * E(b)^(N-1) decrypts to a - b mod N.
    mpz_class nm1 = pk.modulus() - 1;
    mpz_class inv = powm(b.value, nm1, pk.modulus_squared());
    return Ciphertext{(a.value * inv) % pk.modulus_squared(), pk.tag()};
}

Ciphertext hom_scalar_mul(const PublicKey& pk, const Ciphertext& a, const mpz_class& k) {
    check_tag(pk, a, "hom_scalar_mul");
    if (sgn(k) < 0) throw InputError("hom_scalar_mul: scalar must be non-negative");
    return Ciphertext{powm(a.value, k % pk.modulus(), pk.modulus_squared()), pk.tag()};
}

Ciphertext rerandomize(const PublicKey& pk, const Ciphertext& c) {
    check_tag(pk, c, "rerandomize");
    mpz_class r;
    mpz_class g;
    do {
        r = secure_rng().uniform_below(pk.modulus());
        if (sgn(r) == 0) continue;
        mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), pk.modulus().get_mpz_t());
    } while (sgn(r) == 0 || g != 1);
    mpz_class blind = powm(r, pk.modulus(), pk.modulus_squared());
    return Ciphertext{(c.value * blind) % pk.modulus_squared(), pk.tag()};
}

}  // namespace pstrust
