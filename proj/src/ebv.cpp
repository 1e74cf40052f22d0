#include "pstrust/ebv.hpp"

#include "pstrust/errors.hpp"
#include "pstrust/rng.hpp"

namespace pstrust {

namespace {

void check_lengths(const EbvBid& a, const EbvBid& b, const char* op) {
    if (a.bit_length() == 0 || a.bit_length() != b.bit_length())
        throw InputError(std::string(op) + ": operand bit lengths differ");
}

// E(1 - c) for a bit plaintext c; fresh constant per use so repeated
// complements of one ciphertext stay unlinkable.
Ciphertext one_minus(const PublicKey& pk, const Ciphertext& c) {
    return hom_sub(pk, encrypt(pk, 1), c);
}

}  // namespace

Ciphertext serve_product(const SecretKey& sk, const Ciphertext& x2, const Ciphertext& y2,
                         MaskLog* mask_log) {
    mpz_class a = decrypt(sk, x2);
    mpz_class b = decrypt(sk, y2);
    if (mask_log) mask_log->emplace_back(a, b);
    mpz_class prod = (a * b) % sk.public_key().modulus();
    return encrypt(sk.public_key(), prod);
}

EbvBid encode_ebv(const PublicKey& pk, std::uint64_t value, int bit_length) {
    if (bit_length < 1 || bit_length > 48) throw InputError("encode_ebv: bit length out of range");
    if (bit_length < 64 && (value >> bit_length) != 0)
        throw InputError("encode_ebv: value does not fit in the bit length");
    EbvBid out;
    out.bits.reserve(static_cast<std::size_t>(bit_length));
    for (int i = bit_length - 1; i >= 0; --i)
        out.bits.push_back(encrypt(pk, (value >> i) & 1));
    return out;
}

std::uint64_t decode_ebv(const SecretKey& sk, const EbvBid& bid) {
    if (bid.bit_length() == 0 || bid.bit_length() > 48)
        throw InputError("decode_ebv: bit length out of range");
    std::uint64_t value = 0;
    for (const Ciphertext& c : bid.bits) {
        mpz_class m = decrypt(sk, c);
        if (m != 0 && m != 1)
            throw CorruptionError("decode_ebv: decrypted bit outside {0, 1}");
        value = (value << 1) | m.get_ui();
    }
    return value;
}

Ciphertext secure_product(const PublicKey& pk, OracleEndpoint& oracle, const Ciphertext& cx,
                          const Ciphertext& cy) {
    const mpz_class& n = pk.modulus();
    mpz_class x1 = secure_rng().uniform_below(n);
    mpz_class y1 = secure_rng().uniform_below(n);
    // x2 = x - x1, y2 = y - y1 (mod N): uniform regardless of x, y.
    mpz_class neg_x1 = sgn(x1) == 0 ? mpz_class(0) : mpz_class(n - x1);
    mpz_class neg_y1 = sgn(y1) == 0 ? mpz_class(0) : mpz_class(n - y1);
    Ciphertext cx2 = hom_add(pk, cx, encrypt(pk, neg_x1));
    Ciphertext cy2 = hom_add(pk, cy, encrypt(pk, neg_y1));
    Ciphertext cross = oracle.masked_product(cx2, cy2);
    // xy = x1*y1 + x1*y2 + y1*x2 + x2*y2.
    Ciphertext acc = encrypt(pk, (x1 * y1) % n);
    acc = hom_add(pk, acc, hom_scalar_mul(pk, cy2, x1));
    acc = hom_add(pk, acc, hom_scalar_mul(pk, cx2, y1));
    return hom_add(pk, acc, cross);
}

Ciphertext secure_xor(const PublicKey& pk, OracleEndpoint& oracle, const Ciphertext& ca,
                      const Ciphertext& cb) {
    Ciphertext ab = secure_product(pk, oracle, ca, cb);
    // a xor b = a + b - 2ab for bits.
    return hom_sub(pk, hom_add(pk, ca, cb), hom_scalar_mul(pk, ab, 2));
}

EbvBid ebv_add(const PublicKey& pk, OracleEndpoint& oracle, const EbvBid& a, const EbvBid& b) {
    check_lengths(a, b, "ebv_add");
    int k = a.bit_length();
    EbvBid out;
    out.bits.resize(static_cast<std::size_t>(k));
    // Least significant position first; the carry out of the top bit is
    // dropped, so the sum wraps modulo 2^k.
    out.bits[k - 1] = secure_xor(pk, oracle, a.bits[k - 1], b.bits[k - 1]);
    Ciphertext carry = secure_product(pk, oracle, a.bits[k - 1], b.bits[k - 1]);
    for (int i = k - 2; i >= 0; --i) {
        Ciphertext axb = secure_xor(pk, oracle, a.bits[i], b.bits[i]);
        out.bits[i] = secure_xor(pk, oracle, axb, carry);
        // carry' = majority(a, b, carry) = ab xor ac xor bc.
        Ciphertext ab = secure_product(pk, oracle, a.bits[i], b.bits[i]);
        Ciphertext ac = secure_product(pk, oracle, a.bits[i], carry);
        Ciphertext bc = secure_product(pk, oracle, b.bits[i], carry);
        carry = secure_xor(pk, oracle, secure_xor(pk, oracle, ab, ac), bc);
    }
    return out;
}

EbvBid ebv_mul_const(const PublicKey& pk, OracleEndpoint& oracle, const EbvBid& a,
                     std::uint64_t multiplier) {
    int k = a.bit_length();
    if (k == 0) throw InputError("ebv_mul_const: empty operand");
    if (k < 64 && (multiplier >> k) != 0)
        throw InputError("ebv_mul_const: multiplier does not fit in the bit length");
    EbvBid acc = encode_ebv(pk, 0, k);
    for (int shift = 0; shift < k; ++shift) {
        if (((multiplier >> shift) & 1) == 0) continue;
        // a << shift within k bits: high bits fall off, fresh zeros shift in.
        EbvBid shifted;
        shifted.bits.reserve(static_cast<std::size_t>(k));
        for (int j = 0; j < k - shift; ++j) shifted.bits.push_back(a.bits[j + shift]);
        for (int j = 0; j < shift; ++j) shifted.bits.push_back(encrypt(pk, 0));
        acc = ebv_add(pk, oracle, acc, shifted);
    }
    return acc;
}

EbvBid ebv_invert(const PublicKey& pk, const EbvBid& a) {
    EbvBid out;
    out.bits.reserve(a.bits.size());
    for (const Ciphertext& c : a.bits) out.bits.push_back(one_minus(pk, c));
    return out;
}

SelectionResult two_bid_extreme(const PublicKey& pk, OracleEndpoint& oracle, const EbvBid& a,
                                const EbvBid& b, Direction dir) {
    check_lengths(a, b, "two_bid_extreme");
    int k = a.bit_length();
    // The selector compares a and b directly for the minimum; for the
    // maximum it compares the complements (order-reversing), then the
    // multiplexer below still works over the original bits.
    const EbvBid* fa = &a;
    const EbvBid* fb = &b;
    EbvBid ia, ib;
    if (dir == Direction::maximum) {
        ia = ebv_invert(pk, a);
        ib = ebv_invert(pk, b);
        fa = &ia;
        fb = &ib;
    }
    std::vector<Ciphertext> x;
    x.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) x.push_back(secure_xor(pk, oracle, fa->bits[i], fb->bits[i]));
    // selector = sum_i (prod_{j<i} (1 - x_j)) * x_i * fa_i: exactly one term
    // survives, the most significant differing position, and it contributes
    // fa's bit there. All x_i zero (equal bids) leaves the selector at 0.
    Ciphertext selector = secure_product(pk, oracle, x[0], fa->bits[0]);
    Ciphertext prefix = encrypt(pk, 1);
    for (int i = 1; i < k; ++i) {
        prefix = secure_product(pk, oracle, prefix, one_minus(pk, x[i - 1]));
        Ciphertext term = secure_product(pk, oracle, x[i], fa->bits[i]);
        selector = hom_add(pk, selector, secure_product(pk, oracle, prefix, term));
    }
    // out_j = a_j + selector * (b_j - a_j).
    SelectionResult res;
    res.selector = selector;
    res.extreme.bits.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        Ciphertext d = hom_sub(pk, b.bits[j], a.bits[j]);
        Ciphertext m = secure_product(pk, oracle, selector, d);
        res.extreme.bits.push_back(hom_add(pk, a.bits[j], m));
    }
    return res;
}

SelectionResult multi_bid_extreme(const PublicKey& pk, OracleEndpoint& oracle,
                                  std::span<const EbvBid> bids, Direction dir) {
    if (bids.empty()) throw InputError("multi_bid_extreme: empty bid list");
    if (bids.size() == 1) return SelectionResult{encrypt(pk, 0), bids[0]};
    SelectionResult run = two_bid_extreme(pk, oracle, bids[0], bids[1], dir);
    // For two bids the selector already is the 0-based index of the extreme.
    for (std::size_t i = 2; i < bids.size(); ++i) {
        SelectionResult step = two_bid_extreme(pk, oracle, run.extreme, bids[i], dir);
        // index' = index * (1 - flag) + i * flag, with i this bid's 0-based
        // position: keep the running index unless the new bid displaced it.
        Ciphertext keep = secure_product(pk, oracle, run.selector, one_minus(pk, step.selector));
        Ciphertext take = hom_scalar_mul(pk, step.selector, static_cast<unsigned long>(i));
        run.selector = hom_add(pk, keep, take);
        run.extreme = std::move(step.extreme);
    }
    return run;
}

}  // namespace pstrust
