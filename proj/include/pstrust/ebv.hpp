#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pstrust/paillier.hpp"

namespace pstrust {

// A bid value encrypted bit by bit, most significant bit first. Arithmetic on
// these wraps modulo 2^bit_length; the auction keeps normal bids inside
// (0, 2^K - 1) and reserves the endpoints as saturation markers.
struct EbvBid {
    std::vector<Ciphertext> bits;

    int bit_length() const { return static_cast<int>(bits.size()); }
};

// Handle to the key-holding party for the masked-product exchange: submit
// E(x2), E(y2) and receive a fresh E(x2 * y2 mod N). Counts round trips so
// callers can assert operation costs.
class OracleEndpoint {
  public:
    virtual ~OracleEndpoint() = default;

    Ciphertext masked_product(const Ciphertext& x2, const Ciphertext& y2) {
        ++calls_;
        return do_masked_product(x2, y2);
    }

    std::uint64_t product_calls() const { return calls_; }

  private:
    virtual Ciphertext do_masked_product(const Ciphertext& x2, const Ciphertext& y2) = 0;

    std::uint64_t calls_ = 0;
};

using MaskLog = std::vector<std::pair<mpz_class, mpz_class>>;

// Key-holder side of the masked-product exchange: decrypt both masked
// operands, multiply mod N, reply with a fresh encryption. The decrypted
// masked values go to mask_log when one is supplied (they are what this
// party actually observes, which the leakage tests examine).
Ciphertext serve_product(const SecretKey& sk, const Ciphertext& x2, const Ciphertext& y2,
                         MaskLog* mask_log = nullptr);

// In-process endpoint wrapping a secret key; used by unit tests and local
// pipelines that do not cross a channel.
class LoopbackOracle final : public OracleEndpoint {
  public:
    LoopbackOracle(const SecretKey& sk, bool capture_masks = false)
        : sk_(sk), capture_(capture_masks) {}

    const MaskLog& observed_masks() const { return masks_; }

  private:
    Ciphertext do_masked_product(const Ciphertext& x2, const Ciphertext& y2) override {
        return serve_product(sk_, x2, y2, capture_ ? &masks_ : nullptr);
    }

    const SecretKey& sk_;
    bool capture_;
    MaskLog masks_;
};

// Per-bit encryption of value, most significant bit first.
// value must fit in bit_length bits; bit_length in [1, 48].
EbvBid encode_ebv(const PublicKey& pk, std::uint64_t value, int bit_length);

// Decrypts every bit; a decryption outside {0, 1} raises CorruptionError.
std::uint64_t decode_ebv(const SecretKey& sk, const EbvBid& bid);

// E(x * y mod N) from E(x), E(y) via one masked-product round trip:
// both operands are blinded with fresh uniform masks before they reach the
// key holder, and the cross terms are reassembled homomorphically.
Ciphertext secure_product(const PublicKey& pk, OracleEndpoint& oracle, const Ciphertext& cx,
                          const Ciphertext& cy);

// E(a xor b) for bit plaintexts: a + b - 2ab. One product.
Ciphertext secure_xor(const PublicKey& pk, OracleEndpoint& oracle, const Ciphertext& ca,
                      const Ciphertext& cb);

// Ripple-carry sum, (a + b) mod 2^K. Theta(K) products.
EbvBid ebv_add(const PublicKey& pk, OracleEndpoint& oracle, const EbvBid& a, const EbvBid& b);

// (multiplier * a) mod 2^K by shift-and-add over the multiplier's set bits.
// multiplier must fit in a.bit_length() bits.
EbvBid ebv_mul_const(const PublicKey& pk, OracleEndpoint& oracle, const EbvBid& a,
                     std::uint64_t multiplier);

// Bitwise complement (one's complement), no oracle traffic.
EbvBid ebv_invert(const PublicKey& pk, const EbvBid& a);

enum class Direction { minimum, maximum };

struct SelectionResult {
    // For two_bid_extreme: E(0) if the first argument is extreme (ties pick
    // the first), E(1) otherwise. For multi_bid_extreme: the encrypted
    // 0-based position of the extreme bid, first position on ties.
    Ciphertext selector;
    EbvBid extreme;
};

// Extreme of two bids. The selector is derived by locating the most
// significant differing bit; the returned bid multiplexes the original
// ciphertext bits with the selector. Theta(K) products.
SelectionResult two_bid_extreme(const PublicKey& pk, OracleEndpoint& oracle, const EbvBid& a,
                                const EbvBid& b, Direction dir);

// Iterated two-bid selection over a non-empty list, keeping an encrypted
// running index. Theta(n*K) products.
SelectionResult multi_bid_extreme(const PublicKey& pk, OracleEndpoint& oracle,
                                  std::span<const EbvBid> bids, Direction dir);

}  // namespace pstrust
