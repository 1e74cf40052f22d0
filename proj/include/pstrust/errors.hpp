#pragma once

#include <stdexcept>
#include <string>

namespace pstrust {

// Error taxonomy shared by all modules. The CLI maps these to exit codes:
// InputError -> 3, protocol/transport/crypto failures -> 2, oracle mismatch -> 1.

// Malformed caller input: bad flags, bad instance file, out-of-range bids.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Key generation could not complete (e.g. prime search exhausted its retries).
struct SetupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ciphertext used under the wrong key, or an invalid key parameter.
struct KeyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A decrypted value violates a structural guarantee (a non-bit where a bit
// is required, a winner mark set twice, a masked quotient that is not exact).
struct CorruptionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Byte-level decode failure; offset points at the first offending byte.
struct CodecError : std::runtime_error {
    CodecError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

// Channel-level failure: peer closed mid-frame, connect/accept failure.
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Semantic violation of the two-party message flow. Carries the failing
// round when one is known (rounds count from 1, 0 = before the first round).
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& what, int round = 0)
        : std::runtime_error(round > 0 ? "round " + std::to_string(round) + ": " + what
                                       : what),
          round_(round) {}
    int round() const { return round_; }

  private:
    int round_;
};

}  // namespace pstrust
