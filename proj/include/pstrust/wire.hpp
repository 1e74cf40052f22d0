#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <vector>

#include "pstrust/errors.hpp"

// Byte-level field primitives shared by key serialization and the message
// codec. All multi-byte quantities are big-endian. Integers are canonical:
// minimal magnitude, zero encodes as length 0.
namespace pstrust::wire {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

// Minimal big-endian magnitude; empty for zero.
inline std::vector<std::uint8_t> magnitude_bytes(const mpz_class& v) {
    if (sgn(v) < 0) throw InputError("negative value has no wire encoding");
    std::vector<std::uint8_t> out;
    if (sgn(v) == 0) return out;
    std::size_t count = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
    out.resize(count);
    std::size_t written = 0;
    mpz_export(out.data(), &written, 1, 1, 1, 0, v.get_mpz_t());
    out.resize(written);
    return out;
}

// 2-byte length prefix + magnitude.
inline void put_bigint(std::vector<std::uint8_t>& out, const mpz_class& v) {
    auto mag = magnitude_bytes(v);
    if (mag.size() > 0xffff) throw InputError("integer too large for 2-byte length prefix");
    put_u16(out, static_cast<std::uint16_t>(mag.size()));
    out.insert(out.end(), mag.begin(), mag.end());
}

// 2-byte element count + elements.
inline void put_bigint_vec(std::vector<std::uint8_t>& out, const std::vector<mpz_class>& v) {
    if (v.size() > 0xffff) throw InputError("vector too long for 2-byte count");
    put_u16(out, static_cast<std::uint16_t>(v.size()));
    for (const auto& e : v) put_bigint(out, e);
}

// 2-byte bit count, then bits packed 8 per byte, most significant bit first,
// final byte zero-padded.
inline void put_bitvec(std::vector<std::uint8_t>& out, const std::vector<std::uint8_t>& bits) {
    if (bits.size() > 0xffff) throw InputError("bit vector too long for 2-byte count");
    put_u16(out, static_cast<std::uint16_t>(bits.size()));
    std::uint8_t acc = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] > 1) throw InputError("bit vector element is not a bit");
        acc = static_cast<std::uint8_t>((acc << 1) | bits[i]);
        if (i % 8 == 7) {
            out.push_back(acc);
            acc = 0;
        }
    }
    if (bits.size() % 8 != 0) out.push_back(static_cast<std::uint8_t>(acc << (8 - bits.size() % 8)));
}

// Sequential decoder. Every getter throws CodecError carrying the offset of
// the first byte it could not honor.
class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }

    std::uint8_t u8() {
        need(1, "truncated byte");
        return data_[pos_++];
    }

    std::uint16_t u16() {
        need(2, "truncated 16-bit field");
        std::uint16_t v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }

    std::uint32_t u32() {
        need(4, "truncated 32-bit field");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
        pos_ += 4;
        return v;
    }

    mpz_class bigint() {
        std::size_t at = pos_;
        std::uint16_t len = u16();
        need(len, "truncated integer magnitude");
        if (len > 0 && data_[pos_] == 0)
            throw CodecError("non-canonical integer (leading zero byte)", pos_);
        mpz_class v;
        if (len > 0) mpz_import(v.get_mpz_t(), len, 1, 1, 1, 0, data_.data() + pos_);
        pos_ += len;
        (void)at;
        return v;
    }

    // bigint constrained to fit a uint64 (protocol counters, sizes, prices).
    std::uint64_t small_int() {
        std::size_t at = pos_;
        mpz_class v = bigint();
        if (!v.fits_ulong_p() && mpz_sizeinbase(v.get_mpz_t(), 2) > 64)
            throw CodecError("integer out of range for this field", at);
        std::uint64_t out = 0;
        mpz_export(&out, nullptr, -1, 8, 0, 0, v.get_mpz_t());
        return out;
    }

    std::vector<mpz_class> bigint_vec() {
        std::uint16_t count = u16();
        std::vector<mpz_class> v;
        v.reserve(count);
        for (std::uint16_t i = 0; i < count; ++i) v.push_back(bigint());
        return v;
    }

    std::vector<std::uint8_t> bitvec() {
        std::uint16_t bits = u16();
        std::size_t bytes = (static_cast<std::size_t>(bits) + 7) / 8;
        need(bytes, "truncated bit vector");
        std::vector<std::uint8_t> out(bits);
        for (std::uint16_t i = 0; i < bits; ++i)
            out[i] = (data_[pos_ + i / 8] >> (7 - i % 8)) & 1;
        if (bits % 8 != 0) {
            std::uint8_t pad = data_[pos_ + bytes - 1] & ((1u << (8 - bits % 8)) - 1);
            if (pad != 0) throw CodecError("nonzero padding in bit vector", pos_ + bytes - 1);
        }
        pos_ += bytes;
        return out;
    }

    void expect_end() const {
        if (pos_ != data_.size()) throw CodecError("trailing bytes after message payload", pos_);
    }

  private:
    void need(std::size_t n, const char* what) const {
        if (remaining() < n) throw CodecError(what, data_.size());
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace pstrust::wire
