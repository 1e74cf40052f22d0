#include "pstrust/rng.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstring>
#include <stdexcept>
#include <vector>

#include "pstrust/errors.hpp"

namespace pstrust {

SecureRng::SecureRng() {
    fd_ = ::open("/dev/urandom", O_RDONLY | O_CLOEXEC);
    if (fd_ < 0) throw SetupError("cannot open /dev/urandom");
}

SecureRng::~SecureRng() {
    if (fd_ >= 0) ::close(fd_);
}

void SecureRng::refill() {
    std::size_t got = 0;
    while (got < sizeof(buf_)) {
        ssize_t n = ::read(fd_, buf_ + got, sizeof(buf_) - got);
        if (n <= 0) throw SetupError("short read from /dev/urandom");
        got += static_cast<std::size_t>(n);
    }
    avail_ = sizeof(buf_);
}

void SecureRng::fill(std::uint8_t* out, std::size_t len) {
    while (len > 0) {
        if (avail_ == 0) refill();
        std::size_t take = len < avail_ ? len : avail_;
        std::memcpy(out, buf_ + (sizeof(buf_) - avail_), take);
        avail_ -= take;
        out += take;
        len -= take;
    }
}

SecureRng::result_type SecureRng::operator()() {
    std::uint8_t raw[8];
    fill(raw, sizeof(raw));
    result_type v = 0;
    for (std::uint8_t b : raw) v = (v << 8) | b;
    return v;
}

mpz_class SecureRng::uniform_below(const mpz_class& bound) {
    if (bound <= 0) throw InputError("uniform_below: bound must be positive");
    std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    std::size_t bytes = (bits + 7) / 8;
    // Mask the top byte down to the bound's bit length so the acceptance
    // probability per draw stays above 1/2.
    unsigned top_mask = (bits % 8 == 0) ? 0xff : ((1u << (bits % 8)) - 1);
    std::vector<std::uint8_t> raw(bytes);
    mpz_class v;
    do {
        fill(raw.data(), raw.size());
        raw[0] &= static_cast<std::uint8_t>(top_mask);
        mpz_import(v.get_mpz_t(), raw.size(), 1, 1, 1, 0, raw.data());
    } while (v >= bound);
    return v;
}

mpz_class SecureRng::uniform_bits(int bits) {
    if (bits <= 0) throw InputError("uniform_bits: bits must be positive");
    std::size_t bytes = (static_cast<std::size_t>(bits) + 7) / 8;
    std::vector<std::uint8_t> raw(bytes);
    fill(raw.data(), raw.size());
    if (bits % 8 != 0) raw[0] &= static_cast<std::uint8_t>((1u << (bits % 8)) - 1);
    mpz_class v;
    mpz_import(v.get_mpz_t(), raw.size(), 1, 1, 1, 0, raw.data());
    return v;
}

SecureRng& secure_rng() {
    thread_local SecureRng rng;
    return rng;
}

}  // namespace pstrust
