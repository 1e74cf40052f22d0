#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <cstddef>
#include <limits>

namespace pstrust {

// CSPRNG reading buffered bytes from /dev/urandom. Satisfies the uniform
// random bit generator requirements so it can drive std::shuffle directly.
class SecureRng {
  public:
    using result_type = std::uint64_t;

    SecureRng();
    ~SecureRng();
    SecureRng(const SecureRng&) = delete;
    SecureRng& operator=(const SecureRng&) = delete;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();
    void fill(std::uint8_t* out, std::size_t len);

    // Uniform in [0, bound), bound > 0. Rejection sampling on the top byte.
    mpz_class uniform_below(const mpz_class& bound);

    // Uniform over [0, 2^bits).
    mpz_class uniform_bits(int bits);

  private:
    void refill();

    int fd_ = -1;
    std::uint8_t buf_[4096];
    std::size_t avail_ = 0;
};

// Per-thread instance; cryptographic draws throughout the library use this.
SecureRng& secure_rng();

}  // namespace pstrust
