#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace coxsim {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Maps a 128-bit counter and a 64-bit key to 128
/// pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// One independent random stream. The key is the master seed; the upper half
// of the counter is the stream index and the lower half the position inside
// the stream, so (seed, stream) fully determines the sequence no matter which
// thread consumes it.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t position_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int available_ = 0;
};

using Rng = RandomStream;

double standard_normal(Rng& rng);
double standard_exponential(Rng& rng);

/// Gamma variate with the given shape and unit rate (Marsaglia-Tsang; shapes
/// below one are boosted by U^(1/shape)).
double gamma_sample(double shape, Rng& rng);

/// Binomial(n, p): inversion when n*min(p,1-p) < 10, otherwise Hormann's
/// BTRS transformed rejection. Exact for all n representable in a double.
std::uint64_t binomial_sample(std::uint64_t n, double p, Rng& rng);

namespace detail {
/// ln k! - [(k + 1/2) ln(k + 1) - (k + 1) + ln sqrt(2 pi)].
double stirling_tail(double k);
}  // namespace detail

}  // namespace coxsim
