#pragma once

#include <cstdint>
#include <random>

namespace pxshrink {

// Counts activations of numeric fallback paths (tiny-CDF guards and the like).
using NumericEventCounter = std::uint64_t;

// Deterministic seed mixing (splitmix64 finalizer folded over the words).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t w0, std::uint64_t w1 = 0,
                          std::uint64_t w2 = 0);

// One stream per chain. Equal seeds give bit-identical draw sequences within
// one build. Not shareable across threads; derive substreams instead.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    RngStream substream(std::uint64_t index) const {
        return RngStream(derive_seed(seed_, 0x9d2c5680u, index));
    }

    std::uint64_t seed() const { return seed_; }

    // uniform on [0,1), 53-bit resolution
    double uniform01();
    // uniform on (0,1); exact zeros are rejected
    double uniform_open();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

double sample_uniform(RngStream& rng, double lo, double hi);
double sample_normal(RngStream& rng, double mean, double sd);
double sample_gamma(RngStream& rng, double shape, double rate);
double sample_inverse_gamma(RngStream& rng, double shape, double rate);
double sample_truncated_gamma(RngStream& rng, double shape, double rate, double upper,
                              NumericEventCounter* events = nullptr);
double sample_truncated_exponential(RngStream& rng, double rate, double upper);
double sample_truncated_normal_positive(RngStream& rng, double mean, double var);
double sample_half_cauchy(RngStream& rng, double scale);
double sample_cauchy(RngStream& rng, double scale);
double sample_inverse_gaussian(RngStream& rng, double mean, double shape);

// Deterministic inverse-CDF kernels behind the truncated samplers, exposed so
// callers can drive them with a fixed uniform fraction.
double truncated_gamma_icdf(double shape, double rate, double upper, double fraction,
                            NumericEventCounter* events = nullptr);
double truncated_exponential_icdf(double rate, double upper, double fraction);

} // namespace pxshrink
