#include "pxshrink/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

namespace pxshrink {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// CDF mass below this is treated as underflow; inversion would return garbage.
constexpr double kCdfFloor = 1e-300;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
}

double standard_normal(RngStream& rng) {
    // Box-Muller without caching, so every call consumes exactly two uniforms
    double u1 = rng.uniform_open();
    double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t w0, std::uint64_t w1,
                          std::uint64_t w2) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ (w0 + 0x9e3779b97f4a7c15ull));
    h = splitmix64(h ^ (w1 + 0xbf58476d1ce4e5b9ull));
    h = splitmix64(h ^ (w2 + 0x94d049bb133111ebull));
    return h;
}

double RngStream::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
    double u;
    do {
        u = uniform01();
    } while (u == 0.0);
    return u;
}

double sample_uniform(RngStream& rng, double lo, double hi) {
    require_finite(lo, "sample_uniform: lo");
    require_finite(hi, "sample_uniform: hi");
    if (!(hi >= lo)) throw std::invalid_argument("sample_uniform: hi < lo");
    return lo + (hi - lo) * rng.uniform01();
}

double sample_normal(RngStream& rng, double mean, double sd) {
    require_finite(mean, "sample_normal: mean");
    require_finite(sd, "sample_normal: sd");
    if (sd < 0.0) throw std::invalid_argument("sample_normal: sd must be >= 0");
    if (sd == 0.0) return mean;
    return mean + sd * standard_normal(rng);
}

double sample_gamma(RngStream& rng, double shape, double rate) {
    require_finite(shape, "sample_gamma: shape");
    require_finite(rate, "sample_gamma: rate");
    if (shape <= 0.0 || rate <= 0.0)
        throw std::invalid_argument("sample_gamma: shape and rate must be > 0");
    if (shape < 1.0) {
        // boost the shape by one, then thin with U^{1/shape}
        double u = rng.uniform_open();
        return sample_gamma(rng, shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double sample_inverse_gamma(RngStream& rng, double shape, double rate) {
    return 1.0 / sample_gamma(rng, shape, rate);
}

double truncated_gamma_icdf(double shape, double rate, double upper, double fraction,
                            NumericEventCounter* events) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("truncated_gamma_icdf: shape and rate must be > 0");
    if (!(upper > 0.0)) throw std::invalid_argument("truncated_gamma_icdf: upper must be > 0");
    if (!(fraction > 0.0) || !(fraction < 1.0))
        throw std::invalid_argument("truncated_gamma_icdf: fraction must be in (0,1)");

    const double fub = std::isinf(upper) ? 1.0 : boost::math::gamma_p(shape, rate * upper);
    const double q = fraction * fub;
    if (fub <= kCdfFloor || q <= 0.0) {
        // The whole slice sits so deep in the left tail that the CDF underflows.
        // There the density is essentially x^{shape-1}, so invert that instead.
        if (events) ++*events;
        return upper * std::pow(fraction, 1.0 / shape);
    }
    double x = boost::math::gamma_p_inv(shape, q) / rate;
    if (!(x > 0.0)) x = std::numeric_limits<double>::min();
    if (x >= upper) x = std::nextafter(upper, 0.0);
    return x;
}

double sample_truncated_gamma(RngStream& rng, double shape, double rate, double upper,
                              NumericEventCounter* events) {
    return truncated_gamma_icdf(shape, rate, upper, rng.uniform_open(), events);
}

double truncated_exponential_icdf(double rate, double upper, double fraction) {
    if (!(rate > 0.0)) throw std::invalid_argument("truncated_exponential_icdf: rate must be > 0");
    if (!(upper > 0.0)) throw std::invalid_argument("truncated_exponential_icdf: upper must be > 0");
    if (!(fraction > 0.0) || !(fraction < 1.0))
        throw std::invalid_argument("truncated_exponential_icdf: fraction must be in (0,1)");
    const double fub = std::isinf(upper) ? 1.0 : -std::expm1(-rate * upper);
    const double q = fraction * fub;
    double x = -std::log1p(-q) / rate;
    if (!(x > 0.0)) x = std::numeric_limits<double>::min();
    if (x >= upper) x = std::nextafter(upper, 0.0);
    return x;
}

double sample_truncated_exponential(RngStream& rng, double rate, double upper) {
    return truncated_exponential_icdf(rate, upper, rng.uniform_open());
}

double sample_truncated_normal_positive(RngStream& rng, double mean, double var) {
    require_finite(mean, "sample_truncated_normal_positive: mean");
    if (!(var > 0.0) || !std::isfinite(var))
        throw std::invalid_argument("sample_truncated_normal_positive: var must be > 0");
    const double sd = std::sqrt(var);
    const double alpha = -mean / sd; // truncation point in standard units

    if (std::abs(mean) / sd <= 8.0) {
        // Invert the survival function: P(Z > z) = (1-f) P(Z > alpha) keeps full
        // precision even when the kept tail is small.
        static const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
        const double s = boost::math::cdf(boost::math::complement(std_normal, alpha));
        const double f = rng.uniform_open();
        const double t = (1.0 - f) * s;
        const double z = -boost::math::quantile(std_normal, t);
        double x = mean + sd * z;
        if (!(x > 0.0)) x = std::numeric_limits<double>::min();
        return x;
    }
    if (mean > 0.0) {
        // truncated mass is negligible; plain rejection accepts almost surely
        for (;;) {
            double x = mean + sd * standard_normal(rng);
            if (x > 0.0) return x;
        }
    }
    // deep left tail: exponential-proposal rejection (Robert's method)
    const double a = 0.5 * (alpha + std::sqrt(alpha * alpha + 4.0));
    for (;;) {
        const double z = alpha - std::log(rng.uniform_open()) / a;
        const double w = std::exp(-0.5 * (z - a) * (z - a));
        if (rng.uniform01() <= w) return mean + sd * z;
    }
}

double sample_half_cauchy(RngStream& rng, double scale) {
    require_finite(scale, "sample_half_cauchy: scale");
    if (!(scale > 0.0)) throw std::invalid_argument("sample_half_cauchy: scale must be > 0");
    // |scale * Cauchy(0,1)| by direct quantile: tan(pi u / 2) on (0,1)
    const double u = rng.uniform_open();
    return scale * std::tan(0.25 * kTwoPi * u);
}

double sample_cauchy(RngStream& rng, double scale) {
    require_finite(scale, "sample_cauchy: scale");
    if (!(scale > 0.0)) throw std::invalid_argument("sample_cauchy: scale must be > 0");
    const double u = rng.uniform_open();
    return scale * std::tan(0.5 * kTwoPi * (u - 0.5));
}

double sample_inverse_gaussian(RngStream& rng, double mean, double shape) {
    require_finite(mean, "sample_inverse_gaussian: mean");
    require_finite(shape, "sample_inverse_gaussian: shape");
    if (!(mean > 0.0) || !(shape > 0.0))
        throw std::invalid_argument("sample_inverse_gaussian: mean and shape must be > 0");
    // Michael-Schucany-Haas transform; the small root is computed in the
    // cancellation-free form so it stays positive for large y.
    const double z = standard_normal(rng);
    const double y = z * z;
    if (y == 0.0) return mean;
    const double my = mean * y;
    const double root = std::sqrt(my * (my + 4.0 * shape));
    const double xsmall = mean * (root - my) / (root + my);
    const double u = rng.uniform01();
    if (u <= mean / (mean + xsmall)) return xsmall;
    return mean * mean / xsmall;
}

} // namespace pxshrink
