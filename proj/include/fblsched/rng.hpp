#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace fbl {

namespace detail {

// SplitMix64; used only to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Substream seed derived from (master seed, stream tag, trial index);
/// trials are reproducible independently and in any order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
    std::uint64_t s = master;
    detail::splitmix64(s);
    s ^= 0x6a09e667f3bcc909ULL * (stream + 1);
    detail::splitmix64(s);
    s ^= 0xbb67ae8584caa73bULL * (index + 1);
    return detail::splitmix64(s);
}

/// mt19937_64 with an explicit uniform(0,1) transform; all samplers below
/// are inverse-CDF so streams are bit-reproducible across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double u01() {
        // 53-bit mantissa uniform in [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 eng_;
};

/// Exponential distribution truncated to [a, b], rate solved so the
/// truncated mean hits a prescribed target; the rate may take either sign
/// and degenerates to the uniform distribution at zero.
class TruncatedExponential {
public:
    TruncatedExponential(double a, double b, double rate) : a_(a), b_(b), rate_(rate) {
        if (!(b > a)) throw std::invalid_argument("truncated exponential: empty window");
    }

    /// Solves for the rate with the given truncated mean (monotone in the
    /// rate; bisection).  The mean must lie strictly inside (a, b).
    static TruncatedExponential with_mean(double a, double b, double mean) {
        if (!(mean > a && mean < b))
            throw std::invalid_argument("truncated exponential: mean outside window");
        double lo = -700.0 / (b - a), hi = 700.0 / (b - a);
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            if (truncated_mean(a, b, mid) > mean)
                lo = mid; // mean decreases with the rate
            else
                hi = mid;
        }
        return TruncatedExponential(a, b, 0.5 * (lo + hi));
    }

    double sample(Rng& rng) const { return quantile(rng.u01()); }

    double quantile(double u) const {
        double c = b_ - a_;
        if (std::abs(rate_ * c) < 1e-10) {
            return a_ + u * c; // uniform limit
        }
        double w = -std::expm1(-rate_ * c); // 1 - e^{-rate c}
        return a_ - std::log1p(-u * w) / rate_;
    }

    double cdf(double v) const {
        if (v <= a_) return 0.0;
        if (v >= b_) return 1.0;
        double c = b_ - a_;
        if (std::abs(rate_ * c) < 1e-10) return (v - a_) / c;
        return std::expm1(-rate_ * (v - a_)) / std::expm1(-rate_ * c);
    }

    double mean() const { return truncated_mean(a_, b_, rate_); }
    double rate() const { return rate_; }
    double lower() const { return a_; }
    double upper() const { return b_; }

    static double truncated_mean(double a, double b, double rate) {
        double c = b - a;
        double s = rate * c;
        if (std::abs(s) < 1e-6) // series around the uniform limit
            return a + c * (0.5 - s / 12.0 + s * s * s / 720.0);
        return a + 1.0 / rate - c / std::expm1(s);
    }

private:
    double a_, b_, rate_;
};

/// Squared-Rayleigh channel gain h = |h~|^2 with |h~| ~ Rayleigh(sigma):
/// exponential with mean 2 sigma^2.
inline double sample_squared_rayleigh(Rng& rng, double sigma) {
    double u = rng.u01();
    return -2.0 * sigma * sigma * std::log1p(-u);
}

} // namespace fbl
