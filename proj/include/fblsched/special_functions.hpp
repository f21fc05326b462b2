#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fbl {

/// Gaussian tail probability Q(x) = P(Z > x) for Z ~ N(0,1).
inline double gaussian_q(double x) {
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

namespace detail {

// Acklam's rational approximation for the inverse standard normal CDF.
// Relative error of the raw approximation is ~1e-9; callers refine.
inline double norminv_acklam(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;

    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

inline double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

} // namespace detail

/// Inverse of gaussian_q on (0,1): returns z with Q(z) = eps.
/// Rational approximation refined by Newton steps on Q; absolute
/// accuracy well below 1e-10 over the full domain.
inline double gaussian_q_inv(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("gaussian_q_inv: probability must lie in (0,1)");
    if (eps == 0.5) return 0.0;
    // Q(z) = eps  <=>  Phi(z) = 1 - eps
    double z = -detail::norminv_acklam(eps);
    for (int i = 0; i < 2; ++i) {
        double f = gaussian_q(z) - eps;
        double df = detail::std_normal_pdf(z);
        if (df <= 0.0) break;
        double step = f / df;
        if (!std::isfinite(step)) break;
        z += step; // Q' = -pdf
    }
    return z;
}

/// Principal branch W0 of the Lambert W function: W exp(W) = z for z >= -1/e,
/// with W0(z) >= -1.  Halley iteration from a series/log initial guess;
/// residual |W e^W - z| <= ~1e-14 * max(1, |z|).
inline double lambert_w0(double z) {
    const double em1 = std::exp(-1.0); // 1/e
    if (z < -em1) {
        if (z > -em1 - 1e-12 * em1) z = -em1; // absorb rounding at the branch point
        else throw std::domain_error("lambert_w0: argument below -1/e");
    }
    if (z == 0.0) return 0.0;

    // initial guess
    double w;
    double delta = z + em1;
    if (delta < 1e-6) {
        // branch-point series in p = sqrt(2(ez+1))
        double p = std::sqrt(2.0 * std::exp(1.0) * delta);
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
        if (delta < 1e-12) return w; // iteration would divide by w+1 ~ 0
    } else if (z < 1.0) {
        // series around 0, decent up to |z| ~ 1
        w = z * (1.0 - z + 1.5 * z * z);
        if (w <= -1.0) w = -1.0 + 1e-9;
    } else {
        double lz = std::log(z);
        double llz = std::log(lz > 1e-300 ? lz : 1e-300);
        w = lz - (lz > 1.0 ? llz : 0.0);
    }

    for (int i = 0; i < 50; ++i) {
        double ew = std::exp(w);
        double f = w * ew - z;
        if (std::abs(f) <= 1e-14 * std::max(1.0, std::abs(z))) break;
        double wp1 = w + 1.0;
        // Halley step
        double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        double step = f / denom;
        if (!std::isfinite(step)) break;
        w -= step;
        if (w < -1.0) w = -1.0 + 1e-14;
    }
    return w;
}

} // namespace fbl
