#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "fblsched/special_functions.hpp"
#include "fblsched/types.hpp"

namespace fbl {

inline constexpr double kDefaultPowerTol = 1e-9;   // Algorithm-2 bisection width, watts
inline constexpr double kDefaultResidualTol = 1e-8;

namespace curve {

// Scaled rate residual
//   R(m, x) = m ln(1+x) - sqrt(m) g(x) Qinv(eps) - N ln 2,   x = p h,
// with dispersion factor g(x) = sqrt(x(x+2))/(x+1).  R = 0 is the
// finite-blocklength rate curve; R equals -m ln2 times the unscaled
// residual, so roots and implicit-derivative ratios are unchanged.

inline double dispersion(double x) {
    return std::sqrt(x * (x + 2.0)) / (x + 1.0);
}

inline double dispersion_d1(double x) {
    return 1.0 / ((x + 1.0) * (x + 1.0) * std::sqrt(x * (x + 2.0)));
}

inline double dispersion_d2(double x) {
    double s = x * (x + 2.0);
    double xp1 = x + 1.0;
    return -(2.0 * s + xp1 * xp1) / (xp1 * xp1 * xp1 * s * std::sqrt(s));
}

inline double residual(double m, double x, double bits, double qinv) {
    return m * std::log1p(x) - std::sqrt(m) * dispersion(x) * qinv - bits * M_LN2;
}

inline double residual_dm(double m, double x, double qinv) {
    return std::log1p(x) - qinv * dispersion(x) / (2.0 * std::sqrt(m));
}

inline double residual_dx(double m, double x, double qinv) {
    return m / (x + 1.0) - qinv * std::sqrt(m) * dispersion_d1(x);
}

inline double residual_dmm(double m, double x, double qinv) {
    return qinv * dispersion(x) / (4.0 * m * std::sqrt(m));
}

inline double residual_dmx(double m, double x, double qinv) {
    return 1.0 / (x + 1.0) - qinv * dispersion_d1(x) / (2.0 * std::sqrt(m));
}

inline double residual_dxx(double m, double x, double qinv) {
    double xp1 = x + 1.0;
    return -m / (xp1 * xp1) - qinv * std::sqrt(m) * dispersion_d2(x);
}

/// Blocklength required at SNR x: the positive root of R(., x) = 0,
/// which is quadratic in sqrt(m).
inline double blocklength_at_snr(double x, double bits, double qinv) {
    double alpha = std::log1p(x);
    double beta = dispersion(x) * qinv;
    double root = (beta + std::sqrt(beta * beta + 4.0 * bits * alpha * M_LN2)) / (2.0 * alpha);
    return root * root;
}

/// Solves R(m, x) = 0 for x given m, by bisection on the monotone map
/// x -> blocklength_at_snr(x) over [xlo, xhi], then Newton-polishes the
/// residual to machine precision.  The bracket must contain the root.
inline double snr_at_blocklength_bracketed(double m, double bits, double qinv,
                                           double xlo, double xhi, double xtol) {
    for (int i = 0; i < 200 && xhi - xlo > xtol * std::max(1.0, xhi); ++i) {
        double xm = 0.5 * (xlo + xhi);
        if (xm <= xlo || xm >= xhi) break; // bracket at ulp width
        if (blocklength_at_snr(xm, bits, qinv) < m)
            xhi = xm; // more SNR than needed for m symbols
        else
            xlo = xm;
    }
    double x = 0.5 * (xlo + xhi);
    double scale = std::max(1.0, bits * M_LN2);
    for (int i = 0; i < 30; ++i) {
        double f = residual(m, x, bits, qinv);
        if (std::abs(f) <= 1e-14 * scale) break;
        if (f > 0.0) xhi = std::min(xhi, x); else xlo = std::max(xlo, x);
        double df = residual_dx(m, x, qinv);
        double xn = (df > 0.0) ? x - f / df : 0.5 * (xlo + xhi);
        if (!(xn > xlo && xn < xhi)) xn = 0.5 * (xlo + xhi);
        x = xn;
    }
    return x;
}

inline double grow_snr_bracket(double m, double bits, double qinv) {
    double xhi = 1.0;
    for (int i = 0; i < 800 && blocklength_at_snr(xhi, bits, qinv) > m; ++i) xhi *= 2.0;
    return xhi;
}

} // namespace curve

/// Residual of the finite-blocklength rate equation at (m, p):
/// dispersion penalty minus Shannon rate plus N/m.  Zero iff (m, p) lies
/// on the rate curve; decreasing in p near the curve.
inline double capacity_residual(double m, double p, const Packet& pkt) {
    double x = p * pkt.gain;
    double q = gaussian_q_inv(pkt.epsilon);
    return std::sqrt((1.0 / m) * (1.0 - 1.0 / ((x + 1.0) * (x + 1.0)))) * q / M_LN2 -
           std::log2(1.0 + x) + pkt.bits / m;
}

/// Closed-form blocklength needed at SNR x (independent of the channel gain).
inline double blocklength_of_snr(double x, const Packet& pkt) {
    return curve::blocklength_at_snr(x, pkt.bits, gaussian_q_inv(pkt.epsilon));
}

/// Closed-form blocklength needed at transmit power y (watts).
inline double blocklength_of_power(double y, const Packet& pkt) {
    return blocklength_of_snr(y * pkt.gain, pkt);
}

/// SNR on the rate curve at blocklength m; independent of the gain.
inline double snr_of_blocklength(double m, const Packet& pkt) {
    double q = gaussian_q_inv(pkt.epsilon);
    double xhi = curve::grow_snr_bracket(m, pkt.bits, q);
    return curve::snr_at_blocklength_bracketed(m, pkt.bits, q, 0.0, xhi, 1e-13);
}

/// Power function P(m): bisection over [0, P_max] testing the closed-form
/// inverse blocklength at the midpoint, then a residual polish.  Throws
/// InfeasiblePowerError when even P_max cannot deliver m symbols.
inline double power_of_blocklength(double m, const Packet& pkt, const Link& link,
                                   double power_tol = kDefaultPowerTol) {
    double q = gaussian_q_inv(pkt.epsilon);
    double m_at_pmax = curve::blocklength_at_snr(link.max_power * pkt.gain, pkt.bits, q);
    if (m < m_at_pmax * (1.0 - 1e-12))
        throw InfeasiblePowerError("power_of_blocklength: blocklength below the P_max limit");

    double plo = 0.0, phi = link.max_power;
    while (phi - plo > power_tol) {
        double pm = 0.5 * (plo + phi);
        if (curve::blocklength_at_snr(pm * pkt.gain, pkt.bits, q) < m)
            phi = pm;
        else
            plo = pm;
    }
    double x = curve::snr_at_blocklength_bracketed(m, pkt.bits, q, plo * pkt.gain,
                                                   std::max(phi, plo + power_tol) * pkt.gain, 0.0);
    return std::min(x / pkt.gain, link.max_power);
}

/// Constructs the on-curve operating point for blocklength m.
inline CapacityPoint operating_point(double m, const Packet& pkt, const Link& link,
                                     double power_tol = kDefaultPowerTol) {
    double p = power_of_blocklength(m, pkt, link, power_tol);
    return CapacityPoint{m, p, p * pkt.gain};
}

namespace curve {

// Implicit-function-theorem derivatives of the energy E(m) = m x(m)/h
// along R(m, x(m)) = 0.
struct EnergyDerivatives {
    double energy;
    double first;
    double second;
};

inline EnergyDerivatives energy_derivatives_at(double m, double x, double qinv, double gain) {
    double rm = residual_dm(m, x, qinv);
    double rx = residual_dx(m, x, qinv);
    double xp = -rm / rx;
    double rmm = residual_dmm(m, x, qinv);
    double rmx = residual_dmx(m, x, qinv);
    double rxx = residual_dxx(m, x, qinv);
    double xpp = -(rmm + 2.0 * rmx * xp + rxx * xp * xp) / rx;
    return EnergyDerivatives{m * x / gain, (x + m * xp) / gain, (2.0 * xp + m * xpp) / gain};
}

} // namespace curve

/// Transmission energy E(m) = m P(m) in watt-symbols (multiply by the
/// symbol duration for joules).
inline double energy(double m, const Packet& pkt, const Link& link) {
    return m * power_of_blocklength(m, pkt, link);
}

/// dE/dm via the implicit function theorem on the scaled residual.
inline double energy_derivative(double m, const Packet& pkt, const Link& link) {
    double q = gaussian_q_inv(pkt.epsilon);
    double x = power_of_blocklength(m, pkt, link) * pkt.gain;
    return curve::energy_derivatives_at(m, x, q, pkt.gain).first;
}

/// d2E/dm2; diagnostic and test oracle, not used by the solvers.
inline double energy_second_derivative(double m, const Packet& pkt, const Link& link) {
    double q = gaussian_q_inv(pkt.epsilon);
    double x = power_of_blocklength(m, pkt, link) * pkt.gain;
    return curve::energy_derivatives_at(m, x, q, pkt.gain).second;
}

/// Per-packet curve evaluator with a warm-started SNR solve.  Solvers call
/// it thousands of times on nearby blocklengths; Newton from the previous
/// SNR converges in a couple of steps, with the cold bracketed solve as
/// fallback.  Does not enforce the P_max limit; callers keep m >= l_k.
class CurveEval {
public:
    CurveEval(const Packet& pkt, const Link& link)
        : bits_(pkt.bits), qinv_(gaussian_q_inv(pkt.epsilon)), gain_(pkt.gain),
          pmax_(link.max_power) {}

    double snr(double m) const {
        double scale = std::max(1.0, bits_ * M_LN2);
        if (last_x_ > 0.0) {
            double x = last_x_;
            for (int i = 0; i < 12; ++i) {
                double f = curve::residual(m, x, bits_, qinv_);
                if (std::abs(f) <= 1e-13 * scale) {
                    last_x_ = x;
                    return x;
                }
                double df = curve::residual_dx(m, x, qinv_);
                if (!(df > 0.0)) break;
                double xn = x - f / df;
                if (!(xn > 0.0) || !std::isfinite(xn)) break;
                x = xn;
            }
        }
        double xhi = curve::grow_snr_bracket(m, bits_, qinv_);
        last_x_ = curve::snr_at_blocklength_bracketed(m, bits_, qinv_, 0.0, xhi, 1e-13);
        return last_x_;
    }

    double power(double m) const { return snr(m) / gain_; }
    double energy(double m) const { return m * snr(m) / gain_; }

    double energy_derivative(double m) const {
        double x = snr(m);
        return curve::energy_derivatives_at(m, x, qinv_, gain_).first;
    }

    curve::EnergyDerivatives derivatives(double m) const {
        return curve::energy_derivatives_at(m, snr(m), qinv_, gain_);
    }

    double max_power() const { return pmax_; }

private:
    double bits_, qinv_, gain_, pmax_;
    mutable double last_x_ = -1.0;
};

} // namespace fbl
