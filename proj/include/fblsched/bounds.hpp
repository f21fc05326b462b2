#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "fblsched/capacity.hpp"
#include "fblsched/special_functions.hpp"
#include "fblsched/types.hpp"

namespace fbl {

/// tau = Qinv(eps) / sqrt(m_hat); governs both blocklength thresholds.
inline double tau_parameter(const Packet& pkt, const Link& link) {
    return gaussian_q_inv(pkt.epsilon) / std::sqrt(link.min_blocklength);
}

/// Largest blocklength up to which the energy function is provably
/// decreasing: g_E = X^-1(x*) with x* = -1/W0(-exp(-1 - tau/2)) - 1.
/// Independent of the channel gain.  +infinity at eps = 0.5 (tau = 0).
inline double monotone_energy_bound(const Packet& pkt, const Link& link) {
    double tau = tau_parameter(pkt, link);
    double w = lambert_w0(-std::exp(-1.0 - 0.5 * tau));
    double xstar = -1.0 / w - 1.0;
    if (!(xstar > 1e-300)) return std::numeric_limits<double>::infinity();
    return blocklength_of_snr(xstar, pkt);
}

inline double convexity_eta(double tau) {
    double root3 = std::sqrt(3.0);
    return (3.0 + std::sqrt(9.0 + 12.0 * tau * (1.0 - root3 * tau))) / (4.0 * (1.0 - root3 * tau));
}

/// Largest blocklength up to which the energy function is provably
/// strictly convex: g_C = X^-1(exp(eta(tau) + tau/2) - 1).  Requires
/// tau < sqrt(3)/3; tau = 0 returns the eta(0) = 3/2 limit.
inline double convexity_bound(const Packet& pkt, const Link& link) {
    double tau = tau_parameter(pkt, link);
    if (!(tau >= 0.0 && tau < std::sqrt(3.0) / 3.0))
        throw TauOutOfRangeError("convexity_bound: tau outside [0, sqrt(3)/3)");
    double xc = std::exp(convexity_eta(tau) + 0.5 * tau) - 1.0;
    return blocklength_of_snr(xc, pkt);
}

/// Error-probability interval on which the convexity threshold exists for
/// a given minimum blocklength: (Q(sqrt(3 m_hat)/3), 0.5).
inline std::pair<double, double> epsilon_validity_interval(double min_blocklength) {
    return {gaussian_q(std::sqrt(3.0 * min_blocklength) / 3.0), 0.5};
}

/// Per-packet blocklength box.
struct BlocklengthBounds {
    double lower = 0;          // l = max(m_hat, m_tilde)
    double power_limited = 0;  // m_tilde = P^-1(P_max)
    double monotone_upper = 0; // g_E
    std::optional<double> convex_upper; // g_C, present when tau < sqrt(3)/3
    double tau = 0;

    double upper(bool convex_mode) const {
        if (convex_mode && convex_upper)
            return std::min(monotone_upper, *convex_upper);
        return monotone_upper;
    }
};

inline BlocklengthBounds compute_bounds(const Packet& pkt, const Link& link) {
    BlocklengthBounds b;
    b.tau = tau_parameter(pkt, link);
    b.power_limited = blocklength_of_power(link.max_power, pkt);
    b.lower = std::max(link.min_blocklength, b.power_limited);
    b.monotone_upper = monotone_energy_bound(pkt, link);
    if (b.tau >= 0.0 && b.tau < std::sqrt(3.0) / 3.0)
        b.convex_upper = convexity_bound(pkt, link);
    return b;
}

} // namespace fbl
