#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fblsched/special_functions.hpp"
#include "fblsched/types.hpp"

namespace fbl {

// Closed forms of the Shannon-capacity limit (eps = 0.5, vanishing
// dispersion term).  Used as the reference design and as cross-checks for
// the implicit finite-blocklength path.

/// P(m) = (2^{N/m} - 1)/h
inline double shannon_power(double m, const Packet& pkt) {
    return std::expm1(pkt.bits * M_LN2 / m) / pkt.gain;
}

/// E(m) = m (2^{N/m} - 1)/h
inline double shannon_energy(double m, const Packet& pkt) {
    return m * shannon_power(m, pkt);
}

/// E'(m) = (2^{N/m}(1 - N ln2 / m) - 1)/h
inline double shannon_energy_derivative(double m, const Packet& pkt) {
    double L = pkt.bits * M_LN2 / m;
    return (std::exp(L) * (1.0 - L) - 1.0) / pkt.gain;
}

/// E''(m) = (N ln2)^2 2^{N/m} / (h m^3)
inline double shannon_energy_second_derivative(double m, const Packet& pkt) {
    double c = pkt.bits * M_LN2;
    return c * c * std::exp(c / m) / (pkt.gain * m * m * m);
}

/// Inverse marginal energy: the m with E'(m) = omega,
/// phi(omega) = N ln2 / (1 + W0(-(omega h + 1)/e)).
inline double shannon_phi(double omega, const Packet& pkt) {
    double z = -(omega * pkt.gain + 1.0) / std::exp(1.0);
    if (z < -std::exp(-1.0) * (1.0 + 1e-12))
        throw std::domain_error("shannon_phi: W argument below -1/e (omega > 0)");
    double denom = 1.0 + lambert_w0(z);
    if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
    return pkt.bits * M_LN2 / denom;
}

} // namespace fbl
