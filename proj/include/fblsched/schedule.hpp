#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fblsched/capacity.hpp"
#include "fblsched/instance.hpp"

namespace fbl {

/// Solver output: per-packet blocklengths/powers/energies plus the dual
/// certificate (multipliers of the causality and deadline constraints and
/// the per-packet water levels omega_k = sum_{i>=k}(mu_i - lambda_i)).
struct Schedule {
    enum class Status { Converged, MaxIterations };

    std::vector<double> blocklengths;  // m_k, symbols
    std::vector<double> powers;        // p_k, watts
    std::vector<double> energies;      // m_k p_k, watt-symbols
    std::vector<double> finish_times;  // cumulative sums of m
    std::vector<double> mu;            // duals of sum m_i >= G_{k+1}
    std::vector<double> lambda;        // duals of sum m_i <= D_k
    std::vector<double> omega;         // water levels
    double objective = 0;              // total watt-symbols
    double kkt_residual = 0;
    Status status = Status::Converged;
    int iterations = 0;
    std::string solver;

    std::size_t size() const { return blocklengths.size(); }
};

/// Total transmission energy in joules: sum of m_k T_s p_k.
inline double energy_joules(const Schedule& sched, const Link& link) {
    return sched.objective * link.symbol_duration;
}

/// Maximum KKT violation of a schedule-with-duals: primal feasibility,
/// dual sign, complementary slackness, stationarity E'(m_k) = omega_k on
/// coordinates strictly inside the box, and the one-sided marginal
/// conditions on clipped coordinates.
inline double kkt_residual(const ProblemInstance& inst, const Schedule& sched) {
    const std::size_t K = inst.size();
    double res = 0.0;
    double cum = 0.0;
    const double box_tol = 1e-7;

    // omega from the duals
    std::vector<double> omega(K);
    double acc = 0.0;
    for (std::size_t k = K; k-- > 0;) {
        acc += sched.mu[k] - sched.lambda[k];
        omega[k] = acc;
    }

    for (std::size_t k = 0; k < K; ++k) {
        double m = sched.blocklengths[k];
        cum += m;
        res = std::max(res, inst.next_arrival(k) - cum);       // causality
        res = std::max(res, cum - inst.deadline(k));           // deadline
        res = std::max(res, inst.lower[k] - m);                // box
        res = std::max(res, m - inst.upper[k]);
        res = std::max(res, -sched.mu[k]);                     // dual signs
        res = std::max(res, -sched.lambda[k]);
        res = std::max(res, std::abs(sched.mu[k] * (cum - inst.next_arrival(k))));
        res = std::max(res, std::abs(sched.lambda[k] * (cum - inst.deadline(k))));

        double deriv = energy_derivative(m, inst.packets[k], inst.link);
        bool at_lower = m <= inst.lower[k] + box_tol;
        bool at_upper = m >= inst.upper[k] - box_tol;
        if (!at_lower && !at_upper)
            res = std::max(res, std::abs(deriv - omega[k]));
        else if (at_lower && !at_upper)
            res = std::max(res, omega[k] - deriv); // need E'(l) >= omega
        else if (at_upper && !at_lower)
            res = std::max(res, deriv - omega[k]); // need E'(u) <= omega
    }
    return std::max(res, 0.0);
}

} // namespace fbl
