#pragma once

#include <cstdint>
#include <vector>

#include "fblsched/online.hpp"
#include "fblsched/solver.hpp"
#include "fblsched/traffic.hpp"

namespace fbl {

// Substream tags; trial draws depend only on (seed, tag, index), so grid
// sweeps see common random numbers across grid points.
inline constexpr std::uint64_t kStreamGaps = 1;
inline constexpr std::uint64_t kStreamLifetimes = 2;
inline constexpr std::uint64_t kStreamChannel = 3;

struct TrialOutcome {
    std::size_t channel_realization = 0;
    std::size_t packet_realization = 0;
    bool feasible = false; // both designs solvable
    double energy_fbl_j = 0;
    double energy_shannon_j = 0;
};

/// Aggregates for one grid point of the energy-underestimation experiment.
struct SweepPoint {
    double epsilon = 0, nu = 0, n = 0, sigma = 0;
    std::size_t trials_total = 0, trials_valid = 0;
    double mean_energy_fbl_j = 0;
    double mean_energy_shannon_j = 0;
    double underestimated_j = 0;   // mean_fbl - mean_shannon
    double underestimated_pct = 0; // share of the finite-blocklength energy
    std::vector<TrialOutcome> trials;
};

struct SweepConfig {
    TrafficModel traffic;
    ChannelModel channel;
    Link link;
    SolverConfig solver;
    std::size_t channel_realizations = 20;
    std::size_t packet_realizations = 20;
    std::uint64_t seed = 1;
    bool keep_trials = true;
    // empty grid => the base value
    std::vector<double> epsilon_grid, nu_grid, n_grid, sigma_grid;
};

namespace detail {

inline std::vector<double> grid_or(const std::vector<double>& grid, double base) {
    return grid.empty() ? std::vector<double>{base} : grid;
}

/// Solves one generated instance at its target epsilon and at the
/// epsilon = 0.5 Shannon reference; false when either design is infeasible.
inline bool solve_both_designs(const ProblemInstance& inst, const SolverConfig& solver,
                               double& fbl_j, double& shannon_j) {
    try {
        Schedule s = solver.mode == SolverConfig::Mode::Sum ? solve_sum(inst, solver)
                                                            : solve_mlwf(inst, solver);
        fbl_j = energy_joules(s, inst.link);

        std::vector<Packet> ref = inst.packets;
        for (Packet& p : ref) p.epsilon = 0.5;
        ProblemInstance ref_inst = validate_instance(std::move(ref), inst.link, inst.mode);
        Schedule sref = solver.mode == SolverConfig::Mode::Sum ? solve_sum(ref_inst, solver)
                                                               : solve_mlwf(ref_inst, solver);
        shannon_j = energy_joules(sref, ref_inst.link);
        return true;
    } catch (const InfeasibleError&) {
        return false;
    }
}

} // namespace detail

/// Monte-Carlo sweep over a parameter grid: every grid point solves every
/// trial at the target epsilon and at the epsilon = 0.5 reference design,
/// and reports the energy the reference underestimates.  Deterministic
/// under the master seed; infeasible trials are excluded from the means
/// and counted.
inline std::vector<SweepPoint> run_sweep(const SweepConfig& cfg) {
    std::vector<SweepPoint> points;
    for (double eps : detail::grid_or(cfg.epsilon_grid, cfg.traffic.epsilon))
        for (double nu : detail::grid_or(cfg.nu_grid, cfg.traffic.nu))
            for (double n : detail::grid_or(cfg.n_grid, cfg.traffic.n))
                for (double sigma : detail::grid_or(cfg.sigma_grid, cfg.channel.sigma)) {
                    SweepPoint pt;
                    pt.epsilon = eps;
                    pt.nu = nu;
                    pt.n = n;
                    pt.sigma = sigma;

                    TrafficModel traffic = cfg.traffic;
                    traffic.epsilon = eps;
                    traffic.nu = nu;
                    traffic.n = n;
                    ChannelModel channel = cfg.channel;
                    channel.sigma = sigma;

                    double sum_fbl = 0, sum_sh = 0;
                    for (std::size_t c = 0; c < cfg.channel_realizations; ++c)
                        for (std::size_t t = 0; t < cfg.packet_realizations; ++t) {
                            std::size_t trial = c * cfg.packet_realizations + t;
                            Rng gap_rng(derive_seed(cfg.seed, kStreamGaps, trial));
                            Rng life_rng(derive_seed(cfg.seed, kStreamLifetimes, trial));
                            Rng chan_rng(derive_seed(cfg.seed, kStreamChannel, c));

                            TrialOutcome out;
                            out.channel_realization = c;
                            out.packet_realization = t;
                            ProblemInstance inst = gen_instance(traffic, channel, cfg.link,
                                                                gap_rng, life_rng, chan_rng);
                            out.feasible = detail::solve_both_designs(
                                inst, cfg.solver, out.energy_fbl_j, out.energy_shannon_j);
                            ++pt.trials_total;
                            if (out.feasible) {
                                ++pt.trials_valid;
                                sum_fbl += out.energy_fbl_j;
                                sum_sh += out.energy_shannon_j;
                            }
                            if (cfg.keep_trials) pt.trials.push_back(out);
                        }
                    if (pt.trials_valid > 0) {
                        pt.mean_energy_fbl_j = sum_fbl / pt.trials_valid;
                        pt.mean_energy_shannon_j = sum_sh / pt.trials_valid;
                        pt.underestimated_j = pt.mean_energy_fbl_j - pt.mean_energy_shannon_j;
                        pt.underestimated_pct =
                            100.0 * pt.underestimated_j / pt.mean_energy_fbl_j;
                    }
                    points.push_back(std::move(pt));
                }
    return points;
}

struct PolicyTrial {
    bool valid = false; // all four policies completed without drops
    double offline_mlwf_j = 0;
    double offline_sum_j = 0;
    double rolling_j = 0;
    double myopic_j = 0;
};

struct PolicyPoint {
    double sigma = 0;
    std::size_t trials_total = 0, trials_valid = 0;
    double mean_offline_mlwf_j = 0;
    double mean_offline_sum_j = 0;
    double mean_rolling_j = 0;
    double mean_myopic_j = 0;
    std::vector<PolicyTrial> trials;
};

struct PolicyConfig {
    TrafficModel traffic{.nu = 4.0, .n = 10.0, .packet_count = 10, .pre_arrived = 3};
    ChannelModel channel;
    Link link;
    SolverConfig solver;
    std::vector<double> sigma_grid{40.0, 80.0, 160.0};
    std::size_t trials = 300;
    std::uint64_t seed = 1;
};

/// Offline (MLWF, SUM) versus online (rolling window, myopic) energies
/// over a sigma sweep.  A trial enters the means only when every policy
/// completes it; trial indices line up across sigma values (common random
/// numbers), so per-sigma records are directly comparable.
inline std::vector<PolicyPoint> compare_policies(const PolicyConfig& cfg) {
    std::vector<PolicyPoint> points;
    for (double sigma : cfg.sigma_grid) {
        PolicyPoint pt;
        pt.sigma = sigma;
        ChannelModel channel = cfg.channel;
        channel.sigma = sigma;

        double s_mlwf = 0, s_sum = 0, s_roll = 0, s_myopic = 0;
        for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
            Rng gap_rng(derive_seed(cfg.seed, kStreamGaps, trial));
            Rng life_rng(derive_seed(cfg.seed, kStreamLifetimes, trial));
            Rng chan_rng(derive_seed(cfg.seed, kStreamChannel, trial));

            PolicyTrial rec;
            ProblemInstance inst =
                gen_instance(cfg.traffic, channel, cfg.link, gap_rng, life_rng, chan_rng);
            try {
                Schedule mlwf = solve_mlwf(inst, cfg.solver);
                Schedule sum = solve_sum(inst, cfg.solver);
                OnlineResult roll =
                    run_online(inst.packets, cfg.link, OnlinePolicy::RollingWindow, cfg.solver);
                OnlineResult myo =
                    run_online(inst.packets, cfg.link, OnlinePolicy::Myopic, cfg.solver);
                if (roll.complete() && myo.complete()) {
                    rec.valid = true;
                    rec.offline_mlwf_j = energy_joules(mlwf, cfg.link);
                    rec.offline_sum_j = energy_joules(sum, cfg.link);
                    rec.rolling_j = roll.energy_joules;
                    rec.myopic_j = myo.energy_joules;
                }
            } catch (const InfeasibleError&) {
                rec.valid = false;
            }
            ++pt.trials_total;
            if (rec.valid) {
                ++pt.trials_valid;
                s_mlwf += rec.offline_mlwf_j;
                s_sum += rec.offline_sum_j;
                s_roll += rec.rolling_j;
                s_myopic += rec.myopic_j;
            }
            pt.trials.push_back(rec);
        }
        if (pt.trials_valid > 0) {
            pt.mean_offline_mlwf_j = s_mlwf / pt.trials_valid;
            pt.mean_offline_sum_j = s_sum / pt.trials_valid;
            pt.mean_rolling_j = s_roll / pt.trials_valid;
            pt.mean_myopic_j = s_myopic / pt.trials_valid;
        }
        points.push_back(std::move(pt));
    }
    return points;
}

} // namespace fbl
