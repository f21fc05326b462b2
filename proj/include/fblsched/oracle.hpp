#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "fblsched/capacity.hpp"
#include "fblsched/instance.hpp"
#include "fblsched/schedule.hpp"

namespace fbl {

/// Exhaustive search over blocklengths on a uniform cumulative grid,
/// subject to every corridor and box constraint (dynamic program over the
/// lattice of cumulative finish times; the final packet absorbs the exact
/// off-lattice total D_K).  Validation oracle for the solvers; K <= 4.
inline Schedule brute_force_oracle(const ProblemInstance& inst, double resolution = 1.0) {
    const std::size_t K = inst.size();
    if (K > 4) throw Error("brute_force_oracle: K must be <= 4");
    if (!(resolution > 0)) throw Error("brute_force_oracle: resolution must be > 0");
    const double r = resolution;
    const double total = inst.packets.back().deadline;
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<CurveEval> evals;
    evals.reserve(K);
    for (std::size_t k = 0; k < K; ++k) evals.emplace_back(inst.packets[k], inst.link);

    auto energy_at = [&](std::size_t k, double m) { return evals[k].energy(m); };

    std::vector<double> best_m;
    double best_obj = inf;

    if (K == 1) {
        if (total >= inst.lower[0] - 1e-9 && total <= inst.upper[0] + 1e-9) {
            best_m = {total};
            best_obj = energy_at(0, total);
        }
    } else {
        // lattice index i <-> cumulative time i*r
        auto lo_idx = [&](std::size_t k) {
            return static_cast<long>(std::ceil(inst.next_arrival(k) / r - 1e-12));
        };
        auto hi_idx = [&](std::size_t k) {
            return static_cast<long>(std::floor(inst.deadline(k) / r + 1e-12));
        };

        // per-packet energy tables on the lattice of feasible m = d*r
        std::vector<long> dmin(K), dmax(K);
        std::vector<std::vector<double>> etab(K);
        for (std::size_t k = 0; k + 1 < K; ++k) {
            dmin[k] = static_cast<long>(std::ceil(inst.lower[k] / r - 1e-12));
            dmax[k] = static_cast<long>(std::floor(inst.upper[k] / r + 1e-12));
            if (dmax[k] < dmin[k]) throw InfeasibleError("brute_force_oracle: empty grid");
            etab[k].resize(static_cast<std::size_t>(dmax[k] - dmin[k] + 1));
            for (long d = dmin[k]; d <= dmax[k]; ++d)
                etab[k][static_cast<std::size_t>(d - dmin[k])] = energy_at(k, d * r);
        }

        std::vector<std::vector<double>> dp(K - 1);
        std::vector<std::vector<long>> from(K - 1);
        for (std::size_t k = 0; k + 1 < K; ++k) {
            long lo = lo_idx(k), hi = hi_idx(k);
            dp[k].assign(static_cast<std::size_t>(std::max<long>(hi - lo + 1, 0)), inf);
            from[k].assign(dp[k].size(), -1);
            for (long i = lo; i <= hi; ++i) {
                if (k == 0) {
                    long d = i; // previous cumulative is 0
                    if (d < dmin[0] || d > dmax[0]) continue;
                    dp[0][static_cast<std::size_t>(i - lo)] =
                        etab[0][static_cast<std::size_t>(d - dmin[0])];
                } else {
                    long plo = lo_idx(k - 1), phi = hi_idx(k - 1);
                    long jlo = std::max(plo, i - dmax[k]);
                    long jhi = std::min(phi, i - dmin[k]);
                    double best = inf;
                    long arg = -1;
                    for (long j = jlo; j <= jhi; ++j) {
                        double prev = dp[k - 1][static_cast<std::size_t>(j - plo)];
                        if (prev == inf) continue;
                        double cand = prev + etab[k][static_cast<std::size_t>(i - j - dmin[k])];
                        if (cand < best) { best = cand; arg = j; }
                    }
                    dp[k][static_cast<std::size_t>(i - lo)] = best;
                    from[k][static_cast<std::size_t>(i - lo)] = arg;
                }
            }
        }

        // last packet takes the exact remainder to D_K
        long arg_last = -1;
        for (long j = lo_idx(K - 2); j <= hi_idx(K - 2); ++j) {
            double prev = dp[K - 2][static_cast<std::size_t>(j - lo_idx(K - 2))];
            if (prev == inf) continue;
            double mk = total - j * r;
            if (mk < inst.lower[K - 1] - 1e-9 || mk > inst.upper[K - 1] + 1e-9) continue;
            double cand = prev + energy_at(K - 1, mk);
            if (cand < best_obj) { best_obj = cand; arg_last = j; }
        }
        if (arg_last >= 0) {
            std::vector<long> cum_idx(K - 1);
            cum_idx[K - 2] = arg_last;
            for (std::size_t k = K - 2; k > 0; --k)
                cum_idx[k - 1] =
                    from[k][static_cast<std::size_t>(cum_idx[k] - lo_idx(k))];
            best_m.assign(K, 0.0);
            double prev = 0.0;
            for (std::size_t k = 0; k + 1 < K; ++k) {
                best_m[k] = cum_idx[k] * r - prev;
                prev = cum_idx[k] * r;
            }
            best_m[K - 1] = total - prev;
        }
    }

    if (best_m.empty()) throw InfeasibleError("brute_force_oracle: no feasible grid point");

    Schedule sched;
    sched.blocklengths = best_m;
    sched.mu.assign(K, 0.0);
    sched.lambda.assign(K, 0.0);
    sched.omega.assign(K, 0.0);
    sched.solver = "brute-force";
    sched.kkt_residual = std::numeric_limits<double>::quiet_NaN();
    double cum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        double p = power_of_blocklength(best_m[k], inst.packets[k], inst.link);
        sched.powers.push_back(p);
        sched.energies.push_back(best_m[k] * p);
        sched.objective += best_m[k] * p;
        cum += best_m[k];
        sched.finish_times.push_back(cum);
    }
    return sched;
}

} // namespace fbl
