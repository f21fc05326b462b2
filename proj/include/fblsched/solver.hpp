#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "fblsched/capacity.hpp"
#include "fblsched/instance.hpp"
#include "fblsched/schedule.hpp"

namespace fbl {

struct SolverConfig {
    enum class Mode { Mlwf, Sum };
    Mode mode = Mode::Mlwf;
    double eps1 = 1e-6;   // blocklength bisection width (symbols)
    double eps2 = 1e-9;   // power bisection width (watts)
    double kkt_tol = 1e-5;
    double sum_gamma = 0.0;        // <= 0: finite-difference estimate at the start point
    double sum_stop = 1e-10;       // stop when sum |m^r - m^{r-1}|^2 falls below
    int sum_max_iterations = 20000;
    double oracle_resolution = 1.0; // symbols
    std::vector<double>* sum_objective_trace = nullptr; // per-iteration objective, for tests
};

/// Inverse marginal energy phi(omega): the m in [l, min(u, D-G)] with
/// E'(m) = omega, clipped at the interval ends.  Bisection on the
/// monotone (convex-region) marginal.
inline double phi(double omega, const Packet& pkt, const Link& link,
                  const SolverConfig& cfg = {}) {
    BlocklengthBounds b = compute_bounds(pkt, link);
    double lo = b.lower;
    double hi = std::min(b.upper(true), pkt.deadline - pkt.arrival);
    CurveEval eval(pkt, link);
    double flo = eval.energy_derivative(lo);
    double fhi = eval.energy_derivative(hi);
    if (omega <= flo) return lo;
    if (omega >= fhi) return hi;
    while (hi - lo > cfg.eps1) {
        double mid = 0.5 * (lo + hi);
        double fmid = eval.energy_derivative(mid);
        if (fmid > omega) {
            hi = mid;
            fhi = fmid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    if (fhi > flo) {
        double t = (omega - flo) / (fhi - flo);
        if (t > 0.0 && t < 1.0) return lo + t * (hi - lo);
    }
    return 0.5 * (lo + hi);
}

namespace waterfill {

/// Separable strictly-increasing marginal cost model over the packet
/// boxes; the water-filling machinery is shared by the exact energy
/// objective (MLWF) and the proximal quadratic subproblem (SUM).
class MarginalModel {
public:
    virtual ~MarginalModel() = default;
    virtual double marginal(std::size_t k, double m) = 0;
    /// Inverse of the marginal within [lo, hi]; caller guarantees
    /// marginal(lo) <= omega <= marginal(hi).
    virtual double inverse(std::size_t k, double omega, double lo, double hi) = 0;
    virtual double marginal_lo(std::size_t k) = 0;
    virtual double marginal_hi(std::size_t k) = 0;
};

class EnergyMarginal : public MarginalModel {
public:
    EnergyMarginal(const ProblemInstance& inst, const SolverConfig& cfg) : cfg_(cfg) {
        evals_.reserve(inst.size());
        for (std::size_t k = 0; k < inst.size(); ++k)
            evals_.emplace_back(inst.packets[k], inst.link);
        mlo_.assign(inst.size(), 0.0);
        mhi_.assign(inst.size(), 0.0);
        for (std::size_t k = 0; k < inst.size(); ++k) {
            mlo_[k] = evals_[k].energy_derivative(inst.lower[k]);
            mhi_[k] = evals_[k].energy_derivative(inst.upper[k]);
        }
    }

    double marginal(std::size_t k, double m) override { return evals_[k].energy_derivative(m); }

    double inverse(std::size_t k, double omega, double lo, double hi) override {
        double flo = mlo_[k], fhi = mhi_[k];
        while (hi - lo > cfg_.eps1) {
            double mid = 0.5 * (lo + hi);
            double fmid = evals_[k].energy_derivative(mid);
            if (fmid > omega) {
                hi = mid;
                fhi = fmid;
            } else {
                lo = mid;
                flo = fmid;
            }
        }
        // interpolating the final bracket keeps the stationarity residual
        // far below the bisection width even on steep (low-gain) curves
        if (fhi > flo) {
            double t = (omega - flo) / (fhi - flo);
            if (t > 0.0 && t < 1.0) return lo + t * (hi - lo);
        }
        return 0.5 * (lo + hi);
    }

    double marginal_lo(std::size_t k) override { return mlo_[k]; }
    double marginal_hi(std::size_t k) override { return mhi_[k]; }

    CurveEval& eval(std::size_t k) { return evals_[k]; }

private:
    SolverConfig cfg_;
    std::vector<CurveEval> evals_;
    std::vector<double> mlo_, mhi_;
};

/// Marginal of the proximal upper bound U_k(m; a_k) = E_k(a_k) +
/// E_k'(a_k)(m - a_k) + gamma/2 (m - a_k)^2.
class QuadraticMarginal : public MarginalModel {
public:
    QuadraticMarginal(const ProblemInstance& inst, const std::vector<double>& anchor,
                      const std::vector<double>& anchor_grad, double gamma)
        : anchor_(anchor), grad_(anchor_grad), gamma_(gamma) {
        mlo_.resize(inst.size());
        mhi_.resize(inst.size());
        for (std::size_t k = 0; k < inst.size(); ++k) {
            mlo_[k] = marginal(k, inst.lower[k]);
            mhi_[k] = marginal(k, inst.upper[k]);
        }
    }

    double marginal(std::size_t k, double m) override {
        return grad_[k] + gamma_ * (m - anchor_[k]);
    }
    double inverse(std::size_t k, double omega, double lo, double hi) override {
        return std::clamp(anchor_[k] + (omega - grad_[k]) / gamma_, lo, hi);
    }
    double marginal_lo(std::size_t k) override { return mlo_[k]; }
    double marginal_hi(std::size_t k) override { return mhi_[k]; }

private:
    const std::vector<double>& anchor_;
    const std::vector<double>& grad_;
    double gamma_;
    std::vector<double> mlo_, mhi_;
};

struct Pin {
    double value;
    int kind; // +1 causality floor, -1 deadline ceiling, 2 pinched total
};

struct LadderSolution {
    std::vector<double> m;
    std::vector<double> omega; // per packet
    std::map<std::size_t, Pin> pins;
    std::vector<double> mu, lambda;
};

class LadderSolver {
public:
    LadderSolver(const ProblemInstance& inst, MarginalModel& model, const SolverConfig& cfg)
        : inst_(inst), model_(model), cfg_(cfg) {}

    LadderSolution solve() {
        const std::size_t K = inst_.size();
        LadderSolution sol;
        sol.m.assign(K, 0.0);
        sol.omega.assign(K, 0.0);
        sol.pins[K - 1] = Pin{inst_.packets.back().deadline, 2};

        const int max_rounds = static_cast<int>(4 * K + 8);
        for (int round = 0; round < max_rounds; ++round) {
            refill_all(sol);
            recover_duals(sol);
            if (!drop_worst_negative_dual(sol)) return sol;
        }
        throw Error("water-filling: pinned-constraint search did not settle");
    }

private:
    // Fill every segment between consecutive pins, recursing on the most
    // violated interior corridor constraint inside each segment.
    void refill_all(LadderSolution& sol) {
        std::vector<std::pair<std::size_t, Pin>> snapshot(sol.pins.begin(), sol.pins.end());
        std::size_t s = 0;
        double cum_start = 0.0;
        for (const auto& [idx, pin] : snapshot) {
            fill_recursive(sol, s, idx, cum_start, pin.value);
            s = idx + 1;
            cum_start = pin.value;
        }
    }

    void fill_recursive(LadderSolution& sol, std::size_t s, std::size_t e, double cum_start,
                        double cum_end) {
        fill_segment(sol, s, e, cum_end - cum_start);

        // most violated interior constraint; leftmost wins ties
        const double pin_tol = 1e-9;
        double worst = pin_tol;
        std::size_t worst_k = e;
        int worst_kind = 0;
        double cum = cum_start;
        for (std::size_t k = s; k < e; ++k) {
            cum += sol.m[k];
            double vfloor = inst_.next_arrival(k) - cum;
            double vceil = cum - inst_.deadline(k);
            if (vfloor > worst) { worst = vfloor; worst_k = k; worst_kind = +1; }
            if (vceil > worst) { worst = vceil; worst_k = k; worst_kind = -1; }
        }
        if (worst_k == e) return;

        double bound = worst_kind > 0 ? inst_.next_arrival(worst_k) : inst_.deadline(worst_k);
        sol.pins[worst_k] = Pin{bound, worst_kind};
        fill_recursive(sol, s, worst_k, cum_start, bound);
        fill_recursive(sol, worst_k + 1, e, bound, cum_end);
    }

    // Single water level for packets [s..e] with a fixed total budget:
    // bisection on omega so that sum clip(phi_k(omega)) meets the budget,
    // then an exact redistribution of the residual mismatch.
    void fill_segment(LadderSolution& sol, std::size_t s, std::size_t e, double budget) {
        double sum_lo = 0.0, sum_hi = 0.0;
        double wlo = std::numeric_limits<double>::infinity();
        double whi = -std::numeric_limits<double>::infinity();
        for (std::size_t k = s; k <= e; ++k) {
            sum_lo += inst_.lower[k];
            sum_hi += inst_.upper[k];
            wlo = std::min(wlo, model_.marginal_lo(k));
            whi = std::max(whi, model_.marginal_hi(k));
        }
        const double edge = 1e-7;
        if (budget < sum_lo - 1e-6 || budget > sum_hi + 1e-6)
            throw InfeasibleError("water-filling: segment budget outside box sums");

        if (clip_state_.size() != inst_.size()) clip_state_.assign(inst_.size(), 0);
        double omega;
        if (budget <= sum_lo + edge) {
            for (std::size_t k = s; k <= e; ++k) {
                sol.m[k] = inst_.lower[k];
                clip_state_[k] = -1;
            }
            omega = wlo;
        } else if (budget >= sum_hi - edge) {
            for (std::size_t k = s; k <= e; ++k) {
                sol.m[k] = inst_.upper[k];
                clip_state_[k] = +1;
            }
            omega = whi;
        } else {
            double target = 0.25 * cfg_.eps1;
            for (int i = 0; i < 200; ++i) {
                omega = 0.5 * (wlo + whi);
                double total = assign(sol, s, e, omega);
                if (std::abs(total - budget) <= target) break;
                if (total > budget) whi = omega; else wlo = omega;
                if (whi - wlo <= 1e-14 * (1.0 + std::abs(wlo) + std::abs(whi))) break;
            }
            assign(sol, s, e, omega);
        }
        redistribute(sol, s, e, budget);
        for (std::size_t k = s; k <= e; ++k) sol.omega[k] = omega;
    }

    double assign(LadderSolution& sol, std::size_t s, std::size_t e, double omega) {
        if (clip_state_.size() != inst_.size()) clip_state_.assign(inst_.size(), 0);
        double total = 0.0;
        for (std::size_t k = s; k <= e; ++k) {
            double lo = inst_.lower[k], hi = inst_.upper[k];
            double m;
            if (omega <= model_.marginal_lo(k)) {
                m = lo;
                clip_state_[k] = -1;
            } else if (omega >= model_.marginal_hi(k)) {
                m = hi;
                clip_state_[k] = +1;
            } else {
                m = model_.inverse(k, omega, lo, hi);
                clip_state_[k] = 0;
            }
            sol.m[k] = m;
            total += m;
        }
        return total;
    }

    // Pushes the (sub-tolerance) budget mismatch into coordinates that the
    // water level left strictly interior, so clipped coordinates stay
    // exactly on their bounds.
    void redistribute(LadderSolution& sol, std::size_t s, std::size_t e, double budget) {
        for (int pass = 0; pass < 4; ++pass) {
            double total = 0.0;
            for (std::size_t k = s; k <= e; ++k) total += sol.m[k];
            double delta = budget - total;
            if (std::abs(delta) < 1e-12 * std::max(1.0, budget)) return;

            std::vector<std::size_t> free;
            for (std::size_t k = s; k <= e; ++k) {
                if (clip_state_[k] != 0) continue;
                bool can_grow = sol.m[k] < inst_.upper[k] - 1e-12;
                bool can_shrink = sol.m[k] > inst_.lower[k] + 1e-12;
                if ((delta > 0 && can_grow) || (delta < 0 && can_shrink)) free.push_back(k);
            }
            if (free.empty()) {
                for (std::size_t k = s; k <= e; ++k) {
                    bool movable = delta > 0 ? sol.m[k] < inst_.upper[k] - 1e-12
                                             : sol.m[k] > inst_.lower[k] + 1e-12;
                    if (movable) free.push_back(k);
                }
            }
            if (free.empty()) {
                sol.m[s] += delta; // residual is below any tolerance of interest
                return;
            }
            double share = delta / static_cast<double>(free.size());
            for (std::size_t k : free)
                sol.m[k] = std::clamp(sol.m[k] + share, inst_.lower[k], inst_.upper[k]);
        }
    }

    void recover_duals(LadderSolution& sol) {
        const std::size_t K = inst_.size();
        sol.mu.assign(K, 0.0);
        sol.lambda.assign(K, 0.0);
        for (const auto& [k, pin] : sol.pins) {
            if (pin.kind == 2) { // pinched final prefix: split by sign
                sol.mu[k] = std::max(sol.omega[k], 0.0);
                sol.lambda[k] = std::max(-sol.omega[k], 0.0);
                continue;
            }
            double diff = sol.omega[k] - sol.omega[k + 1]; // mu_k - lambda_k
            if (pin.kind > 0) sol.mu[k] = diff;
            else sol.lambda[k] = -diff;
        }
    }

    bool drop_worst_negative_dual(LadderSolution& sol) {
        std::size_t worst_k = inst_.size();
        double worst = 0.0;
        for (const auto& [k, pin] : sol.pins) {
            if (pin.kind == 2) continue;
            double tol = 1e-9 * (1.0 + std::abs(sol.omega[k]) + std::abs(sol.omega[k + 1]));
            double d = pin.kind > 0 ? sol.mu[k] : sol.lambda[k];
            if (d < -tol && d < worst) { worst = d; worst_k = k; }
        }
        if (worst_k == inst_.size()) return false;
        sol.pins.erase(worst_k);
        return true;
    }

    const ProblemInstance& inst_;
    MarginalModel& model_;
    SolverConfig cfg_;
    std::vector<int> clip_state_;
};

inline Schedule make_schedule(const ProblemInstance& inst, const LadderSolution& sol,
                              const char* solver, Schedule::Status status, int iterations) {
    Schedule sched;
    sched.blocklengths = sol.m;
    sched.omega = sol.omega;
    sched.mu = sol.mu;
    sched.lambda = sol.lambda;
    sched.status = status;
    sched.iterations = iterations;
    sched.solver = solver;
    double cum = 0.0;
    for (std::size_t k = 0; k < inst.size(); ++k) {
        double p = power_of_blocklength(sol.m[k], inst.packets[k], inst.link);
        sched.powers.push_back(p);
        sched.energies.push_back(sol.m[k] * p);
        sched.objective += sol.m[k] * p;
        cum += sol.m[k];
        sched.finish_times.push_back(cum);
    }
    sched.kkt_residual = kkt_residual(inst, sched);
    return sched;
}

} // namespace waterfill

/// Multi-level water filling for the strictly convex problem: globally
/// optimal blocklengths with the dual certificate.
inline Schedule solve_mlwf(const ProblemInstance& inst, const SolverConfig& cfg = {}) {
    if (inst.mode != BoundMode::Convex)
        throw NotConvexModeError("solve_mlwf: instance must be built with convex bounds");
    if (!feasible_exact(inst)) throw InfeasibleError("solve_mlwf: instance is infeasible");
    waterfill::EnergyMarginal model(inst, cfg);
    waterfill::LadderSolution sol = waterfill::LadderSolver(inst, model, cfg).solve();
    return waterfill::make_schedule(inst, sol, "mlwf", Schedule::Status::Converged, 1);
}

/// Successive upper-bound minimization: proximal linearization around the
/// current iterate, ladder subproblem solved exactly by the same
/// water-filling machinery.  Converges to a stationary point; the global
/// optimum when the instance is convex.
inline Schedule solve_sum(const ProblemInstance& inst, const SolverConfig& cfg = {}) {
    if (!feasible_exact(inst)) throw InfeasibleError("solve_sum: instance is infeasible");
    const std::size_t K = inst.size();
    std::vector<double> m = feasible_start(inst);
    waterfill::EnergyMarginal energy_model(inst, cfg);

    double gamma = cfg.sum_gamma;
    if (gamma <= 0.0) {
        for (std::size_t k = 0; k < K; ++k) {
            double h = std::max(0.5, 1e-4 * m[k]);
            double at = std::max(m[k], inst.lower[k] + h);
            CurveEval& ev = energy_model.eval(k);
            double fd = (ev.energy(at + h) - 2.0 * ev.energy(at) + ev.energy(at - h)) / (h * h);
            gamma = std::max(gamma, std::abs(fd));
        }
        gamma = std::max(gamma, 1e-12);
    }

    double obj = 0.0;
    for (std::size_t k = 0; k < K; ++k) obj += energy_model.eval(k).energy(m[k]);
    if (cfg.sum_objective_trace) cfg.sum_objective_trace->push_back(obj);

    std::vector<double> grad(K);
    waterfill::LadderSolution last;
    last.m = m;
    last.omega.assign(K, 0.0);
    last.mu.assign(K, 0.0);
    last.lambda.assign(K, 0.0);

    Schedule::Status status = Schedule::Status::MaxIterations;
    int iterations = 0;
    for (int r = 1; r <= cfg.sum_max_iterations; ++r) {
        iterations = r;
        for (std::size_t k = 0; k < K; ++k)
            grad[k] = energy_model.eval(k).energy_derivative(m[k]);

        waterfill::LadderSolution trial;
        double obj_new = 0.0;
        bool accepted = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            waterfill::QuadraticMarginal qm(inst, m, grad, gamma);
            trial = waterfill::LadderSolver(inst, qm, cfg).solve();
            obj_new = 0.0;
            for (std::size_t k = 0; k < K; ++k)
                obj_new += energy_model.eval(k).energy(trial.m[k]);
            if (obj_new <= obj + 1e-9 * (1.0 + std::abs(obj))) {
                accepted = true;
                break;
            }
            gamma *= 2.0; // restart the step with a heavier proximal term
        }
        if (!accepted) break;

        double step2 = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            double d = trial.m[k] - m[k];
            step2 += d * d;
        }
        m = trial.m;
        obj = obj_new;
        last = std::move(trial);
        if (cfg.sum_objective_trace) cfg.sum_objective_trace->push_back(obj);
        if (step2 < cfg.sum_stop) {
            status = Schedule::Status::Converged;
            break;
        }
    }
    return waterfill::make_schedule(inst, last, "sum", status, iterations);
}

/// Optional post-processing: blocklengths rounded down to whole symbols
/// (never below the box lower bound) with powers re-solved.  Transmissions
/// only shorten, so deadlines stay met; optimality claims do not survive
/// this step.
inline Schedule round_blocklengths(const ProblemInstance& inst, const Schedule& sched) {
    Schedule out = sched;
    out.objective = 0.0;
    double cum = 0.0;
    for (std::size_t k = 0; k < inst.size(); ++k) {
        double m = std::max(std::floor(sched.blocklengths[k]), inst.lower[k]);
        double p = power_of_blocklength(m, inst.packets[k], inst.link);
        out.blocklengths[k] = m;
        out.powers[k] = p;
        out.energies[k] = m * p;
        out.objective += m * p;
        cum += m;
        out.finish_times[k] = cum;
    }
    out.kkt_residual = kkt_residual(inst, out);
    out.solver = sched.solver + "+rounded";
    return out;
}

} // namespace fbl
