// Acceptance suite: one criterion per command-line name, one [PASS]/[FAIL]
// line each, nonzero exit when anything failed.  Run with no arguments to
// execute every criterion.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fblsched/fblsched.hpp"

using namespace fbl;

namespace {

struct Criterion {
    std::vector<std::string> failures;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void note(const std::string& what) { notes.push_back(what); }
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// Bound reproduction: g_E and g_C at N=1.2e4, eps=5e-4, m_hat=200
// ---------------------------------------------------------------------------
void criterion_bounds(Criterion& c) {
    Packet pkt{1.2e4, 0.0, 2000.0, 5e-4, 10.0};
    Link link;
    double ge = monotone_energy_bound(pkt, link);
    double gc = convexity_bound(pkt, link);
    c.note(fmt("g_E = %.4f, g_C = %.4f", ge, gc));
    c.require(ge >= 1.35e4 && ge <= 1.65e4,
              fmt("g_E = %.4f outside [1.35e4, 1.65e4]", ge));
    c.require(gc >= 2.7e3 && gc <= 3.3e3, fmt("g_C = %.4f outside [2.7e3, 3.3e3]", gc));
}

// ---------------------------------------------------------------------------
// Shannon reduction at eps = 0.5: implicit maps match the closed forms to
// 1e-9 relative on 100 random (N, h, m) tuples
// ---------------------------------------------------------------------------
void criterion_shannon(Criterion& c) {
    Link link;
    std::mt19937_64 gen(20240901);
    std::uniform_real_distribution<double> uN(4e3, 3e4), uh(0.5, 300.0), uf(0.05, 0.95);

    SolverConfig phi_cfg;
    phi_cfg.eps1 = 1e-10;

    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        Packet sh{uN(gen), 0.0, 0.0, 0.5, uh(gen)};
        BlocklengthBounds b = compute_bounds(sh, link);
        double u = b.upper(true);
        double m = b.lower * 1.02 + uf(gen) * (std::min(4.0 * b.lower, 0.95 * u) - b.lower * 1.02);
        sh.deadline = 10.0 * m; // roomy window so phi's bracket is interior

        auto rel = [](double a, double b2) { return std::abs(a - b2) / std::abs(b2); };
        double r1 = rel(power_of_blocklength(m, sh, link), shannon_power(m, sh));
        double r2 = rel(energy(m, sh, link), shannon_energy(m, sh));
        double r3 = rel(energy_derivative(m, sh, link), shannon_energy_derivative(m, sh));
        double omega = shannon_energy_derivative(m, sh);
        double r4 = rel(phi(omega, sh, link, phi_cfg), shannon_phi(omega, sh));
        worst = std::max({worst, r1, r2, r3, r4});
        c.require(r1 <= 1e-9, fmt("power rel err %.2e at N=%.0f h=%.2f m=%.1f", r1, sh.bits, sh.gain, m));
        c.require(r2 <= 1e-9, fmt("energy rel err %.2e", r2));
        c.require(r3 <= 1e-9, fmt("derivative rel err %.2e", r3));
        c.require(r4 <= 1e-9, fmt("phi rel err %.2e", r4));
    }
    c.note(fmt("100 tuples, worst relative error %.2e", worst));
}

// ---------------------------------------------------------------------------
// Derivative oracles: E' vs central differences (rel < 1e-4), E'' sign on
// [m_hat, g_C] plus magnitude agreement away from the boundary
// ---------------------------------------------------------------------------
void criterion_derivatives(Criterion& c) {
    Link link;
    std::mt19937_64 gen(77001);
    std::uniform_real_distribution<double> uf(0.0, 1.0);
    const double hs[] = {1.0, 10.0, 100.0};

    double worst1 = 0.0, worst2 = 0.0;
    for (int t = 0; t < 200; ++t) {
        Packet pkt{1.2e4, 0.0, 0.0, 5e-4, hs[t % 3]};
        BlocklengthBounds b = compute_bounds(pkt, link);
        double lo = b.lower * 1.001;

        // first derivative across the monotone range
        double m = lo + uf(gen) * (0.999 * b.monotone_upper - lo);
        double h = 1e-5 * m;
        double fd = (energy(m + h, pkt, link) - energy(m - h, pkt, link)) / (2.0 * h);
        double d1 = energy_derivative(m, pkt, link);
        double r1 = std::abs(d1 - fd) / std::abs(fd);
        worst1 = std::max(worst1, r1);
        c.require(r1 < 1e-4, fmt("E' rel err %.2e at m=%.1f h=%.0f", r1, m, pkt.gain));
        c.require(d1 < 0.0, fmt("E' = %.3e not negative inside [m_hat, g_E]", d1));

        // second derivative inside the convexity range
        double gc = *b.convex_upper;
        double mc = lo + uf(gen) * (0.98 * gc - lo);
        double h2 = std::max(0.5, 1e-3 * mc);
        double fd2 = (energy(mc + h2, pkt, link) - 2.0 * energy(mc, pkt, link) +
                      energy(mc - h2, pkt, link)) /
                     (h2 * h2);
        double d2 = energy_second_derivative(mc, pkt, link);
        double r2 = std::abs(d2 - fd2) / std::abs(fd2);
        worst2 = std::max(worst2, r2);
        c.require(d2 > 0.0, fmt("E'' = %.3e not positive at m=%.1f <= g_C", d2, mc));
        c.require(fd2 > 0.0, fmt("difference oracle disagrees on convexity at m=%.1f", mc));
        c.require(r2 < 1e-3, fmt("E'' rel err %.2e at m=%.1f", r2, mc));
    }
    c.note(fmt("200 points; worst E' err %.2e, worst E'' err %.2e", worst1, worst2));
}

// ---------------------------------------------------------------------------
// Solver optimality + KKT certification on 100 random convex K=3 instances
// ---------------------------------------------------------------------------
void criterion_solver(Criterion& c) {
    Link link;
    TrafficModel traffic;
    traffic.packet_count = 3;
    ChannelModel chan;

    int solved = 0;
    double worst_gap = -1e300, worst_agree = 0.0, worst_kkt = 0.0;
    for (std::size_t trial = 0; solved < 100 && trial < 250; ++trial) {
        Rng g(derive_seed(606, kStreamGaps, trial)), l(derive_seed(606, kStreamLifetimes, trial)),
            ch(derive_seed(606, kStreamChannel, trial));
        ProblemInstance inst = gen_instance(traffic, chan, link, g, l, ch);
        if (!feasible_exact(inst)) continue;
        ++solved;

        Schedule mlwf = solve_mlwf(inst);
        Schedule sum = solve_sum(inst);
        Schedule bf = brute_force_oracle(inst, 1.0);

        double grid_bound = 0.0;
        for (std::size_t k = 0; k < 3; ++k)
            grid_bound +=
                std::abs(energy_derivative(mlwf.blocklengths[k], inst.packets[k], link));
        double gap = mlwf.objective - (bf.objective + 1e-6 * bf.objective);
        worst_gap = std::max(worst_gap, gap / bf.objective);
        c.require(gap <= 0.0, fmt("trial %zu: MLWF %.6f above oracle %.6f + tolerance",
                                  trial, mlwf.objective, bf.objective));
        c.require(bf.objective <= mlwf.objective + grid_bound,
                  fmt("trial %zu: oracle undercuts MLWF beyond the grid bound", trial));

        double agree = std::abs(mlwf.objective - sum.objective) / mlwf.objective;
        worst_agree = std::max(worst_agree, agree);
        c.require(agree <= 1e-3,
                  fmt("trial %zu: |MLWF - SUM| = %.2e%% of objective", trial, 100 * agree));

        worst_kkt = std::max(worst_kkt, mlwf.kkt_residual);
        c.require(mlwf.kkt_residual < 1e-5,
                  fmt("trial %zu: kkt residual %.2e", trial, mlwf.kkt_residual));
    }
    c.require(solved == 100, fmt("only %d feasible instances found", solved));
    c.note(fmt("100 instances; worst MLWF-vs-oracle margin %.2e, worst MLWF/SUM gap %.2e, "
               "worst KKT residual %.2e",
               worst_gap, worst_agree, worst_kkt));
}

// ---------------------------------------------------------------------------
// Desk-scale energy-underestimation replication (nu=6, n=10, sigma=10, K=5)
// ---------------------------------------------------------------------------
void criterion_fig4(Criterion& c) {
    SweepConfig cfg;
    cfg.channel_realizations = 20;
    cfg.packet_realizations = 20;
    cfg.seed = 424242;
    cfg.epsilon_grid = {5e-2, 5e-3, 5e-4};
    cfg.keep_trials = false;

    auto pts = run_sweep(cfg);
    for (const SweepPoint& pt : pts) {
        c.require(pt.trials_valid >= 350,
                  fmt("eps=%g: only %zu valid trials", pt.epsilon, pt.trials_valid));
        c.require(pt.underestimated_j > 0.0,
                  fmt("eps=%g: underestimated energy %.4f J not positive", pt.epsilon,
                      pt.underestimated_j));
        if (pt.epsilon == 5e-4) {
            c.note(fmt("eps=5e-4: mean fbl %.3f J (26.17 +-15%% -> [22.24, 30.10]: %s, "
                       "informational)",
                       pt.mean_energy_fbl_j,
                       pt.mean_energy_fbl_j >= 22.24 && pt.mean_energy_fbl_j <= 30.10
                           ? "inside"
                           : "outside"));
            c.note(fmt("eps=5e-4: mean shannon %.3f J (23.93 +-15%% -> [20.34, 27.52]: %s, "
                       "informational)",
                       pt.mean_energy_shannon_j,
                       pt.mean_energy_shannon_j >= 20.34 && pt.mean_energy_shannon_j <= 27.52
                           ? "inside"
                           : "outside"));
            c.note(fmt("eps=5e-4: underestimation %.2f%%", pt.underestimated_pct));
            c.require(pt.underestimated_pct >= 5.0 && pt.underestimated_pct <= 15.0,
                      fmt("underestimation %.2f%% outside [5%%, 15%%]", pt.underestimated_pct));
        }
    }
}

// ---------------------------------------------------------------------------
// Trend assertions: underestimation grows as eps shrinks; energy falls as
// n or nu grows
// ---------------------------------------------------------------------------
void criterion_trends(Criterion& c) {
    SweepConfig cfg;
    cfg.channel_realizations = 20;
    cfg.packet_realizations = 20;
    cfg.seed = 424242;
    cfg.keep_trials = false;
    cfg.epsilon_grid = {5e-2, 5e-3, 5e-4};
    cfg.n_grid = {8.0, 10.0, 12.0};

    auto pts = run_sweep(cfg); // ordered eps-major, n-minor
    auto at = [&](double eps, double n) -> const SweepPoint& {
        for (const auto& pt : pts)
            if (pt.epsilon == eps && pt.n == n) return pt;
        throw Error("grid point missing");
    };

    for (double n : {8.0, 10.0, 12.0}) {
        double u1 = at(5e-2, n).underestimated_pct;
        double u2 = at(5e-3, n).underestimated_pct;
        double u3 = at(5e-4, n).underestimated_pct;
        c.note(fmt("n=%.0f: underestimation %.2f%% -> %.2f%% -> %.2f%% as eps drops", n, u1,
                   u2, u3));
        c.require(u1 < u2 && u2 < u3,
                  fmt("underestimation not increasing as eps decreases at n=%.0f", n));
    }
    double e8 = at(5e-4, 8.0).mean_energy_fbl_j;
    double e10 = at(5e-4, 10.0).mean_energy_fbl_j;
    double e12 = at(5e-4, 12.0).mean_energy_fbl_j;
    c.note(fmt("energy vs n at eps=5e-4: %.3f > %.3f > %.3f J", e8, e10, e12));
    c.require(e8 > e10 && e10 > e12, "mean energy not decreasing in n");

    SweepConfig nu_cfg = cfg;
    nu_cfg.epsilon_grid = {5e-4};
    nu_cfg.n_grid = {};
    nu_cfg.nu_grid = {4.0, 5.0, 6.0};
    auto nu_pts = run_sweep(nu_cfg);
    double e4 = nu_pts[0].mean_energy_fbl_j;
    double e5 = nu_pts[1].mean_energy_fbl_j;
    double e6 = nu_pts[2].mean_energy_fbl_j;
    c.note(fmt("energy vs nu at eps=5e-4: %.3f > %.3f > %.3f J", e4, e5, e6));
    c.require(e4 > e5 && e5 > e6, "mean energy not decreasing in nu");
}

// ---------------------------------------------------------------------------
// Policy ordering over a sigma sweep (nu=4, n=10, eps=5e-4, K=10)
// ---------------------------------------------------------------------------
void criterion_policies(Criterion& c) {
    PolicyConfig cfg;
    cfg.trials = 2000;
    cfg.seed = 909090;
    cfg.sigma_grid = {40.0, 80.0, 160.0};

    auto pts = compare_policies(cfg);
    for (const PolicyPoint& pt : pts) {
        c.require(pt.trials_valid >= 100,
                  fmt("sigma=%.0f: only %zu valid runs", pt.sigma, pt.trials_valid));
        if (pt.trials_valid == 0) continue;
        double agree = std::abs(pt.mean_offline_mlwf_j - pt.mean_offline_sum_j) /
                       pt.mean_offline_mlwf_j;
        c.require(agree <= 5e-3, fmt("sigma=%.0f: MLWF vs SUM means differ by %.2e%%",
                                     pt.sigma, 100 * agree));
        c.require(pt.mean_offline_mlwf_j <= pt.mean_rolling_j * (1.0 + 1e-4),
                  fmt("sigma=%.0f: offline mean above rolling-window mean", pt.sigma));
        c.require(pt.mean_rolling_j * 1.01 <= pt.mean_myopic_j,
                  fmt("sigma=%.0f: rolling vs myopic separation below 1%%", pt.sigma));
        c.note(fmt("sigma=%.0f: valid=%zu offline=%.4f/%.4f rolling=%.4f myopic=%.4f J",
                   pt.sigma, pt.trials_valid, pt.mean_offline_mlwf_j, pt.mean_offline_sum_j,
                   pt.mean_rolling_j, pt.mean_myopic_j));
    }

    // sigma-monotone means on the trials valid at every sigma
    std::size_t n = pts.front().trials.size();
    double prev[4] = {1e300, 1e300, 1e300, 1e300};
    std::size_t common = 0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        double sums[4] = {0, 0, 0, 0};
        common = 0;
        for (std::size_t i = 0; i < n; ++i) {
            bool all = true;
            for (const auto& q : pts) all = all && q.trials[i].valid;
            if (!all) continue;
            ++common;
            sums[0] += pts[p].trials[i].offline_mlwf_j;
            sums[1] += pts[p].trials[i].offline_sum_j;
            sums[2] += pts[p].trials[i].rolling_j;
            sums[3] += pts[p].trials[i].myopic_j;
        }
        for (int q = 0; q < 4; ++q) {
            double mean = sums[q] / std::max<std::size_t>(common, 1);
            c.require(mean < prev[q],
                      fmt("policy %d mean not decreasing at sigma=%.0f", q, pts[p].sigma));
            prev[q] = mean;
        }
    }
    c.note(fmt("%zu trials valid at every sigma", common));
}

// ---------------------------------------------------------------------------
// Statistical generators: truncated-exponential and squared-Rayleigh moments
// ---------------------------------------------------------------------------
void criterion_generators(Criterion& c) {
    const int n = 100000;
    const double mhat = 200.0;

    for (double nu : {4.0, 6.0}) {
        TruncatedExponential d =
            TruncatedExponential::with_mean((nu - 1) * mhat, (nu + 1) * mhat, nu * mhat);
        Rng rng(derive_seed(515, 1, static_cast<std::uint64_t>(nu)));
        double sum = 0;
        bool contained = true;
        for (int i = 0; i < n; ++i) {
            double v = d.sample(rng);
            contained = contained && v >= (nu - 1) * mhat && v <= (nu + 1) * mhat;
            sum += v;
        }
        double mean = sum / n;
        c.require(contained, fmt("nu=%.0f: support violation", nu));
        c.require(std::abs(mean - nu * mhat) <= 0.01 * nu * mhat,
                  fmt("nu=%.0f: gap mean %.2f vs %.2f", nu, mean, nu * mhat));
        c.note(fmt("nu=%.0f: mean %.3f (target %.0f)", nu, mean, nu * mhat));
    }

    double sigma = 10.0;
    Rng rng(derive_seed(515, 2, 0));
    double sum = 0;
    bool positive = true;
    for (int i = 0; i < n; ++i) {
        double h = sample_squared_rayleigh(rng, sigma);
        positive = positive && h > 0;
        sum += h;
    }
    double mean = sum / n;
    c.require(positive, "channel gain must be positive");
    c.require(std::abs(mean - 2 * sigma * sigma) <= 0.01 * 2 * sigma * sigma,
              fmt("squared-Rayleigh mean %.2f vs %.0f", mean, 2 * sigma * sigma));
    c.note(fmt("squared-Rayleigh mean %.3f (target %.0f)", mean, 2 * sigma * sigma));
}

const std::map<std::string, std::function<void(Criterion&)>> kCriteria = {
    {"bounds", criterion_bounds},         {"shannon", criterion_shannon},
    {"derivatives", criterion_derivatives}, {"solver", criterion_solver},
    {"fig4", criterion_fig4},             {"trends", criterion_trends},
    {"policies", criterion_policies},     {"generators", criterion_generators},
};

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> names;
    for (int i = 1; i < argc; ++i) names.emplace_back(argv[i]);
    if (names.empty())
        for (const auto& [name, fn] : kCriteria) names.push_back(name);

    int failures = 0;
    for (const std::string& name : names) {
        auto it = kCriteria.find(name);
        if (it == kCriteria.end()) {
            std::printf("[FAIL] %s: unknown criterion\n", name.c_str());
            ++failures;
            continue;
        }
        Criterion c;
        try {
            it->second(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        if (c.failures.empty()) {
            std::printf("[PASS] %s", name.c_str());
            if (!c.notes.empty()) std::printf(": %s", c.notes.front().c_str());
            std::printf("\n");
            for (std::size_t i = 1; i < c.notes.size(); ++i)
                std::printf("       %s\n", c.notes[i].c_str());
        } else {
            ++failures;
            std::printf("[FAIL] %s: %s\n", name.c_str(), c.failures.front().c_str());
            for (std::size_t i = 1; i < c.failures.size() && i < 6; ++i)
                std::printf("       %s\n", c.failures[i].c_str());
            for (const std::string& note : c.notes) std::printf("       %s\n", note.c_str());
        }
        std::fflush(stdout);
    }
    return failures;
}
