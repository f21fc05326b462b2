// Command-line front end: blocklength-bound inspection, offline solving of
// instance files, and Monte-Carlo simulation sweeps.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fblsched/fblsched.hpp"

namespace {

// exit codes (stable, documented in --help and README)
constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitTauOutOfRange = 3;
constexpr int kExitIo = 4;
constexpr int kExitValidation = 5;

struct ToleranceFlags {
    double eps1 = 1e-6;
    double eps2 = 1e-9;
    double gamma = 0.0;
    double kkt_tol = 1e-5;

    void attach(CLI::App* app) {
        app->add_option("--eps1", eps1, "blocklength bisection accuracy (symbols)")
            ->envname("FBLSCHED_EPS1");
        app->add_option("--eps2", eps2, "power bisection accuracy (watts)")
            ->envname("FBLSCHED_EPS2");
        app->add_option("--gamma", gamma, "proximal penalty for the sum solver (0 = auto)")
            ->envname("FBLSCHED_GAMMA");
        app->add_option("--kkt-tol", kkt_tol, "KKT certificate tolerance");
    }

    fbl::SolverConfig config(const std::string& solver) const {
        fbl::SolverConfig cfg;
        cfg.mode = solver == "sum" ? fbl::SolverConfig::Mode::Sum : fbl::SolverConfig::Mode::Mlwf;
        cfg.eps1 = eps1;
        cfg.eps2 = eps2;
        cfg.sum_gamma = gamma;
        cfg.kkt_tol = kkt_tol;
        return cfg;
    }
};

std::vector<double> log_space(double from, double to, int points) {
    std::vector<double> v;
    double la = std::log10(from), lb = std::log10(to);
    for (int i = 0; i < points; ++i)
        v.push_back(std::pow(10.0, la + (lb - la) * i / std::max(points - 1, 1)));
    return v;
}

std::vector<double> lin_space(double from, double to, int points) {
    std::vector<double> v;
    for (int i = 0; i < points; ++i)
        v.push_back(from + (to - from) * i / std::max(points - 1, 1));
    return v;
}

// ---------------------------------------------------------------- bounds --

int run_bounds(double bits, double epsilon, const fbl::Link& link, double gain,
               const std::string& sweep, double from, double to, int points,
               const std::string& out) {
    fbl::Packet pkt{bits, 0.0, 1.0, epsilon, gain};
    auto [eps_lo, eps_hi] = fbl::epsilon_validity_interval(link.min_blocklength);

    if (sweep.empty()) {
        pkt.deadline = std::numeric_limits<double>::max(); // bounds ignore the window
        fbl::BlocklengthBounds b = fbl::compute_bounds(pkt, link);
        std::printf("bits N                : %.10g\n", bits);
        std::printf("epsilon               : %.10g\n", epsilon);
        std::printf("m_hat                 : %.10g\n", link.min_blocklength);
        std::printf("tau                   : %.10g\n", b.tau);
        std::printf("m_tilde (P_max limit) : %.10g\n", b.power_limited);
        std::printf("lower bound l         : %.10g\n", b.lower);
        std::printf("monotone upper g_E    : %.10g\n", b.monotone_upper);
        if (b.convex_upper)
            std::printf("convex upper g_C      : %.10g\n", *b.convex_upper);
        else
            std::printf("convex upper g_C      : unavailable (tau >= sqrt(3)/3)\n");
        std::printf("epsilon validity      : (%.6g, %.2g)\n", eps_lo, eps_hi);
        return kExitOk;
    }

    std::vector<double> xs = sweep == "epsilon" ? log_space(from, to, points)
                                                : lin_space(from, to, points);
    std::ofstream csv(out.empty() ? "bounds_sweep.csv" : out);
    if (!csv) throw fbl::IoError("cannot open output CSV");
    csv << "bits,epsilon,tau,m_tilde,lower,g_e,g_c\n";
    for (double x : xs) {
        fbl::Packet p = pkt;
        if (sweep == "epsilon") p.epsilon = x; else p.bits = x;
        fbl::BlocklengthBounds b = fbl::compute_bounds(p, link);
        csv << fbl::csv_num(p.bits) << ',' << fbl::csv_num(p.epsilon) << ','
            << fbl::csv_num(b.tau) << ',' << fbl::csv_num(b.power_limited) << ','
            << fbl::csv_num(b.lower) << ',' << fbl::csv_num(b.monotone_upper) << ','
            << (b.convex_upper ? fbl::csv_num(*b.convex_upper) : "nan") << "\n";
    }
    std::cerr << "wrote " << (out.empty() ? "bounds_sweep.csv" : out) << "\n";
    return kExitOk;
}

// ----------------------------------------------------------------- solve --

void print_schedule(const fbl::Schedule& sched, const fbl::Link& link) {
    std::printf("%-4s %12s %12s %14s %14s %12s\n", "k", "m", "p_watts", "energy_wsym",
                "energy_J", "finish");
    for (std::size_t k = 0; k < sched.size(); ++k)
        std::printf("%-4zu %12.4f %12.6f %14.4f %14.6f %12.4f\n", k, sched.blocklengths[k],
                    sched.powers[k], sched.energies[k],
                    sched.energies[k] * link.symbol_duration, sched.finish_times[k]);
    std::printf("total energy : %.6f J (%.4f watt-symbols)\n",
                fbl::energy_joules(sched, link), sched.objective);
    std::printf("kkt residual : %.3e\n", sched.kkt_residual);
    std::printf("solver       : %s (%d iterations, %s)\n", sched.solver.c_str(),
                sched.iterations,
                sched.status == fbl::Schedule::Status::Converged ? "converged"
                                                                 : "max-iterations");
}

int run_solve(const std::string& instance_path, const std::string& solver,
              const ToleranceFlags& tol, bool general, bool round_down,
              const std::string& out) {
    nlohmann::json doc = fbl::read_json_file(instance_path);
    fbl::ProblemInstance inst = fbl::instance_from_json(
        doc, general ? fbl::BoundMode::General : fbl::BoundMode::Convex);
    fbl::SolverConfig cfg = tol.config(solver);

    fbl::Schedule sched = cfg.mode == fbl::SolverConfig::Mode::Sum ? fbl::solve_sum(inst, cfg)
                                                                   : fbl::solve_mlwf(inst, cfg);
    if (round_down) sched = fbl::round_blocklengths(inst, sched);
    print_schedule(sched, inst.link);
    if (!out.empty()) {
        fbl::write_json_file(out, fbl::schedule_to_json(sched, inst.link, cfg));
        std::cerr << "wrote " << out << "\n";
    }
    return kExitOk;
}

// -------------------------------------------------------------- simulate --

nlohmann::json traffic_to_json(const fbl::TrafficModel& t) {
    return {{"nu", t.nu},           {"n", t.n},
            {"m_hat", t.m_hat},     {"packets", t.packet_count},
            {"bits", t.bits},       {"epsilon", t.epsilon},
            {"pre_arrived", t.pre_arrived}};
}

fbl::SweepConfig sweep_from_json(const nlohmann::json& j) {
    fbl::SweepConfig cfg;
    try {
        if (j.contains("link")) cfg.link = fbl::link_from_json(j.at("link"));
        if (j.contains("traffic")) {
            const auto& t = j.at("traffic");
            if (t.contains("nu")) cfg.traffic.nu = t.at("nu").get<double>();
            if (t.contains("n")) cfg.traffic.n = t.at("n").get<double>();
            if (t.contains("m_hat")) cfg.traffic.m_hat = t.at("m_hat").get<double>();
            if (t.contains("packets")) cfg.traffic.packet_count = t.at("packets").get<std::size_t>();
            if (t.contains("bits")) cfg.traffic.bits = t.at("bits").get<double>();
            if (t.contains("epsilon")) cfg.traffic.epsilon = t.at("epsilon").get<double>();
            if (t.contains("pre_arrived"))
                cfg.traffic.pre_arrived = t.at("pre_arrived").get<std::size_t>();
        }
        if (j.contains("channel") && j.at("channel").contains("sigma"))
            cfg.channel.sigma = j.at("channel").at("sigma").get<double>();
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            if (g.contains("epsilon")) cfg.epsilon_grid = g.at("epsilon").get<std::vector<double>>();
            if (g.contains("nu")) cfg.nu_grid = g.at("nu").get<std::vector<double>>();
            if (g.contains("n")) cfg.n_grid = g.at("n").get<std::vector<double>>();
            if (g.contains("sigma")) cfg.sigma_grid = g.at("sigma").get<std::vector<double>>();
        }
        if (j.contains("trials")) {
            const auto& t = j.at("trials");
            if (t.contains("channels"))
                cfg.channel_realizations = t.at("channels").get<std::size_t>();
            if (t.contains("packets_per_channel"))
                cfg.packet_realizations = t.at("packets_per_channel").get<std::size_t>();
        }
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw fbl::IoError(std::string("config: ") + e.what());
    }
    return cfg;
}

void write_sweep_outputs(const std::filesystem::path& dir,
                         const std::vector<fbl::SweepPoint>& points, bool plots) {
    fbl::write_sweep_summary_csv((dir / "sweep_summary.csv").string(), points);
    fbl::write_sweep_trials_csv((dir / "sweep_trials.csv").string(), points);
    if (!plots) return;
    // one energy-vs-epsilon series per distinct (nu, n, sigma)
    std::vector<fbl::PlotSeries> energy, under;
    for (const fbl::SweepPoint& pt : points) {
        std::string label = "nu=" + std::to_string(pt.nu).substr(0, 4) +
                            " n=" + std::to_string(pt.n).substr(0, 4);
        auto find = [&](std::vector<fbl::PlotSeries>& v) -> fbl::PlotSeries& {
            for (auto& s : v)
                if (s.label == label) return s;
            v.push_back({label, {}, {}});
            return v.back();
        };
        fbl::PlotSeries& se = find(energy);
        se.x.push_back(pt.epsilon);
        se.y.push_back(pt.mean_energy_fbl_j);
        fbl::PlotSeries& su = find(under);
        su.x.push_back(pt.epsilon);
        su.y.push_back(pt.underestimated_j);
    }
    fbl::write_svg_plot((dir / "energy_vs_epsilon.svg").string(), energy,
                        "packet error probability", "mean energy (J)", true);
    fbl::write_svg_plot((dir / "underestimated_vs_epsilon.svg").string(), under,
                        "packet error probability", "underestimated energy (J)", true);
}

void write_policy_outputs(const std::filesystem::path& dir,
                          const std::vector<fbl::PolicyPoint>& points, bool plots) {
    fbl::write_policy_csv((dir / "policies.csv").string(), points);
    fbl::write_policy_trials_csv((dir / "policy_trials.csv").string(), points);
    if (!plots) return;
    fbl::PlotSeries mlwf{"offline mlwf", {}, {}}, sum{"offline sum", {}, {}},
        roll{"rolling window", {}, {}}, myo{"myopic", {}, {}};
    for (const fbl::PolicyPoint& pt : points) {
        mlwf.x.push_back(pt.sigma);
        mlwf.y.push_back(pt.mean_offline_mlwf_j);
        sum.x.push_back(pt.sigma);
        sum.y.push_back(pt.mean_offline_sum_j);
        roll.x.push_back(pt.sigma);
        roll.y.push_back(pt.mean_rolling_j);
        myo.x.push_back(pt.sigma);
        myo.y.push_back(pt.mean_myopic_j);
    }
    fbl::write_svg_plot((dir / "energy_vs_sigma.svg").string(), {mlwf, sum, roll, myo},
                        "Rayleigh scale sigma", "mean energy (J)", false);
}

int run_simulate(const std::string& config_path, const std::string& preset,
                 const std::string& out_dir, long trials_override, std::uint64_t seed,
                 bool have_seed, const ToleranceFlags& tol, const std::string& solver,
                 bool no_plots) {
    std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
    std::filesystem::create_directories(dir);

    nlohmann::json doc = nlohmann::json::object();
    if (!config_path.empty()) doc = fbl::read_json_file(config_path);

    std::string experiment = doc.value("experiment", "sweep");
    if (preset == "fig6") experiment = "policies";
    if (!preset.empty() && preset != "fig2" && preset != "fig4" && preset != "fig5" &&
        preset != "fig6")
        throw fbl::IoError("unknown preset: " + preset);

    if (preset == "fig2") {
        fbl::Link link;
        int rc = run_bounds(1.2e4, 5e-4, link, 10.0, "epsilon", 1e-10, 0.4, 60,
                            (dir / "bounds_vs_epsilon.csv").string());
        if (rc != kExitOk) return rc;
        return run_bounds(1.2e4, 5e-4, link, 10.0, "bits", 2e3, 5e4, 60,
                          (dir / "bounds_vs_bits.csv").string());
    }

    if (experiment == "policies") {
        fbl::PolicyConfig cfg;
        cfg.solver = tol.config(solver);
        if (!config_path.empty()) {
            fbl::SweepConfig base = sweep_from_json(doc); // shared fields
            cfg.traffic = base.traffic;
            cfg.channel = base.channel;
            cfg.link = base.link;
            cfg.seed = base.seed;
            if (!base.sigma_grid.empty()) cfg.sigma_grid = base.sigma_grid;
            if (doc.contains("trials") && doc.at("trials").contains("count"))
                cfg.trials = doc.at("trials").at("count").get<std::size_t>();
        }
        if (preset == "fig6") {
            cfg.traffic = fbl::TrafficModel{.nu = 4.0, .n = 10.0, .packet_count = 10,
                                            .epsilon = 5e-4, .pre_arrived = 3};
            cfg.sigma_grid = {40.0, 80.0, 160.0};
        }
        if (trials_override > 0) cfg.trials = static_cast<std::size_t>(trials_override);
        if (have_seed) cfg.seed = seed;
        fbl::write_json_file((dir / "config_used.json").string(),
                             {{"experiment", "policies"},
                              {"traffic", traffic_to_json(cfg.traffic)},
                              {"channel", {{"sigma", cfg.channel.sigma}}},
                              {"link", fbl::link_to_json(cfg.link)},
                              {"grid", {{"sigma", cfg.sigma_grid}}},
                              {"trials", {{"count", cfg.trials}}},
                              {"seed", cfg.seed}});
        std::cerr << "policies: " << cfg.sigma_grid.size() << " sigma points x " << cfg.trials
                  << " trials\n";
        std::vector<fbl::PolicyPoint> points = fbl::compare_policies(cfg);
        write_policy_outputs(dir, points, !no_plots);

        // event logs of the first trial, as a sample of the online record format
        {
            fbl::ChannelModel chan = cfg.channel;
            chan.sigma = cfg.sigma_grid.front();
            fbl::Rng g(fbl::derive_seed(cfg.seed, fbl::kStreamGaps, 0));
            fbl::Rng l(fbl::derive_seed(cfg.seed, fbl::kStreamLifetimes, 0));
            fbl::Rng ch(fbl::derive_seed(cfg.seed, fbl::kStreamChannel, 0));
            fbl::ProblemInstance inst =
                fbl::gen_instance(cfg.traffic, chan, cfg.link, g, l, ch);
            fbl::write_event_csv(
                (dir / "events_rolling_trial0.csv").string(),
                fbl::run_online(inst.packets, cfg.link, fbl::OnlinePolicy::RollingWindow,
                                cfg.solver)
                    .events);
            fbl::write_event_csv(
                (dir / "events_myopic_trial0.csv").string(),
                fbl::run_online(inst.packets, cfg.link, fbl::OnlinePolicy::Myopic, cfg.solver)
                    .events);
        }
        std::cerr << "wrote " << (dir / "policies.csv").string() << "\n";
        return kExitOk;
    }

    fbl::SweepConfig cfg = config_path.empty() ? fbl::SweepConfig{} : sweep_from_json(doc);
    cfg.solver = tol.config(solver);
    if (preset == "fig4") {
        cfg.epsilon_grid = {5e-2, 5e-3, 5e-4};
        cfg.n_grid = {8.0, 10.0, 12.0};
        cfg.traffic.nu = 6.0;
    } else if (preset == "fig5") {
        cfg.epsilon_grid = {5e-2, 5e-3, 5e-4};
        cfg.nu_grid = {4.0, 5.0, 6.0};
        cfg.traffic.n = 10.0;
    }
    if (trials_override > 0) {
        auto c = static_cast<std::size_t>(
            std::max(1.0, std::floor(std::sqrt(static_cast<double>(trials_override)))));
        cfg.channel_realizations = c;
        cfg.packet_realizations =
            (static_cast<std::size_t>(trials_override) + c - 1) / c;
    }
    if (have_seed) cfg.seed = seed;
    fbl::write_json_file((dir / "config_used.json").string(),
                         {{"experiment", "sweep"},
                          {"traffic", traffic_to_json(cfg.traffic)},
                          {"channel", {{"sigma", cfg.channel.sigma}}},
                          {"link", fbl::link_to_json(cfg.link)},
                          {"grid",
                           {{"epsilon", cfg.epsilon_grid},
                            {"nu", cfg.nu_grid},
                            {"n", cfg.n_grid},
                            {"sigma", cfg.sigma_grid}}},
                          {"trials",
                           {{"channels", cfg.channel_realizations},
                            {"packets_per_channel", cfg.packet_realizations}}},
                          {"seed", cfg.seed}});
    std::cerr << "sweep: " << cfg.channel_realizations << " channels x "
              << cfg.packet_realizations << " packet generations per grid point\n";
    std::vector<fbl::SweepPoint> points = fbl::run_sweep(cfg);
    write_sweep_outputs(dir, points, !no_plots);
    std::cerr << "wrote " << (dir / "sweep_summary.csv").string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"energy-minimal packet scheduling under the finite-blocklength capacity model"};
    app.require_subcommand(1);
    app.footer("exit codes: 0 ok, 2 infeasible, 3 tau out of range, 4 I/O error, 5 validation");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "blocklength bounds for one packet class");
    double bits = 1.2e4, epsilon = 5e-4, gain = 10.0;
    fbl::Link link;
    std::string sweep, bounds_out;
    double sweep_from = 1e-10, sweep_to = 0.4;
    int sweep_points = 50;
    bounds->add_option("--bits", bits, "payload bits N");
    bounds->add_option("--epsilon", epsilon, "packet error probability");
    bounds->add_option("--mhat", link.min_blocklength, "minimum blocklength (symbols)");
    bounds->add_option("--pmax", link.max_power, "maximum power (watts)");
    bounds->add_option("--gain", gain, "channel gain (bounds do not depend on it)");
    bounds->add_option("--sweep", sweep, "sweep variable: epsilon | bits");
    bounds->add_option("--from", sweep_from, "sweep start");
    bounds->add_option("--to", sweep_to, "sweep end");
    bounds->add_option("--points", sweep_points, "sweep points");
    bounds->add_option("--out", bounds_out, "sweep CSV path");

    // solve
    auto* solve = app.add_subcommand("solve", "solve an instance JSON file");
    std::string instance_path, solver = "mlwf", schedule_out;
    bool general = false, round_down = false;
    ToleranceFlags tol;
    solve->add_option("instance", instance_path, "instance JSON")->required();
    solve->add_option("--solver", solver, "mlwf | sum")
        ->check(CLI::IsMember({"mlwf", "sum"}));
    solve->add_option("--out", schedule_out, "schedule JSON path");
    solve->add_flag("--general", general, "general (non-convex) bound mode; use with --solver sum");
    solve->add_flag("--round", round_down,
                    "round blocklengths down to integers afterwards (drops optimality)");
    tol.attach(solve);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo experiments");
    std::string config_path, preset, out_dir = "out", sim_solver = "mlwf";
    long trials = -1;
    std::uint64_t seed = 1;
    bool no_plots = false;
    ToleranceFlags sim_tol;
    sim->add_option("config", config_path, "experiment config JSON (optional with --preset)");
    sim->add_option("--preset", preset, "fig2 | fig4 | fig5 | fig6");
    sim->add_option("--trials", trials, "override trial count");
    auto* seed_opt = sim->add_option("--seed", seed, "master RNG seed");
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--solver", sim_solver, "mlwf | sum")
        ->check(CLI::IsMember({"mlwf", "sum"}));
    sim->add_flag("--no-plots", no_plots, "skip SVG emission");
    sim_tol.attach(sim);

    CLI11_PARSE(app, argc, argv);

    try {
        if (bounds->parsed())
            return run_bounds(bits, epsilon, link, gain, sweep, sweep_from, sweep_to,
                              sweep_points, bounds_out);
        if (solve->parsed())
            return run_solve(instance_path, solver, tol, general, round_down, schedule_out);
        if (sim->parsed()) {
            if (config_path.empty() && preset.empty())
                throw fbl::IoError("simulate needs a config file or --preset");
            return run_simulate(config_path, preset, out_dir, trials, seed,
                                seed_opt->count() > 0, sim_tol, sim_solver, no_plots);
        }
    } catch (const fbl::InfeasiblePowerError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const fbl::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const fbl::TauOutOfRangeError& e) {
        std::cerr << "tau out of range: " << e.what() << "\n";
        return kExitTauOutOfRange;
    } catch (const fbl::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fbl::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
