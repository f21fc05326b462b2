#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fblsched/experiment.hpp"
#include "fblsched/instance.hpp"
#include "fblsched/schedule.hpp"

namespace fbl {

struct IoError : Error {
    using Error::Error;
};

// --------------------------------------------------------------------------
// JSON instance / schedule / config documents
// --------------------------------------------------------------------------

inline nlohmann::json link_to_json(const Link& link) {
    return {{"m_hat", link.min_blocklength},
            {"p_max_watts", link.max_power},
            {"symbol_duration_s", link.symbol_duration}};
}

inline Link link_from_json(const nlohmann::json& j) {
    Link link;
    link.min_blocklength = j.at("m_hat").get<double>();
    link.max_power = j.at("p_max_watts").get<double>();
    link.symbol_duration = j.at("symbol_duration_s").get<double>();
    return link;
}

inline nlohmann::json instance_to_json(const ProblemInstance& inst) {
    nlohmann::json packets = nlohmann::json::array();
    for (const Packet& p : inst.packets)
        packets.push_back({{"bits", p.bits},
                           {"arrival", p.arrival},
                           {"deadline", p.deadline},
                           {"epsilon", p.epsilon},
                           {"gain", p.gain}});
    return {{"link", link_to_json(inst.link)}, {"packets", packets}};
}

/// Parses and validates an instance document; errors carry the offending
/// field path.
inline ProblemInstance instance_from_json(const nlohmann::json& j,
                                          BoundMode mode = BoundMode::Convex) {
    Link link;
    try {
        link = link_from_json(j.at("link"));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("/link: ") + e.what());
    }
    std::vector<Packet> packets;
    if (!j.contains("packets") || !j.at("packets").is_array() || j.at("packets").empty())
        throw IoError("/packets: expected a non-empty array");
    for (std::size_t i = 0; i < j.at("packets").size(); ++i) {
        const auto& pj = j.at("packets")[i];
        Packet p;
        try {
            p.bits = pj.at("bits").get<double>();
            p.arrival = pj.at("arrival").get<double>();
            p.deadline = pj.at("deadline").get<double>();
            p.epsilon = pj.at("epsilon").get<double>();
            p.gain = pj.at("gain").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw IoError("/packets/" + std::to_string(i) + ": " + e.what());
        }
        packets.push_back(p);
    }
    return validate_instance(std::move(packets), link, mode);
}

inline nlohmann::json schedule_to_json(const Schedule& sched, const Link& link,
                                       const SolverConfig& cfg) {
    nlohmann::json packets = nlohmann::json::array();
    for (std::size_t k = 0; k < sched.size(); ++k)
        packets.push_back({{"m", sched.blocklengths[k]},
                           {"p_watts", sched.powers[k]},
                           {"energy_wsym", sched.energies[k]},
                           {"energy_joules", sched.energies[k] * link.symbol_duration},
                           {"finish", sched.finish_times[k]}});
    return {{"solver",
             {{"mode", sched.solver},
              {"iterations", sched.iterations},
              {"converged", sched.status == Schedule::Status::Converged},
              {"eps1", cfg.eps1},
              {"eps2", cfg.eps2},
              {"kkt_tol", cfg.kkt_tol}}},
            {"packets", packets},
            {"duals", {{"mu", sched.mu}, {"lambda", sched.lambda}, {"omega", sched.omega}}},
            {"kkt_residual", sched.kkt_residual},
            {"objective_wsym", sched.objective},
            {"total_energy_joules", sched.objective * link.symbol_duration}};
}

inline Schedule schedule_from_json(const nlohmann::json& j) {
    Schedule s;
    for (const auto& pj : j.at("packets")) {
        s.blocklengths.push_back(pj.at("m").get<double>());
        s.powers.push_back(pj.at("p_watts").get<double>());
        s.energies.push_back(pj.at("energy_wsym").get<double>());
        s.finish_times.push_back(pj.at("finish").get<double>());
    }
    s.mu = j.at("duals").at("mu").get<std::vector<double>>();
    s.lambda = j.at("duals").at("lambda").get<std::vector<double>>();
    s.omega = j.at("duals").at("omega").get<std::vector<double>>();
    s.kkt_residual = j.at("kkt_residual").get<double>();
    s.objective = j.at("objective_wsym").get<double>();
    s.solver = j.at("solver").at("mode").get<std::string>();
    s.iterations = j.at("solver").at("iterations").get<int>();
    s.status = j.at("solver").at("converged").get<bool>() ? Schedule::Status::Converged
                                                          : Schedule::Status::MaxIterations;
    return s;
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

// --------------------------------------------------------------------------
// CSV emission (fixed headers, shortest-roundtrip doubles)
// --------------------------------------------------------------------------

inline std::string csv_num(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v); // shortest round-trip form
    return std::string(buf, res.ptr);
}

/// trial-level records of a sweep: one row per (grid point, trial)
inline void write_sweep_trials_csv(const std::string& path,
                                   const std::vector<SweepPoint>& points) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "epsilon,nu,n,sigma,channel,packet_gen,feasible,energy_fbl_j,energy_shannon_j\n";
    for (const SweepPoint& pt : points)
        for (const TrialOutcome& t : pt.trials)
            out << csv_num(pt.epsilon) << ',' << csv_num(pt.nu) << ',' << csv_num(pt.n) << ','
                << csv_num(pt.sigma) << ',' << t.channel_realization << ','
                << t.packet_realization << ',' << (t.feasible ? 1 : 0) << ','
                << csv_num(t.energy_fbl_j) << ',' << csv_num(t.energy_shannon_j) << "\n";
}

/// grid-point aggregates of a sweep
inline void write_sweep_summary_csv(const std::string& path,
                                    const std::vector<SweepPoint>& points) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "epsilon,nu,n,sigma,trials,valid,mean_energy_fbl_j,mean_energy_shannon_j,"
           "underestimated_j,underestimated_pct\n";
    for (const SweepPoint& pt : points)
        out << csv_num(pt.epsilon) << ',' << csv_num(pt.nu) << ',' << csv_num(pt.n) << ','
            << csv_num(pt.sigma) << ',' << pt.trials_total << ',' << pt.trials_valid << ','
            << csv_num(pt.mean_energy_fbl_j) << ',' << csv_num(pt.mean_energy_shannon_j) << ','
            << csv_num(pt.underestimated_j) << ',' << csv_num(pt.underestimated_pct) << "\n";
}

inline void write_policy_csv(const std::string& path, const std::vector<PolicyPoint>& points) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "sigma,trials,valid,mean_offline_mlwf_j,mean_offline_sum_j,mean_rolling_j,"
           "mean_myopic_j\n";
    for (const PolicyPoint& pt : points)
        out << csv_num(pt.sigma) << ',' << pt.trials_total << ',' << pt.trials_valid << ','
            << csv_num(pt.mean_offline_mlwf_j) << ',' << csv_num(pt.mean_offline_sum_j) << ','
            << csv_num(pt.mean_rolling_j) << ',' << csv_num(pt.mean_myopic_j) << "\n";
}

inline void write_policy_trials_csv(const std::string& path,
                                    const std::vector<PolicyPoint>& points) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "sigma,trial,valid,offline_mlwf_j,offline_sum_j,rolling_j,myopic_j\n";
    for (const PolicyPoint& pt : points)
        for (std::size_t i = 0; i < pt.trials.size(); ++i) {
            const PolicyTrial& t = pt.trials[i];
            out << csv_num(pt.sigma) << ',' << i << ',' << (t.valid ? 1 : 0) << ','
                << csv_num(t.offline_mlwf_j) << ',' << csv_num(t.offline_sum_j) << ','
                << csv_num(t.rolling_j) << ',' << csv_num(t.myopic_j) << "\n";
        }
}

/// online event log; the CSV dialect shared by run_online consumers
inline void write_event_csv(const std::string& path, const std::vector<OnlineEvent>& events) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "time,event,packet,m,p_watts,energy_joules\n";
    auto name = [](OnlineEvent::Kind k) {
        switch (k) {
            case OnlineEvent::Kind::Arrive: return "arrive";
            case OnlineEvent::Kind::Commit: return "commit";
            case OnlineEvent::Kind::Drop: return "drop";
            default: return "idle";
        }
    };
    for (const OnlineEvent& e : events)
        out << csv_num(e.time) << ',' << name(e.kind) << ',' << e.packet_id << ','
            << csv_num(e.blocklength) << ',' << csv_num(e.power) << ',' << csv_num(e.energy)
            << "\n";
}

// --------------------------------------------------------------------------
// Minimal SVG line plots (one polyline per series, log-x option)
// --------------------------------------------------------------------------

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

inline void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
                           const std::string& x_label, const std::string& y_label,
                           bool log_x = false) {
    if (series.empty()) throw IoError("svg plot: no series");
    const double W = 640, H = 420, L = 70, R = 20, T = 20, B = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;
    auto px = [&](double x) { return L + (tx(x) - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<line x1='" << L << "' y1='" << H - B << "' x2='" << W - R << "' y2='" << H - B
        << "' stroke='black'/>\n";
    out << "<line x1='" << L << "' y1='" << T << "' x2='" << L << "' y2='" << H - B
        << "' stroke='black'/>\n";
    out << "<text x='" << (L + (W - L - R) / 2) << "' y='" << H - 12
        << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
    out << "<text x='16' y='" << (T + (H - T - B) / 2)
        << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
        << (T + (H - T - B) / 2) << ")'>" << y_label << "</text>\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        out << "<polyline fill='none' stroke='" << colors[si % 5] << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        out << "'/>\n";
        out << "<text x='" << W - R - 8 << "' y='" << T + 16 + 16 * static_cast<double>(si)
            << "' text-anchor='end' font-size='12' fill='" << colors[si % 5] << "'>" << s.label
            << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace fbl
