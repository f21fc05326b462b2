#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "fblsched/bounds.hpp"
#include "fblsched/instance.hpp"
#include "fblsched/solver.hpp"

namespace fbl {

enum class OnlinePolicy { RollingWindow, Myopic };

struct Commitment {
    std::size_t packet_id = 0;
    double start = 0;       // symbols
    double blocklength = 0; // m
    double power = 0;       // watts
    double energy = 0;      // watt-symbols
};

struct OnlineEvent {
    enum class Kind { Arrive, Commit, Drop, Idle };
    double time = 0;
    Kind kind = Kind::Arrive;
    std::size_t packet_id = 0;
    double blocklength = 0;
    double power = 0;
    double energy = 0; // watt-symbols
    std::string note;
};

/// Sequential state of the real-time scheduler: committed transmissions
/// never overlap, never start before the packet arrival and never cross
/// the packet deadline.
struct OnlineState {
    double now = 0;
    std::deque<std::size_t> queue; // arrived, unscheduled (FIFO)
    std::vector<Commitment> committed;
    std::vector<std::size_t> dropped;
    std::size_t next_arrival = 0; // index into the packet stream
};

struct OnlineResult {
    std::vector<Commitment> committed;
    std::vector<OnlineEvent> events;
    std::size_t drops = 0;
    double objective = 0;     // watt-symbols over committed packets
    double energy_joules = 0; // objective * T_s
    bool complete() const { return drops == 0; }
};

namespace detail {

inline void admit_arrivals(OnlineState& state, const std::vector<Packet>& packets,
                           std::vector<OnlineEvent>& events) {
    while (state.next_arrival < packets.size() &&
           packets[state.next_arrival].arrival <= state.now + 1e-12) {
        events.push_back({packets[state.next_arrival].arrival, OnlineEvent::Kind::Arrive,
                          state.next_arrival, 0, 0, 0, ""});
        state.queue.push_back(state.next_arrival);
        ++state.next_arrival;
    }
}

} // namespace detail

/// One rolling-window decision: re-optimize over every arrived-and-
/// unscheduled packet (arrivals shifted to zero, deadlines to D_i - t),
/// commit only the head packet's blocklength and advance time by it.
/// Returns the commitment, or nullopt when the window is infeasible and
/// the head packet was dropped.
inline std::optional<Commitment> rolling_window_step(OnlineState& state,
                                                     const std::vector<Packet>& packets,
                                                     const Link& link, const SolverConfig& cfg,
                                                     std::vector<OnlineEvent>& events) {
    std::size_t head = state.queue.front();
    std::vector<Packet> window;
    window.reserve(state.queue.size());
    for (std::size_t id : state.queue) {
        Packet p = packets[id];
        p.arrival = 0;
        p.deadline = packets[id].deadline - state.now;
        window.push_back(p);
    }

    auto drop_head = [&](const std::string& why) -> std::optional<Commitment> {
        state.queue.pop_front();
        state.dropped.push_back(head);
        events.push_back({state.now, OnlineEvent::Kind::Drop, head, 0, 0, 0, why});
        return std::nullopt;
    };

    if (window.front().deadline <= 0) return drop_head("deadline passed");
    ProblemInstance sub;
    try {
        sub = validate_instance(std::move(window), link,
                                cfg.mode == SolverConfig::Mode::Sum ? BoundMode::General
                                                                    : BoundMode::Convex);
    } catch (const Error&) {
        return drop_head("window rejected");
    }
    if (!feasible_exact(sub)) return drop_head("window infeasible");

    Schedule sched =
        cfg.mode == SolverConfig::Mode::Sum ? solve_sum(sub, cfg) : solve_mlwf(sub, cfg);

    Commitment c;
    c.packet_id = head;
    c.start = state.now;
    c.blocklength = sched.blocklengths[0];
    c.power = sched.powers[0];
    c.energy = sched.energies[0];
    state.queue.pop_front();
    state.committed.push_back(c);
    state.now += c.blocklength;
    events.push_back({c.start, OnlineEvent::Kind::Commit, head, c.blocklength, c.power,
                      c.energy * link.symbol_duration, ""});
    return c;
}

/// Myopic baseline: stretch the head packet to its deadline
/// (m = D - t, clipped to [l, g_E]); ignores every queued successor.
inline std::optional<Commitment> myopic_step(OnlineState& state,
                                             const std::vector<Packet>& packets, const Link& link,
                                             std::vector<OnlineEvent>& events) {
    std::size_t head = state.queue.front();
    const Packet& pkt = packets[head];
    BlocklengthBounds b = compute_bounds(pkt, link);
    double m = pkt.deadline - state.now;
    if (m < b.lower) {
        state.queue.pop_front();
        state.dropped.push_back(head);
        events.push_back({state.now, OnlineEvent::Kind::Drop, head, 0, 0, 0, "window too short"});
        return std::nullopt;
    }
    m = std::min(m, b.monotone_upper);

    Commitment c;
    c.packet_id = head;
    c.start = state.now;
    c.blocklength = m;
    c.power = power_of_blocklength(m, pkt, link);
    c.energy = m * c.power;
    state.queue.pop_front();
    state.committed.push_back(c);
    state.now += m;
    events.push_back({c.start, OnlineEvent::Kind::Commit, head, m, c.power,
                      c.energy * link.symbol_duration, ""});
    return c;
}

/// Replays an arrival stream through the chosen policy.  Deterministic:
/// identical inputs give identical event logs.  Packets whose window
/// becomes infeasible are dropped with a logged diagnostic.
inline OnlineResult run_online(const std::vector<Packet>& packets, const Link& link,
                               OnlinePolicy policy, const SolverConfig& cfg = {}) {
    OnlineState state;
    OnlineResult result;
    detail::admit_arrivals(state, packets, result.events);

    while (!state.queue.empty() || state.next_arrival < packets.size()) {
        if (state.queue.empty()) {
            // idle until the next arrival (no-idling binds only within a busy period)
            state.now = packets[state.next_arrival].arrival;
            result.events.push_back(
                {state.now, OnlineEvent::Kind::Idle, state.next_arrival, 0, 0, 0, ""});
            detail::admit_arrivals(state, packets, result.events);
            continue;
        }
        if (policy == OnlinePolicy::RollingWindow)
            rolling_window_step(state, packets, link, cfg, result.events);
        else
            myopic_step(state, packets, link, result.events);
        detail::admit_arrivals(state, packets, result.events);
    }

    result.committed = state.committed;
    result.drops = state.dropped.size();
    for (const Commitment& c : state.committed) result.objective += c.energy;
    result.energy_joules = result.objective * link.symbol_duration;
    return result;
}

} // namespace fbl
