#pragma once

#include <cstddef>
#include <sstream>
#include <vector>

#include "fblsched/bounds.hpp"
#include "fblsched/types.hpp"

namespace fbl {

enum class BoundMode {
    Convex,  // u_k = min(g_E, g_C): problem provably strictly convex
    General, // u_k = g_E only: stationarity claims, no optimality
};

/// A validated K-packet scheduling problem with per-packet blocklength
/// boxes.  The cumulative-airtime corridor for prefix k is
/// [next_arrival(k), deadline(k)], with next_arrival(K-1) = D_{K-1} by the
/// G_{K+1} = D_K convention (the final prefix is pinched).
struct ProblemInstance {
    std::vector<Packet> packets;
    Link link;
    BoundMode mode = BoundMode::Convex;
    std::vector<BlocklengthBounds> bounds;
    std::vector<double> lower; // l_k
    std::vector<double> upper; // u_k per mode

    std::size_t size() const { return packets.size(); }

    double next_arrival(std::size_t k) const {
        return k + 1 < packets.size() ? packets[k + 1].arrival : packets.back().deadline;
    }
    double deadline(std::size_t k) const { return packets[k].deadline; }
};

/// Checks FIFO ordering, the single-scheduling-interval property, and all
/// per-packet invariants, then populates the blocklength boxes.
/// Arrival ties are allowed (rolling windows and seeded queues place
/// several packets at time zero); deadlines must strictly increase.
inline ProblemInstance validate_instance(std::vector<Packet> packets, const Link& link,
                                         BoundMode mode = BoundMode::Convex) {
    if (packets.empty())
        throw ValidationError(ValidationError::Kind::BadPacket, "instance has no packets");
    link.validate();
    for (std::size_t k = 0; k < packets.size(); ++k) packets[k].validate();

    for (std::size_t k = 0; k + 1 < packets.size(); ++k) {
        if (packets[k + 1].arrival < packets[k].arrival ||
            packets[k + 1].deadline <= packets[k].deadline) {
            std::ostringstream os;
            os << "FIFO violated between packets " << k << " and " << k + 1
               << ": arrivals must be non-decreasing and deadlines strictly increasing";
            throw ValidationError(ValidationError::Kind::NotFifo, os.str());
        }
        if (packets[k + 1].arrival >= packets[k].deadline) {
            std::ostringstream os;
            os << "packets " << k << " and " << k + 1 << " do not share a scheduling interval"
               << " (G_" << k + 2 << " = " << packets[k + 1].arrival << " >= D_" << k + 1
               << " = " << packets[k].deadline << "); split the instance there";
            throw ValidationError(ValidationError::Kind::NotSingleSchedulingInterval, os.str());
        }
    }

    ProblemInstance inst;
    inst.packets = std::move(packets);
    inst.link = link;
    inst.mode = mode;
    inst.bounds.reserve(inst.packets.size());
    for (const Packet& p : inst.packets) {
        BlocklengthBounds b = compute_bounds(p, link);
        if (mode == BoundMode::Convex && !b.convex_upper)
            throw TauOutOfRangeError("validate_instance: convex mode requires tau < sqrt(3)/3");
        inst.lower.push_back(b.lower);
        // m_k <= D_k - G_k is implied by the corridor; capping the box there
        // keeps every search bracket finite (g_E is +inf at eps = 0.5)
        inst.upper.push_back(
            std::min(b.upper(mode == BoundMode::Convex), p.deadline - p.arrival));
        inst.bounds.push_back(std::move(b));
    }
    return inst;
}

/// Sufficient feasibility condition: every arrival gap covers the lower
/// box bound and every lifetime stays within g_E.  When true, the gap
/// schedule m_k = G_{k+1} - G_k is feasible (and a useful warm start).
inline bool feasible_sufficient(const ProblemInstance& inst) {
    for (std::size_t k = 0; k < inst.size(); ++k) {
        double gap = inst.next_arrival(k) - inst.packets[k].arrival;
        if (gap < inst.lower[k]) return false;
        if (inst.packets[k].deadline - inst.packets[k].arrival > inst.bounds[k].monotone_upper)
            return false;
        if (gap > inst.upper[k]) return false; // gap point must also respect the box
    }
    return true;
}

/// Exact ladder feasibility by twin forward recursions: the minimal
/// cumulative ladder must clear every deadline and the maximal ladder must
/// reach every arrival.
inline bool feasible_exact(const ProblemInstance& inst) {
    const std::size_t K = inst.size();
    for (std::size_t k = 0; k < K; ++k)
        if (inst.lower[k] > inst.upper[k]) return false;

    double cmin = 0.0, cmax = 0.0;
    const double slack = 1e-9;
    for (std::size_t k = 0; k < K; ++k) {
        cmin = std::max(inst.next_arrival(k), cmin + inst.lower[k]);
        cmax = std::min(inst.deadline(k), cmax + inst.upper[k]);
        if (cmin > inst.deadline(k) + slack) return false;
        if (cmax < inst.next_arrival(k) - slack) return false;
        if (cmin > cmax + slack) return false;
    }
    return true;
}

/// A feasible blocklength vector: the gap schedule when the sufficient
/// condition holds, otherwise a backward pass through the corridor
/// intervals.  Throws InfeasibleError when feasible_exact fails.
inline std::vector<double> feasible_start(const ProblemInstance& inst) {
    const std::size_t K = inst.size();
    if (feasible_sufficient(inst)) {
        std::vector<double> m(K);
        for (std::size_t k = 0; k < K; ++k)
            m[k] = inst.next_arrival(k) - inst.packets[k].arrival;
        return m;
    }
    if (!feasible_exact(inst)) throw InfeasibleError("feasible_start: empty constraint set");

    // forward corridor intervals for the cumulative sums
    std::vector<double> lo(K), hi(K);
    double cmin = 0.0, cmax = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        cmin = std::max(inst.next_arrival(k), cmin + inst.lower[k]);
        cmax = std::min(inst.deadline(k), cmax + inst.upper[k]);
        lo[k] = cmin;
        hi[k] = std::min(cmax, inst.deadline(k));
    }
    // backward pass: pick each cumulative point inside the corridor and
    // reachable from its successor
    std::vector<double> c(K);
    c[K - 1] = inst.packets.back().deadline; // pinched at D_K
    for (std::size_t k = K - 1; k > 0; --k) {
        double lok = std::max(lo[k - 1], c[k] - inst.upper[k]);
        double hik = std::min(hi[k - 1], c[k] - inst.lower[k]);
        c[k - 1] = 0.5 * (lok + hik);
    }
    std::vector<double> m(K);
    double prev = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        m[k] = c[k] - prev;
        prev = c[k];
    }
    return m;
}

} // namespace fbl
