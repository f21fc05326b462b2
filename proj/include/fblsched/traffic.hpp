#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fblsched/instance.hpp"
#include "fblsched/rng.hpp"
#include "fblsched/types.hpp"

namespace fbl {

/// Traffic generator parameters: arrival gaps are truncated-exponential
/// with mean nu*m_hat on [(nu-1), (nu+1)]*m_hat, packet lifetimes with
/// mean n*m_hat on [(n-1), (n+1)]*m_hat.  3 < nu <= n-2 guarantees the
/// FIFO rule and the single-scheduling-interval property.
struct TrafficModel {
    double nu = 6.0;
    double n = 10.0;
    double m_hat = 200.0;
    std::size_t packet_count = 5;
    double bits = 1.2e4;
    double epsilon = 5e-4;
    std::size_t pre_arrived = 0; // packets queued at t = 0 (deadlines staggered)

    void validate() const {
        if (!(nu > 3.0 && nu <= n - 2.0))
            throw std::invalid_argument("traffic model requires 3 < nu <= n - 2");
        if (!(m_hat > 0) || packet_count == 0 || !(bits > 0))
            throw std::invalid_argument("traffic model: bad sizes");
        if (!(epsilon > 0 && epsilon <= 0.5))
            throw std::invalid_argument("traffic model: epsilon outside (0, 0.5]");
        if (pre_arrived >= packet_count + 1)
            throw std::invalid_argument("traffic model: too many pre-arrived packets");
    }

    TruncatedExponential gap_distribution() const {
        return TruncatedExponential::with_mean((nu - 1.0) * m_hat, (nu + 1.0) * m_hat,
                                               nu * m_hat);
    }
    TruncatedExponential lifetime_distribution() const {
        return TruncatedExponential::with_mean((n - 1.0) * m_hat, (n + 1.0) * m_hat, n * m_hat);
    }
};

/// Rayleigh fading: per-packet gain h_k = |h~_k|^2, |h~_k| ~ Rayleigh(sigma),
/// constant over the packet (quasi-static block fading).
struct ChannelModel {
    double sigma = 10.0;

    void validate() const {
        if (!(sigma > 0)) throw std::invalid_argument("channel model: sigma must be > 0");
    }
};

/// Draws one problem instance: arrival gaps, lifetimes and channel gains
/// from their separate streams (so sweeps over one parameter reuse the
/// other draws).  Pre-arrived packets modeled as early arrivals: the trace
/// is generated as usual, then their arrivals are zeroed while the
/// deadlines keep their process positions (a backlog queued at t = 0).
inline ProblemInstance gen_instance(const TrafficModel& traffic, const ChannelModel& channel,
                                    const Link& link, Rng& gap_rng, Rng& lifetime_rng,
                                    Rng& channel_rng, BoundMode mode = BoundMode::Convex) {
    traffic.validate();
    channel.validate();
    TruncatedExponential gaps = traffic.gap_distribution();
    TruncatedExponential lifetimes = traffic.lifetime_distribution();

    const std::size_t K = traffic.packet_count;
    const std::size_t pre = std::min(traffic.pre_arrived, K);
    std::vector<double> arrival(K), deadline(K);

    for (int attempt = 0;; ++attempt) {
        if (attempt >= 200) throw Error("gen_instance: could not draw a valid trace");
        bool ok = true;
        double t = 0.0, prev_deadline = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            if (k > 0) t += gaps.sample(gap_rng);
            arrival[k] = t;
            deadline[k] = t + lifetimes.sample(lifetime_rng);
            if (deadline[k] <= prev_deadline || (k > 0 && arrival[k] >= deadline[k - 1])) {
                ok = false;
                break;
            }
            prev_deadline = deadline[k];
        }
        if (ok) break;
    }
    // pre-queued packets arrived early: available at time zero, deadlines
    // keep their process positions
    for (std::size_t k = 0; k < pre; ++k) arrival[k] = 0.0;

    std::vector<Packet> packets(K);
    for (std::size_t k = 0; k < K; ++k) {
        packets[k].bits = traffic.bits;
        packets[k].arrival = arrival[k];
        packets[k].deadline = deadline[k];
        packets[k].epsilon = traffic.epsilon;
        packets[k].gain = sample_squared_rayleigh(channel_rng, channel.sigma);
    }
    return validate_instance(std::move(packets), link, mode);
}

} // namespace fbl
