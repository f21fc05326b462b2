#include <catch2/catch_amalgamated.hpp>

#include "fblsched/instance.hpp"
#include "fblsched/oracle.hpp"
#include "fblsched/traffic.hpp"

using namespace fbl;

namespace {
const Link kLink{};

Packet mk(double arrival, double deadline, double gain = 10.0, double eps = 5e-4) {
    return Packet{1.2e4, arrival, deadline, eps, gain};
}
} // namespace

TEST_CASE("single-packet instance and the pinched total", "[instance]") {
    ProblemInstance inst = validate_instance({mk(0, 1200)}, kLink);
    CHECK(inst.size() == 1);
    CHECK(inst.next_arrival(0) == 1200.0); // G_2 = D_1 convention
    CHECK(inst.lower[0] >= kLink.min_blocklength);
}

TEST_CASE("scheduling-interval splits are rejected", "[instance]") {
    // G_2 = 500 >= D_1 = 400: two independent problems, not one instance
    CHECK_THROWS_AS(validate_instance({mk(0, 400), mk(500, 900)}, kLink), ValidationError);
    try {
        validate_instance({mk(0, 400), mk(500, 900)}, kLink);
    } catch (const ValidationError& e) {
        CHECK(e.kind == ValidationError::Kind::NotSingleSchedulingInterval);
    }
}

TEST_CASE("FIFO violations are rejected, arrival ties allowed", "[instance]") {
    CHECK_THROWS_AS(validate_instance({mk(100, 2000), mk(0, 2500)}, kLink), ValidationError);
    CHECK_THROWS_AS(validate_instance({mk(0, 2500), mk(100, 2000)}, kLink), ValidationError);
    CHECK_NOTHROW(validate_instance({mk(0, 2000), mk(0, 2600)}, kLink)); // seeded queue shape
}

TEST_CASE("convex mode needs the convexity threshold", "[instance]") {
    // epsilon below the validity interval: tau >= sqrt(3)/3
    std::vector<Packet> packets = {{1.2e4, 0, 2000, 1e-17, 10.0}};
    CHECK_THROWS_AS(validate_instance(packets, kLink, BoundMode::Convex), TauOutOfRangeError);
    CHECK_NOTHROW(validate_instance(packets, kLink, BoundMode::General));
}

TEST_CASE("packet and link invariants", "[instance]") {
    CHECK_THROWS_AS(validate_instance({mk(0, 0)}, kLink), ValidationError);
    CHECK_THROWS_AS(validate_instance({mk(0, 1000, 10.0, 0.6)}, kLink), ValidationError);
    CHECK_THROWS_AS(validate_instance({mk(0, 1000, -1.0)}, kLink), ValidationError);
    CHECK_NOTHROW(validate_instance({mk(0, 1000, 10.0, 0.5)}, kLink)); // reference design
    Link bad = kLink;
    bad.min_blocklength = 50.0;
    CHECK_THROWS_AS(validate_instance({mk(0, 1000)}, bad), ValidationError);
}

TEST_CASE("generated instances validate", "[instance]") {
    TrafficModel traffic;
    traffic.packet_count = 5;
    ChannelModel chan;
    for (int t = 0; t < 10; ++t) {
        Rng g(derive_seed(5, 1, t)), l(derive_seed(5, 2, t)), c(derive_seed(5, 3, t));
        CHECK_NOTHROW(gen_instance(traffic, chan, kLink, g, l, c));
    }
}

TEST_CASE("sufficient feasibility implies a usable gap schedule", "[instance]") {
    // wide gaps, lifetimes inside g_E: the sufficient condition holds
    ProblemInstance inst =
        validate_instance({mk(0, 2300, 120), mk(1500, 3600, 80), mk(2900, 5200, 150)}, kLink);
    REQUIRE(feasible_sufficient(inst));
    CHECK(feasible_exact(inst));
    std::vector<double> m = feasible_start(inst);
    double cum = 0;
    for (std::size_t k = 0; k < inst.size(); ++k) {
        CHECK(m[k] >= inst.lower[k]);
        CHECK(m[k] <= inst.upper[k] + 1e-9);
        cum += m[k];
        CHECK(cum >= inst.next_arrival(k) - 1e-9);
        CHECK(cum <= inst.deadline(k) + 1e-9);
    }
}

TEST_CASE("sufficient condition fails when a window is below m_hat", "[instance]") {
    // single packet whose whole window is shorter than the minimum blocklength
    ProblemInstance inst = validate_instance({mk(0, 150, 1e6)}, kLink);
    CHECK_FALSE(feasible_sufficient(inst));
    CHECK_FALSE(feasible_exact(inst));
}

TEST_CASE("the sufficient condition is only sufficient", "[instance]") {
    // one tight arrival gap (100 < l_1) but a roomy corridor afterwards
    ProblemInstance inst = validate_instance({mk(0, 2000, 200), mk(100, 2500, 200)}, kLink);
    CHECK_FALSE(feasible_sufficient(inst));
    CHECK(feasible_exact(inst));
    CHECK_NOTHROW(feasible_start(inst));
}

TEST_CASE("an interior deadline can break exact feasibility", "[instance]") {
    // packet 2 must finish by 900 but l_1 + l_2 exceeds that
    ProblemInstance inst =
        validate_instance({mk(0, 600, 1e5), mk(300, 900, 1e5), mk(600, 4000, 1e5)}, kLink);
    REQUIRE(inst.lower[0] + inst.lower[1] > 900.0);
    CHECK_FALSE(feasible_exact(inst));
    CHECK_THROWS_AS(brute_force_oracle(inst, 1.0), InfeasibleError);
    CHECK_THROWS_AS(feasible_start(inst), InfeasibleError);
}

TEST_CASE("K=1 exact feasibility is the box test", "[instance]") {
    ProblemInstance ok = validate_instance({mk(0, 1200)}, kLink);
    CHECK(feasible_exact(ok) == (ok.lower[0] <= 1200.0 && 1200.0 <= ok.upper[0] + 1e-9));
    ProblemInstance tight = validate_instance({mk(0, 150, 1e6)}, kLink);
    CHECK_FALSE(feasible_exact(tight));
}

TEST_CASE("every sufficient instance is exactly feasible", "[instance]") {
    TrafficModel traffic;
    traffic.packet_count = 4;
    ChannelModel chan;
    int sufficient_seen = 0;
    for (int t = 0; t < 25; ++t) {
        Rng g(derive_seed(17, 1, t)), l(derive_seed(17, 2, t)), c(derive_seed(17, 3, t));
        ProblemInstance inst = gen_instance(traffic, chan, kLink, g, l, c);
        if (feasible_sufficient(inst)) {
            ++sufficient_seen;
            CHECK(feasible_exact(inst));
        }
    }
    CHECK(sufficient_seen > 0);
}
