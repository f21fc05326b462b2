#include <catch2/catch_amalgamated.hpp>

using Catch::Approx;

#include <cmath>

#include "fblsched/bounds.hpp"
#include "fblsched/shannon.hpp"

using namespace fbl;

namespace {
const Packet kPkt{1.2e4, 0.0, 2000.0, 5e-4, 10.0};
const Link kLink{};
} // namespace

TEST_CASE("blocklength thresholds at the reference parameters", "[bounds]") {
    // 30-digit reference values (independent Lambert-W + closed-form inverse)
    CHECK(monotone_energy_bound(kPkt, kLink) == Approx(16509.2457242305).epsilon(1e-9));
    CHECK(convexity_bound(kPkt, kLink) == Approx(3102.06307042519).epsilon(1e-9));
    CHECK(tau_parameter(kPkt, kLink) == Approx(0.232675376551352).margin(1e-12));
}

TEST_CASE("thresholds do not depend on the channel gain", "[bounds]") {
    Packet p = kPkt;
    double ge = monotone_energy_bound(p, kLink);
    double gc = convexity_bound(p, kLink);
    for (double h : {1.0, 100.0}) {
        p.gain = h;
        CHECK(monotone_energy_bound(p, kLink) == Approx(ge).epsilon(1e-9));
        CHECK(convexity_bound(p, kLink) == Approx(gc).epsilon(1e-9));
    }
}

TEST_CASE("monotone bound grows as tau shrinks", "[bounds]") {
    Packet p = kPkt;
    double prev = 0.0;
    // epsilon increasing toward 0.5 drives tau toward 0 and g_E upward
    for (double eps : {1e-6, 1e-4, 1e-2, 0.1, 0.3}) {
        p.epsilon = eps;
        double ge = monotone_energy_bound(p, kLink);
        CHECK(ge > prev);
        prev = ge;
    }
    p.epsilon = 0.5;
    CHECK(std::isinf(monotone_energy_bound(p, kLink)));
}

TEST_CASE("convex threshold stays below the monotone threshold", "[bounds]") {
    // observed property across the tested parameter range, not assumed
    Packet p = kPkt;
    for (double eps : {1e-8, 1e-5, 5e-4, 5e-2, 0.2}) {
        for (double bits : {2e3, 1.2e4, 5e4}) {
            p.epsilon = eps;
            p.bits = bits;
            CHECK(convexity_bound(p, kLink) < monotone_energy_bound(p, kLink));
        }
    }
}

TEST_CASE("tau = 0 limit of the convexity threshold", "[bounds]") {
    CHECK(convexity_eta(0.0) == Approx(1.5));
    Packet sh = kPkt;
    sh.epsilon = 0.5;
    double expected = blocklength_of_snr(std::exp(1.5) - 1.0, sh);
    CHECK(convexity_bound(sh, kLink) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("tau outside its range is rejected", "[bounds]") {
    Packet p = kPkt;
    p.epsilon = 1e-17; // below the m_hat = 200 validity interval
    CHECK_THROWS_AS(convexity_bound(p, kLink), TauOutOfRangeError);
}

TEST_CASE("epsilon validity interval endpoint", "[bounds]") {
    auto [lo, hi] = epsilon_validity_interval(200.0);
    CHECK(lo == Approx(1.60763136369357e-16).epsilon(1e-10));
    CHECK(hi == 0.5);
    // Remark-style sanity: the endpoint maps back to tau = sqrt(3)/3
    CHECK(gaussian_q_inv(lo) / std::sqrt(200.0) ==
          Approx(std::sqrt(3.0) / 3.0).epsilon(1e-9));
}

TEST_CASE("compute_bounds assembles the box", "[bounds]") {
    BlocklengthBounds b = compute_bounds(kPkt, kLink);
    CHECK(b.lower == std::max(kLink.min_blocklength, b.power_limited));
    CHECK(b.power_limited ==
          Approx(blocklength_of_power(kLink.max_power, kPkt)).epsilon(1e-12));
    REQUIRE(b.convex_upper.has_value());
    CHECK(b.upper(true) == std::min(b.monotone_upper, *b.convex_upper));
    CHECK(b.upper(false) == b.monotone_upper);
}

TEST_CASE("shannon closed forms", "[shannon]") {
    Packet sh = kPkt;
    sh.epsilon = 0.5;

    SECTION("power inversion") {
        double m = sh.bits / std::log2(1.0 + kLink.max_power * sh.gain);
        CHECK(shannon_power(m, sh) == Approx(kLink.max_power).epsilon(1e-12));
    }

    SECTION("phi inverts the marginal energy") {
        for (double m : {1200.0, 2000.0, 3500.0, 9000.0}) {
            double omega = shannon_energy_derivative(m, sh);
            CHECK(shannon_phi(omega, sh) == Approx(m).epsilon(1e-10));
        }
    }

    SECTION("derivative of the closed-form energy") {
        for (double m : {900.0, 1500.0, 4000.0}) {
            double h = 1e-5 * m;
            double fd = (shannon_energy(m + h, sh) - shannon_energy(m - h, sh)) / (2 * h);
            CHECK(shannon_energy_derivative(m, sh) == Approx(fd).epsilon(1e-8));
        }
    }

    SECTION("branch violation") {
        CHECK_THROWS_AS(shannon_phi(1.0, sh), std::domain_error); // omega > 0
    }
}
