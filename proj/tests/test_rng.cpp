#include <catch2/catch_amalgamated.hpp>

using Catch::Approx;

#include <algorithm>
#include <cmath>
#include <vector>

#include "fblsched/rng.hpp"

using namespace fbl;

TEST_CASE("substream seeds separate streams and indices", "[rng]") {
    CHECK(derive_seed(1, 1, 0) != derive_seed(1, 1, 1));
    CHECK(derive_seed(1, 1, 0) != derive_seed(1, 2, 0));
    CHECK(derive_seed(1, 1, 0) != derive_seed(2, 1, 0));
    CHECK(derive_seed(7, 3, 42) == derive_seed(7, 3, 42));

    Rng a(derive_seed(9, 1, 5)), b(derive_seed(9, 1, 5));
    for (int i = 0; i < 100; ++i) CHECK(a.u01() == b.u01());
}

TEST_CASE("truncated exponential hits the requested mean", "[rng]") {
    const double mhat = 200.0, nu = 6.0;
    TruncatedExponential d =
        TruncatedExponential::with_mean((nu - 1) * mhat, (nu + 1) * mhat, nu * mhat);
    CHECK(d.mean() == Approx(nu * mhat).margin(1e-6));

    Rng rng(derive_seed(12, 1, 0));
    const int n = 100000;
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        double v = d.sample(rng);
        REQUIRE(v >= (nu - 1) * mhat);
        REQUIRE(v <= (nu + 1) * mhat);
        sum += v;
    }
    CHECK(sum / n == Approx(nu * mhat).epsilon(0.01));
}

TEST_CASE("asymmetric windows give a genuinely exponential shape", "[rng]") {
    // mean pulled toward the lower end forces a positive rate
    TruncatedExponential d = TruncatedExponential::with_mean(0.0, 1.0, 0.3);
    CHECK(d.rate() > 1.0);
    CHECK(d.mean() == Approx(0.3).margin(1e-9));
    Rng rng(derive_seed(12, 2, 0));
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += d.sample(rng);
    CHECK(sum / n == Approx(0.3).epsilon(0.01));
    // quantile/cdf consistency
    for (double u : {0.01, 0.2, 0.5, 0.8, 0.99})
        CHECK(d.cdf(d.quantile(u)) == Approx(u).margin(1e-12));
}

TEST_CASE("kolmogorov-smirnov against the analytic cdf", "[rng]") {
    const double mhat = 200.0, nu = 6.0;
    TruncatedExponential d =
        TruncatedExponential::with_mean((nu - 1) * mhat, (nu + 1) * mhat, nu * mhat);
    Rng rng(derive_seed(12, 3, 0));
    const int n = 100000;
    std::vector<double> xs(n);
    for (double& x : xs) x = d.sample(rng);
    std::sort(xs.begin(), xs.end());
    double dn = 0;
    for (int i = 0; i < n; ++i) {
        double f = d.cdf(xs[i]);
        dn = std::max(dn, std::abs(f - (i + 1.0) / n));
        dn = std::max(dn, std::abs(f - static_cast<double>(i) / n));
    }
    // 1% significance critical value for large n
    CHECK(dn < 1.6276 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("squared rayleigh gain has mean 2 sigma^2", "[rng]") {
    for (double sigma : {3.0, 10.0}) {
        Rng rng(derive_seed(13, 1, static_cast<std::uint64_t>(sigma)));
        const int n = 100000;
        double sum = 0;
        for (int i = 0; i < n; ++i) {
            double h = sample_squared_rayleigh(rng, sigma);
            REQUIRE(h > 0.0);
            sum += h;
        }
        CHECK(sum / n == Approx(2.0 * sigma * sigma).epsilon(0.01));
    }
}
