#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mmv/rng.hpp"
#include "oracles.hpp"

using mmv::Complex;
using mmv::RandomStream;

TEST_CASE("streams are deterministic and trial streams are distinct") {
    RandomStream a(42);
    RandomStream b(42);
    for (int t = 0; t < 100; ++t) CHECK(a.next_u64() == b.next_u64());

    RandomStream t0 = RandomStream::for_trial(7, 0);
    RandomStream t0_again = RandomStream::for_trial(7, 0);
    RandomStream t1 = RandomStream::for_trial(7, 1);
    CHECK(t0.next_u64() == t0_again.next_u64());
    CHECK(RandomStream::for_trial(7, 2).next_u64() != t1.next_u64());
    CHECK(RandomStream::for_trial(8, 0).next_u64() != RandomStream::for_trial(7, 0).next_u64());
}

TEST_CASE("uniform lies in [0,1) with the right mean") {
    RandomStream rng(1);
    double sum = 0.0;
    const int n = 200000;
    for (int t = 0; t < n; ++t) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / n == Catch::Approx(0.5).margin(0.005));
}

TEST_CASE("normal moments") {
    RandomStream rng(2);
    const std::size_t n = 400000;
    std::vector<double> xs(n);
    for (double& x : xs) x = rng.normal();
    const auto [mean, se] = oracles::sample_mean(xs);
    CHECK(std::abs(mean) <= 4.0 * se);

    double var = 0.0;
    for (double x : xs) var += x * x;
    var /= n;
    CHECK(var == Catch::Approx(1.0).margin(0.02));
}

TEST_CASE("complex_normal is circular with the requested variance") {
    RandomStream rng(3);
    const double variance = 2.5;
    const std::size_t n = 400000;
    double power = 0.0;
    double re_var = 0.0;
    Complex mean(0.0, 0.0);
    Complex pseudo(0.0, 0.0);  // E[z^2] vanishes for circular laws
    for (std::size_t t = 0; t < n; ++t) {
        const Complex z = rng.complex_normal(variance);
        power += std::norm(z);
        re_var += z.real() * z.real();
        mean += z;
        pseudo += z * z;
    }
    power /= n;
    re_var /= n;
    mean /= static_cast<double>(n);
    pseudo /= static_cast<double>(n);

    CHECK(power == Catch::Approx(variance).epsilon(0.02));
    CHECK(re_var == Catch::Approx(variance / 2.0).epsilon(0.03));
    CHECK(std::abs(mean) <= 0.02);
    CHECK(std::abs(pseudo) <= 0.03);

    CHECK(rng.complex_normal(0.0) == Complex(0.0, 0.0));
    CHECK_THROWS_AS(rng.complex_normal(-1.0), std::invalid_argument);
}

TEST_CASE("inverse Gaussian moments") {
    RandomStream rng(4);

    // IG(mean, shape): E[X] = mean, Var[X] = mean^3 / shape.
    for (const auto [mean_p, shape] : {std::pair{1.0, 0.1}, std::pair{1.0, 2.0}, std::pair{2.0, 3.0}}) {
        const std::size_t n = 400000;
        std::vector<double> xs(n);
        for (double& x : xs) {
            x = rng.inverse_gaussian(mean_p, shape);
            REQUIRE(x > 0.0);
        }
        const auto [mean, se] = oracles::sample_mean(xs);
        CHECK(std::abs(mean - mean_p) <= 4.0 * se);

        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= n;
        CHECK(var == Catch::Approx(mean_p * mean_p * mean_p / shape).epsilon(0.15));
    }

    // Large shape concentrates at the mean.
    double spread = 0.0;
    for (int t = 0; t < 1000; ++t) spread = std::max(spread, std::abs(rng.inverse_gaussian(1.0, 1e6) - 1.0));
    CHECK(spread <= 0.02);

    CHECK_THROWS_AS(rng.inverse_gaussian(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(rng.inverse_gaussian(1.0, 0.0), std::invalid_argument);
}
