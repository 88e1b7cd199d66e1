#include <doctest.h>

#include <cmath>
#include <random>

#include "wavelab/exponents.hpp"

using namespace wavelab;

TEST_CASE("validate accepts and rejects the documented examples") {
    CHECK_NOTHROW(validate(3, 3.0, -0.2));
    CHECK(a_min(3, 3.0) == -0.25);  // ((d-2)p-d) = 0, exact in floating point
    CHECK_THROWS_AS(validate(3, 3.0, -0.25), PotentialBelowThreshold);
    CHECK_NOTHROW(validate(3, 3.0, 0.0));
    CHECK_THROWS_AS(validate(2, 3.0, 0.0), DimensionOutOfRange);
    CHECK_THROWS_AS(validate(7, 2.0, 0.0), DimensionOutOfRange);
    CHECK_THROWS_AS(validate(3, 5.0, 0.0), ExponentOutOfRange);   // p = p_e excluded
    CHECK_THROWS_AS(validate(3, 2.9, 0.0), ExponentOutOfRange);   // below conformal
    CHECK_NOTHROW(validate(3, 5.0 - 1e-9, 0.0));
}

TEST_CASE("errors carry the violated bound") {
    try {
        validate(3, 3.0, -0.3);
        CHECK(false);
    } catch (const PotentialBelowThreshold& e) {
        CHECK(e.threshold == doctest::Approx(-0.25).epsilon(1e-14));
    }
}

TEST_CASE("derive reproduces the closed-form oracle values") {
    // frozen values computed with a 30-digit mpmath evaluation of the formulas
    const auto c = derive(validate(3, 3.0, -0.2));
    CHECK(c.s_p == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c.sigma == doctest::Approx(0.276393202250021).epsilon(1e-13));
    CHECK(c.lambda_d == 0.0);
    CHECK(c.mu_d == 2.0);
    CHECK(c.kappa_0 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c.beta == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(c.a_min == -0.25);
    CHECK(c.c_d == doctest::Approx(12.566370614359172).epsilon(1e-14));
    CHECK(c.hardy_const == doctest::Approx(0.25).epsilon(1e-14));

    const auto c5 = derive(validate(5, 2.0, 0.0));
    CHECK(c5.kappa_0 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(c5.beta == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(1.0 - c5.kappa_0 == doctest::Approx(2.0 * c5.beta).epsilon(1e-14));
    CHECK(c5.a_min == doctest::Approx(-2.1875).epsilon(1e-14));

    // sigma vanishes at a = 0 in every dimension
    for (int d = 3; d <= 6; ++d) {
        const double p = 0.5 * (p_conf(d) + p_energy_critical(d));
        CHECK(derive(validate(d, p, 0.0)).sigma == doctest::Approx(0.0).epsilon(1e-15));
    }
    // surface areas from the Gamma formula
    CHECK(sphere_area(3) == doctest::Approx(4.0 * M_PI).epsilon(1e-14));
    CHECK(sphere_area(4) == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-14));
    CHECK(sphere_area(5) == doctest::Approx(8.0 * M_PI * M_PI / 3.0).epsilon(1e-13));
    CHECK(sphere_area(6) == doctest::Approx(std::pow(M_PI, 3)).epsilon(1e-13));
}

TEST_CASE("closed-form identities hold over random valid parameters") {
    std::mt19937_64 rng(0x5eed0001);
    std::uniform_int_distribution<int> dd(3, 6);
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    int count = 0;
    for (int k = 0; k < 10000; ++k) {
        const int d = dd(rng);
        const double p = p_conf(d) + uu(rng) * (p_energy_critical(d) - p_conf(d)) * 0.999999;
        const double a = a_min(d, p) + 1e-9 + uu(rng) * 5.0;
        const auto c = derive(validate(d, p, a));
        CHECK(std::abs(1.0 - c.kappa_0 - 2.0 * c.beta) <= 1e-12);
        CHECK(c.mu_d + a - 2.0 * c.sigma >= 0.75 - 1e-12);
        // a = sigma^2 - (d-2) sigma inverts the definition of sigma
        const double a_back = c.sigma * c.sigma - (d - 2) * c.sigma;
        CHECK(std::abs(a_back - a) <= 1e-12 * std::max(1.0, std::abs(a)));
        CHECK(c.beta > 0.0);
        CHECK(c.beta < 0.5);
        CHECK(c.sigma < 0.5 * (d - 2));
        ++count;
    }
    CHECK(count == 10000);
}

TEST_CASE("sigma is strictly decreasing in a") {
    double prev = 1e300;
    for (double a = -0.24; a < 3.0; a += 0.1) {
        const double s = derive(validate(3, 3.0, a)).sigma;
        CHECK(s < prev);
        prev = s;
    }
}

TEST_CASE("a_min is increasing in p at fixed d") {
    for (int d = 3; d <= 6; ++d) {
        double prev = -1e300;
        for (int k = 0; k <= 20; ++k) {
            const double p = p_conf(d) +
                             (p_energy_critical(d) - p_conf(d)) * (k / 20.0) * 0.999;
            const double am = a_min(d, p);
            CHECK(am >= prev - 1e-15);
            prev = am;
        }
    }
}

TEST_CASE("strichartz admissibility follows the displayed conditions") {
    // gamma window endpoints for d=3, a=-0.2, q=8 evaluated by the oracle
    // script: (-0.931782106, 1.098606798)
    auto r = strichartz_admissible(3, 8.0, 8.0, 1.0, -0.2);
    CHECK(r.admissible);

    r = strichartz_admissible(3, 2.0, 1e6, 1.5 - 3.0 / 1e6 - 0.5, -0.2);
    CHECK(!r.admissible);
    bool q_violation = false;
    for (const auto& v : r.violated) q_violation |= v.find("q > 2") != std::string::npos;
    CHECK(q_violation);

    const double inf = std::numeric_limits<double>::infinity();
    r = strichartz_admissible(4, inf, 2.0, 0.0, 0.0);
    CHECK(r.admissible);  // energy pairing

    // gamma just above the d=3 upper endpoint sqrt(a+1/4)+1-1/q must fail
    const double hi = std::sqrt(-0.2 + 0.25) + 1.0 - 0.125;
    r = strichartz_admissible(3, 8.0, 8.0, hi + 1e-6, -0.2);
    // scaling forces gamma, so pass the matching r for this gamma instead:
    // use the pure window check through a consistent pair
    CHECK(!r.admissible);

    // boundary flagging: a triple sitting exactly on the admissible equality
    r = strichartz_admissible(5, 2.0, 4.0, 0.5 * 5 - 0.5 - 5.0 / 4.0, 0.0);
    CHECK(!r.near_boundary.empty());
}

TEST_CASE("nonlinearity triple matches the stated exponents") {
    auto t = nonlinearity_triple(3, 4.0);
    CHECK(t.q == doctest::Approx(8.0));
    CHECK(t.r == doctest::Approx(8.0));
    CHECK(t.gamma == 1.0);

    t = nonlinearity_triple(3, 3.0);
    CHECK(std::isinf(t.q));
    CHECK(t.r == doctest::Approx(6.0));

    // (d-2)p - d = 2 at (6,2), so q = 2p/2 = 2 (the q >= 2 boundary)
    t = nonlinearity_triple(6, 2.0);
    CHECK(t.q == doctest::Approx(2.0));
    CHECK(t.r == doctest::Approx(4.0));

    // scaling relation 1/q + d/r = d/2 - gamma with gamma = 1, over the range
    for (int d = 3; d <= 6; ++d) {
        for (int k = 0; k <= 10; ++k) {
            const double p = p_conf(d) +
                             (p_energy_critical(d) - p_conf(d)) * (k / 10.0) * 0.999;
            const auto tr = nonlinearity_triple(d, p);
            const double lhs = inv_q(tr.q) + d / tr.r;
            CHECK(std::abs(lhs - (0.5 * d - tr.gamma)) <= 1e-12);
        }
    }
}
