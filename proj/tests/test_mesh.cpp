#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle_quadrature.hpp"
#include "wavelab/mesh.hpp"

using namespace wavelab;

namespace {

PhysicalState sample_state(const RadialGrid& g, const std::function<double(double)>& u,
                           const std::function<double(double)>& ur,
                           const std::function<double(double)>& ut) {
    PhysicalState s;
    s.u.resize(g.nodes());
    s.ur.resize(g.nodes());
    s.ut.resize(g.nodes());
    for (int j = 0; j <= g.n; ++j) {
        s.u[j] = u(g.r(j));
        s.ur[j] = ur(g.r(j));
        s.ut[j] = ut(g.r(j));
    }
    return s;
}

} // namespace

TEST_CASE("shell integral reproduces closed forms") {
    const RadialGrid g = make_grid(3, 10.0, 4000);
    std::vector<double> one(g.nodes(), 1.0);
    // ball volume
    const double R = 2.5;
    CHECK(shell_integral(g, one, 0.0, R) ==
          doctest::Approx(4.0 / 3.0 * M_PI * R * R * R).epsilon(1e-6));
    // zero integrand
    std::vector<double> zero(g.nodes(), 0.0);
    CHECK(shell_integral(g, zero, 0.0, 10.0) == 0.0);
    // radial f with exact antiderivatives: f = r^-2 integrates the weighted
    // measure to 4 pi (r-1), f = r^-3 to 4 pi ln r
    std::vector<double> f(g.nodes(), 0.0);
    for (int j = 1; j <= g.n; ++j) f[j] = 1.0 / (g.r(j) * g.r(j));
    CHECK(shell_integral(g, f, 1.0, 2.0) == doctest::Approx(4.0 * M_PI).epsilon(2e-7));
    for (int j = 1; j <= g.n; ++j) f[j] = std::pow(g.r(j), -3.0);
    CHECK(shell_integral(g, f, 1.0, 2.0) ==
          doctest::Approx(8.710344361214409).epsilon(2e-6));  // 4 pi ln 2
    // out-of-grid range is an error
    CHECK_THROWS_AS(shell_integral(g, one, 0.0, 11.0), RangeOutsideGrid);
    CHECK_THROWS_AS(shell_integral(g, one, -1.0, 2.0), RangeOutsideGrid);
}

TEST_CASE("shell integral converges at second order") {
    auto f = [](double r) { return std::cos(1.7 * r) + r; };
    const double exact = oracle::integrate(
        [&](double r) { return 4.0 * M_PI * f(r) * r * r; }, 0.3, 7.7, 1e-11);
    std::vector<double> errs;
    for (int n : {500, 1000, 2000}) {
        const RadialGrid g = make_grid(3, 8.0, n);
        std::vector<double> fv(g.nodes());
        for (int j = 0; j <= g.n; ++j) fv[j] = f(g.r(j));
        errs.push_back(std::abs(shell_integral(g, fv, 0.3, 7.7) - exact));
    }
    const double o1 = std::log2(errs[0] / errs[1]);
    const double o2 = std::log2(errs[1] / errs[2]);
    CHECK(o1 > 1.8);
    CHECK(o1 < 2.2);
    CHECK(o2 > 1.8);
    CHECK(o2 < 2.2);
}

TEST_CASE("interpolation reproduces polynomials and resolves smooth functions") {
    const RadialGrid g = make_grid(3, 4.0, 400);
    std::vector<double> lin(g.nodes()), cub(g.nodes()), sn(g.nodes());
    for (int j = 0; j <= g.n; ++j) {
        lin[j] = g.r(j);
        cub[j] = std::pow(g.r(j), 3);
        sn[j] = std::sin(g.r(j));
    }
    CHECK(interpolate(g, lin, 0.37) == doctest::Approx(0.37).epsilon(1e-14));
    CHECK(interpolate(g, cub, 1.2345) == doctest::Approx(std::pow(1.2345, 3)).epsilon(1e-13));
    // sin(1.234) = 0.943818209374634 (mpmath); dr = 1e-2 here
    const RadialGrid g2 = make_grid(3, 4.0, 400);
    CHECK(interpolate(g2, sn, 1.234) == doctest::Approx(0.9438182093746337).epsilon(1e-8));
    // derivative of the interpolant
    CHECK(interpolate_derivative(g, cub, 1.2345) ==
          doctest::Approx(3.0 * 1.2345 * 1.2345).epsilon(1e-9));
    CHECK_THROWS_AS(interpolate(g, lin, 4.5), RangeOutsideGrid);
}

TEST_CASE("norms of the gaussian match the adaptive quadrature oracle") {
    const RadialGrid g = make_grid(3, 12.0, 16000);
    auto u = [](double r) { return std::exp(-r * r); };
    auto ur = [](double r) { return -2.0 * r * std::exp(-r * r); };
    const auto s = sample_state(g, u, ur, [](double) { return 0.0; });
    const auto nm = norms(g, s, 3.0);

    const double cd = 4.0 * M_PI;
    const double l2 = cd * oracle::integrate([&](double r) { return u(r) * u(r) * r * r; },
                                             0.0, 12.0);
    const double h1 = cd * oracle::integrate([&](double r) { return ur(r) * ur(r) * r * r; },
                                             0.0, 12.0);
    const double lp1 = cd * oracle::integrate(
        [&](double r) { return std::pow(u(r), 4) * r * r; }, 0.0, 12.0);
    const double hardy = cd * oracle::integrate([&](double r) { return u(r) * u(r); },
                                                0.0, 12.0);
    CHECK(nm.l2 == doctest::Approx(l2).epsilon(1e-6));
    CHECK(nm.h1_dot == doctest::Approx(h1).epsilon(1e-6));
    CHECK(nm.lp1 == doctest::Approx(lp1).epsilon(1e-6));
    CHECK(nm.hardy_term == doctest::Approx(hardy).epsilon(1e-6));

    // zero state
    const auto z = sample_state(g, [](double) { return 0.0; }, [](double) { return 0.0; },
                                [](double) { return 0.0; });
    const auto zn = norms(g, z, 3.0);
    CHECK(zn.l2 == 0.0);
    CHECK(zn.h1_dot == 0.0);
    CHECK(zn.lp1 == 0.0);
    CHECK(zn.hardy_term == 0.0);
}

TEST_CASE("sharp Hardy holds for random smooth radial fields") {
    const RadialGrid g = make_grid(3, 10.0, 8000);
    std::mt19937_64 rng(0x5eed0002);
    std::uniform_real_distribution<double> amp(-2.0, 2.0), ctr(0.2, 6.0), wid(0.4, 1.6);
    for (int f = 0; f < 100; ++f) {
        double A1 = amp(rng), c1 = ctr(rng), s1 = wid(rng);
        double A2 = amp(rng), c2 = ctr(rng), s2 = wid(rng);
        auto u = [=](double r) {
            return A1 * std::exp(-std::pow((r - c1) / s1, 2)) +
                   A2 * std::exp(-std::pow((r - c2) / s2, 2));
        };
        auto ur = [=](double r) {
            return A1 * -2.0 * (r - c1) / (s1 * s1) * std::exp(-std::pow((r - c1) / s1, 2)) +
                   A2 * -2.0 * (r - c2) / (s2 * s2) * std::exp(-std::pow((r - c2) / s2, 2));
        };
        const auto s = sample_state(g, u, ur, [](double) { return 0.0; });
        const auto nm = norms(g, s, 3.0);
        CHECK(nm.hardy_term * 0.25 <= nm.h1_dot * (1.0 + 1e-10) + 1e-12);
    }
}

TEST_CASE("rough equivalence of the a-form with explicit constants") {
    // for a in (a_min, 0]: (1 - |a|/hc) h1 <= h1 + a*hardy and
    // h1 + hardy <= (1 + 1/hc) h1 give an explicit two-sided comparison
    const RadialGrid g = make_grid(3, 10.0, 4000);
    const double hc = 0.25;
    std::mt19937_64 rng(0x5eed0003);
    std::uniform_real_distribution<double> amp(-2.0, 2.0), ctr(0.2, 6.0), wid(0.4, 1.6),
        av(-0.24, 2.0);
    for (int f = 0; f < 50; ++f) {
        double A1 = amp(rng), c1 = ctr(rng), s1 = wid(rng);
        auto u = [=](double r) { return A1 * std::exp(-std::pow((r - c1) / s1, 2)); };
        auto ur = [=](double r) {
            return A1 * -2.0 * (r - c1) / (s1 * s1) * std::exp(-std::pow((r - c1) / s1, 2));
        };
        const auto s = sample_state(g, u, ur, [](double) { return 0.0; });
        const auto nm = norms(g, s, 3.0);
        const double a = av(rng);
        const double form = nm.h1_dot + a * nm.hardy_term;
        CHECK(form >= -1e-10);  // nonnegative above the threshold
        const double c_low = (1.0 - std::max(-a, 0.0) / hc) / (1.0 + 1.0 / hc);
        const double c_up = 1.0 + std::max(a, 0.0) / hc;
        CHECK(form >= c_low * (nm.h1_dot + nm.hardy_term) - 1e-9);
        CHECK(form <= c_up * (nm.h1_dot + nm.hardy_term) + 1e-9);
    }
}

TEST_CASE("singular-origin integrator is exact on powers") {
    const RadialGrid g = make_grid(3, 2.0, 20000);
    std::vector<double> h(g.nodes());
    const double alpha = -0.55;
    for (int j = 1; j <= g.n; ++j) h[j] = std::pow(g.r(j), alpha);
    h[0] = 0.0;
    const double R = 1.5;
    const double exact = std::pow(R, alpha + 1.0) / (alpha + 1.0);
    CHECK(integrate_power_origin(g, h, R) == doctest::Approx(exact).epsilon(1e-5));
}
