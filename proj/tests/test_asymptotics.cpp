#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "weylwalk/asymptotics.hpp"
#include "weylwalk/lattice.hpp"
#include "weylwalk/rng.hpp"

using namespace weylwalk;
using V = std::vector<double>;

TEST_CASE("alpha formulas and domain") {
    CHECK(alpha(Chamber::C, 1) == 1);
    CHECK(alpha(Chamber::C, 2) == 4);
    CHECK(alpha(Chamber::D, 2) == 2);
    for (int k = 1; k <= 8; ++k) CHECK(alpha(Chamber::C, k) == 1LL * k * k);
    for (int k = 2; k <= 8; ++k) CHECK(alpha(Chamber::D, k) == 1LL * k * k - k);
    CHECK_THROWS_AS(alpha(Chamber::C, 0), std::invalid_argument);
    CHECK_THROWS_AS(alpha(Chamber::D, 1), std::invalid_argument);
    CHECK_THROWS_AS(alpha(Chamber::A, 2), std::invalid_argument);
}

TEST_CASE("kappa closed-form values") {
    CHECK(kappa(Chamber::C, 1) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
    CHECK(kappa(Chamber::D, 2) == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-12));
    CHECK(kappa(Chamber::C, 2) == doctest::Approx(1.0 / (3.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("kappa and K stay strictly positive up to k = 8") {
    for (int k = 1; k <= 8; ++k) {
        CHECK(kappa(Chamber::C, k) > 0.0);
        CHECK(K_constant(Chamber::C, k) > 0.0);
        CHECK(std::isfinite(K_constant(Chamber::C, k)));
    }
    for (int k = 2; k <= 8; ++k) {
        CHECK(kappa(Chamber::D, k) > 0.0);
        CHECK(K_constant(Chamber::D, k) > 0.0);
        CHECK(std::isfinite(K_constant(Chamber::D, k)));
    }
}

TEST_CASE("gauss_hermite integrates Gaussian moments exactly") {
    for (int n : {5, 64, 400}) {
        std::vector<double> t, w;
        gauss_hermite(n, t, w);
        REQUIRE(t.size() == static_cast<size_t>(n));
        double s0 = 0, s2 = 0, s4 = 0;
        for (int i = 0; i < n; ++i) {
            s0 += w[i];
            s2 += w[i] * t[i] * t[i];
            s4 += w[i] * t[i] * t[i] * t[i] * t[i];
            if (i > 0) CHECK(t[i] > t[i - 1]);
            CHECK(t[i] == doctest::Approx(-t[n - 1 - i]).epsilon(1e-13));
        }
        CHECK(s0 == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
        CHECK(s2 == doctest::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-13));
        if (n >= 3) CHECK(s4 == doctest::Approx(std::sqrt(M_PI) * 0.75).epsilon(1e-13));
    }
    std::vector<double> t, w;
    CHECK_THROWS_AS(gauss_hermite(0, t, w), std::invalid_argument);
}

namespace {

// closed forms of the chamber integrals of h e^{-|y|^2/2}, hand-derived by
// iterated integration (k <= 2) and the x -> x^2 change of variables (k = 3)
double golden_normalizer(Chamber z, int k) {
    if (z == Chamber::C && k == 1) return 1.0;
    if (z == Chamber::C && k == 2) return 1.0;
    if (z == Chamber::C && k == 3) return 2.0;
    if (z == Chamber::D && k == 2) return 2.0;
    if (z == Chamber::D && k == 3) return std::sqrt(2.0 * M_PI);
    throw std::logic_error("no golden value");
}

}  // namespace

TEST_CASE("quadrature normalizer matches closed forms") {
    struct Case {
        Chamber z;
        int k;
    } cases[] = {{Chamber::C, 1}, {Chamber::C, 2}, {Chamber::C, 3},
                 {Chamber::D, 2}, {Chamber::D, 3}};
    for (auto [z, k] : cases) {
        CAPTURE(static_cast<int>(z));
        CAPTURE(k);
        auto est = mu_normalizer(z, k);
        double want = golden_normalizer(z, k);
        CHECK(est.value > 0.0);
        CHECK(est.error > 0.0);
        CHECK(std::abs(est.value - want) <= 3.0 * est.error);
        CHECK(std::abs(est.value - want) <= 2e-4 * want);
        CHECK(est.evaluations > 0);
        CHECK(est.method == IntegrationMethod::Quadrature);
    }
    CHECK_THROWS_AS(mu_normalizer(Chamber::C, 5), std::invalid_argument);
    CHECK_THROWS_AS(mu_normalizer(Chamber::C, 2, IntegrationMethod::Quadrature, 8),
                    std::invalid_argument);
}

TEST_CASE("quadrature and MC normalizers agree within combined errors") {
    struct Case {
        Chamber z;
        int k;
    } cases[] = {{Chamber::C, 1}, {Chamber::C, 2}, {Chamber::D, 2},
                 {Chamber::C, 3}, {Chamber::D, 3}};
    std::uint64_t seed = 20240814;
    for (auto [z, k] : cases) {
        CAPTURE(static_cast<int>(z));
        CAPTURE(k);
        auto q = mu_normalizer(z, k);
        auto mc = mu_normalizer(z, k, IntegrationMethod::MonteCarlo, 400'000, seed++);
        CHECK(mc.method == IntegrationMethod::MonteCarlo);
        CHECK(mc.error > 0.0);
        double combined = std::sqrt(q.error * q.error + mc.error * mc.error);
        CHECK(std::abs(q.value - mc.value) <= 3.0 * combined);
    }
}

TEST_CASE("full-space integral of |h| equals the chamber integral times the copy count") {
    // reflection group orders: 2^k k! for C, 2^{k-1} k! for D
    struct Case {
        Chamber z;
        int k;
        double copies;
    } cases[] = {{Chamber::C, 2, 8.0}, {Chamber::D, 2, 4.0}};
    for (auto [z, k, copies] : cases) {
        CAPTURE(static_cast<int>(z));
        RandomStream stream(977, 0);
        const long long samples = 400'000;
        double sum = 0.0, sum2 = 0.0;
        std::vector<double> y(k);
        for (long long i = 0; i < samples; ++i) {
            for (int j = 0; j < k; ++j) y[j] = stream.normal();
            double v = std::abs(h(z, y)) * std::pow(2.0 * M_PI, 0.5 * k);
            sum += v;
            sum2 += v * v;
        }
        double mean = sum / samples;
        double se = std::sqrt((sum2 / samples - mean * mean) / samples);
        auto q = mu_normalizer(z, k);
        CHECK(std::abs(mean - copies * q.value) <= 3.0 * (se + copies * q.error));
    }
}

TEST_CASE("limit-measure moments match closed forms") {
    // k = 1, C: the limiting law is Rayleigh
    int orders1[] = {1, 2};
    auto m1 = mu_moments(Chamber::C, 1, orders1);
    REQUIRE(m1.size() == 2);
    CHECK(std::abs(m1[0].value - std::sqrt(M_PI / 2.0)) <= 2e-4);
    CHECK(std::abs(m1[1].value - 2.0) <= 4e-4);

    // k = 2, C: E[|y|^2] = 6
    int orders2[] = {2};
    auto m2 = mu_moments(Chamber::C, 2, orders2);
    CHECK(std::abs(m2[0].value - 6.0) <= 1.5e-3);

    // E[|y|^2] positive and finite across supported cases
    struct Case {
        Chamber z;
        int k;
    } cases[] = {{Chamber::C, 1}, {Chamber::C, 2}, {Chamber::C, 3},
                 {Chamber::D, 2}, {Chamber::D, 3}};
    for (auto [z, k] : cases) {
        auto m = mu_moments(z, k, orders2);
        CHECK(m[0].value > 0.0);
        CHECK(std::isfinite(m[0].value));
    }
    CHECK_THROWS_AS(mu_moments(Chamber::C, 2, std::vector<int>{-1}), std::invalid_argument);
}

TEST_CASE("K constant reference values") {
    // k = 1, C: 2 * 1! * kappa / int |x| e^{-x^2/2} dx = 2 sqrt(2/pi) / 2
    CHECK(std::abs(K_constant(Chamber::C, 1) - std::sqrt(2.0 / M_PI)) <= 1e-5);
    CHECK(std::abs(K_constant(Chamber::C, 2) - 1.0 / (3.0 * M_PI)) <=
          1e-4 / (3.0 * M_PI));
    // D, k = 2: numerator 2 * 2! * kappa^D(2) = 1/pi, denominator = 4 * 2
    CHECK(std::abs(K_constant(Chamber::D, 2) - 1.0 / (8.0 * M_PI)) <=
          1e-4 / (8.0 * M_PI));
}

TEST_CASE("bm_tail formula evaluation and scaling") {
    double y1[] = {1.0};
    CHECK(bm_tail(Chamber::C, y1, 1.0) ==
          doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
    double y2[] = {0.5, 1.5};
    for (double c : {2.0, 4.0, 10.0}) {
        double lhs = bm_tail(Chamber::C, y2, c * 3.0);
        double rhs = std::pow(c, -0.5 * alpha(Chamber::C, 2)) * bm_tail(Chamber::C, y2, 3.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
        lhs = bm_tail(Chamber::D, y2, c * 3.0);
        rhs = std::pow(c, -0.5 * alpha(Chamber::D, 2)) * bm_tail(Chamber::D, y2, 3.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
    CHECK_THROWS_AS(bm_tail(Chamber::C, y2, 0.0), std::invalid_argument);
}

TEST_CASE("bm_density_asym vanishes on the boundary and scales in t") {
    double y[] = {0.5, 1.5};
    double zb[] = {0.0, 1.0};
    CHECK(bm_density_asym(Chamber::C, y, zb, 2.0) == 0.0);
    double zd[] = {1.0, 1.0};
    CHECK(bm_density_asym(Chamber::D, y, zd, 2.0) == 0.0);

    double zp[] = {0.7, 2.1};
    double z2 = zp[0] * zp[0] + zp[1] * zp[1];
    double b1 = bm_density_asym(Chamber::C, y, zp, 1.0);
    double b4 = bm_density_asym(Chamber::C, y, zp, 4.0);
    double want = std::pow(4.0, -1.0 - alpha(Chamber::C, 2)) * std::exp(3.0 * z2 / 8.0);
    CHECK(b4 / b1 == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("bm_density_asym integrates over the chamber to bm_tail") {
    // at t = 1 the z-integral should reproduce kappa * h(y); integrate with an
    // independent tensor rule rather than the one inside mu_normalizer
    double y[] = {0.5, 1.5};
    std::vector<double> t, w;
    gauss_hermite(300, t, w);
    const double s = std::sqrt(2.0);
    double acc = 0.0;
    for (size_t i = 0; i < t.size(); ++i)
        for (size_t j = 0; j < t.size(); ++j) {
            double z[2] = {s * t[i], s * t[j]};
            if (!contains(Chamber::C, z)) continue;
            double z2 = z[0] * z[0] + z[1] * z[1];
            // fold the Gaussian weight out of the density before applying the
            // exp(-t^2) rule; far nodes would underflow the density and
            // contribute less than e^{-200} anyway
            if (z2 > 400.0) continue;
            double f = bm_density_asym(Chamber::C, y, z, 1.0) * std::exp(0.5 * z2);
            acc += w[i] * w[j] * f;
        }
    acc *= 2.0;  // (sqrt 2)^k jacobian
    CHECK(acc == doctest::Approx(bm_tail(Chamber::C, y, 1.0)).epsilon(2e-3));
}

TEST_CASE("tail_fit recovers an exact power law") {
    std::vector<std::pair<long long, double>> curve;
    for (long long n = 10; n <= 200; n += 2) curve.push_back({n, 7.0 * std::pow(n, -2.0)});
    auto fit = tail_fit(curve);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fit.prefactor == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.r_squared <= 1.0);
    // default window is the upper half in log n
    CHECK(fit.n_min > 10);
    CHECK(fit.n_max == 200);
}

TEST_CASE("tail_fit window options and parity filter") {
    std::vector<std::pair<long long, double>> curve;
    for (long long n = 10; n <= 200; ++n) {
        double p = 3.0 * std::pow(n, -1.5);
        if (n % 2 == 1) p *= 1.4;  // parity oscillation
        curve.push_back({n, p});
    }
    TailFitOptions opt;
    opt.even_only = true;
    auto fit = tail_fit(curve, opt);
    CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(fit.prefactor == doctest::Approx(3.0).epsilon(1e-12));

    opt.even_only = false;
    opt.n_min = 50;
    opt.n_max = 100;
    auto fit2 = tail_fit(curve, opt);
    CHECK(fit2.n_min == 50);
    CHECK(fit2.n_max == 100);
    CHECK(fit2.r_squared < 1.0);  // oscillation not explained by the power law
}

TEST_CASE("tail_fit input validation") {
    std::vector<std::pair<long long, double>> small = {{1, 1.0}, {2, 0.5}};
    CHECK_THROWS_AS(tail_fit(small), std::invalid_argument);

    std::vector<std::pair<long long, double>> curve;
    for (long long n = 10; n <= 40; n += 2) curve.push_back({n, std::pow(n, -1.0)});
    auto bad_p = curve;
    bad_p[3].second = 0.0;
    CHECK_THROWS_AS(tail_fit(bad_p), std::invalid_argument);
    auto bad_n = curve;
    bad_n[4].first = bad_n[3].first;
    CHECK_THROWS_AS(tail_fit(bad_n), std::invalid_argument);
    TailFitOptions empty_window;
    empty_window.n_min = 500;
    CHECK_THROWS_AS(tail_fit(curve, empty_window), std::invalid_argument);
}

TEST_CASE("tail_fit on exact survival curves finds the decay exponents") {
    // survival curves from the exact engine, fitted on even n
    auto spec = LatticeWalkSpec::rademacher(2);
    std::vector<long long> x = {1, 2};
    DenseDP dpc(spec, Chamber::C, x, 600);
    DenseDP dpd(spec, Chamber::D, x, 600);
    dpc.advance(600);
    dpd.advance(600);
    std::vector<std::pair<long long, double>> cc, cd;
    const auto& sc = dpc.survival_series();
    const auto& sd = dpd.survival_series();
    for (long long n = 100; n <= 600; ++n) {
        cc.push_back({n, sc[static_cast<size_t>(n)]});
        cd.push_back({n, sd[static_cast<size_t>(n)]});
    }
    TailFitOptions opt;
    opt.even_only = true;
    opt.n_min = 300;
    auto fc = tail_fit(cc, opt);
    auto fd = tail_fit(cd, opt);
    CHECK(fc.slope == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(fd.slope == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(fc.r_squared > 0.999);
    CHECK(fd.r_squared > 0.999);
}
