#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

#include "weylwalk/chambers.hpp"
#include "weylwalk/lattice.hpp"
#include "weylwalk/rng.hpp"

using namespace weylwalk;

namespace {

std::vector<long long> pt(std::initializer_list<long long> v) { return v; }

Rational h_rat(Chamber z, std::span<const long long> x) { return Rational(h_lattice(z, x)); }

}  // namespace

TEST_CASE("h_lattice frozen values and consistency with the double form") {
    CHECK(h_lattice(Chamber::C, pt({1, 2})) == 6);
    CHECK(h_lattice(Chamber::D, pt({1, 2})) == 3);
    CHECK(h_lattice(Chamber::C, pt({1, 2, 3})) == 720);
    CHECK(h_lattice(Chamber::A, pt({2, 1})) == -1);
    CHECK(h_lattice(Chamber::A, pt({1, 2, 4})) == 6);
    CHECK(h_lattice(Chamber::D, pt({-1, 2})) == 3);  // sign-flip invariance of h^D
    CHECK(h_lattice(Chamber::C, pt({-1, 2})) == -6);
    CHECK(h_lattice(Chamber::D, pt({2, 2})) == 0);

    RandomStream s(101, 0);
    for (int trial = 0; trial < 200; ++trial) {
        int k = 2 + static_cast<int>(s.below(3));
        std::vector<long long> x(k);
        std::vector<double> xd(k);
        for (int i = 0; i < k; ++i) {
            x[i] = static_cast<long long>(s.below(21)) - 10;
            xd[i] = static_cast<double>(x[i]);
        }
        for (Chamber z : {Chamber::A, Chamber::C, Chamber::D}) {
            double exact = Rational(h_lattice(z, x)).convert_to<double>();
            CHECK(h(z, xd) == doctest::Approx(exact).epsilon(1e-12));
            CHECK(contains_lattice(z, x) == contains(z, xd));
        }
    }
}

TEST_CASE("lattice spec validation") {
    auto rad = LatticeWalkSpec::rademacher(2);
    CHECK(rad.max_offset() == 1);
    CHECK(rad.all_offsets_odd());

    auto tp = LatticeWalkSpec::three_point(2, Rational(1, 3));
    CHECK_FALSE(tp.all_offsets_odd());

    auto from = LatticeWalkSpec::from_distribution(StepDistribution::rademacher(3));
    CHECK(from.k == 3);
    CHECK(from.atoms.size() == 2);

    CHECK_THROWS_AS(LatticeWalkSpec::from_distribution(StepDistribution::gaussian(2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        LatticeWalkSpec::from_distribution(StepDistribution::lazy_signs_table(2, Rational(1, 4))),
        std::invalid_argument);

    LatticeWalkSpec bad;
    bad.k = 1;
    bad.atoms = {{-1, Rational(1, 2)}, {1, Rational(1, 3)}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.atoms = {{1, Rational(1, 2)}, {1, Rational(1, 2)}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("survival probabilities: frozen small cases") {
    auto rad = LatticeWalkSpec::rademacher(2);
    CHECK(survival_probability(rad, Chamber::C, pt({1, 2}), 1) == Rational(1, 4));
    CHECK(survival_probability(rad, Chamber::C, pt({1, 2}), 2) == Rational(3, 16));
    CHECK(survival_probability(rad, Chamber::D, pt({1, 2}), 1) == Rational(3, 4));
    CHECK(survival_probability(rad, Chamber::D, pt({1, 2}), 2) == Rational(9, 16));
    // start outside the chamber: zero survival, boundary flag on the engine
    CHECK(survival_probability(rad, Chamber::C, pt({0, 2}), 1) == 0);
    SparseRationalDP outside(rad, Chamber::C, pt({0, 2}));
    CHECK_FALSE(outside.start_inside());
    CHECK(outside.exit_h_accum() == 0);  // h vanishes on the boundary
}

TEST_CASE("restricted expectations: frozen small cases") {
    auto rad = LatticeWalkSpec::rademacher(2);
    // only survivor after one step is (2,3) with h^C = 30, prob 1/4
    auto f_h = [](std::span<const long long> x) { return h_rat(Chamber::C, x); };
    CHECK(restricted_expectation_exact(rad, Chamber::C, pt({1, 2}), 1, f_h) == Rational(15, 2));
    // n = 0 reduces to h(x)
    CHECK(restricted_expectation_exact(rad, Chamber::C, pt({1, 2}), 0, f_h) == 6);
    // f == 1 reduces to the survival probability
    auto f_one = [](std::span<const long long>) { return Rational(1); };
    for (long long n : {1LL, 2LL, 5LL})
        CHECK(restricted_expectation_exact(rad, Chamber::C, pt({1, 2}), n, f_one) ==
              survival_probability(rad, Chamber::C, pt({1, 2}), n));
}

TEST_CASE("conditional distributions") {
    auto rad = LatticeWalkSpec::rademacher(2);
    auto law1 = conditional_distribution(rad, Chamber::C, pt({1, 2}), 1);
    REQUIRE(law1.size() == 1);
    CHECK(law1[0].first == pt({2, 3}));
    CHECK(law1[0].second == 1);

    auto law2 = conditional_distribution(rad, Chamber::C, pt({1, 2}), 2);
    REQUIRE(law2.size() == 3);
    CHECK(law2[0].first == pt({1, 2}));
    CHECK(law2[1].first == pt({1, 4}));
    CHECK(law2[2].first == pt({3, 4}));
    for (const auto& [p, w] : law2) CHECK(w == Rational(1, 3));

    auto law0 = conditional_distribution(rad, Chamber::C, pt({1, 2}), 0);
    REQUIRE(law0.size() == 1);
    CHECK(law0[0].first == pt({1, 2}));
    CHECK(law0[0].second == 1);

    CHECK_THROWS_AS(conditional_distribution(rad, Chamber::C, pt({0, 2}), 1), std::domain_error);
}

TEST_CASE("optional stopping identity and mass conservation, exactly") {
    RandomStream s(103, 0);
    for (const auto& spec :
         {LatticeWalkSpec::rademacher(2), LatticeWalkSpec::three_point(2, Rational(1, 3))}) {
        for (Chamber z : {Chamber::C, Chamber::D}) {
            for (int trial = 0; trial < 6; ++trial) {
                long long x1 = 1 + static_cast<long long>(s.below(4));
                long long x2 = x1 + 1 + static_cast<long long>(s.below(4));
                std::vector<long long> x = {x1, x2};
                SparseRationalDP dp(spec, z, x);
                Rational hx = h_rat(z, x);
                for (int n = 1; n <= 8; ++n) {
                    dp.advance();
                    CHECK(dp.restricted_h() + dp.exit_h_accum() == hx);
                    CHECK(dp.survival() + dp.exit_mass_accum() == 1);
                }
            }
        }
    }
}

TEST_CASE("DP equals brute force enumeration exactly") {
    RandomStream s(107, 0);
    auto rad2 = LatticeWalkSpec::rademacher(2);
    auto tp2 = LatticeWalkSpec::three_point(2, Rational(1, 2));
    auto rad3 = LatticeWalkSpec::rademacher(3);

    auto compare = [](const LatticeWalkSpec& spec, Chamber z, std::span<const long long> x,
                      long long n) {
        SparseRationalDP dp(spec, z, x);
        dp.advance(n);
        auto bf = brute_force_check(spec, z, x, n);
        CHECK(dp.survival() == bf.survival);
        CHECK(dp.restricted_h() == bf.restricted_h);
        CHECK(dp.exit_h_accum() == bf.exit_h);
        auto sup = dp.support();
        REQUIRE(sup.size() == bf.surviving_support.size());
        for (const auto& [p, w] : sup) {
            auto it = bf.surviving_support.find(p);
            REQUIRE(it != bf.surviving_support.end());
            CHECK(it->second == w);
        }
    };

    for (int trial = 0; trial < 5; ++trial) {
        long long x1 = 1 + static_cast<long long>(s.below(3));
        long long x2 = x1 + 1 + static_cast<long long>(s.below(3));
        std::vector<long long> x = {x1, x2};
        compare(rad2, Chamber::C, x, 5);
        compare(rad2, Chamber::D, x, 5);
        compare(tp2, Chamber::C, x, 4);
        std::vector<long long> y = {x1, x2, x2 + 1 + static_cast<long long>(s.below(2))};
        compare(rad3, Chamber::C, y, 4);
        compare(rad3, Chamber::D, y, 4);
    }
    // spec example: D from (1,2), three steps
    compare(rad2, Chamber::D, pt({1, 2}), 3);

    CHECK_THROWS_AS(brute_force_check(rad3, Chamber::C, pt({1, 2, 3}), 14),
                    std::invalid_argument);
}

TEST_CASE("V sequence: frozen start and exact identity") {
    auto rad = LatticeWalkSpec::rademacher(2);
    auto res = v_exact_rational(rad, Chamber::C, pt({1, 2}), 12);
    CHECK(res.seq[0] == 6);
    CHECK(res.seq[1] == Rational(15, 2));
    CHECK(res.value == res.identity_value);  // exact optional-stopping identity
    // from an odd-gap start every exit has h <= 0, so the sequence is nondecreasing
    for (size_t i = 1; i < res.seq.size(); ++i) CHECK(res.seq[i] >= res.seq[i - 1]);
}

// Type D with Rademacher steps decouples in the rotated coordinates
// u = x2 - x1, v = x2 + x1: each step moves exactly one of u, v by +-2, so
// conditioning on the number of u-moves makes the two coordinates independent
// one-dimensional +-2 walks killed at nonpositive values. This gives a fully
// independent closed-form oracle for the 2-d engine.
namespace {
struct OneDim {
    // index by step count: survival s(m) and restricted mean g(m) = E[w_m; alive]
    std::vector<Rational> s, g;
};

OneDim one_dim_pm2(long long w0, int n_max) {
    std::map<long long, Rational> state{{w0, Rational(1)}};
    OneDim out;
    for (int m = 0;; ++m) {
        Rational surv = 0, mean = 0;
        for (const auto& [w, p] : state) {
            surv += p;
            mean += p * w;
        }
        out.s.push_back(surv);
        out.g.push_back(mean);
        if (m == n_max) break;
        std::map<long long, Rational> next;
        for (const auto& [w, p] : state) {
            for (long long d : {-2LL, 2LL}) {
                long long y = w + d;
                if (y > 0) next[y] += p / 2;
            }
        }
        state = std::move(next);
    }
    return out;
}

Rational binom(int n, int j) {
    BigInt num = 1, den = 1;
    for (int i = 0; i < j; ++i) {
        num *= n - i;
        den *= i + 1;
    }
    return Rational(num, den);
}
}  // namespace

TEST_CASE("type D Rademacher walk matches the rotated product form exactly") {
    auto rad = LatticeWalkSpec::rademacher(2);
    for (auto [x1, x2] : std::vector<std::pair<long long, long long>>{{1, 2}, {2, 5}, {-1, 4}}) {
        long long u = x2 - x1, v = x2 + x1;
        const int N = 12;
        auto du = one_dim_pm2(u, N), dv = one_dim_pm2(v, N);
        SparseRationalDP dp(rad, Chamber::D, pt({x1, x2}));
        for (int n = 0; n <= N; ++n) {
            Rational surv = 0, rest = 0;
            Rational half_pow = Rational(1) / (BigInt(1) << n);
            for (int j = 0; j <= n; ++j) {
                Rational w = binom(n, j) * half_pow;
                surv += w * du.s[j] * dv.s[n - j];
                rest += w * du.g[j] * dv.g[n - j];
            }
            CHECK(dp.survival() == surv);
            CHECK(dp.restricted_h() == rest);
            if (n < N) dp.advance();
        }
    }
}

TEST_CASE("V^D closed-form limits") {
    auto rad = LatticeWalkSpec::rademacher(2);
    // even u, v: the rotated walks exit exactly at 0, so E[w_m; alive] = w0
    // for every m and the V-sequence is constant, equal to h
    auto even = v_exact_rational(rad, Chamber::D, pt({1, 3}), 20);
    for (const auto& val : even.seq) CHECK(val == 8);

    // odd u, v: exits overshoot to -1, so V = (u+1)(v+1); from (1,2), V = 8.
    // Richardson extrapolation in n^{-1/2} against the double engine.
    auto r1 = v_exact(rad, Chamber::D, pt({1, 2}), 200);
    auto r2 = v_exact(rad, Chamber::D, pt({1, 2}), 400);
    double extrap =
        (std::sqrt(2.0) * r2.value - r1.value) / (std::sqrt(2.0) - 1.0);
    CHECK(extrap == doctest::Approx(8.0).epsilon(0.01));
    CHECK(r2.value < 8.0);
    CHECK(r2.value > r1.value);
}

TEST_CASE("dense DP agrees with the rational engine") {
    auto rad = LatticeWalkSpec::rademacher(2);
    auto tp = LatticeWalkSpec::three_point(2, Rational(1, 3));

    auto compare_series = [](const LatticeWalkSpec& spec, Chamber z, std::span<const long long> x,
                             long long n) {
        DenseDP dense(spec, z, x, n);
        SparseRationalDP sparse(spec, z, x);
        dense.advance(n);
        sparse.advance(n);
        double s_exact = sparse.survival().convert_to<double>();
        double r_exact = sparse.restricted_h().convert_to<double>();
        CHECK(dense.survival() == doctest::Approx(s_exact).epsilon(1e-12));
        CHECK(dense.restricted_h() == doctest::Approx(r_exact).epsilon(1e-12));
        // live mass checks out directly too
        CHECK(dense.mass_reduction() == doctest::Approx(s_exact).epsilon(1e-12));
        CHECK(dense.dropped_mass() == 0.0);
        // supports match cell by cell
        auto ds = dense.support();
        auto ss = sparse.support();
        REQUIRE(ds.size() == ss.size());
        for (size_t i = 0; i < ds.size(); ++i) {
            CHECK(ds[i].first[0] == ss[i].first[0]);
            if (spec.k == 2) CHECK(ds[i].first[1] == ss[i].first[1]);
            CHECK(ds[i].second ==
                  doctest::Approx(ss[i].second.convert_to<double>()).epsilon(1e-12));
        }
    };

    compare_series(rad, Chamber::C, pt({1, 2}), 30);
    compare_series(rad, Chamber::D, pt({1, 2}), 30);
    compare_series(rad, Chamber::A, pt({0, 3}), 12);
    compare_series(tp, Chamber::C, pt({2, 5}), 15);

    // one-dimensional engine
    LatticeWalkSpec rad1 = LatticeWalkSpec::rademacher(1);
    DenseDP d1(rad1, Chamber::C, pt({2}), 20);
    SparseRationalDP s1(rad1, Chamber::C, pt({2}));
    d1.advance(20);
    s1.advance(20);
    CHECK(d1.survival() == doctest::Approx(s1.survival().convert_to<double>()).epsilon(1e-13));
    CHECK(d1.restricted_h() ==
          doctest::Approx(s1.restricted_h().convert_to<double>()).epsilon(1e-13));
}

TEST_CASE("deep interior start: no exits within horizon, V equals h exactly") {
    auto rad = LatticeWalkSpec::rademacher(2);
    auto res = v_exact(rad, Chamber::C, pt({100, 200}), 10);
    double hx = Rational(h_lattice(Chamber::C, pt({100, 200}))).convert_to<double>();
    CHECK(res.value == hx);  // no boundary contact: identity is exact even in doubles
    CHECK(res.identity_value == doctest::Approx(hx).epsilon(1e-12));
    CHECK(res.seq.front() == hx);
}

TEST_CASE("V monotonicity in the gap/offset partial order") {
    auto rad = LatticeWalkSpec::rademacher(2);
    auto vx = v_exact(rad, Chamber::C, pt({1, 2}), 60);
    auto vy = v_exact(rad, Chamber::C, pt({2, 4}), 60);
    CHECK(vx.value <= vy.value);
    auto dx = v_exact(rad, Chamber::D, pt({1, 2}), 60);
    auto dy = v_exact(rad, Chamber::D, pt({2, 5}), 60);
    CHECK(dx.value <= dy.value);
}

TEST_CASE("dense DP checkpoint round trip is bit exact") {
    auto rad = LatticeWalkSpec::rademacher(2);
    DenseDP dp(rad, Chamber::C, pt({1, 2}), 120);
    dp.advance(50);
    const std::string path = "/tmp/ww_ckpt_test.bin";
    dp.save_checkpoint(path);
    DenseDP loaded = DenseDP::load_checkpoint(path);
    CHECK(loaded.step_index() == 50);
    dp.advance(70);
    loaded.advance(70);
    REQUIRE(dp.survival_series().size() == loaded.survival_series().size());
    for (size_t i = 0; i < dp.survival_series().size(); ++i)
        CHECK(dp.survival_series()[i] == loaded.survival_series()[i]);
    auto a = dp.support(), b = loaded.support();
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first == b[i].first);
        CHECK(a[i].second == b[i].second);
    }
    std::remove(path.c_str());
}
