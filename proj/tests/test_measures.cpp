#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "sublab/measures.hpp"
#include "test_util.hpp"

using namespace sublab;
using sublab::test::pt;

TEST_CASE("log density") {
    MeasureSpec spec{heisenberg(1), 2.0, {}};
    CHECK(log_density_unnormalized(spec, spec.space.zero()) == 0.0);
    // a point with N = 2 gives -N^p = -4
    CHECK(log_density_unnormalized(spec, pt({0, 0, 1})) == doctest::Approx(-4.0));
    // rotation invariance in the x block on H-type: N depends on |x| only
    const double a = log_density_unnormalized(spec, pt({0.6, 0.8, 0.2}));
    const double b = log_density_unnormalized(spec, pt({1.0, 0.0, 0.2}));
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("estimate_Z agrees with adaptive quadrature" * doctest::timeout(300)) {
    SUBCASE("H^1, p = 2") {
        MeasureSpec spec{heisenberg(1), 2.0, {}};
        const auto z = estimate_Z(spec, 200000, 11);
        const auto q = integrate_unnormalized_quadrature(spec, [](const Point&) { return 1.0; });
        const double sigma = std::sqrt(z.stderror * z.stderror + q.stderror * q.stderror);
        INFO("mc ", z.value, " +- ", z.stderror, " quad ", q.value, " +- ", q.stderror);
        CHECK(std::abs(z.value - q.value) < 3.0 * std::max(sigma, 1e-12));
        CHECK(z.stderror / z.value < 0.05);
    }
    SUBCASE("Grushin{1,1,1}, p = 2") {
        MeasureSpec spec{make_space(Grushin{1, 1, 1.0}), 2.0, {}};
        const auto z = estimate_Z(spec, 200000, 12);
        const auto q = integrate_unnormalized_quadrature(spec, [](const Point&) { return 1.0; });
        const double sigma = std::sqrt(z.stderror * z.stderror + q.stderror * q.stderror);
        CHECK(std::abs(z.value - q.value) < 3.0 * std::max(sigma, 1e-12));
    }
    SUBCASE("doubling the budget shrinks stderr like 1/sqrt(2)") {
        MeasureSpec spec{heisenberg(1), 2.0, {}};
        const auto z1 = estimate_Z(spec, 100000, 13);
        const auto z2 = estimate_Z(spec, 200000, 13);
        const double shrink = z2.stderror / z1.stderror;
        CHECK(shrink == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));
    }
    SUBCASE("budget below 1e4 is rejected") {
        MeasureSpec spec{heisenberg(1), 2.0, {}};
        CHECK_THROWS(estimate_Z(spec, 100, 1));
    }
}

TEST_CASE("sampler" * doctest::timeout(600)) {
    MeasureSpec spec{heisenberg(1), 2.0, {}};

    SUBCASE("meta invariants and moment agreement with quadrature") {
        const auto set = sample(spec, 100000, 21);
        CHECK(set.meta.acceptance_rate > 0.1);
        CHECK(set.meta.acceptance_rate < 0.7);
        CHECK(set.meta.ess.minCoeff() > 100.0);
        CHECK(set.meta.ess.minCoeff() / static_cast<double>(set.size()) > 0.1);

        // E[N^p] against the quadrature oracle
        auto np = [&](const Point& p) { return std::pow(spec.space.hom_norm(p), spec.p); };
        const auto mc = integrate_mc(np, set);
        const auto qd = integrate_quadrature(spec, np);
        const double sigma = std::sqrt(mc.stderror * mc.stderror + qd.stderror * qd.stderror);
        INFO("mc ", mc.value, " +- ", mc.stderror, " quad ", qd.value, " +- ", qd.stderror);
        CHECK(std::abs(mc.value - qd.value) < 3.0 * std::max(sigma, 1e-12));

        // symmetry: the x block has mean zero
        for (int c = 0; c < 2; ++c) {
            const auto m = integrate_mc([c](const Point& p) { return p[c]; }, set);
            CHECK(std::abs(m.value) < 4.0 * m.stderror + 1e-3);
        }
    }

    SUBCASE("fixed seed reproduces bit-identical samples at any thread count") {
        const auto a = sample(spec, 5000, 77, {}, 1);
        const auto b = sample(spec, 5000, 77, {}, 2);
        const auto c = sample(spec, 5000, 77, {}, 7);
        CHECK(a.points == b.points);
        CHECK(a.points == c.points);
        const auto d = sample(spec, 5000, 78, {}, 2);
        CHECK(a.points != d.points);
    }
}

TEST_CASE("integrate_mc basics") {
    MeasureSpec spec{heisenberg(1), 2.0, {}};
    const auto set = sample(spec, 20000, 31);

    SUBCASE("constants integrate to themselves with zero error") {
        const auto one = integrate_mc([](const Point&) { return 1.0; }, set);
        CHECK(one.value == 1.0);
        CHECK(one.stderror == 0.0);
    }

    SUBCASE("median sublevel indicator has mass one half") {
        // 1-D oracle: by homogeneity mu{N < c} = int_0^c r^{Q-1} e^{-r^p} dr (normalised),
        // so the median of N solves a scalar equation
        const double Q = spec.space.hom_dim();
        auto shell = [&](double r) { return std::pow(r, Q - 1.0) * std::exp(-std::pow(r, spec.p)); };
        const double total = sublab::test::simpson(shell, 0.0, 12.0, 20000);
        double lo = 0.1, hi = 6.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double mass = sublab::test::simpson(shell, 0.0, mid, 4000) / total;
            (mass < 0.5 ? lo : hi) = mid;
        }
        const double median = 0.5 * (lo + hi);
        const auto frac = integrate_mc(
            [&](const Point& p) { return spec.space.hom_norm(p) < median ? 1.0 : 0.0; }, set);
        CHECK(std::abs(frac.value - 0.5) < 4.0 * frac.stderror + 0.01);
    }

    SUBCASE("linearity") {
        auto f = [&](const Point& p) { return spec.space.hom_norm(p); };
        auto g = [&](const Point& p) { return p[0] * p[0]; };
        const auto fa = integrate_mc(f, set);
        const auto ga = integrate_mc(g, set);
        const auto combo = integrate_mc(
            [&](const Point& p) { return 2.0 * f(p) - 3.0 * g(p); }, set);
        CHECK(combo.value == doctest::Approx(2.0 * fa.value - 3.0 * ga.value).epsilon(1e-12));
    }
}

TEST_CASE("quadrature guards") {
    MeasureSpec spec{heisenberg(2), 2.0, {}};  // ambient 5
    CHECK_THROWS(integrate_unnormalized_quadrature(spec, [](const Point&) { return 1.0; }));
}

TEST_CASE("sampleset round trip") {
    MeasureSpec spec{make_space(Grushin{1, 1, 1.0}), 3.0, {}};
    const auto set = sample(spec, 3000, 99);
    const std::string path = "/tmp/sublab_test_samples.bin";
    save_sampleset(path, spec, set);
    const auto back = load_sampleset(path, spec);
    CHECK(back.points == set.points);
    CHECK(back.seed == set.seed);
    CHECK(back.meta.thinning == set.meta.thinning);

    MeasureSpec other{make_space(Grushin{1, 1, 2.0}), 3.0, {}};
    CHECK_THROWS(load_sampleset(path, other));
    std::remove(path.c_str());
}
