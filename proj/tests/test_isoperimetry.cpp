#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sublab/isoperimetry.hpp"
#include "test_util.hpp"

using namespace sublab;
using sublab::test::pt;

TEST_CASE("theorem exponents") {
    CHECK(r_exponent_main(1.0, 2.0) == doctest::Approx(1.0));
    CHECK(r_exponent_main(1.0, 4.0) == doctest::Approx(4.0 / 3.0));
    CHECK(r_exponent_main(3.0, 4.0) == doctest::Approx(1.0));  // Greiner zeta=2, p=4
    CHECK(r_exponent_main(2.0, 6.0) == doctest::Approx(18.0 / 15.0));
    // the filiform exponent is the main formula at alpha = n - 1
    CHECK(r_exponent_filiform(3, 5.0) == doctest::Approx(r_exponent_main(2.0, 5.0)));
    // almost variant interpolates down to linear isoperimetry
    CHECK(r_exponent_almost(1.0, 4.0, 1.0) == doctest::Approx(1.0));
    const double r_half = r_exponent_almost(1.0, 4.0, 0.5);
    CHECK(r_half > 1.0);
    CHECK(r_half < r_exponent_main(1.0, 4.0));
    CHECK_THROWS(r_exponent_main(1.0, 1.5));
    CHECK_THROWS(r_exponent_almost(1.0, 4.0, 0.0));
}

TEST_CASE("model profile") {
    SUBCASE("r = 1 is exactly min(t, 1-t)") {
        ModelProfile m(1.0);
        for (double t = 0.05; t < 0.999; t += 0.05)
            CHECK(std::abs(m.value(t) - std::min(t, 1.0 - t)) < 1e-9);
    }
    SUBCASE("r = 2 at t = 1/2 equals 1/sqrt(pi), oracle via 1-D quadrature") {
        ModelProfile m(2.0);
        const double Z = sublab::test::simpson(
            [](double x) { return std::exp(-x * x); }, -12.0, 12.0, 40000);
        CHECK(m.normalisation() == doctest::Approx(Z).epsilon(1e-9));
        CHECK(m.value(0.5) == doctest::Approx(1.0 / Z).epsilon(1e-9));
        CHECK(m.value(0.5) == doctest::Approx(0.564190).epsilon(1e-5));
    }
    SUBCASE("symmetry and limits") {
        ModelProfile m(1.5);
        for (double t : {0.1, 0.3}) CHECK(m.value(t) == doctest::Approx(m.value(1.0 - t)).epsilon(1e-10));
        CHECK(m.value(0.001) < 0.01);
        // cdf-quantile round trip
        for (double t : {0.05, 0.2, 0.5, 0.8, 0.99})
            CHECK(m.cdf(m.quantile(t)) == doctest::Approx(t).epsilon(1e-10));
    }
    SUBCASE("r out of range") {
        CHECK_THROWS(ModelProfile(0.9));
        CHECK_THROWS(ModelProfile(2.1));
    }
}

TEST_CASE("1-D enlargement estimator matches the density at the quantile" *
          doctest::timeout(300)) {
    const std::vector<double> eps_grid = {0.08, 0.04, 0.02};
    for (double r : {1.0, 1.5, 2.0}) {
        ModelProfile m(r);
        const auto xs = nu_r_samples(r, 2000000, 314159 + static_cast<std::uint64_t>(10 * r));
        for (double t : {0.1, 0.3, 0.5}) {
            const double a = m.quantile(t);
            std::vector<double> dists(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) dists[i] = std::max(0.0, xs[i] - a);
            const auto est = surface_from_distances(dists, eps_grid);
            INFO("r=", r, " t=", t, " est=", est.mu_plus, " want=", m.density(a));
            CHECK(std::abs(est.mu_plus - m.density(a)) < 0.05 * m.density(a));

            // complement symmetry: the same boundary measured from the other side
            std::vector<double> cdists(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) cdists[i] = std::max(0.0, a - xs[i]);
            const auto cest = surface_from_distances(cdists, eps_grid);
            const double sigma = std::hypot(est.stderror, cest.stderror);
            CHECK(std::abs(est.mu_plus - cest.mu_plus) < 4.0 * sigma + 0.01);
        }
    }
}

TEST_CASE("surface_from_distances guards") {
    std::vector<double> d = {0.0, 0.1, 0.5};
    CHECK_THROWS(surface_from_distances(d, {0.1, 0.2, 0.3}));  // increasing grid
    CHECK_THROWS(surface_from_distances(d, {0.1, 0.05}));      // too short
    // full-mass set has zero surface measure
    std::vector<double> inside(1000, 0.0);
    const auto est = surface_from_distances(inside, {0.08, 0.04, 0.02});
    CHECK(est.mu_plus == 0.0);
}

TEST_CASE("quasi distances per family") {
    const Space h1 = heisenberg(1);

    SUBCASE("sublevel and tube gaps") {
        SetSpec sub;
        sub.family = SetSpec::Family::NormSublevel;
        sub.threshold = 1.0;
        CHECK(quasi_dist_to_set(h1, sub, pt({2, 0, 0})) == doctest::Approx(1.0));
        CHECK(quasi_dist_to_set(h1, sub, pt({0.5, 0, 0})) == 0.0);
        sub.complement = true;  // {N >= 1}
        CHECK(quasi_dist_to_set(h1, sub, pt({0.5, 0, 0})) == doctest::Approx(0.5));
        CHECK(quasi_dist_to_set(h1, sub, pt({2, 0, 0})) == 0.0);

        SetSpec tube;
        tube.family = SetSpec::Family::Tube;
        tube.threshold = 0.5;
        CHECK(quasi_dist_to_set(h1, tube, pt({2, 0, 5})) == doctest::Approx(1.5));
    }

    SUBCASE("first-layer halfspace is the euclidean gap") {
        SetSpec hs;
        hs.family = SetSpec::Family::Halfspace;
        hs.coord = 0;
        hs.threshold = 1.0;
        CHECK(quasi_dist_to_set(h1, hs, pt({-1, 3, 7})) == doctest::Approx(2.0));
        CHECK(set_contains(h1, hs, pt({2, 0, 0})));
        CHECK(!set_contains(h1, hs, pt({0, 0, 0})));
    }

    SUBCASE("second-layer halfspace uses the group gauge") {
        SetSpec hs;
        hs.family = SetSpec::Family::Halfspace;
        hs.coord = 2;
        hs.threshold = 0.0;
        // on the axis: pure gauge gap (kappa gap^2)^{1/4} = 2 sqrt(gap)
        const double gap = 0.09;
        CHECK(quasi_dist_to_set(h1, hs, pt({0, 0, -gap})) ==
              doctest::Approx(2.0 * std::sqrt(gap)).epsilon(1e-6));
        // with |x| large the diagonal route is linear in the gap and shorter
        const double far = quasi_dist_to_set(h1, hs, pt({4, 0, -gap}));
        CHECK(far < 2.0 * std::sqrt(gap));
        CHECK(far == doctest::Approx(2.0 * gap / 4.0).epsilon(0.2));
        // and the distance decreases with |x|
        CHECK(quasi_dist_to_set(h1, hs, pt({8, 0, -gap})) < far);
    }
}

TEST_CASE("profile scan on H^1" * doctest::timeout(600)) {
    MeasureSpec spec{heisenberg(1), 2.0, {}};
    const auto set = sample(spec, 150000, 77);
    const auto zoo = standard_zoo(spec.space, set);
    CHECK(zoo.size() == 12);

    // masses are spread over (0.05, 0.95) and sublevel mass grows with c
    double prev_mass = 0.0;
    for (const auto& s : zoo) {
        double inside = 0.0;
        for (std::size_t i = 0; i < set.size(); ++i)
            inside += set_contains(spec.space, s, set.at(i)) ? 1.0 : 0.0;
        const double t = inside / static_cast<double>(set.size());
        CHECK(t > 0.05);
        CHECK(t < 0.95);
        if (s.family == SetSpec::Family::NormSublevel) {
            CHECK(t > prev_mass);
            prev_mass = t;
        }
    }

    const auto scan = profile_scan(spec, zoo, r_exponent_main(1.0, 2.0), set);
    CHECK(scan.points.size() == 12);
    CHECK(scan.c_min > 0.0);
    CHECK(std::isfinite(scan.c_min));
    for (const auto& pt_ : scan.points) {
        CHECK(pt_.mu_plus > 0.0);
        CHECK(pt_.model > 0.0);
    }

    // determinism across thread counts
    const auto scan1 = profile_scan(spec, zoo, 1.0, set, {0.08, 0.04, 0.02}, 1);
    const auto scan2 = profile_scan(spec, zoo, 1.0, set, {0.08, 0.04, 0.02}, 3);
    for (std::size_t i = 0; i < scan1.points.size(); ++i)
        CHECK(scan1.points[i].mu_plus == scan2.points[i].mu_plus);
}

TEST_CASE("complement symmetry of the surface measure on H^1" * doctest::timeout(300)) {
    MeasureSpec spec{heisenberg(1), 2.0, {}};
    const auto set = sample(spec, 150000, 78);
    SetSpec sub;
    sub.family = SetSpec::Family::NormSublevel;
    sub.threshold = 1.2;
    SetSpec cosub = sub;
    cosub.complement = true;
    const std::vector<double> grid = {0.08, 0.04, 0.02};
    const auto a = surface_measure(spec, sub, grid, set);
    const auto b = surface_measure(spec, cosub, grid, set);
    const double sigma = std::hypot(a.stderror, b.stderror);
    CHECK(std::abs(a.mu_plus - b.mu_plus) < 4.0 * sigma + 0.02);
}
