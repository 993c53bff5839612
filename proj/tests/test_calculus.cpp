#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sublab/calculus.hpp"
#include "sublab/rng.hpp"
#include "test_util.hpp"

using namespace sublab;
using sublab::test::pt;

TEST_CASE("subgradient basics") {
    const Space h1 = heisenberg(1);
    const ScalarField N = norm_field(h1);

    SUBCASE("constant field has zero subgradient") {
        ScalarField c;
        c.value = [](const Point&) { return 3.5; };
        const Eigen::VectorXd g =
            subgradient(h1, c, pt({0.4, -0.2, 0.7}), DerivMode::FiniteDifference);
        CHECK(g.norm() < 1e-9);
    }

    SUBCASE("coordinate field on grushin picks out the first frame direction") {
        const Space gr = make_space(Grushin{2, 1, 1.0});
        ScalarField x1;
        x1.value = [](const Point& p) { return p[0]; };
        const Eigen::VectorXd g =
            subgradient(gr, x1, pt({0.3, 0.4, 0.9}), DerivMode::FiniteDifference);
        CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(g[1]) < 1e-9);
        CHECK(std::abs(g[2]) < 1e-9);
    }

    SUBCASE("exact mode needs an analytic gradient") {
        ScalarField c;
        c.value = [](const Point&) { return 1.0; };
        CHECK_THROWS(subgradient(h1, c, pt({1, 0, 0}), DerivMode::Exact));
    }

    SUBCASE("kaplan identity |grad N| = |x|/N on H-type, exact and FD") {
        Philox rng(3, 0);
        for (int i = 0; i < 40; ++i) {
            Point p = sublab::test::random_point(h1, rng);
            if (h1.xblock_norm(p) < 1e-2) continue;
            const double N = h1.hom_norm(p);
            const double want = h1.xblock_norm(p) / N;
            CHECK(subgradient(h1, norm_field(h1), p, DerivMode::Exact).norm() ==
                  doctest::Approx(want).epsilon(1e-12));
            CHECK(subgradient(h1, norm_field(h1), p, DerivMode::FiniteDifference).norm() ==
                  doctest::Approx(want).epsilon(1e-7));
        }
    }

    SUBCASE("NaN evaluation is reported") {
        ScalarField bad;
        bad.value = [](const Point& p) { return std::sqrt(p[0]); };  // NaN for p0 < 0
        CHECK_THROWS(subgradient(h1, bad, pt({0.0, 1.0, 0.0}), DerivMode::FiniteDifference));
    }
}

TEST_CASE("exact-vs-FD agreement for every space kind") {
    Philox rng(5, 1);
    const std::vector<Space> spaces = {heisenberg(1), heisenberg(2),
                                       make_space(Grushin{2, 1, 2.0}), make_space(Greiner{1, 2}),
                                       make_space(Filiform{3})};
    for (const auto& s : spaces) {
        const ScalarField N = norm_field(s);
        int checked = 0;
        while (checked < 25) {
            const Point p = sublab::test::random_point(s, rng);
            const double Np = s.hom_norm(p);
            if (Np < 0.1 || Np > 10.0 || s.xblock_norm(p) < 0.05) continue;
            // keep clear of the filiform kink loci where the gradient jumps
            if (std::holds_alternative<Filiform>(s.kind()) && p.cwiseAbs().minCoeff() < 0.05)
                continue;
            ++checked;
            const Eigen::VectorXd ge = subgradient(s, N, p, DerivMode::Exact);
            const Eigen::VectorXd gf = subgradient(s, N, p, DerivMode::FiniteDifference);
            CHECK((ge - gf).norm() < 1e-5 * std::max(1.0, ge.norm()));
        }
    }
}

TEST_CASE("gradient norm is homogeneous of degree zero") {
    Philox rng(6, 2);
    const Space gz = make_space(Greiner{1, 2});
    const ScalarField N = norm_field(gz);
    for (int i = 0; i < 30; ++i) {
        const Point p = sublab::test::random_point(gz, rng);
        if (gz.xblock_norm(p) < 0.1) continue;
        const double g1 = subgradient(gz, N, p, DerivMode::Exact).norm();
        const double g2 = subgradient(gz, N, gz.dilate(3.0, p), DerivMode::Exact).norm();
        CHECK(g1 == doctest::Approx(g2).epsilon(1e-8));
    }
}

TEST_CASE("sublaplacian") {
    const Space h1 = heisenberg(1);

    SUBCASE("euclidean action on first-layer functions: Delta |x|^2 = 2 n1") {
        ScalarField f;
        f.value = [&h1](const Point& p) { return h1.xblock_norm(p) * h1.xblock_norm(p); };
        const double lap = sublaplacian(h1, f, pt({0.3, -0.8, 0.4}));
        CHECK(lap == doctest::Approx(4.0).epsilon(1e-5));
    }

    SUBCASE("Delta |x| = (n1 - 1)/|x|") {
        const ScalarField f = xblock_field(h1);
        const double lap = sublaplacian(h1, f, pt({2.0, 0.0, 0.3}));
        CHECK(lap == doctest::Approx(0.5).epsilon(1e-4));
    }

    SUBCASE("N^{2-Q} is harmonic away from the origin") {
        const double Q = h1.hom_dim();
        ScalarField f;
        f.value = [&h1, Q](const Point& p) { return std::pow(h1.hom_norm(p), 2.0 - Q); };
        for (const Point& p : {pt({1.2, 0.4, 0.3}), pt({-0.8, 0.9, -0.5}), pt({0.4, 1.4, 1.0})}) {
            CHECK(std::abs(sublaplacian(h1, f, p)) < 2e-4);
        }
    }

    SUBCASE("FD laplacian of N is scale invariant") {
        Philox rng(8, 3);
        const ScalarField N = norm_field(h1);
        for (int i = 0; i < 20; ++i) {
            const Point p = sublab::test::random_point(h1, rng);
            if (h1.xblock_norm(p) < 0.3 || h1.hom_norm(p) < 0.5) continue;
            const double l1 = sublaplacian(h1, N, p);
            const double l2 = sublaplacian(h1, N, h1.dilate(2.0, p)) * 2.0;
            CHECK(l1 == doctest::Approx(l2).epsilon(2e-5));
        }
    }
}

TEST_CASE("check_estimates") {
    SUBCASE("H-type gradient ratio is exactly one") {
        const Space h1 = heisenberg(1);
        const auto cloud = norm_annulus_cloud(h1, 2000, 0.1, 10.0, 1e-3, 42);
        const auto rep = check_estimates(h1, 1.0, cloud, 1e-3);
        const auto& g = rep.entry("gradient");
        CHECK(g.min_ratio > 1.0 - 1e-5);
        CHECK(g.max_ratio < 1.0 + 1e-5);
        CHECK(g.sample_count == 2000);
        // comparison |x| <= N with constant 1 for the Kaplan gauge
        CHECK(rep.entry("comparison").max_ratio <= 1.0 + 1e-9);
    }

    SUBCASE("grushin ratios bounded, lower bound positive") {
        const Space gr = make_space(Grushin{2, 1, 2.0});
        const auto cloud = norm_annulus_cloud(gr, 2000, 0.1, 10.0, 1e-3, 43);
        const auto rep = check_estimates(gr, 2.0, cloud, 1e-3);
        CHECK(rep.entry("gradient").min_ratio > 0.1);
        CHECK(rep.entry("gradient").max_ratio < 10.0);
        CHECK(rep.entry("laplacian").max_ratio < 100.0);
        CHECK(rep.entry("cross").max_ratio < 100.0);
        CHECK(rep.entry("comparison").max_ratio < 2.0);
    }

    SUBCASE("filiform lower bound via the X1 estimate") {
        const Space fl = make_space(Filiform{3});
        const auto cloud = norm_annulus_cloud(fl, 1500, 0.1, 10.0, 1e-3, 44);
        const auto rep = check_estimates(fl, 2.0, cloud, 1e-3);
        for (const auto& e : rep.entries) {
            CHECK(std::isfinite(e.max_ratio));
            CHECK(std::isfinite(e.min_ratio));
        }
        // cross_lower realises X1 N . X1 |x1| >= |x1|^a N^{-a} with constant >= 1
        CHECK(rep.entry("cross_lower").min_ratio > 0.99);
        CHECK(rep.entry("gradient").min_ratio > 0.99);
    }

    SUBCASE("empty cloud after exclusion is an error") {
        const Space h1 = heisenberg(1);
        std::vector<Point> cloud = {pt({1e-6, 0, 0})};
        CHECK_THROWS(check_estimates(h1, 1.0, cloud, 1e-3));
    }
}

TEST_CASE("cc_sandwich") {
    const Space h1 = heisenberg(1);

    SUBCASE("first-layer points are reached by a straight segment") {
        const auto sw = cc_sandwich(h1, pt({3.0, -4.0, 0.0}));
        CHECK(sw.lower == doctest::Approx(5.0));
        CHECK(sw.upper == doctest::Approx(5.0));
    }

    SUBCASE("pure second-layer cost scales like sqrt(t)") {
        double ratio0 = 0.0;
        for (double t : {1.0, 10.0, 100.0}) {
            const auto sw = cc_sandwich(h1, pt({0.0, 0.0, t}));
            const double ratio = sw.upper / h1.hom_norm(pt({0.0, 0.0, t}));
            if (ratio0 == 0.0) ratio0 = ratio;
            CHECK(ratio == doctest::Approx(ratio0).epsilon(1e-9));
            CHECK(ratio < 5.0);
        }
    }

    SUBCASE("sandwich ratios bounded over random clouds, several kinds") {
        Philox rng(17, 5);
        for (const auto& s : {heisenberg(1), heisenberg(2), make_space(Grushin{2, 1, 1.5}),
                              make_space(Greiner{1, 2}), make_space(Filiform{3})}) {
            for (int i = 0; i < 40; ++i) {
                const Point p = sublab::test::random_point(s, rng);
                const double N = s.hom_norm(p);
                if (N < 1e-3) continue;
                const auto sw = cc_sandwich(s, p);
                CHECK(sw.lower <= sw.upper + 1e-12);
                CHECK(sw.upper / N < 60.0);   // N <= C d
                CHECK(sw.lower / N < 1.5);    // d >= |x| and |x| <= C N
            }
        }
    }

    SUBCASE("budget too small is an error, not a clamp") {
        CHECK_THROWS(cc_sandwich(h1, pt({0.0, 0.0, 1.0}), 2));
        CHECK_THROWS(cc_sandwich(h1, h1.zero()));
    }
}
