#include "sublab/testfunctions.hpp"

#include <cmath>
#include <stdexcept>

namespace sublab {

double bump_profile(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    return 1.0 - s * s * (3.0 - 2.0 * s);
}

double bump_profile_deriv(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return -6.0 * s * (1.0 - s);
}

double bump_profile5(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double bump_profile5_deriv(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double u = s * (1.0 - s);
    return -30.0 * u * u;
}

double quasi_gauge(const Space& space, const Point& center, const Point& xi) {
    if (std::holds_alternative<StepTwo>(space.kind()))
        return space.hom_norm(space.group_mul(space.group_inverse(center), xi));
    return space.hom_norm(xi - center);
}

namespace {

// shifted argument whose plain gauge equals the quasi-gauge from the center
Point gauge_argument(const Space& space, const Point& center, const Point& xi) {
    if (std::holds_alternative<StepTwo>(space.kind()))
        return space.group_mul(space.group_inverse(center), xi);
    return xi - center;
}

} // namespace

TestFunction bump(const Space& space, const Point& center, double radius, BumpProfile profile) {
    if (!(radius > 0.0)) throw std::invalid_argument("bump: radius must be positive");
    const auto g = profile == BumpProfile::CubicC1 ? bump_profile : bump_profile5;
    const auto dg = profile == BumpProfile::CubicC1 ? bump_profile_deriv : bump_profile5_deriv;

    TestFunction f;
    f.label = "bump(r=" + std::to_string(radius) + ")";
    f.compact_support = true;
    // coordinate box around the support {quasi_gauge < radius}
    const Eigen::VectorXd hw = sublevel_box_halfwidths(space, radius);
    f.support_lo = center - hw;
    f.support_hi = center + hw;
    const bool group = std::holds_alternative<StepTwo>(space.kind());
    if (const auto* k = std::get_if<StepTwo>(&space.kind())) {
        // group translation shears the second layer by 0.5 <B^(j) c_x, h_x>
        for (int j = 0; j < k->m; ++j) {
            const double shear = 0.5 * (k->B[j] * center.head(k->n)).norm() * radius;
            f.support_lo[k->n + j] -= shear;
            f.support_hi[k->n + j] += shear;
        }
    }
    // support-aligned unit-Jacobian chart h -> center o h (or center + h)
    f.chart = [space, center, group](const Point& h) -> Point {
        return group ? space.group_mul(center, h) : Point(center + h);
    };
    f.chart_lo = -hw;
    f.chart_hi = hw;

    f.value = [space, center, radius, g](const Point& xi) {
        return g(quasi_gauge(space, center, xi) / radius);
    };
    f.subgrad = [space, center, radius, group, dg](const Point& xi) -> Eigen::VectorXd {
        const Point h = gauge_argument(space, center, xi);
        const double rho = space.hom_norm(h);
        const double gp = dg(rho / radius);
        if (gp == 0.0) return Eigen::VectorXd::Zero(space.frame_size());
        const Eigen::VectorXd grad_rho_euc = space.hom_norm_grad(h);
        // on a group, left invariance: X_i[N(c^{-1} o xi)](xi) = (X_i N)(h)
        const Point& frame_at = group ? h : xi;
        return (gp / radius) * space.subgrad_from_euclidean(grad_rho_euc, frame_at);
    };
    return f;
}

TestFunction poly_cutoff(const Space& space, const std::string& label,
                         std::function<double(const Point&)> poly,
                         std::function<Eigen::VectorXd(const Point&)> poly_grad_euc,
                         double cutoff_radius) {
    TestFunction f;
    f.label = label + "*cut(" + std::to_string(cutoff_radius) + ")";
    f.compact_support = true;
    const Eigen::VectorXd hw = sublevel_box_halfwidths(space, cutoff_radius);
    f.support_lo = -hw;
    f.support_hi = hw;
    f.value = [space, poly, cutoff_radius](const Point& xi) {
        const double w = bump_profile(space.hom_norm(xi) / cutoff_radius);
        return w == 0.0 ? 0.0 : poly(xi) * w;
    };
    f.subgrad = [space, poly, poly_grad_euc, cutoff_radius](const Point& xi) -> Eigen::VectorXd {
        const double N = space.hom_norm(xi);
        const double s = N / cutoff_radius;
        const double w = bump_profile(s);
        if (w == 0.0) return Eigen::VectorXd::Zero(space.frame_size());
        Eigen::VectorXd grad = w * poly_grad_euc(xi);
        const double wp = bump_profile_deriv(s);
        if (wp != 0.0) grad += poly(xi) * (wp / cutoff_radius) * space.hom_norm_grad(xi);
        return space.subgrad_from_euclidean(grad, xi).eval();
    };
    return f;
}

TestFunction radial_in_norm(const Space& space, const std::string& label,
                            std::function<double(double)> h, std::function<double(double)> dh) {
    TestFunction f;
    f.label = label;
    f.value = [space, h](const Point& xi) { return h(space.hom_norm(xi)); };
    f.subgrad = [space, dh](const Point& xi) {
        return (dh(space.hom_norm(xi)) * space.subgrad_from_euclidean(space.hom_norm_grad(xi), xi))
            .eval();
    };
    return f;
}

Point second_layer_unit(const Space& space) {
    Point p = space.zero();
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, StepTwo>) {
                p[k.n] = 1.0 / std::sqrt(k.kappa);
            } else if constexpr (std::is_same_v<T, Grushin>) {
                p[k.n] = 1.0 / (1.0 + k.eta);
            } else if constexpr (std::is_same_v<T, Greiner>) {
                p[2 * k.n] = 1.0;
            } else {
                p[2] = 1.0;  // x_3, the first weight-2 coordinate
            }
        },
        space.kind());
    return p;
}

TestFunction phi_probe(const Space& space, double t, double p) {
    if (!(t > 0.0)) throw std::invalid_argument("phi_probe: t must be positive");
    if (!(p > space.alpha() + 1.0))
        throw std::invalid_argument("phi_probe: requires p > alpha + 1");
    const double radius = std::pow(t, 1.0 - p / (space.alpha() + 1.0));
    const Point center = space.dilate(t, second_layer_unit(space));
    TestFunction f = bump(space, center, radius, BumpProfile::CubicC1);
    f.label = "phi_probe(t=" + std::to_string(t) + ")";
    return f;
}

std::vector<TestFunction> standard_family(const Space& space) {
    std::vector<TestFunction> family;
    family.reserve(50);
    const int dim = space.ambient_dim();
    const int n1 = space.first_layer_dim();

    // 20 bumps: radii x {origin, second layer, first layer, mixed}
    const Point c0 = space.zero();
    const Point c1 = space.dilate(2.0, second_layer_unit(space));
    Point c2 = space.zero();
    c2[0] = 2.0;
    Point mix = second_layer_unit(space);
    mix[0] += 1.0;
    const Point c3 = space.dilate(1.5 / space.hom_norm(mix), mix);
    const std::vector<std::pair<std::string, Point>> centers = {
        {"origin", c0}, {"axis", c1}, {"layer1", c2}, {"mixed", c3}};
    for (double radius : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        for (const auto& [cname, c] : centers) {
            TestFunction b = bump(space, c, radius);
            b.label = "bump(" + cname + ",r=" + std::to_string(radius) + ")";
            family.push_back(std::move(b));
        }
    }

    // 16 polynomial x cutoff members (degree <= 3)
    struct Poly {
        std::string name;
        std::function<double(const Point&)> val;
        std::function<Eigen::VectorXd(const Point&)> grad;
    };
    auto coord = [dim](int i) {
        return Poly{"x" + std::to_string(i + 1),
                    [i](const Point& q) { return q[i]; },
                    [i, dim](const Point&) {
                        Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
                        g[i] = 1.0;
                        return g;
                    }};
    };
    std::vector<Poly> polys;
    polys.push_back({"one", [](const Point&) { return 1.0; },
                     [dim](const Point&) { return Eigen::VectorXd::Zero(dim).eval(); }});
    polys.push_back(coord(0));
    polys.push_back(coord(1));
    polys.push_back(coord(dim - 1));
    polys.push_back({"x1^2", [](const Point& q) { return q[0] * q[0]; },
                     [dim](const Point& q) {
                         Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
                         g[0] = 2.0 * q[0];
                         return g;
                     }});
    polys.push_back({"x1*x2", [](const Point& q) { return q[0] * q[1]; },
                     [dim](const Point& q) {
                         Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
                         g[0] = q[1];
                         g[1] = q[0];
                         return g;
                     }});
    polys.push_back({"x1^3", [](const Point& q) { return q[0] * q[0] * q[0]; },
                     [dim](const Point& q) {
                         Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
                         g[0] = 3.0 * q[0] * q[0];
                         return g;
                     }});
    polys.push_back({"|x|^2", [n1](const Point& q) { return q.head(n1).squaredNorm(); },
                     [n1, dim](const Point& q) {
                         Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
                         g.head(n1) = 2.0 * q.head(n1);
                         return g;
                     }});
    for (const auto& P : polys)
        for (double R : {2.0, 6.0})
            family.push_back(poly_cutoff(space, P.name, P.val, P.grad, R));

    // 14 radial-in-N profiles
    struct Radial {
        std::string name;
        std::function<double(double)> h, dh;
    };
    const std::vector<Radial> radials = {
        {"exp(-N)", [](double n) { return std::exp(-n); }, [](double n) { return -std::exp(-n); }},
        {"exp(-2N)", [](double n) { return std::exp(-2 * n); },
         [](double n) { return -2 * std::exp(-2 * n); }},
        {"exp(-N^2)", [](double n) { return std::exp(-n * n); },
         [](double n) { return -2 * n * std::exp(-n * n); }},
        {"N*exp(-N)", [](double n) { return n * std::exp(-n); },
         [](double n) { return (1 - n) * std::exp(-n); }},
        {"N^2*exp(-N^2)", [](double n) { return n * n * std::exp(-n * n); },
         [](double n) { return (2 * n - 2 * n * n * n) * std::exp(-n * n); }},
        {"N^3*exp(-N^2)", [](double n) { return n * n * n * std::exp(-n * n); },
         [](double n) { return (3 * n * n - 2 * n * n * n * n) * std::exp(-n * n); }},
        {"1/(1+N^2)", [](double n) { return 1 / (1 + n * n); },
         [](double n) { double d = 1 + n * n; return -2 * n / (d * d); }},
        {"1/(1+N^2)^2", [](double n) { double d = 1 + n * n; return 1 / (d * d); },
         [](double n) { double d = 1 + n * n; return -4 * n / (d * d * d); }},
        {"1/(1+N)^3", [](double n) { double d = 1 + n; return 1 / (d * d * d); },
         [](double n) { double d = 1 + n; return -3 / (d * d * d * d); }},
        {"1/(1+N^4)", [](double n) { return 1 / (1 + n * n * n * n); },
         [](double n) { double d = 1 + n * n * n * n; return -4 * n * n * n / (d * d); }},
        {"log(1+N^2)*exp(-N)",
         [](double n) { return std::log1p(n * n) * std::exp(-n); },
         [](double n) {
             return (2 * n / (1 + n * n) - std::log1p(n * n)) * std::exp(-n);
         }},
        {"exp(-N^3/3)", [](double n) { return std::exp(-n * n * n / 3); },
         [](double n) { return -n * n * std::exp(-n * n * n / 3); }},
        {"sech(N)", [](double n) { return 1 / std::cosh(n); },
         [](double n) { return -std::tanh(n) / std::cosh(n); }},
        {"exp(-N)*(2+sin(N))",
         [](double n) { return std::exp(-n) * (2 + std::sin(n)); },
         [](double n) { return std::exp(-n) * (std::cos(n) - 2 - std::sin(n)); }},
    };
    for (const auto& r : radials) family.push_back(radial_in_norm(space, r.name, r.h, r.dh));

    if (family.size() != 50) throw std::logic_error("standard_family: expected 50 members");
    return family;
}

} // namespace sublab
