// Adaptive Gauss-Kronrod (G7,K15) quadrature and a nested integrator for
// boxes up to dimension 3. Serial and deterministic.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace sublab {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t evals = 0;
};

namespace detail {

// QUADPACK 15-point Kronrod nodes/weights with embedded 7-point Gauss rule.
inline const double kGK15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline const double kGK15WK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline const double kGK15WG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
void gk15(const F& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = kGK15WK[7] * fc;
    double resg = kGK15WG[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double x = h * kGK15Nodes[i];
        const double f1 = f(c - x);
        const double f2 = f(c + x);
        resk += kGK15WK[i] * (f1 + f2);
        if (i % 2 == 1) resg += kGK15WG[i / 2] * (f1 + f2);
    }
    kronrod = resk * h;
    err = std::abs((resk - resg) * h);
}

} // namespace detail

// Adaptive bisection on [a, b]; tol is interpreted as an absolute target,
// widened by rel_tol * |integral so far|.
template <typename F>
QuadResult integrate_1d(const F& f, double a, double b, double abs_tol = 1e-10,
                        double rel_tol = 1e-9, int max_depth = 48) {
    struct Panel {
        double a, b, value, error;
        int depth;
    };
    QuadResult out;
    double v0, e0;
    detail::gk15(f, a, b, v0, e0);
    out.evals = 15;
    std::vector<Panel> stack{{a, b, v0, e0, 0}};
    double total = v0, total_err = e0;
    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        const double target = std::max(abs_tol, rel_tol * std::abs(total));
        // share the budget by panel width
        const double local = target * std::max(1e-3, (p.b - p.a) / (b - a));
        if (p.error <= local || p.depth >= max_depth) continue;
        const double mid = 0.5 * (p.a + p.b);
        double vl, el, vr, er;
        detail::gk15(f, p.a, mid, vl, el);
        detail::gk15(f, mid, p.b, vr, er);
        out.evals += 30;
        total += vl + vr - p.value;
        total_err += el + er - p.error;
        stack.push_back({p.a, mid, vl, el, p.depth + 1});
        stack.push_back({mid, p.b, vr, er, p.depth + 1});
    }
    out.value = total;
    out.error = std::abs(total_err);
    return out;
}

// Nested adaptive integration over an axis-aligned box, dimension <= 3.
inline QuadResult integrate_box(const std::function<double(const Eigen::VectorXd&)>& f,
                                const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                double rel_tol = 1e-8) {
    const int dim = static_cast<int>(lo.size());
    if (dim < 1 || dim > 3) throw std::invalid_argument("integrate_box: dimension must be 1..3");
    if (hi.size() != lo.size()) throw std::invalid_argument("integrate_box: bounds mismatch");

    std::size_t evals = 0;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    // inner-level errors largely average out across outer nodes; matching the
    // outer tolerance keeps the nesting cost near-multiplicative-free
    const double inner_rel = rel_tol;

    std::function<double(int)> level = [&](int d) -> double {
        if (d == dim - 1) {
            auto q = integrate_1d(
                [&](double v) {
                    x[d] = v;
                    ++evals;
                    return f(x);
                },
                lo[d], hi[d], 0.0, d == 0 ? rel_tol : inner_rel);
            return q.value;
        }
        auto q = integrate_1d(
            [&](double v) {
                x[d] = v;
                return level(d + 1);
            },
            lo[d], hi[d], 0.0, d == 0 ? rel_tol : inner_rel);
        return q.value;
    };

    QuadResult out;
    out.value = level(0);
    out.evals = evals;

    // refinement delta as the error proxy: redo the outermost axis split in two
    const double mid = 0.5 * (lo[0] + hi[0]);
    auto run_outer = [&](double a, double b) {
        if (dim == 1) {
            auto q = integrate_1d(
                [&](double v) {
                    x[0] = v;
                    ++evals;
                    return f(x);
                },
                a, b, 0.0, rel_tol);
            return q.value;
        }
        auto q = integrate_1d(
            [&](double v) {
                x[0] = v;
                return level(1);
            },
            a, b, 0.0, rel_tol);
        return q.value;
    };
    const double refined = run_outer(lo[0], mid) + run_outer(mid, hi[0]);
    out.error = std::abs(refined - out.value);
    out.value = refined;
    out.evals = evals;
    return out;
}

} // namespace sublab
