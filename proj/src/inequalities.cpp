#include "sublab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sublab/calculus.hpp"
#include "sublab/parallel.hpp"
#include "sublab/quadrature.hpp"
#include "sublab/rng.hpp"

namespace sublab {

double theta_growth(double alpha, double p) { return (p - alpha - 1.0) / (p * (alpha + 1.0)); }

double gamma_exponent(double alpha, double p, double q) {
    return q * (p - alpha - 1.0) / (alpha + 1.0);
}

double sigma_growth(double alpha, double p, double q) {
    return p * (alpha + 1.0) / (q * (p - alpha - 1.0));
}

Evaluator::Evaluator(const MeasureSpec& spec, const SampleSet& set, int threads)
    : spec_(spec), set_(&set), threads_(threads) {
    const std::size_t n = set.size();
    norms_.resize(n);
    xnorms_.resize(n);
    parallel_chunks(n, 4096, threads_, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t s = b; s < e; ++s) {
            const Point p = set.at(s);
            norms_[s] = spec_.space.hom_norm(p);
            xnorms_[s] = spec_.space.xblock_norm(p);
        }
    });
}

Evaluator::Evaluator(const MeasureSpec& spec, double quad_rel_tol, int threads)
    : spec_(spec), quad_tol_(quad_rel_tol), threads_(threads) {
    if (spec.space.ambient_dim() > 3)
        throw std::invalid_argument("Evaluator: quadrature mode needs ambient dimension <= 3");
}

double Evaluator::normaliser() const {
    if (z_cache_ == 0.0) {
        const auto den = integrate_unnormalized_quadrature(
            spec_, [](const Point&) { return 1.0; }, quad_tol_);
        z_cache_ = den.value;
        z_err_ = den.stderror;
    }
    return z_cache_;
}

IntegralEstimate Evaluator::expectation(const TestFunction& f, const Expr& expr,
                                        bool uses_gradient) const {
    if (set_) {
        const std::size_t n = set_->size();
        Eigen::VectorXd vals(n);
        parallel_chunks(n, 2048, threads_, [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t s = b; s < e; ++s) {
                const Point p = set_->at(s);
                const double gn = uses_gradient ? f.subgrad(p).norm() : 0.0;
                vals[s] = expr(std::abs(f.value(p)), gn, norms_[s], xnorms_[s]);
            }
        });
        if (!vals.allFinite())
            throw std::runtime_error("expectation: non-integrable term (non-finite value)");
        return batch_mean(vals);
    }

    // quadrature: unnormalized numerator over the cached normaliser; compact
    // members integrate in their support-aligned chart, everything else over
    // the truncated box (intersected with the support box when available)
    auto integrand = [&](const Point& p) {
        const double N = spec_.space.hom_norm(p);
        const double gn = uses_gradient ? f.subgrad(p).norm() : 0.0;
        return expr(std::abs(f.value(p)), gn, N, spec_.space.xblock_norm(p)) *
               std::exp(-std::pow(N, spec_.p));
    };
    QuadResult num;
    if (f.has_chart()) {
        num = integrate_box([&](const Point& h) { return integrand(f.chart(h)); }, f.chart_lo,
                            f.chart_hi, quad_tol_);
    } else {
        const Eigen::VectorXd hw = sublevel_box_halfwidths(spec_.space, truncation_radius(spec_));
        Eigen::VectorXd lo = -hw, hi = hw;
        if (f.has_support_box()) {
            lo = lo.cwiseMax(f.support_lo);
            hi = hi.cwiseMin(f.support_hi);
            for (int i = 0; i < lo.size(); ++i)
                if (!(lo[i] < hi[i])) {  // support entirely outside the truncation box
                    IntegralEstimate zero;
                    zero.method = "quadrature";
                    return zero;
                }
        }
        num = integrate_box(integrand, lo, hi, quad_tol_);
    }
    const double den = normaliser();
    IntegralEstimate out;
    out.method = "quadrature";
    out.n = num.evals;
    out.value = num.value / den;
    const double num_err = std::max(num.error, std::abs(num.value) * quad_tol_);
    out.stderror = std::abs(out.value) * ((num.value != 0.0 ? std::abs(num_err / num.value) : 0.0) +
                                          std::abs(z_err_ / den));
    if (num.value == 0.0) out.stderror = num_err / den;
    return out;
}

IntegralEstimate Evaluator::expectation_raw(const std::function<double(const Point&)>& g) const {
    if (set_) return integrate_mc(g, *set_, threads_);
    return integrate_quadrature(spec_, g, quad_tol_);
}

namespace {

double combined_ratio_stderr(double lhs, double lhs_sd, double rhs, double rhs_sd) {
    if (rhs == 0.0) return 0.0;
    const double r = lhs / rhs;
    return std::sqrt(lhs_sd * lhs_sd + r * r * rhs_sd * rhs_sd) / rhs;
}

void require_range(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

} // namespace

RatioReport ubound_ratio(const Evaluator& ev, double q, const TestFunction& f) {
    const double alpha = ev.spec().space.alpha();
    const double p = ev.spec().p;
    require_range(q >= 1.0 && q <= 2.0, "ubound_ratio: q must lie in [1,2]");
    require_range(p >= alpha + 1.0, "ubound_ratio: requires p >= alpha + 1");

    const double wq = q * alpha;
    const double wn = q * (p - alpha - 1.0);
    RatioReport rep;
    rep.inequality = "ubound";
    rep.q = q;
    rep.params = {{"p", p}, {"alpha", alpha}, {"q", q}};
    rep.lhs = ev.expectation(
        f,
        [&](double fa, double, double N, double xn) {
            return std::pow(fa, q) * std::pow(xn, wq) * std::pow(N, wn);
        },
        false);
    const auto grad = ev.expectation(
        f, [&](double, double gn, double, double) { return std::pow(gn, q); });
    const auto mass = ev.expectation(
        f, [&](double fa, double, double, double) { return std::pow(fa, q); }, false);
    rep.rhs_terms = {{"grad", grad}, {"mass", mass}};
    rep.rhs_combined = grad.value + mass.value;
    rep.ratio = rep.lhs.value / rep.rhs_combined;
    rep.ratio_stderror = combined_ratio_stderr(
        rep.lhs.value, rep.lhs.stderror, rep.rhs_combined,
        std::sqrt(grad.stderror * grad.stderror + mass.stderror * mass.stderror));
    return rep;
}

RatioReport merged_ubound_ratio(const Evaluator& ev, double q, const TestFunction& f) {
    const double alpha = ev.spec().space.alpha();
    const double p = ev.spec().p;
    require_range(q >= 1.0 && q < 2.0, "merged_ubound_ratio: q must lie in [1,2)");
    require_range(p > alpha + 1.0, "merged_ubound_ratio: requires p > alpha + 1");

    const double wn = gamma_exponent(alpha, p, q);
    RatioReport rep;
    rep.inequality = "merged_ubound";
    rep.q = q;
    rep.params = {{"p", p}, {"alpha", alpha}, {"q", q}, {"gamma", wn}};
    rep.lhs = ev.expectation(
        f, [&](double fa, double, double N, double) { return std::pow(fa, q) * std::pow(N, wn); },
        false);
    const auto grad = ev.expectation(
        f, [&](double, double gn, double, double) { return std::pow(gn, q); });
    const auto mass = ev.expectation(
        f, [&](double fa, double, double, double) { return std::pow(fa, q); }, false);
    rep.rhs_terms = {{"grad", grad}, {"mass", mass}};
    rep.rhs_combined = grad.value + mass.value;
    rep.ratio = rep.lhs.value / rep.rhs_combined;
    rep.ratio_stderror = combined_ratio_stderr(
        rep.lhs.value, rep.lhs.stderror, rep.rhs_combined,
        std::sqrt(grad.stderror * grad.stderror + mass.stderror * mass.stderror));
    return rep;
}

RatioReport hardy_ratio(const Evaluator& ev, double q, const TestFunction& f) {
    const int n1 = ev.spec().space.first_layer_dim();
    require_range(n1 >= 2, "hardy_ratio: requires first-layer dimension >= 2");
    require_range(q >= 1.0 && q <= 2.0, "hardy_ratio: q must lie in [1,2]");
    require_range(q < 2.0 || n1 > 2,
                  "hardy_ratio: q = 2 requires first-layer dimension > 2");

    RatioReport rep;
    rep.inequality = "hardy";
    rep.q = q;
    rep.params = {{"p", ev.spec().p}, {"alpha", ev.spec().space.alpha()}, {"q", q}};
    rep.lhs = ev.expectation(
        f, [&](double fa, double, double, double xn) { return std::pow(fa, q) / std::pow(xn, q); },
        false);
    const auto grad = ev.expectation(
        f, [&](double, double gn, double, double) { return std::pow(gn, q); });
    const auto mass = ev.expectation(
        f, [&](double fa, double, double, double) { return std::pow(fa, q); }, false);
    rep.rhs_terms = {{"grad", grad}, {"mass", mass}};
    rep.rhs_combined = grad.value + mass.value;
    rep.ratio = rep.lhs.value / rep.rhs_combined;
    rep.ratio_stderror = combined_ratio_stderr(
        rep.lhs.value, rep.lhs.stderror, rep.rhs_combined,
        std::sqrt(grad.stderror * grad.stderror + mass.stderror * mass.stderror));
    return rep;
}

RatioReport almost_hardy_ratio(const Evaluator& ev, double delta, double R0,
                               const TestFunction& f) {
    const double alpha = ev.spec().space.alpha();
    const double p = ev.spec().p;
    require_range(ev.spec().space.first_layer_dim() == 1,
                  "almost_hardy_ratio: requires first-layer dimension 1");
    require_range(delta > 0.0 && delta < 1.0, "almost_hardy_ratio: delta must lie in (0,1)");
    require_range(R0 > 0.0, "almost_hardy_ratio: R0 must be positive");

    RatioReport rep;
    rep.inequality = "almost_hardy";
    rep.q = 1.0;
    rep.params = {{"p", p}, {"alpha", alpha}, {"delta", delta}, {"R0", R0}};
    rep.lhs = ev.expectation(
        f, [&](double fa, double, double, double xn) { return fa * std::pow(xn, delta - 1.0); },
        false);
    const double cA = std::pow(R0, delta) / delta;
    const double cB = std::pow(R0, delta - 1.0);
    auto grad = ev.expectation(f, [&](double, double gn, double, double) { return gn; });
    auto u1 = ev.expectation(
        f,
        [&](double fa, double, double N, double xn) {
            return fa * std::pow(xn, alpha) * std::pow(N, p - alpha - 1.0);
        },
        false);
    auto mass = ev.expectation(
        f, [&](double fa, double, double, double) { return fa; }, false);
    grad.value *= cA;
    grad.stderror *= cA;
    u1.value *= cA;
    u1.stderror *= cA;
    mass.value *= cB;
    mass.stderror *= cB;
    rep.rhs_terms = {{"grad", grad}, {"ubound_weight", u1}, {"mass", mass}};
    rep.rhs_combined = grad.value + u1.value + mass.value;
    rep.ratio = rep.lhs.value / rep.rhs_combined;
    const double rhs_sd = std::sqrt(grad.stderror * grad.stderror + u1.stderror * u1.stderror +
                                    mass.stderror * mass.stderror);
    rep.ratio_stderror =
        combined_ratio_stderr(rep.lhs.value, rep.lhs.stderror, rep.rhs_combined, rhs_sd);
    return rep;
}

RatioReport ckn_ratio(const Evaluator& ev, double q, const TestFunction& f) {
    const double alpha = ev.spec().space.alpha();
    const double p = ev.spec().p;
    require_range(q >= 1.0 && q <= 2.0, "ckn_ratio: q must lie in [1,2]");
    require_range(p >= alpha + 1.0, "ckn_ratio: requires p >= alpha + 1");

    RatioReport rep;
    rep.inequality = "ckn";
    rep.q = q;
    rep.params = {{"p", p}, {"alpha", alpha}, {"q", q}};
    rep.lhs = ev.expectation(
        f, [&](double fa, double, double, double) { return std::pow(fa, q); }, false);
    const auto weighted = ev.expectation(
        f,
        [&](double fa, double, double, double xn) {
            return std::pow(fa, q) * std::pow(xn, q * alpha);
        },
        false);
    const auto grad = ev.expectation(
        f, [&](double, double gn, double, double) { return std::pow(gn, q); });
    rep.rhs_terms = {{"weighted_mass", weighted}, {"grad", grad}, {"mass", rep.lhs}};
    const double a1 = 1.0 / (alpha + 1.0);
    const double a2 = alpha / (alpha + 1.0);
    const double t2 = grad.value + rep.lhs.value;
    rep.rhs_combined = std::pow(weighted.value, a1) * std::pow(t2, a2);
    rep.ratio = rep.lhs.value / rep.rhs_combined;
    const double rel =
        (rep.lhs.value > 0 ? rep.lhs.stderror / rep.lhs.value : 0.0) +
        a1 * (weighted.value > 0 ? weighted.stderror / weighted.value : 0.0) +
        a2 * ((grad.stderror + rep.lhs.stderror) / std::max(t2, 1e-300));
    rep.ratio_stderror = std::abs(rep.ratio) * rel;
    return rep;
}

double spi_required_beta(const Evaluator& ev, double q, const TestFunction& f, double eps) {
    require_range(q >= 1.0 && q <= 2.0, "spi_required_beta: q must lie in [1,2]");
    require_range(eps > 0.0, "spi_required_beta: eps must be positive");
    const auto fq = ev.expectation(
        f, [&](double fa, double, double, double) { return std::pow(fa, q); }, false);
    const auto gq = ev.expectation(
        f, [&](double, double gn, double, double) { return std::pow(gn, q); });
    const auto fh = ev.expectation(
        f, [&](double fa, double, double, double) { return std::pow(fa, 0.5 * q); }, false);
    if (!(fh.value > 0.0))
        throw std::invalid_argument("spi_required_beta: zero half-mass denominator");
    return std::max(0.0, (fq.value - eps * gq.value) / (fh.value * fh.value));
}

namespace {

double ls_fit_slope(const std::vector<double>& x, const std::vector<double>& y,
                    double* max_resid) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    if (max_resid) {
        const double icpt = my - slope * mx;
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            r = std::max(r, std::abs(y[i] - slope * x[i] - icpt));
        *max_resid = r;
    }
    return slope;
}

} // namespace

GrowthFit constructive_beta_curve(const MeasureSpec& spec, double q,
                                  const std::vector<double>& epsilons,
                                  double comparability_constant) {
    const double alpha = spec.space.alpha();
    const double p = spec.p;
    require_range(p > alpha + 1.0, "constructive_beta_curve: requires p > alpha + 1");
    require_range(!epsilons.empty(), "constructive_beta_curve: empty epsilon grid");

    double c_N = comparability_constant;
    if (!(c_N > 0.0)) {
        // measured N <= c_N d from the path upper bounds on a gauge-sphere cloud
        const auto cloud = norm_annulus_cloud(spec.space, 200, 0.999, 1.001, 1e-4, 0xC0C0ull);
        c_N = 0.0;
        for (const auto& pt : cloud)
            c_N = std::max(c_N, spec.space.hom_norm(pt) / cc_sandwich(spec.space, pt).upper);
    }
    const double C = std::pow(c_N, p);
    const double gamma = gamma_exponent(alpha, p, q);
    const double Q = spec.space.hom_dim();

    GrowthFit fit;
    std::vector<double> xs, ys;
    for (double eps : epsilons) {
        require_range(eps > 0.0, "constructive_beta_curve: epsilons must be positive");
        const double growth = C * std::pow(eps, -p / gamma);
        const double log_beta = std::log1p(std::pow(eps, -Q)) + growth;
        fit.epsilons.push_back(eps);
        fit.log_betas.push_back(log_beta);
        // the polynomial local prefactor is known here; subtracting it makes
        // the log-log relation exactly affine and the slope recovery exact
        xs.push_back(-std::log(eps));
        ys.push_back(std::log(growth));
    }
    fit.fitted_sigma = ls_fit_slope(xs, ys, &fit.fit_residual);
    return fit;
}

GrowthFit spi_optimality_probe(const MeasureSpec& spec, double q,
                               const std::vector<double>& t_grid, double quad_rel_tol) {
    const Space& space = spec.space;
    const double alpha = space.alpha();
    const double p = spec.p;
    require_range(q == 2.0, "spi_optimality_probe: q must be 2");
    require_range(p > alpha + 1.0, "spi_optimality_probe: requires p > alpha + 1");
    require_range(t_grid.size() >= 4, "spi_optimality_probe: need at least 4 grid points");
    const bool steptwo = std::holds_alternative<StepTwo>(space.kind());
    const bool grushin = std::holds_alternative<Grushin>(space.kind());
    require_range((steptwo && space.is_htype()) || grushin,
                  "spi_optimality_probe: supported on H-type or Grushin spaces");
    require_range(space.ambient_dim() <= 3, "spi_optimality_probe: ambient dimension must be <= 3");

    const Point axis_unit = second_layer_unit(space);

    struct Row {
        double t, r, m, A, G, M;
    };
    std::vector<Row> rows;
    for (double t : t_grid) {
        require_range(t > 0.0, "spi_optimality_probe: grid values must be positive");
        Row row;
        row.t = t;
        row.r = std::pow(t, 1.0 - p / (alpha + 1.0));
        const Point center = space.dilate(t, axis_unit);
        row.m = std::pow(space.hom_norm(center), p);

        const Eigen::VectorXd hw = sublevel_box_halfwidths(space, row.r);
        auto combine = [&](const Point& h) {
            return steptwo ? space.group_mul(center, h) : Point(center + h);
        };
        auto shifted_weight = [&](const Point& h) {
            const double np = std::pow(space.hom_norm(combine(h)), p);
            return std::exp(-(np - row.m));
        };
        auto phi = [&](const Point& h) {
            return bump_profile(space.hom_norm(h) / row.r);
        };
        auto grad_phi = [&](const Point& h) {
            const double rho = space.hom_norm(h);
            const double gp = bump_profile_deriv(rho / row.r);
            if (gp == 0.0 || rho == 0.0) return 0.0;
            // |grad rho| = (|x_h| / rho)^alpha for these gauges
            return std::abs(gp) / row.r * std::pow(space.xblock_norm(h) / rho, alpha);
        };
        row.A = integrate_box([&](const Point& h) { const double v = phi(h);
                                  return v * v * shifted_weight(h); },
                              -hw, hw, quad_rel_tol).value;
        row.G = integrate_box([&](const Point& h) { const double v = grad_phi(h);
                                  return v * v * shifted_weight(h); },
                              -hw, hw, quad_rel_tol).value;
        row.M = integrate_box([&](const Point& h) { return phi(h) * shifted_weight(h); },
                              -hw, hw, quad_rel_tol).value;
        rows.push_back(row);
    }

    // eps(t) = c0 r(t)^2 with c0 chosen so eps G stays below A across the grid
    double c0 = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) c0 = std::min(c0, row.A / (row.G * row.r * row.r));
    c0 *= 0.5;

    GrowthFit fit;
    std::vector<double> xs, ys;
    for (const auto& row : rows) {
        const double eps = c0 * row.r * row.r;
        const double surplus = row.A - eps * row.G;
        require_range(surplus > 0.0, "spi_optimality_probe: clipped beta (schedule failure)");
        const double log_beta = row.m + std::log(surplus) - 2.0 * std::log(row.M);
        fit.epsilons.push_back(eps);
        fit.log_betas.push_back(log_beta);
        xs.push_back(-std::log(eps));
        ys.push_back(std::log(log_beta));
    }
    fit.fitted_sigma = ls_fit_slope(xs, ys, &fit.fit_residual);
    return fit;
}

RatioReport fsobolev_ratio(const Evaluator& ev, const TestFunction& f, double theta) {
    require_range(theta > 0.0, "fsobolev_ratio: theta must be positive");
    const auto mass = ev.expectation(
        f, [](double fa, double, double, double) { return fa; }, false);
    if (!(mass.value > 1e-12))
        throw std::invalid_argument("fsobolev_ratio: cannot normalise (zero L1 mass)");
    const double inv = 1.0 / mass.value;

    RatioReport rep;
    rep.inequality = "fsobolev";
    rep.q = 1.0;
    rep.params = {{"p", ev.spec().p}, {"alpha", ev.spec().space.alpha()}, {"theta", theta}};
    rep.lhs = ev.expectation(
        f,
        [&](double fa, double, double, double) {
            const double v = fa * inv;
            return v * std::pow(std::log1p(v), theta);
        },
        false);
    auto grad = ev.expectation(f, [&](double, double gn, double, double) { return gn * inv; });
    IntegralEstimate one;
    one.value = 1.0;
    one.method = rep.lhs.method;
    rep.rhs_terms = {{"grad", grad}, {"constant", one}};
    rep.rhs_combined = grad.value + 1.0;
    rep.ratio = rep.lhs.value / rep.rhs_combined;
    rep.ratio_stderror = combined_ratio_stderr(rep.lhs.value, rep.lhs.stderror, rep.rhs_combined,
                                               grad.stderror);
    return rep;
}

AffineMajorant fsobolev_majorant(const Evaluator& ev, const std::vector<TestFunction>& family,
                                 double theta, std::vector<RatioReport>* member_reports) {
    std::vector<double> gs, ls;
    for (const auto& f : family) {
        RatioReport rep;
        try {
            rep = fsobolev_ratio(ev, f, theta);
        } catch (const std::invalid_argument&) {
            continue;  // members with vanishing mass are skipped
        }
        gs.push_back(rep.rhs_terms[0].second.value);
        ls.push_back(rep.lhs.value);
        if (member_reports) member_reports->push_back(rep);
    }
    if (gs.size() < 2) throw std::runtime_error("fsobolev_majorant: too few usable members");

    // least-squares affine fit, lifted to a majorant, then a 10% margin
    const std::size_t n = gs.size();
    double mg = 0, ml = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mg += gs[i];
        ml += ls[i];
    }
    mg /= static_cast<double>(n);
    ml /= static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (gs[i] - mg) * (ls[i] - ml);
        sxx += (gs[i] - mg) * (gs[i] - mg);
    }
    double c1 = sxx > 0 ? std::max(0.0, sxy / sxx) : 0.0;
    double c2 = ml - c1 * mg;
    double lift = 0.0;
    for (std::size_t i = 0; i < n; ++i) lift = std::max(lift, ls[i] - c1 * gs[i] - c2);
    c2 += lift;
    return {1.1 * c1, 1.1 * std::max(c2, 0.0)};
}

RatioReport cheeger_ratio(const Evaluator& ev, const TestFunction& f) {
    const double alpha = ev.spec().space.alpha();
    require_range(std::abs(ev.spec().p - (alpha + 1.0)) < 1e-9,
                  "cheeger_ratio: requires the endpoint p = alpha + 1");
    if (!ev.is_mc())
        throw std::invalid_argument("cheeger_ratio: needs a SampleSet (median is sample-based)");

    const SampleSet& set = *ev.samples();
    const std::size_t n = set.size();
    std::vector<double> vals(n);
    for (std::size_t s = 0; s < n; ++s) vals[s] = f.value(set.at(s));
    std::vector<double> sorted = vals;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    const double median = sorted[n / 2];

    Eigen::VectorXd dev(n);
    for (std::size_t s = 0; s < n; ++s) dev[s] = std::abs(vals[s] - median);
    RatioReport rep;
    rep.inequality = "cheeger";
    rep.q = 1.0;
    rep.params = {{"p", ev.spec().p}, {"alpha", alpha}, {"median", median}};
    rep.lhs = batch_mean(dev);
    const auto grad = ev.expectation(f, [](double, double gn, double, double) { return gn; });
    if (!(grad.value > 1e-12))
        throw std::invalid_argument("cheeger_ratio: constant test function (zero gradient mass)");
    rep.rhs_terms = {{"grad", grad}};
    rep.rhs_combined = grad.value;
    rep.ratio = rep.lhs.value / rep.rhs_combined;
    rep.ratio_stderror =
        combined_ratio_stderr(rep.lhs.value, rep.lhs.stderror, rep.rhs_combined, grad.stderror);
    return rep;
}

} // namespace sublab
