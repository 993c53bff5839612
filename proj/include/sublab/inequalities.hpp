// Both sides of the U-bound, Hardy, Caffarelli-Kohn-Nirenberg, F-Sobolev and
// Cheeger inequalities on test functions, the super-Poincare growth scans and
// the second-layer optimality probe.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "sublab/measures.hpp"
#include "sublab/testfunctions.hpp"

namespace sublab {

// growth and exponent bookkeeping
double theta_growth(double alpha, double p);          // (p - a - 1) / (p (a + 1))
double gamma_exponent(double alpha, double p, double q);  // q (p - a - 1) / (a + 1)
double sigma_growth(double alpha, double p, double q);    // p (a + 1) / (q (p - a - 1))

struct RatioReport {
    std::string inequality;
    IntegralEstimate lhs;
    std::vector<std::pair<std::string, IntegralEstimate>> rhs_terms;
    double rhs_combined = 0.0;
    double ratio = 0.0;
    double ratio_stderror = 0.0;
    double q = 0.0;
    std::map<std::string, double> params;
};

// Evaluates expectations E_mu[expr(|f|, |grad f|, N, |x|)] either over a
// SampleSet (Z cancels) or by nested quadrature (dimension <= 3, Z cached).
class Evaluator {
public:
    Evaluator(const MeasureSpec& spec, const SampleSet& set, int threads = 0);
    Evaluator(const MeasureSpec& spec, double quad_rel_tol, int threads = 0);

    const MeasureSpec& spec() const { return spec_; }
    bool is_mc() const { return set_ != nullptr; }

    using Expr = std::function<double(double fabs, double gnorm, double N, double xnorm)>;
    // uses_gradient = false skips the subgradient evaluation (gnorm passed as 0)
    IntegralEstimate expectation(const TestFunction& f, const Expr& expr,
                                 bool uses_gradient = true) const;
    // expectation of a raw function of the point (MC route or quadrature route)
    IntegralEstimate expectation_raw(const std::function<double(const Point&)>& g) const;
    const SampleSet* samples() const { return set_; }

private:
    MeasureSpec spec_;
    const SampleSet* set_ = nullptr;
    Eigen::VectorXd norms_, xnorms_;  // per-sample caches (MC)
    double quad_tol_ = 1e-6;
    int threads_ = 0;
    mutable double z_cache_ = 0.0;    // quadrature normaliser, computed once
    mutable double z_err_ = 0.0;
    double normaliser() const;
};

// int |f|^q |x|^{q a} N^{q(p-a-1)} dmu <= C (int |grad f|^q + int |f|^q) dmu
RatioReport ubound_ratio(const Evaluator& ev, double q, const TestFunction& f);
// weight N^{q(p-a-1)/(a+1)}, nondegenerate on {x = 0}
RatioReport merged_ubound_ratio(const Evaluator& ev, double q, const TestFunction& f);
// int |f|^q |x|^{-q} dmu <= C (int |grad f|^q + int |f|^q) dmu
RatioReport hardy_ratio(const Evaluator& ev, double q, const TestFunction& f);
// n1 = 1 variant with softened weight |x|^{-(1-delta)}
RatioReport almost_hardy_ratio(const Evaluator& ev, double delta, double R0,
                               const TestFunction& f);
// int |f|^q dmu <= C (int |f|^q |x|^{qa})^{1/(a+1)} (int |grad f|^q + int |f|^q)^{a/(a+1)}
RatioReport ckn_ratio(const Evaluator& ev, double q, const TestFunction& f);

// smallest beta making the q-super-Poincare inequality hold for this f at eps
double spi_required_beta(const Evaluator& ev, double q, const TestFunction& f, double eps);

struct GrowthFit {
    std::vector<double> epsilons;
    std::vector<double> log_betas;
    double fitted_sigma = 0.0;
    double fit_residual = 0.0;
};

// proof-side curve beta(eps) = (1 + eps^{-Q}) exp(C eps^{-p/gamma}) with the
// comparability constant measured from the gauge-vs-path sandwich
GrowthFit constructive_beta_curve(const MeasureSpec& spec, double q,
                                  const std::vector<double>& epsilons,
                                  double comparability_constant = 0.0);

// second-layer bump probe: localized quadrature of the three integrals in
// log space, eps(t) proportional to the squared bump radius
GrowthFit spi_optimality_probe(const MeasureSpec& spec, double q,
                               const std::vector<double>& t_grid, double quad_rel_tol = 1e-6);

// int |f| log(1 + |f|)^theta dmu for f normalised to int |f| dmu = 1
RatioReport fsobolev_ratio(const Evaluator& ev, const TestFunction& f, double theta);

struct AffineMajorant {
    double c1 = 0.0;
    double c2 = 0.0;
};
// least-squares affine majorant of lhs against the gradient term over a family
AffineMajorant fsobolev_majorant(const Evaluator& ev, const std::vector<TestFunction>& family,
                                 double theta, std::vector<RatioReport>* member_reports = nullptr);

// endpoint p = alpha + 1: int |f - median| dmu <= C int |grad f| dmu
RatioReport cheeger_ratio(const Evaluator& ev, const TestFunction& f);

} // namespace sublab
