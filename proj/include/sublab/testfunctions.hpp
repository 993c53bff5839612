// Test-function families: quasi-gauge bumps, polynomial-times-cutoff members,
// radial-in-N profiles and the second-layer probe bump. Every member carries
// a closed-form value and an analytic subgradient.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sublab/geometry.hpp"

namespace sublab {

struct TestFunction {
    std::string label;
    std::function<double(const Point&)> value;
    std::function<Eigen::VectorXd(const Point&)> subgrad;  // ell components X_i f
    bool compact_support = false;
    // coordinate box containing the support (quadrature restriction)
    Eigen::VectorXd support_lo, support_hi;
    bool has_support_box() const { return support_lo.size() > 0; }
    // optional measure-preserving chart h -> xi aligning the support with a
    // coordinate box (group translation for step-two bumps)
    std::function<Point(const Point&)> chart;
    Eigen::VectorXd chart_lo, chart_hi;
    bool has_chart() const { return static_cast<bool>(chart); }
};

// C^1 piecewise-cubic cutoff: 1 at 0, 0 beyond 1, g'(0) = g'(1) = 0
double bump_profile(double s);
double bump_profile_deriv(double s);
// C^2 quintic cutoff (smoother edges; the default for family bumps)
double bump_profile5(double s);
double bump_profile5_deriv(double s);

enum class BumpProfile { CubicC1, QuinticC2 };

// quasi-gauge from a center: group difference on step-two, coordinate
// difference elsewhere
double quasi_gauge(const Space& space, const Point& center, const Point& xi);

// smooth bump supported in the quasi-gauge ball of the given radius
TestFunction bump(const Space& space, const Point& center, double radius,
                  BumpProfile profile = BumpProfile::QuinticC2);

// polynomial (given with its euclidean gradient) times a smooth cutoff g(N/R)
TestFunction poly_cutoff(const Space& space, const std::string& label,
                         std::function<double(const Point&)> poly,
                         std::function<Eigen::VectorXd(const Point&)> poly_grad_euc,
                         double cutoff_radius);

// h(N) with h given by value and derivative
TestFunction radial_in_norm(const Space& space, const std::string& label,
                            std::function<double(double)> h, std::function<double(double)> dh);

// unit second-layer point (N = 1 on the degeneracy axis {x = 0})
Point second_layer_unit(const Space& space);

// probe bump at delta_t(second_layer_unit) with radius t^{1 - p/(alpha+1)}
TestFunction phi_probe(const Space& space, double t, double p);

// the 50-member standard family
std::vector<TestFunction> standard_family(const Space& space);

} // namespace sublab
