// Subgradients and sublaplacians of scalar fields (analytic where closed
// forms exist, finite differences otherwise), the pointwise estimate
// certification, and the two-sided gauge-vs-distance sandwich.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sublab/geometry.hpp"

namespace sublab {

struct ScalarField {
    std::string label;
    std::function<double(const Point&)> value;
    // optional euclidean gradient; the subgradient is its frame contraction
    std::function<Eigen::VectorXd(const Point&)> grad_euc;
};

enum class DerivMode { Exact, FiniteDifference };

// N with its analytic euclidean gradient
ScalarField norm_field(const Space& space);
// |x| on the first-layer block
ScalarField xblock_field(const Space& space);

// ell-vector of X_i f(p). FD mode uses central differences with step
// h_rel * max(1, N(p)) along each frame direction.
Eigen::VectorXd subgradient(const Space& space, const ScalarField& f, const Point& p,
                            DerivMode mode, double h_rel = 1e-5);

// sum_i X_i(X_i f)(p) by nested central differences
double sublaplacian(const Space& space, const ScalarField& f, const Point& p,
                    double h_rel = 1e-4);

struct EstimateEntry {
    std::string name;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    Point argmax;
    long sample_count = 0;
};

struct EstimateReport {
    std::vector<EstimateEntry> entries;
    double exclusion_radius = 0.0;
    const EstimateEntry& entry(const std::string& name) const;
};

// The five ratio checks over a point cloud (FD derivatives):
//   gradient      |grad N| N^a / |x|^a          (two-sided: min and max both relevant)
//   laplacian     (Delta N) N^{2a+1} / |x|^{2a}
//   cross         (grad N . grad |x|) N^{2a+1} / |x|^{2a+1}
//   cross_lower   (grad N . grad |x|) N^a / |x|^a
//   comparison    |x| / N
EstimateReport check_estimates(const Space& space, double alpha, const std::vector<Point>& cloud,
                               double exclusion_radius, int threads = 0);

// Cloud of points with N log-uniform in [n_lo, n_hi] and |x| > exclusion.
std::vector<Point> norm_annulus_cloud(const Space& space, std::size_t count, double n_lo,
                                      double n_hi, double exclusion, std::uint64_t seed);

struct CcSandwich {
    double lower = 0.0;   // euclidean length of the horizontal-block displacement
    double upper = 0.0;   // length of a constructed piecewise-horizontal path
    int segments = 0;
};

// lower <= d(0, p) <= upper; throws if the path budget is too small or the
// constructed path fails to reach p.
CcSandwich cc_sandwich(const Space& space, const Point& p, int path_budget = 64);

} // namespace sublab
