// Surface-measure estimation by quasi-distance enlargement, the exact 1-D
// model profile of nu_r, and the candidate-set isoperimetric scan.
#pragma once

#include <string>
#include <vector>

#include "sublab/measures.hpp"

namespace sublab {

// Theorem exponent r = (a+1)p / ((a+1) + a p) and its variants
double r_exponent_main(double alpha, double p);
double r_exponent_almost(double alpha, double p, double delta);
double r_exponent_filiform(int n, double p);

struct SetSpec {
    enum class Family { NormSublevel, Halfspace, Tube };
    Family family = Family::NormSublevel;
    double threshold = 1.0;
    int coord = -1;          // halfspace coordinate index
    bool complement = false;
    std::string label;
};

bool set_contains(const Space& space, const SetSpec& set, const Point& p);
// quasi-distance from p to the set (0 inside); closed forms per family,
// exact gauge minimisation for step-two second-layer halfspaces
double quasi_dist_to_set(const Space& space, const SetSpec& set, const Point& p);

// 1-D model measure nu_r = Z^{-1} e^{-|x|^r} dx and its isoperimetric profile
// I(t) = density(quantile(t)) (half-lines are extremal for even log-concave
// measures on the line)
class ModelProfile {
public:
    explicit ModelProfile(double r);
    double r() const { return r_; }
    double normalisation() const { return Z_; }
    double density(double x) const;
    double cdf(double x) const;
    double quantile(double t) const;
    double value(double t) const;  // U_r(t)

private:
    double r_ = 1.0;
    double Z_ = 2.0;
};

struct SurfaceEstimate {
    double mu_plus = 0.0;
    double stderror = 0.0;
    bool reliable = true;
    std::vector<double> grid_estimates;  // (mu(A_eps) - mu(A)) / eps per grid value
};

// core estimator from per-sample distances (0 inside the set)
SurfaceEstimate surface_from_distances(const std::vector<double>& distances,
                                       const std::vector<double>& eps_grid);

SurfaceEstimate surface_measure(const MeasureSpec& spec, const SetSpec& set,
                                const std::vector<double>& eps_grid, const SampleSet& samples,
                                int threads = 0);

struct ProfilePoint {
    std::string set_label;
    double t = 0.0;        // mass
    double mu_plus = 0.0;
    double stderror = 0.0;
    double model = 0.0;    // U_r(t)
    double ratio = 0.0;    // mu_plus / model
    bool reliable = true;
};

struct ProfileScan {
    double r = 1.0;
    std::vector<ProfilePoint> points;
    double c_min = 0.0;
    std::string worst_set;
};

ProfileScan profile_scan(const MeasureSpec& spec, const std::vector<SetSpec>& zoo, double r,
                         const SampleSet& samples,
                         const std::vector<double>& eps_grid = {0.08, 0.04, 0.02},
                         int threads = 0);

// 12-set zoo with thresholds at sample quantiles: 5 gauge sublevels, 4
// first-layer halfspaces, 2 tubes, 1 second-layer halfspace
std::vector<SetSpec> standard_zoo(const Space& space, const SampleSet& samples);

// iid draws from nu_r by inverse CDF (1-D estimator consistency checks)
std::vector<double> nu_r_samples(double r, std::size_t n, std::uint64_t seed);

} // namespace sublab
