// The probability measure mu = Z^{-1} e^{-N^p} dxi: normalisation estimates,
// adaptive random-walk Metropolis sampling in dilation-adapted coordinates,
// and Monte Carlo / nested-quadrature integration.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "sublab/geometry.hpp"

namespace sublab {

struct ZEstimate {
    double value = 0.0;
    double stderror = 0.0;
};

struct MeasureSpec {
    Space space;
    double p = 2.0;
    std::optional<ZEstimate> Z;
};

double log_density_unnormalized(const MeasureSpec& spec, const Point& p);

// Importance sampling with a product proposal matched to the dilation
// weights: first layer radial ~ exp(-|x|^p / 2), remaining coordinates
// Student-t(3) scaled by the weight-matched typical size.
ZEstimate estimate_Z(const MeasureSpec& spec, std::size_t budget, std::uint64_t seed,
                     int threads = 0);

struct ChainMeta {
    double acceptance_rate = 0.0;
    Eigen::VectorXd ess;      // per coordinate, summed over chains
    std::size_t burn_in = 0;
    int thinning = 1;
    int chains = 1;
};

struct SampleSet {
    Eigen::MatrixXd points;   // one sample per row
    std::uint64_t seed = 0;
    ChainMeta meta;
    std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
    Point at(std::size_t i) const { return points.row(static_cast<Eigen::Index>(i)); }
};

struct SamplerOptions {
    int chains = 8;
    std::size_t burn_in = 10000;
    double target_accept = 0.3;
    int max_thin = 64;
};

SampleSet sample(const MeasureSpec& spec, std::size_t n, std::uint64_t seed,
                 const SamplerOptions& opt = {}, int threads = 0);

struct IntegralEstimate {
    double value = 0.0;
    double stderror = 0.0;
    std::string method;  // "mc" or "quadrature"
    std::size_t n = 0;
};

// sample average of f over the set (Z cancels); batch-means standard error
IntegralEstimate integrate_mc(const std::function<double(const Point&)>& f, const SampleSet& set,
                              int threads = 0);

// unnormalized integral of f e^{-N^p} over the truncated box (dimension <= 3)
IntegralEstimate integrate_unnormalized_quadrature(const MeasureSpec& spec,
                                                   const std::function<double(const Point&)>& f,
                                                   double rel_tol = 1e-7);

// normalized integral: quadrature both of f e^{-N^p} and of the density
IntegralEstimate integrate_quadrature(const MeasureSpec& spec,
                                      const std::function<double(const Point&)>& f,
                                      double rel_tol = 1e-7);

// truncation radius R with tail contribution below 1e-10 of Z
double truncation_radius(const MeasureSpec& spec);

// binary columnar persistence (header JSON + column-major doubles)
void save_sampleset(const std::string& path, const MeasureSpec& spec, const SampleSet& set);
SampleSet load_sampleset(const std::string& path, const MeasureSpec& expected_spec);

// batch-means mean/stderr over a vector of per-sample values
IntegralEstimate batch_mean(const Eigen::VectorXd& values);

} // namespace sublab
