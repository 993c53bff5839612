#include "sublab/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "sublab/parallel.hpp"
#include "sublab/rng.hpp"

namespace sublab {

double r_exponent_main(double alpha, double p) {
    if (!(p >= alpha + 1.0)) throw std::invalid_argument("r_exponent: requires p >= alpha + 1");
    return (alpha + 1.0) * p / ((alpha + 1.0) + alpha * p);
}

double r_exponent_almost(double alpha, double p, double delta) {
    if (!(p >= alpha + 1.0)) throw std::invalid_argument("r_exponent: requires p >= alpha + 1");
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("r_exponent: delta must lie in (0,1]");
    return (alpha + 1.0 - delta) * p / (alpha + 1.0 - delta + alpha * (p - delta));
}

double r_exponent_filiform(int n, double p) {
    if (n < 3) throw std::invalid_argument("r_exponent_filiform: step must be >= 3");
    if (!(p >= n)) throw std::invalid_argument("r_exponent_filiform: requires p >= n");
    return p * n / (n + p * (n - 1.0));
}

namespace {

// signed gap: positive outside the (non-complemented) set
double signed_gap(const Space& space, const SetSpec& set, const Point& p) {
    switch (set.family) {
        case SetSpec::Family::NormSublevel:
            return space.hom_norm(p) - set.threshold;
        case SetSpec::Family::Halfspace:
            return set.threshold - p[set.coord];  // set is {coord > threshold}
        case SetSpec::Family::Tube:
            return space.xblock_norm(p) - set.threshold;
    }
    return 0.0;
}

// gauge length of a pure coordinate displacement
double gap_gauge(const Space& space, int coord, double gap) {
    Point q = space.zero();
    q[coord] = std::abs(gap);
    return space.hom_norm(q);
}

// exact gauge distance from p to the plane {t_j = tau} on a step-two group:
// minimise |u|^4 + kappa (gap - 0.5 c |B^(j) x|)^2 over the loop amplitude c
double steptwo_plane_gauge_dist(const Space& space, const StepTwo& k, int tcoord, double gap,
                                const Point& p) {
    const int j = tcoord - k.n;
    const double b = (k.B[j] * p.head(k.n)).norm();
    const double g = std::abs(gap);
    if (b < 1e-14) return std::pow(k.kappa * g * g, 0.25);
    auto F = [&](double c) {
        const double rem = g - 0.5 * c * b;
        return c * c * c * c + k.kappa * rem * rem;
    };
    // F is smooth with a unique interior minimum on [0, 2g/b]
    double lo = 0.0, hi = 2.0 * g / b;
    const double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = F(x1), f2 = F(x2);
    for (int it = 0; it < 90; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = F(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = F(x2);
        }
    }
    return std::pow(std::min(f1, f2), 0.25);
}

} // namespace

bool set_contains(const Space& space, const SetSpec& set, const Point& p) {
    const double s = signed_gap(space, set, p);
    return set.complement ? s > 0.0 : s <= 0.0;
}

double quasi_dist_to_set(const Space& space, const SetSpec& set, const Point& p) {
    double s = signed_gap(space, set, p);
    if (set.complement) s = -s;
    if (s <= 0.0) return 0.0;

    switch (set.family) {
        case SetSpec::Family::NormSublevel:
        case SetSpec::Family::Tube:
            return s;  // gauge and block gaps are already lengths
        case SetSpec::Family::Halfspace: {
            const double w = space.dilation_weights()[set.coord];
            if (w == 1.0) return s;  // first-layer halfspace: euclidean gap
            if (const auto* k = std::get_if<StepTwo>(&space.kind()))
                return steptwo_plane_gauge_dist(space, *k, set.coord, s, p);
            return gap_gauge(space, set.coord, s);
        }
    }
    return s;
}

ModelProfile::ModelProfile(double r) : r_(r) {
    if (!(r >= 1.0 && r <= 2.0)) throw std::invalid_argument("ModelProfile: r must lie in [1,2]");
    Z_ = 2.0 * std::tgamma(1.0 + 1.0 / r);
}

double ModelProfile::density(double x) const {
    return std::exp(-std::pow(std::abs(x), r_)) / Z_;
}

double ModelProfile::cdf(double x) const {
    const double half = 0.5 * boost::math::gamma_p(1.0 / r_, std::pow(std::abs(x), r_));
    return x >= 0.0 ? 0.5 + half : 0.5 - half;
}

double ModelProfile::quantile(double t) const {
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("ModelProfile: t must lie in (0,1)");
    const double s = std::abs(2.0 * t - 1.0);
    if (s == 0.0) return 0.0;
    const double x = std::pow(boost::math::gamma_p_inv(1.0 / r_, s), 1.0 / r_);
    return t >= 0.5 ? x : -x;
}

double ModelProfile::value(double t) const { return density(quantile(t)); }

SurfaceEstimate surface_from_distances(const std::vector<double>& distances,
                                       const std::vector<double>& eps_grid) {
    if (eps_grid.size() < 3)
        throw std::invalid_argument("surface_from_distances: need at least 3 grid values");
    for (std::size_t i = 1; i < eps_grid.size(); ++i)
        if (!(eps_grid[i] < eps_grid[i - 1]))
            throw std::invalid_argument("surface_from_distances: eps grid must decrease");

    const double n = static_cast<double>(distances.size());
    double inside = 0.0;
    for (double d : distances) inside += (d <= 0.0) ? 1.0 : 0.0;

    SurfaceEstimate out;
    std::vector<double> sds;
    for (double eps : eps_grid) {
        double in_eps = 0.0;
        for (double d : distances) in_eps += (d < eps) ? 1.0 : 0.0;
        const double shell = (in_eps - inside) / n;
        out.grid_estimates.push_back(shell / eps);
        sds.push_back(std::sqrt(std::max(shell * (1.0 - shell), 1e-12) / n) / eps);
    }

    // Richardson step on the two finest values: g(eps) = mu+ + c eps + ...
    const std::size_t last = out.grid_estimates.size() - 1;
    const double g2 = out.grid_estimates[last - 1], g3 = out.grid_estimates[last];
    const double h2 = eps_grid[last - 1], h3 = eps_grid[last];
    const double extrap = g3 + (g3 - g2) * h3 / (h2 - h3);
    const double extrap_sd = std::sqrt(4.0 * sds[last] * sds[last] + sds[last - 1] * sds[last - 1]);

    // monotone within noise -> extrapolated limit; otherwise flag and take the
    // smallest grid estimate
    bool monotone = true;
    for (std::size_t i = 2; i < out.grid_estimates.size(); ++i) {
        const double d1 = out.grid_estimates[i - 1] - out.grid_estimates[i - 2];
        const double d2 = out.grid_estimates[i] - out.grid_estimates[i - 1];
        const double tol1 = 3.0 * std::hypot(sds[i - 1], sds[i - 2]);
        const double tol2 = 3.0 * std::hypot(sds[i], sds[i - 1]);
        if (d1 * d2 < 0.0 && std::abs(d1) > tol1 && std::abs(d2) > tol2) monotone = false;
    }

    if (monotone) {
        out.mu_plus = std::max(extrap, 0.0);
        out.stderror = extrap_sd;
        out.reliable = true;
    } else {
        double mn = out.grid_estimates[0];
        for (double g : out.grid_estimates) mn = std::min(mn, g);
        out.mu_plus = std::max(mn, 0.0);
        out.stderror = sds[last];
        out.reliable = false;
    }
    return out;
}

SurfaceEstimate surface_measure(const MeasureSpec& spec, const SetSpec& set,
                                const std::vector<double>& eps_grid, const SampleSet& samples,
                                int threads) {
    const std::size_t n = samples.size();
    std::vector<double> dists(n);
    parallel_chunks(n, 4096, threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t s = b; s < e; ++s) {
            const Point p = samples.at(s);
            dists[s] = set_contains(spec.space, set, p)
                           ? 0.0
                           : std::max(quasi_dist_to_set(spec.space, set, p), 1e-300);
        }
    });
    return surface_from_distances(dists, eps_grid);
}

ProfileScan profile_scan(const MeasureSpec& spec, const std::vector<SetSpec>& zoo, double r,
                         const SampleSet& samples, const std::vector<double>& eps_grid,
                         int threads) {
    if (zoo.empty()) throw std::invalid_argument("profile_scan: empty zoo");
    ModelProfile model(r);
    ProfileScan scan;
    scan.r = r;
    scan.c_min = std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(samples.size());
    for (const auto& set : zoo) {
        ProfilePoint pt;
        pt.set_label = set.label;
        double inside = 0.0;
        for (std::size_t s = 0; s < samples.size(); ++s)
            inside += set_contains(spec.space, set, samples.at(s)) ? 1.0 : 0.0;
        pt.t = inside / n;
        if (pt.t <= 0.02 || pt.t >= 0.98)
            throw std::invalid_argument("profile_scan: set '" + set.label +
                                        "' has mass outside (0.02, 0.98)");
        const auto sm = surface_measure(spec, set, eps_grid, samples, threads);
        pt.mu_plus = sm.mu_plus;
        pt.stderror = sm.stderror;
        pt.reliable = sm.reliable;
        pt.model = model.value(pt.t);
        pt.ratio = pt.mu_plus / pt.model;
        if (pt.ratio < scan.c_min) {
            scan.c_min = pt.ratio;
            scan.worst_set = set.label;
        }
        scan.points.push_back(std::move(pt));
    }
    return scan;
}

namespace {

double sample_quantile(std::vector<double> v, double q) {
    const std::size_t k = static_cast<std::size_t>(q * (v.size() - 1));
    std::nth_element(v.begin(), v.begin() + k, v.end());
    return v[k];
}

} // namespace

std::vector<SetSpec> standard_zoo(const Space& space, const SampleSet& samples) {
    const std::size_t n = samples.size();
    std::vector<double> norms(n), xnorms(n), x1(n), x2(n), t(n);
    const int tcoord = space.ambient_dim() - 1;
    for (std::size_t s = 0; s < n; ++s) {
        const Point p = samples.at(s);
        norms[s] = space.hom_norm(p);
        xnorms[s] = space.xblock_norm(p);
        x1[s] = p[0];
        x2[s] = p[std::min(1, space.ambient_dim() - 1)];
        t[s] = p[tcoord];
    }

    std::vector<SetSpec> zoo;
    for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        SetSpec s;
        s.family = SetSpec::Family::NormSublevel;
        s.threshold = sample_quantile(norms, q);
        s.label = "sublevel_q" + std::to_string(static_cast<int>(q * 100));
        zoo.push_back(s);
    }
    const std::vector<std::pair<int, double>> planes = {{0, 0.5}, {0, 0.7}, {1, 0.3}, {1, 0.8}};
    for (const auto& [coord, q] : planes) {
        SetSpec s;
        s.family = SetSpec::Family::Halfspace;
        s.coord = coord;
        s.threshold = sample_quantile(coord == 0 ? x1 : x2, q);
        s.label = "halfspace_x" + std::to_string(coord + 1) + "_q" +
                  std::to_string(static_cast<int>(q * 100));
        zoo.push_back(s);
    }
    for (double q : {0.3, 0.6}) {
        SetSpec s;
        s.family = SetSpec::Family::Tube;
        s.threshold = sample_quantile(xnorms, q);
        s.label = "tube_q" + std::to_string(static_cast<int>(q * 100));
        zoo.push_back(s);
    }
    SetSpec s;
    s.family = SetSpec::Family::Halfspace;
    s.coord = tcoord;
    s.threshold = sample_quantile(t, 0.6);
    s.label = "halfspace_t_q60";
    zoo.push_back(s);
    return zoo;
}

std::vector<double> nu_r_samples(double r, std::size_t n, std::uint64_t seed) {
    ModelProfile model(r);
    Philox rng(seed, 0x1d5eed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double u;
        do { u = rng.uniform(); } while (u <= 0.0 || u >= 1.0);
        out[i] = model.quantile(u);
    }
    return out;
}

} // namespace sublab
