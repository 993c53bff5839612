#include "sublab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "sublab/parallel.hpp"
#include "sublab/quadrature.hpp"
#include "sublab/rng.hpp"
#include "sublab/serialize.hpp"

namespace sublab {

double log_density_unnormalized(const MeasureSpec& spec, const Point& p) {
    return -std::pow(spec.space.hom_norm(p), spec.p);
}

namespace {

double lgamma_safe(double x) { return std::lgamma(x); }

// log density of the scaled Student-t(3) proposal coordinate
double log_t3(double v, double scale) {
    // t_3 pdf: Gamma(2) / (sqrt(3 pi) Gamma(3/2)) (1 + v^2/3)^{-2}
    static const double log_norm = -std::log(std::sqrt(3.0 * 3.14159265358979323846)) -
                                   lgamma_safe(1.5) + lgamma_safe(2.0);
    const double u = v / scale;
    return log_norm - 2.0 * std::log1p(u * u / 3.0) - std::log(scale);
}

// integrated autocorrelation time via Geyer initial positive pairs
double integrated_autocorr(const double* x, std::size_t n) {
    if (n < 16) return 1.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (x[i] - mean) * (x[i] - mean);
    var /= static_cast<double>(n);
    if (var <= 0.0) return 1.0;
    const std::size_t max_lag = std::min<std::size_t>(n / 4, 512);
    auto rho = [&](std::size_t k) {
        double acc = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) acc += (x[i] - mean) * (x[i + k] - mean);
        return acc / (var * static_cast<double>(n - k));
    };
    double tau = 1.0;
    for (std::size_t k = 1; k + 1 <= max_lag; k += 2) {
        const double pair = rho(k) + rho(k + 1);
        if (pair <= 0.0) break;
        tau += 2.0 * pair;
    }
    return std::max(tau, 1.0);
}

struct ChainOutput {
    Eigen::MatrixXd kept;           // n_keep x dim
    double acceptance = 0.0;
    int thin = 1;
    Eigen::VectorXd ess;            // per coordinate
};

ChainOutput run_chain(const MeasureSpec& spec, std::size_t n_keep, std::uint64_t seed,
                      std::uint64_t chain_id, const SamplerOptions& opt) {
    const Space& space = spec.space;
    const int dim = space.ambient_dim();
    Philox rng(seed, chain_id);

    const double r_hat = std::pow(std::max(space.hom_dim() / spec.p, 0.5), 1.0 / spec.p);
    double u = 0.6 * std::max(r_hat, 0.3);

    Point cur = space.zero();
    double cur_logd = 0.0;  // -N(0)^p = 0

    Eigen::VectorXd sigmas(dim);
    auto refresh_sigmas = [&] {
        for (int i = 0; i < dim; ++i) sigmas[i] = std::pow(u, space.dilation_weights()[i]);
    };
    refresh_sigmas();

    Point prop(dim);
    auto step = [&]() -> bool {
        for (int i = 0; i < dim; ++i) prop[i] = cur[i] + sigmas[i] * rng.gaussian();
        const double logd = -std::pow(space.hom_norm(prop), spec.p);
        if (std::log(std::max(rng.uniform(), 0x1.0p-60)) < logd - cur_logd) {
            cur = prop;
            cur_logd = logd;
            return true;
        }
        return false;
    };

    // adaptation phase
    const std::size_t burn = std::max<std::size_t>(opt.burn_in, 2000);
    const std::size_t adapt_steps = (burn * 4) / 5;
    const std::size_t round = 100;
    std::size_t done = 0, round_no = 0;
    while (done < adapt_steps) {
        std::size_t acc = 0;
        const std::size_t todo = std::min(round, adapt_steps - done);
        for (std::size_t s = 0; s < todo; ++s) acc += step() ? 1 : 0;
        done += todo;
        ++round_no;
        const double rate = static_cast<double>(acc) / static_cast<double>(todo);
        const double gain = std::max(0.08, 1.0 / std::sqrt(static_cast<double>(round_no)));
        u *= std::exp(gain * (rate - opt.target_accept));
        u = std::min(std::max(u, 1e-6), 1e6);
        refresh_sigmas();
    }

    // frozen pilot phase: thinning from the pilot autocorrelation
    const std::size_t pilot_n = burn - adapt_steps;
    Eigen::MatrixXd pilot(pilot_n, dim);
    for (std::size_t s = 0; s < pilot_n; ++s) {
        step();
        pilot.row(static_cast<Eigen::Index>(s)) = cur;
    }
    double tau_max = 1.0;
    std::vector<double> col(pilot_n);
    for (int i = 0; i < dim; ++i) {
        for (std::size_t s = 0; s < pilot_n; ++s) col[s] = pilot(static_cast<Eigen::Index>(s), i);
        tau_max = std::max(tau_max, integrated_autocorr(col.data(), pilot_n));
    }
    int thin = std::min(std::max(1, static_cast<int>(std::ceil(tau_max))), opt.max_thin);

    ChainOutput out;
    for (int attempt = 0;; ++attempt) {
        Eigen::MatrixXd kept(n_keep, dim);
        std::size_t accepted = 0, total = 0;
        for (std::size_t s = 0; s < n_keep; ++s) {
            for (int t = 0; t < thin; ++t) {
                accepted += step() ? 1 : 0;
                ++total;
            }
            kept.row(static_cast<Eigen::Index>(s)) = cur;
        }
        const double acc_rate = static_cast<double>(accepted) / static_cast<double>(total);

        // ESS on (a prefix of) the kept samples
        const std::size_t probe = std::min<std::size_t>(n_keep, 20000);
        Eigen::VectorXd ess(dim);
        double worst_rate = 1.0;
        std::vector<double> kcol(probe);
        for (int i = 0; i < dim; ++i) {
            for (std::size_t s = 0; s < probe; ++s) kcol[s] = kept(static_cast<Eigen::Index>(s), i);
            const double tau = integrated_autocorr(kcol.data(), probe);
            ess[i] = static_cast<double>(n_keep) / tau;
            worst_rate = std::min(worst_rate, 1.0 / tau);
        }
        if (worst_rate < 0.1 && thin < opt.max_thin && attempt == 0) {
            thin = std::min(2 * thin, opt.max_thin);
            continue;  // one deterministic retry with heavier thinning
        }
        if (!(acc_rate > 0.1 && acc_rate < 0.7)) {
            char buf[256];
            std::snprintf(buf, sizeof(buf),
                          "sample: adaptation failed on chain %llu (acceptance %.3f, step %.3g, "
                          "thin %d)",
                          static_cast<unsigned long long>(chain_id), acc_rate, u, thin);
            throw std::runtime_error(buf);
        }
        out.kept = std::move(kept);
        out.acceptance = acc_rate;
        out.thin = thin;
        out.ess = ess;
        return out;
    }
}

} // namespace

SampleSet sample(const MeasureSpec& spec, std::size_t n, std::uint64_t seed,
                 const SamplerOptions& opt, int threads) {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    const int chains = std::max(1, opt.chains);
    const int dim = spec.space.ambient_dim();

    std::vector<std::size_t> counts(chains, n / chains);
    for (int k = 0; k < static_cast<int>(n % chains); ++k) ++counts[k];

    std::vector<ChainOutput> outs(chains);
    parallel_chunks(chains, 1, threads, [&](std::size_t c, std::size_t, std::size_t) {
        if (counts[c] > 0) outs[c] = run_chain(spec, counts[c], seed, c, opt);
    });

    SampleSet set;
    set.seed = seed;
    set.points.resize(n, dim);
    Eigen::Index row = 0;
    double acc = 0.0;
    std::size_t acc_n = 0;
    Eigen::VectorXd ess = Eigen::VectorXd::Zero(dim);
    int thin = 1;
    for (int c = 0; c < chains; ++c) {
        if (counts[c] == 0) continue;
        set.points.middleRows(row, outs[c].kept.rows()) = outs[c].kept;
        row += outs[c].kept.rows();
        acc += outs[c].acceptance * static_cast<double>(counts[c]);
        acc_n += counts[c];
        ess += outs[c].ess;
        thin = std::max(thin, outs[c].thin);
    }
    set.meta.acceptance_rate = acc / static_cast<double>(acc_n);
    set.meta.ess = ess;
    set.meta.burn_in = std::max<std::size_t>(opt.burn_in, 2000);
    set.meta.thinning = thin;
    set.meta.chains = chains;
    return set;
}

ZEstimate estimate_Z(const MeasureSpec& spec, std::size_t budget, std::uint64_t seed,
                     int threads) {
    if (budget < 10000) throw std::invalid_argument("estimate_Z: budget must be >= 1e4");
    const Space& space = spec.space;
    const int dim = space.ambient_dim();
    const int n1 = space.first_layer_dim();
    const double p = spec.p;

    // first-layer radial proposal ~ exp(-rho^p / 2):
    //   rho = (2 u)^{1/p}, u ~ Gamma(n1/p); normaliser K below
    const double log_sphere = std::log(2.0) + 0.5 * n1 * std::log(3.14159265358979323846) -
                              lgamma_safe(0.5 * n1);
    const double logK = std::log(p) - log_sphere - (n1 / p) * std::log(2.0) - lgamma_safe(n1 / p);

    const double r_hat = std::pow(std::max(space.hom_dim() / p, 0.5), 1.0 / p) + 1.0;
    Eigen::VectorXd scales(dim);
    for (int i = n1; i < dim; ++i)
        scales[i] = 2.0 * std::pow(r_hat, space.dilation_weights()[i]);

    const std::size_t chunk = 8192;
    const std::size_t n_chunks = chunk_count(budget, chunk);
    std::vector<double> weights(budget);

    parallel_chunks(budget, chunk, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
        Philox rng(seed, 0x5a000000ull + c);
        Point x(dim);
        for (std::size_t s = b; s < e; ++s) {
            // first layer: uniform direction, gamma radius
            double dir_norm2 = 0.0;
            for (int i = 0; i < n1; ++i) {
                x[i] = rng.gaussian();
                dir_norm2 += x[i] * x[i];
            }
            const double dn = std::sqrt(std::max(dir_norm2, 1e-300));
            const double uvar = rng.gamma(n1 / p);
            const double rho = std::pow(2.0 * uvar, 1.0 / p);
            for (int i = 0; i < n1; ++i) x[i] *= rho / dn;
            double logq = logK - 0.5 * std::pow(rho, p);
            for (int i = n1; i < dim; ++i) {
                x[i] = scales[i] * rng.student_t(3.0);
                logq += log_t3(x[i], scales[i]);
            }
            const double logw = -std::pow(space.hom_norm(x), p) - logq;
            weights[s] = std::exp(logw);
        }
    });

    double sum = 0.0, sumsq = 0.0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        const std::size_t b = c * chunk, e = std::min(b + chunk, budget);
        double cs = 0.0, cs2 = 0.0;
        for (std::size_t s = b; s < e; ++s) {
            cs += weights[s];
            cs2 += weights[s] * weights[s];
        }
        sum += cs;
        sumsq += cs2;
    }
    const double B = static_cast<double>(budget);
    const double mean = sum / B;
    const double var = std::max(0.0, sumsq / B - mean * mean);

    // tail concentration check: top 1% of weights must not dominate
    {
        std::vector<double> tmp = weights;
        const std::size_t k = std::max<std::size_t>(1, budget / 100);
        std::nth_element(tmp.begin(), tmp.begin() + (budget - k), tmp.end());
        double top = 0.0;
        for (std::size_t s = budget - k; s < budget; ++s) top += tmp[s];
        if (top > 0.5 * sum)
            throw std::runtime_error(
                "estimate_Z: degenerate proposal (top 1% of weights carries >50% of the mass)");
    }

    ZEstimate z;
    z.value = mean;
    z.stderror = std::sqrt(var / B);
    return z;
}

IntegralEstimate batch_mean(const Eigen::VectorXd& values) {
    IntegralEstimate est;
    est.method = "mc";
    est.n = static_cast<std::size_t>(values.size());
    if (est.n == 0) throw std::invalid_argument("batch_mean: empty input");
    est.value = values.mean();
    const std::size_t B = std::min<std::size_t>(64, est.n);
    const std::size_t bs = est.n / B;
    if (bs < 2) {
        const double var = (values.array() - est.value).square().sum() /
                           std::max<double>(1.0, static_cast<double>(est.n - 1));
        est.stderror = std::sqrt(var / static_cast<double>(est.n));
        return est;
    }
    double acc = 0.0;
    std::vector<double> means(B);
    for (std::size_t b = 0; b < B; ++b) {
        means[b] = values.segment(static_cast<Eigen::Index>(b * bs), static_cast<Eigen::Index>(bs))
                       .mean();
        acc += means[b];
    }
    acc /= static_cast<double>(B);
    double var = 0.0;
    for (std::size_t b = 0; b < B; ++b) var += (means[b] - acc) * (means[b] - acc);
    var /= static_cast<double>(B - 1);
    est.stderror = std::sqrt(var / static_cast<double>(B));
    return est;
}

IntegralEstimate integrate_mc(const std::function<double(const Point&)>& f, const SampleSet& set,
                              int threads) {
    const std::size_t n = set.size();
    Eigen::VectorXd vals(n);
    parallel_chunks(n, 4096, threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t s = b; s < e; ++s)
            vals[static_cast<Eigen::Index>(s)] = f(set.points.row(static_cast<Eigen::Index>(s)));
    });
    if (!vals.allFinite()) throw std::runtime_error("integrate_mc: non-finite integrand value");
    return batch_mean(vals);
}

double truncation_radius(const MeasureSpec& spec) {
    const Space& space = spec.space;
    const double Q = space.hom_dim();
    const double p = spec.p;
    const double vol1 = std::max(mc_volume_sublevel(space, 1.0, 20000, 0xB0B0B0B0ull), 1e-8);
    const double z_low = vol1 * std::exp(-1.0);
    double R = std::max(2.0, std::pow(2.0 * Q / p + 2.0, 1.0 / p));
    for (; R < 100.0; R += 0.25) {
        const double tail =
            vol1 * (Q / p) * 2.0 * std::pow(R, Q - p) * std::exp(-std::pow(R, p));
        if (tail < 1e-10 * z_low) break;
    }
    return R;
}

IntegralEstimate integrate_unnormalized_quadrature(const MeasureSpec& spec,
                                                   const std::function<double(const Point&)>& f,
                                                   double rel_tol) {
    const int dim = spec.space.ambient_dim();
    if (dim > 3)
        throw std::invalid_argument("integrate_quadrature: ambient dimension must be <= 3");
    const double R = truncation_radius(spec);
    const Eigen::VectorXd hw = sublevel_box_halfwidths(spec.space, R);
    auto integrand = [&](const Eigen::VectorXd& x) {
        return f(x) * std::exp(-std::pow(spec.space.hom_norm(x), spec.p));
    };
    const QuadResult q = integrate_box(integrand, -hw, hw, rel_tol);
    IntegralEstimate est;
    est.value = q.value;
    // refinement delta, floored at the requested relative tolerance
    est.stderror = std::max(q.error, std::abs(q.value) * rel_tol);
    est.method = "quadrature";
    est.n = q.evals;
    return est;
}

IntegralEstimate integrate_quadrature(const MeasureSpec& spec,
                                      const std::function<double(const Point&)>& f,
                                      double rel_tol) {
    const IntegralEstimate num = integrate_unnormalized_quadrature(spec, f, rel_tol);
    const IntegralEstimate den =
        integrate_unnormalized_quadrature(spec, [](const Point&) { return 1.0; }, rel_tol);
    IntegralEstimate est;
    est.method = "quadrature";
    est.n = num.n + den.n;
    est.value = num.value / den.value;
    const double rel = (num.value != 0.0 ? std::abs(num.stderror / num.value) : num.stderror) +
                       std::abs(den.stderror / den.value);
    est.stderror = std::abs(est.value) * rel;
    return est;
}

void save_sampleset(const std::string& path, const MeasureSpec& spec, const SampleSet& set) {
    json header;
    header["space"] = kind_to_json(spec.space.kind());
    header["p"] = spec.p;
    header["seed"] = set.seed;
    header["n"] = set.size();
    header["dim"] = spec.space.ambient_dim();
    json meta;
    meta["acceptance_rate"] = set.meta.acceptance_rate;
    meta["burn_in"] = set.meta.burn_in;
    meta["thinning"] = set.meta.thinning;
    meta["chains"] = set.meta.chains;
    json essj = json::array();
    for (Eigen::Index i = 0; i < set.meta.ess.size(); ++i) essj.push_back(set.meta.ess[i]);
    meta["ess"] = essj;
    header["meta"] = meta;
    const std::string hs = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_sampleset: cannot open " + path);
    out.write("SLABSS01", 8);
    const std::uint64_t hlen = hs.size();
    out.write(reinterpret_cast<const char*>(&hlen), 8);
    out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    out.write(reinterpret_cast<const char*>(set.points.data()),
              static_cast<std::streamsize>(sizeof(double) * set.points.size()));
    if (!out) throw std::runtime_error("save_sampleset: write failed for " + path);
}

SampleSet load_sampleset(const std::string& path, const MeasureSpec& expected_spec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_sampleset: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "SLABSS01", 8) != 0)
        throw std::runtime_error("load_sampleset: bad magic in " + path);
    std::uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), 8);
    std::string hs(hlen, '\0');
    in.read(hs.data(), static_cast<std::streamsize>(hlen));
    const json header = json::parse(hs);

    const std::string want = kind_to_json(expected_spec.space.kind()).dump();
    const std::string got = header.at("space").dump();
    if (want != got || std::abs(header.at("p").get<double>() - expected_spec.p) > 1e-12)
        throw std::runtime_error("load_sampleset: sample file was built for a different measure");

    SampleSet set;
    set.seed = header.at("seed").get<std::uint64_t>();
    const std::size_t n = header.at("n").get<std::size_t>();
    const int dim = header.at("dim").get<int>();
    set.points.resize(n, dim);
    in.read(reinterpret_cast<char*>(set.points.data()),
            static_cast<std::streamsize>(sizeof(double) * set.points.size()));
    if (!in) throw std::runtime_error("load_sampleset: truncated file " + path);
    const json& meta = header.at("meta");
    set.meta.acceptance_rate = meta.at("acceptance_rate").get<double>();
    set.meta.burn_in = meta.at("burn_in").get<std::size_t>();
    set.meta.thinning = meta.at("thinning").get<int>();
    set.meta.chains = meta.at("chains").get<int>();
    const auto& essj = meta.at("ess");
    set.meta.ess.resize(static_cast<Eigen::Index>(essj.size()));
    for (Eigen::Index i = 0; i < set.meta.ess.size(); ++i)
        set.meta.ess[i] = essj.at(static_cast<std::size_t>(i)).get<double>();
    return set;
}

} // namespace sublab
