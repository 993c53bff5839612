#include "sublab/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sublab/parallel.hpp"
#include "sublab/rng.hpp"

namespace sublab {

namespace {

void ensure_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::runtime_error(std::string(what) + ": evaluation produced a non-finite value");
}

} // namespace

ScalarField norm_field(const Space& space) {
    ScalarField f;
    f.label = "N";
    f.value = [&space](const Point& p) { return space.hom_norm(p); };
    f.grad_euc = [&space](const Point& p) { return space.hom_norm_grad(p); };
    return f;
}

ScalarField xblock_field(const Space& space) {
    ScalarField f;
    f.label = "|x|";
    f.value = [&space](const Point& p) { return space.xblock_norm(p); };
    f.grad_euc = [&space](const Point& p) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(space.ambient_dim());
        const double r = space.xblock_norm(p);
        if (r > 0.0) g.head(space.first_layer_dim()) = p.head(space.first_layer_dim()) / r;
        return g;
    };
    return f;
}

Eigen::VectorXd subgradient(const Space& space, const ScalarField& f, const Point& p,
                            DerivMode mode, double h_rel) {
    if (mode == DerivMode::Exact) {
        if (!f.grad_euc)
            throw std::invalid_argument("subgradient: exact mode requires an analytic gradient");
        return space.subgrad_from_euclidean(f.grad_euc(p), p);
    }
    const double h = h_rel * std::max(1.0, space.hom_norm(p));
    const Eigen::MatrixXd F = space.frame(p);
    Eigen::VectorXd out(space.frame_size());
    for (int i = 0; i < space.frame_size(); ++i) {
        const Eigen::VectorXd v = F.row(i);
        const double fp = f.value(p + h * v);
        const double fm = f.value(p - h * v);
        ensure_finite(fp, "subgradient");
        ensure_finite(fm, "subgradient");
        out[i] = (fp - fm) / (2.0 * h);
    }
    return out;
}

double sublaplacian(const Space& space, const ScalarField& f, const Point& p, double h_rel) {
    const double h = h_rel * std::max(1.0, space.hom_norm(p));
    if (!(h > 0.0)) throw std::runtime_error("sublaplacian: step size underflow");
    double acc = 0.0;
    for (int i = 0; i < space.frame_size(); ++i) {
        auto xif = [&](const Point& y) {
            const Eigen::VectorXd v = space.frame_field(i, y);
            const double fp = f.value(y + h * v);
            const double fm = f.value(y - h * v);
            ensure_finite(fp, "sublaplacian");
            ensure_finite(fm, "sublaplacian");
            return (fp - fm) / (2.0 * h);
        };
        const Eigen::VectorXd v = space.frame_field(i, p);
        acc += (xif(p + h * v) - xif(p - h * v)) / (2.0 * h);
    }
    return acc;
}

const EstimateEntry& EstimateReport::entry(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return e;
    throw std::out_of_range("EstimateReport: no entry named " + name);
}

EstimateReport check_estimates(const Space& space, double alpha, const std::vector<Point>& cloud,
                               double exclusion_radius, int threads) {
    std::vector<Point> pts;
    pts.reserve(cloud.size());
    for (const auto& p : cloud)
        if (space.xblock_norm(p) > exclusion_radius && space.hom_norm(p) > exclusion_radius)
            pts.push_back(p);
    if (pts.empty()) throw std::invalid_argument("check_estimates: empty cloud after exclusion");

    const ScalarField nf = norm_field(space);
    const ScalarField xf = xblock_field(space);

    constexpr int kChecks = 5;
    const std::size_t chunk = 256;
    const std::size_t n_chunks = chunk_count(pts.size(), chunk);
    struct Acc {
        double mn[kChecks], mx[kChecks];
        long argmax[kChecks];
    };
    std::vector<Acc> accs(n_chunks);

    parallel_chunks(pts.size(), chunk, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
        Acc a;
        for (int i = 0; i < kChecks; ++i) {
            a.mn[i] = std::numeric_limits<double>::infinity();
            a.mx[i] = -std::numeric_limits<double>::infinity();
            a.argmax[i] = -1;
        }
        for (std::size_t s = b; s < e; ++s) {
            const Point& p = pts[s];
            const double N = space.hom_norm(p);
            const double xn = space.xblock_norm(p);
            const Eigen::VectorXd gN = subgradient(space, nf, p, DerivMode::FiniteDifference);
            const Eigen::VectorXd gX = subgradient(space, xf, p, DerivMode::FiniteDifference);
            const double lap = sublaplacian(space, nf, p);
            const double cross = gN.dot(gX);
            const double ratios[kChecks] = {
                gN.norm() * std::pow(N / xn, alpha),
                lap * std::pow(N, 2.0 * alpha + 1.0) / std::pow(xn, 2.0 * alpha),
                cross * std::pow(N, 2.0 * alpha + 1.0) / std::pow(xn, 2.0 * alpha + 1.0),
                cross * std::pow(N / xn, alpha),
                xn / N};
            for (int i = 0; i < kChecks; ++i) {
                if (!std::isfinite(ratios[i]))
                    throw std::runtime_error("check_estimates: non-finite ratio at a cloud point");
                if (ratios[i] < a.mn[i]) a.mn[i] = ratios[i];
                if (ratios[i] > a.mx[i]) {
                    a.mx[i] = ratios[i];
                    a.argmax[i] = static_cast<long>(s);
                }
            }
        }
        accs[c] = a;
    });

    static const char* kNames[kChecks] = {"gradient", "laplacian", "cross", "cross_lower",
                                          "comparison"};
    EstimateReport rep;
    rep.exclusion_radius = exclusion_radius;
    for (int i = 0; i < kChecks; ++i) {
        EstimateEntry e;
        e.name = kNames[i];
        e.min_ratio = std::numeric_limits<double>::infinity();
        e.max_ratio = -std::numeric_limits<double>::infinity();
        long arg = -1;
        for (const auto& a : accs) {
            e.min_ratio = std::min(e.min_ratio, a.mn[i]);
            if (a.mx[i] > e.max_ratio) {
                e.max_ratio = a.mx[i];
                arg = a.argmax[i];
            }
        }
        e.argmax = arg >= 0 ? pts[static_cast<std::size_t>(arg)] : space.zero();
        e.sample_count = static_cast<long>(pts.size());
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

std::vector<Point> norm_annulus_cloud(const Space& space, std::size_t count, double n_lo,
                                      double n_hi, double exclusion, std::uint64_t seed) {
    if (!(n_lo > 0.0 && n_hi > n_lo)) throw std::invalid_argument("norm_annulus_cloud: bad range");
    Philox rng(seed, 0x434c4f55ull);  // cloud stream
    std::vector<Point> out;
    out.reserve(count);
    const int dim = space.ambient_dim();
    const double llo = std::log(n_lo), lhi = std::log(n_hi);
    while (out.size() < count) {
        Point g(dim);
        for (int i = 0; i < dim; ++i) g[i] = rng.gaussian();
        const double ng = space.hom_norm(g);
        if (ng < 1e-12) continue;
        const double target = std::exp(rng.uniform(llo, lhi));
        Point p = space.dilate(target / ng, g);
        if (space.xblock_norm(p) <= exclusion || space.hom_norm(p) <= exclusion) continue;
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

// --- cc_sandwich path constructions -----------------------------------------
//
// Each construction emits straight horizontal segments (plus circular arcs in
// the Greiner case) whose endpoint arithmetic is exact for the given frame,
// verifies the final point, and reports the total length.

struct PathResult {
    double length = 0.0;
    int segments = 0;
};

void check_endpoint(const Point& got, const Point& want) {
    const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
    if ((got - want).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw std::runtime_error("cc_sandwich: constructed path missed the target point");
}

PathResult path_steptwo(const Space& space, const StepTwo& k, const Point& p, int budget) {
    PathResult pr;
    const Eigen::VectorXd x = p.head(k.n);
    const Eigen::VectorXd t = p.tail(k.m);
    Point cur = space.zero();
    if (x.norm() > 0.0) {
        Point first = space.zero();
        first.head(k.n) = x;
        cur = space.group_mul(cur, first);
        pr.length += x.norm();
        pr.segments += 1;
    }
    Eigen::VectorXd deficit = t - cur.tail(k.m);

    if (deficit.cwiseAbs().maxCoeff() > 0.0) {
        // loop generators: pair (i, j) produces t-displacement a*b*(B^(1).., B^(m)..)_{ij}
        struct Gen {
            int i, j;
            Eigen::VectorXd v;
        };
        std::vector<Gen> gens;
        for (int i = 0; i < k.n; ++i)
            for (int j = i + 1; j < k.n; ++j) {
                // the square loop (i, j, -i, -j) with sides a, b displaces t by a*b*B^(l)(j, i)
                Eigen::VectorXd v(k.m);
                for (int l = 0; l < k.m; ++l) v[l] = k.B[l](j, i);
                if (v.norm() > 1e-14) gens.push_back({i, j, v});
            }
        // greedy: largest generators first, keep those that grow the span
        std::sort(gens.begin(), gens.end(),
                  [](const Gen& a, const Gen& b) { return a.v.norm() > b.v.norm(); });
        std::vector<Gen> chosen;
        Eigen::MatrixXd span(k.m, 0);
        for (const auto& g : gens) {
            Eigen::MatrixXd cand(k.m, span.cols() + 1);
            cand << span, g.v;
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cand);
            qr.setThreshold(1e-12);
            if (qr.rank() > span.cols()) {
                span = cand;
                chosen.push_back(g);
                if (static_cast<int>(chosen.size()) == k.m) break;
            }
        }
        if (static_cast<int>(chosen.size()) < k.m)
            throw std::runtime_error("cc_sandwich: loop generators do not span the second layer");
        Eigen::MatrixXd M(k.m, k.m);
        for (int c = 0; c < k.m; ++c) M.col(c) = chosen[c].v;
        const Eigen::VectorXd coeff = M.colPivHouseholderQr().solve(deficit);

        if (pr.segments + 4 * k.m > budget)
            throw std::runtime_error("cc_sandwich: path budget too small for loop construction");

        for (int c = 0; c < k.m; ++c) {
            const double a = std::sqrt(std::abs(coeff[c]));
            if (a == 0.0) continue;
            const int i = chosen[c].i, j = chosen[c].j;
            auto leg = [&](int axis, double amount) {
                Point step = space.zero();
                step[axis] = amount;
                cur = space.group_mul(cur, step);
                pr.length += std::abs(amount);
                pr.segments += 1;
            };
            if (coeff[c] > 0.0) {
                leg(i, a); leg(j, a); leg(i, -a); leg(j, -a);
            } else {
                leg(j, a); leg(i, a); leg(j, -a); leg(i, -a);
            }
        }
    }
    check_endpoint(cur, p);
    return pr;
}

PathResult path_grushin(const Grushin& k, const Point& p, int budget) {
    PathResult pr;
    const double xn = p.head(k.n).norm();
    const double Y = p.tail(k.m).lpNorm<1>();
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(k.n);
    if (xn > 0.0) dir = p.head(k.n) / xn; else dir[0] = 1.0;

    double rho = xn;
    if (Y > 0.0) {
        const double rho_star = std::pow(k.eta * Y / 2.0, 1.0 / (1.0 + k.eta));
        rho = std::max(xn, rho_star);
        if (rho <= 0.0) rho = std::pow(Y, 1.0 / (1.0 + k.eta));
    }
    int need = (rho > 0.0 ? 1 : 0) + (Y > 0.0 ? k.m : 0) + (rho > xn ? 1 : 0);
    if (need > budget) throw std::runtime_error("cc_sandwich: path budget too small");

    double length = 0.0;
    // out along dir to radius rho, spend the y moves there, return to |x| = xn
    if (rho > 0.0) length += rho;
    if (Y > 0.0) length += Y / std::pow(rho, k.eta);
    length += std::max(0.0, rho - xn);
    pr.length = length;
    pr.segments = need;
    return pr;
}

PathResult path_greiner(const Greiner& k, const Point& p, int budget) {
    PathResult pr;
    const double rn = p.head(2 * k.n).norm();
    const double dt = std::abs(p[2 * k.n]);
    double length = 0.0;
    int segments = 0;
    if (dt > 0.0) {
        const double zeta = k.zeta;
        const double pi = 3.14159265358979323846;
        const double rho = std::pow((2.0 * zeta - 1.0) * dt / (4.0 * zeta), 1.0 / (2.0 * zeta));
        const double theta = dt / (2.0 * zeta * std::pow(rho, 2.0 * zeta));
        length += 2.0 * rho + rho * theta;
        segments += 2 + static_cast<int>(std::ceil(theta / (0.5 * pi)));
    }
    if (rn > 0.0) {
        length += rn;
        segments += 1;
    }
    if (segments > budget) throw std::runtime_error("cc_sandwich: path budget too small");
    pr.length = length;
    pr.segments = segments;
    return pr;
}

PathResult path_filiform(const Space& space, const Filiform& k, const Point& p, int budget) {
    PathResult pr;
    const int n = k.n;
    const int K = n - 1;  // passes; unknowns b_1..b_K hit coordinates x_3..x_{n+1}

    // scale for the x1 levels of the passes
    double s = 0.0;
    for (int j = 3; j <= n + 1; ++j)
        s = std::max(s, std::pow(std::abs(p[j - 1]), 1.0 / (j - 1.0)));
    s = std::max(s, 0.25 * std::hypot(p[0], p[1]));

    Point cur = space.zero();
    double length = 0.0;
    int segments = 0;
    auto move_x1 = [&](double target) {
        length += std::abs(target - cur[0]);
        cur[0] = target;
        segments += 1;
    };
    auto move_x2 = [&](double amount) {
        // exact effect of flowing X_2 for time `amount` at fixed x1
        double fac = 1.0, x1p = 1.0;
        cur[1] += amount;
        for (int j = 3; j <= n + 1; ++j) {
            x1p *= cur[0];
            fac *= (j - 2);
            cur[j - 1] += amount * x1p / fac;
        }
        length += std::abs(amount);
        segments += 1;
    };

    if (s > 0.0) {
        Eigen::MatrixXd M(K, K);
        Eigen::VectorXd rhs(K);
        for (int row = 0; row < K; ++row) {
            const int j = row + 3;  // coordinate x_j, j = 3..n+1
            rhs[row] = p[j - 1];
            double fac = 1.0;
            for (int q = 1; q <= j - 2; ++q) fac *= q;
            for (int col = 0; col < K; ++col) {
                const double a = s * (col + 1);
                M(row, col) = std::pow(a, j - 2) / fac;
            }
        }
        const Eigen::VectorXd b = M.colPivHouseholderQr().solve(rhs);
        if (!b.allFinite()) throw std::runtime_error("cc_sandwich: filiform pass solve failed");
        if (2 * K + 2 > budget) throw std::runtime_error("cc_sandwich: path budget too small");
        for (int col = 0; col < K; ++col) {
            move_x1(s * (col + 1));
            move_x2(b[col]);
        }
        move_x1(0.0);
        move_x2(p[1] - cur[1]);  // pure x2 correction at x1 = 0
        move_x1(p[0]);
    } else {
        if (std::abs(p[0]) > 0.0) move_x1(p[0]);
        if (std::abs(p[1]) > 0.0) move_x2(p[1]);
    }
    check_endpoint(cur, p);
    pr.length = length;
    pr.segments = segments;
    return pr;
}

} // namespace

CcSandwich cc_sandwich(const Space& space, const Point& p, int path_budget) {
    space.check_point(p);
    if (space.hom_norm(p) == 0.0) throw std::invalid_argument("cc_sandwich: point must be nonzero");
    CcSandwich out;
    out.lower = p.head(space.horizontal_dim()).norm();
    const PathResult pr = std::visit(
        [&](const auto& k) -> PathResult {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, StepTwo>) return path_steptwo(space, k, p, path_budget);
            else if constexpr (std::is_same_v<T, Grushin>) return path_grushin(k, p, path_budget);
            else if constexpr (std::is_same_v<T, Greiner>) return path_greiner(k, p, path_budget);
            else return path_filiform(space, k, p, path_budget);
        },
        space.kind());
    out.upper = pr.length;
    out.segments = pr.segments;
    if (out.upper < out.lower - 1e-12 * std::max(1.0, out.lower))
        throw std::runtime_error("cc_sandwich: upper bound fell below the projection lower bound");
    return out;
}

} // namespace sublab
