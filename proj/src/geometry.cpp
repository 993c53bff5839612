#include "sublab/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "sublab/rng.hpp"

namespace sublab {

namespace {

constexpr double kSkewTol = 1e-12;
constexpr double kHTypeTol = 1e-10;

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void validate_steptwo(const StepTwo& k) {
    if (k.n < 2) throw std::invalid_argument("StepTwo: first-layer dimension must be >= 2");
    if (k.m < 1) throw std::invalid_argument("StepTwo: second-layer dimension must be >= 1");
    if (!(k.kappa > 0.0)) throw std::invalid_argument("StepTwo: kappa must be positive");
    if (static_cast<int>(k.B.size()) != k.m)
        throw std::invalid_argument("StepTwo: need one structure matrix per second-layer coordinate");
    for (const auto& B : k.B) {
        if (B.rows() != k.n || B.cols() != k.n)
            throw std::invalid_argument("StepTwo: structure matrix has wrong shape");
        const double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
        if ((B + B.transpose()).cwiseAbs().maxCoeff() > kSkewTol * scale)
            throw std::invalid_argument("StepTwo: structure matrix is not skew-symmetric");
    }
    // linear independence of {B^(j)} via the rank of their vectorizations
    Eigen::MatrixXd V(k.m, k.n * k.n);
    for (int j = 0; j < k.m; ++j)
        V.row(j) = Eigen::Map<const Eigen::VectorXd>(k.B[j].data(), k.n * k.n);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
    qr.setThreshold(1e-10);
    if (qr.rank() < k.m)
        throw std::invalid_argument("StepTwo: structure matrices are linearly dependent");
}

bool htype_check(const StepTwo& k) {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(k.n, k.n);
    for (const auto& B : k.B)
        if ((B.transpose() * B - id).cwiseAbs().maxCoeff() > kHTypeTol) return false;
    for (std::size_t i = 0; i < k.B.size(); ++i)
        for (std::size_t j = i + 1; j < k.B.size(); ++j)
            if ((k.B[i] * k.B[j] + k.B[j] * k.B[i]).cwiseAbs().maxCoeff() > kHTypeTol) return false;
    return true;
}

// filiform inner exponents: ||x||^n = sum_{j=2}^n A_j^{2n/(n+1)},
// A_j = |x1|^{(n+1)/2} + |x2|^{(n+1)/2} + |x_j|^{(n+1)/(2(j-1))}
struct FiliformTerms {
    double S = 0.0;                 // ||x||^n
    std::vector<double> A;          // A_j for j = 2..n
};

FiliformTerms filiform_terms(int n, const Point& p) {
    FiliformTerms ft;
    const double e1 = 0.5 * (n + 1);
    const double a1 = std::pow(std::abs(p[0]), e1);
    const double a2 = std::pow(std::abs(p[1]), e1);
    ft.A.resize(n - 1);
    const double outer = 2.0 * n / (n + 1.0);
    for (int j = 2; j <= n; ++j) {
        const double ej = (n + 1.0) / (2.0 * (j - 1));
        const double aj = std::pow(std::abs(p[j - 1]), ej);
        const double Aj = a1 + a2 + aj;
        ft.A[j - 2] = Aj;
        ft.S += std::pow(Aj, outer);
    }
    return ft;
}

} // namespace

Space make_space(SpaceKind kind) {
    Space s;
    s.kind_ = std::move(kind);
    std::visit(
        [&s](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, StepTwo>) {
                validate_steptwo(k);
                s.kind_name_ = "steptwo";
                s.dim_ = k.n + k.m;
                s.n1_ = k.n;
                s.nh_ = k.n;
                s.ell_ = k.n;
                s.alpha_ = 1.0;
                s.Q_ = k.n + 2.0 * k.m;
                s.weights_ = Eigen::VectorXd::Ones(s.dim_);
                s.weights_.tail(k.m).setConstant(2.0);
                s.htype_ = htype_check(k);
                if (k.require_htype && !s.htype_)
                    throw std::invalid_argument(
                        "StepTwo: H-type flag set but matrices are not orthogonal+anticommuting");
            } else if constexpr (std::is_same_v<T, Grushin>) {
                if (k.n < 1 || k.m < 1) throw std::invalid_argument("Grushin: n, m must be >= 1");
                if (!(k.eta > 0.0)) throw std::invalid_argument("Grushin: eta must be positive");
                s.kind_name_ = "grushin";
                s.dim_ = k.n + k.m;
                s.n1_ = k.n;
                s.nh_ = k.n;
                s.ell_ = k.n + k.m;
                s.alpha_ = k.eta;
                s.Q_ = k.n + (1.0 + k.eta) * k.m;
                s.weights_ = Eigen::VectorXd::Ones(s.dim_);
                s.weights_.tail(k.m).setConstant(1.0 + k.eta);
            } else if constexpr (std::is_same_v<T, Greiner>) {
                if (k.n < 1) throw std::invalid_argument("Greiner: n must be >= 1");
                if (k.zeta < 1) throw std::invalid_argument("Greiner: zeta must be >= 1");
                s.kind_name_ = "greiner";
                s.dim_ = 2 * k.n + 1;
                s.n1_ = 2 * k.n;
                s.nh_ = 2 * k.n;
                s.ell_ = 2 * k.n;
                s.alpha_ = 2.0 * k.zeta - 1.0;
                s.Q_ = 2.0 * k.n + 2.0 * k.zeta;
                s.weights_ = Eigen::VectorXd::Ones(s.dim_);
                s.weights_[s.dim_ - 1] = 2.0 * k.zeta;
            } else {
                static_assert(std::is_same_v<T, Filiform>);
                if (k.n < 3) throw std::invalid_argument("Filiform: step must be >= 3");
                s.kind_name_ = "filiform";
                s.dim_ = k.n + 1;
                s.n1_ = 1;   // the estimates live on |x_1|
                s.nh_ = 2;   // X_1, X_2 actuate (x_1, x_2) directly
                s.ell_ = 2;
                s.alpha_ = k.n - 1.0;
                s.weights_ = Eigen::VectorXd::Ones(s.dim_);
                for (int j = 2; j < s.dim_; ++j) s.weights_[j] = j;  // x_{j+1} has weight j
                s.Q_ = s.weights_.sum();
            }
        },
        s.kind_);
    return s;
}

Space heisenberg(int n, double kappa) {
    if (n < 1) throw std::invalid_argument("heisenberg: n must be >= 1");
    StepTwo k;
    k.n = 2 * n;
    k.m = 1;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        B(2 * i, 2 * i + 1) = 1.0;
        B(2 * i + 1, 2 * i) = -1.0;
    }
    k.B = {B};
    k.kappa = kappa;
    k.require_htype = true;
    return make_space(k);
}

void Space::check_point(const Point& p) const {
    if (p.size() != dim_) throw std::invalid_argument("point dimension mismatch");
    if (!p.allFinite()) throw std::invalid_argument("point has non-finite coordinates");
}

Point Space::dilate(double lambda, const Point& p) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("dilate: lambda must be positive");
    Point out(dim_);
    for (int i = 0; i < dim_; ++i) out[i] = std::pow(lambda, weights_[i]) * p[i];
    return out;
}

double Space::hom_norm(const Point& p) const {
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, StepTwo>) {
                const double x2 = p.head(k.n).squaredNorm();
                const double t2 = p.tail(k.m).squaredNorm();
                return std::pow(x2 * x2 + k.kappa * t2, 0.25);
            } else if constexpr (std::is_same_v<T, Grushin>) {
                const double xn = p.head(k.n).norm();
                const double y2 = p.tail(k.m).squaredNorm();
                const double e = 1.0 + k.eta;
                return std::pow(std::pow(xn, 2.0 * e) + e * e * y2, 0.5 / e);
            } else if constexpr (std::is_same_v<T, Greiner>) {
                const double rn = p.head(2 * k.n).norm();
                const double t = p[2 * k.n];
                return std::pow(std::pow(rn, 4.0 * k.zeta) + t * t, 0.25 / k.zeta);
            } else {
                const auto ft = filiform_terms(k.n, p);
                return std::pow(ft.S + std::abs(p[k.n]), 1.0 / k.n);
            }
        },
        kind_);
}

Eigen::VectorXd Space::hom_norm_grad(const Point& p) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
    const double N = hom_norm(p);
    if (N < 1e-300) return g;
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, StepTwo>) {
                const double N3 = N * N * N;
                const double x2 = p.head(k.n).squaredNorm();
                g.head(k.n) = x2 * p.head(k.n) / N3;
                g.tail(k.m) = 0.5 * k.kappa * p.tail(k.m) / N3;
            } else if constexpr (std::is_same_v<T, Grushin>) {
                const double e = 1.0 + k.eta;
                const double xn = p.head(k.n).norm();
                const double denom = std::pow(N, 2.0 * k.eta + 1.0);
                g.head(k.n) = std::pow(xn, 2.0 * k.eta) * p.head(k.n) / denom;
                g.tail(k.m) = e * p.tail(k.m) / denom;
            } else if constexpr (std::is_same_v<T, Greiner>) {
                const double rn = p.head(2 * k.n).norm();
                const double denom = std::pow(N, 4.0 * k.zeta - 1.0);
                g.head(2 * k.n) = std::pow(rn, 4.0 * k.zeta - 2.0) * p.head(2 * k.n) / denom;
                g[2 * k.n] = p[2 * k.n] / (2.0 * k.zeta * denom);
            } else {
                const int n = k.n;
                const auto ft = filiform_terms(n, p);
                const double denom = n * std::pow(N, n - 1.0);
                const double sigma = (n - 1.0) / (n + 1.0);
                const double e1 = 0.5 * (n + 1);
                // dS/dx1 and dS/dx2 sum A_j^{sigma} over every A_j containing the term
                double sumA = 0.0;
                for (double Aj : ft.A) sumA += std::pow(Aj, sigma);
                const double outer = 2.0 * n / (n + 1.0);
                const double d_a1 = e1 * std::pow(std::abs(p[0]), e1 - 1.0) * sgn(p[0]);
                const double d_a2 = e1 * std::pow(std::abs(p[1]), e1 - 1.0) * sgn(p[1]);
                g[0] = outer * sumA * d_a1 / denom;
                // a2 appears twice in A_2 (the displayed formula duplicates it at j = 2)
                g[1] = outer * (sumA + std::pow(ft.A[0], sigma)) * d_a2 / denom;
                for (int j = 3; j <= n; ++j) {
                    const double ej = (n + 1.0) / (2.0 * (j - 1));
                    const double v = std::abs(p[j - 1]);
                    const double d_aj = v > 0.0 ? ej * std::pow(v, ej - 1.0) * sgn(p[j - 1]) : 0.0;
                    g[j - 1] = outer * std::pow(ft.A[j - 2], sigma) * d_aj / denom;
                }
                g[n] = sgn(p[n]) / denom;
            }
        },
        kind_);
    return g;
}

Point Space::group_mul(const Point& g, const Point& h) const {
    const auto* k = std::get_if<StepTwo>(&kind_);
    if (!k) throw std::invalid_argument("group_mul: only defined for step-two groups");
    Point out(dim_);
    out.head(k->n) = g.head(k->n) + h.head(k->n);
    for (int j = 0; j < k->m; ++j)
        out[k->n + j] = g[k->n + j] + h[k->n + j] + 0.5 * (k->B[j] * g.head(k->n)).dot(h.head(k->n));
    return out;
}

Point Space::group_inverse(const Point& g) const {
    if (!std::holds_alternative<StepTwo>(kind_))
        throw std::invalid_argument("group_inverse: only defined for step-two groups");
    return -g;
}

Eigen::MatrixXd Space::frame(const Point& p) const {
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(ell_, dim_);
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, StepTwo>) {
                for (int i = 0; i < k.n; ++i) F(i, i) = 1.0;
                for (int j = 0; j < k.m; ++j) {
                    const Eigen::VectorXd Bx = k.B[j] * p.head(k.n);
                    for (int i = 0; i < k.n; ++i) F(i, k.n + j) = 0.5 * Bx[i];
                }
            } else if constexpr (std::is_same_v<T, Grushin>) {
                const double w = std::pow(p.head(k.n).norm(), k.eta);
                for (int i = 0; i < k.n; ++i) F(i, i) = 1.0;
                for (int j = 0; j < k.m; ++j) F(k.n + j, k.n + j) = w;
            } else if constexpr (std::is_same_v<T, Greiner>) {
                const double rn = p.head(2 * k.n).norm();
                const double w = 2.0 * k.zeta * std::pow(rn, 2.0 * k.zeta - 2.0);
                for (int i = 0; i < k.n; ++i) {
                    F(i, i) = 1.0;
                    F(i, 2 * k.n) = w * p[k.n + i];          // X^i carries +2 zeta y_i |r|^{2z-2}
                    F(k.n + i, k.n + i) = 1.0;
                    F(k.n + i, 2 * k.n) = -w * p[i];         // Y^i carries -2 zeta x_i |r|^{2z-2}
                }
            } else {
                F(0, 0) = 1.0;
                F(1, 1) = 1.0;
                double fac = 1.0, x1p = 1.0;
                for (int j = 3; j <= k.n + 1; ++j) {
                    x1p *= p[0];
                    fac *= (j - 2);
                    F(1, j - 1) = x1p / fac;
                }
            }
        },
        kind_);
    return F;
}

Eigen::VectorXd Space::frame_field(int i, const Point& p) const {
    return frame(p).row(i);
}

Eigen::VectorXd Space::subgrad_from_euclidean(const Eigen::VectorXd& grad_euc, const Point& p) const {
    return frame(p) * grad_euc;
}

Eigen::VectorXd sublevel_box_halfwidths(const Space& space, double radius) {
    const int dim = space.ambient_dim();
    Eigen::VectorXd hw(dim);
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, StepTwo>) {
                hw.head(k.n).setConstant(radius);
                hw.tail(k.m).setConstant(radius * radius / std::sqrt(k.kappa));
            } else if constexpr (std::is_same_v<T, Grushin>) {
                hw.head(k.n).setConstant(radius);
                hw.tail(k.m).setConstant(std::pow(radius, 1.0 + k.eta) / (1.0 + k.eta));
            } else if constexpr (std::is_same_v<T, Greiner>) {
                hw.head(2 * k.n).setConstant(radius);
                hw[2 * k.n] = std::pow(radius, 2.0 * k.zeta);
            } else {
                // |x_j| <= N^{j-1} for j = 2..n (from A_j <= N^n), |x_{n+1}| <= N^n
                hw[0] = radius;
                hw[1] = radius;
                for (int j = 3; j <= k.n; ++j) hw[j - 1] = std::pow(radius, j - 1);
                hw[k.n] = std::pow(radius, k.n);
            }
        },
        space.kind());
    return hw;
}

double mc_volume_sublevel(const Space& space, double lambda, std::size_t n_points,
                          std::uint64_t seed) {
    if (!(lambda > 0.0)) throw std::invalid_argument("mc_volume_sublevel: lambda must be positive");
    const int dim = space.ambient_dim();
    const Eigen::VectorXd hw = sublevel_box_halfwidths(space, lambda);
    double box_vol = 1.0;
    for (int i = 0; i < dim; ++i) box_vol *= 2.0 * hw[i];
    Philox rng(seed, 0x56014d43ull);  // volume stream
    std::size_t hits = 0;
    Point p(dim);
    for (std::size_t s = 0; s < n_points; ++s) {
        for (int i = 0; i < dim; ++i) p[i] = rng.uniform(-hw[i], hw[i]);
        if (space.hom_norm(p) < lambda) ++hits;
    }
    return box_vol * static_cast<double>(hits) / static_cast<double>(n_points);
}

} // namespace sublab
