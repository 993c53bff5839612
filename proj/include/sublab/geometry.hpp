// Space definitions: step-two stratified groups (incl. H-type), Grushin,
// Heisenberg-Greiner and filiform presentations, each with its anisotropic
// dilations, homogeneous norm and horizontal frame.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace sublab {

using Point = Eigen::VectorXd;

struct StepTwo {
    int n = 2;                        // first-layer dimension (>= 2)
    int m = 1;                        // second-layer dimension (>= 1)
    std::vector<Eigen::MatrixXd> B;   // m skew-symmetric n x n structure matrices
    double kappa = 16.0;              // gauge parameter in (|x|^4 + kappa |t|^2)^{1/4}
    bool require_htype = false;       // reject unless orthogonal + anticommuting
};

struct Grushin {
    int n = 1;         // x-block dimension
    int m = 1;         // y-block dimension
    double eta = 1.0;  // degeneracy exponent, > 0
};

struct Greiner {
    int n = 1;     // half first-layer dimension; fields act on (x, y) in R^{2n}
    int zeta = 1;  // integer >= 1
};

struct Filiform {
    int n = 3;  // step, >= 3; ambient dimension n + 1
};

using SpaceKind = std::variant<StepTwo, Grushin, Greiner, Filiform>;

class Space {
public:
    const SpaceKind& kind() const { return kind_; }
    const std::string& kind_name() const { return kind_name_; }
    int ambient_dim() const { return dim_; }
    int first_layer_dim() const { return n1_; }     // block carrying |x|
    int horizontal_dim() const { return nh_; }      // directly actuated coordinates
    int frame_size() const { return ell_; }
    double alpha() const { return alpha_; }
    double hom_dim() const { return Q_; }
    const Eigen::VectorXd& dilation_weights() const { return weights_; }
    bool is_htype() const { return htype_; }

    Point zero() const { return Point::Zero(dim_); }
    Eigen::VectorXd xblock(const Point& p) const { return p.head(n1_); }
    double xblock_norm(const Point& p) const { return p.head(n1_).norm(); }

    Point dilate(double lambda, const Point& p) const;
    double hom_norm(const Point& p) const;
    Eigen::VectorXd hom_norm_grad(const Point& p) const;  // euclidean gradient of N (a.e.)

    // step-two group operations
    Point group_mul(const Point& g, const Point& h) const;
    Point group_inverse(const Point& g) const;

    // horizontal frame: row i holds the coefficient vector of X_i at p
    Eigen::MatrixXd frame(const Point& p) const;
    Eigen::VectorXd frame_field(int i, const Point& p) const;

    // subgradient of a function given its euclidean gradient at p
    Eigen::VectorXd subgrad_from_euclidean(const Eigen::VectorXd& grad_euc, const Point& p) const;

    void check_point(const Point& p) const;

    friend Space make_space(SpaceKind kind);

private:
    SpaceKind kind_;
    std::string kind_name_;
    int dim_ = 0, n1_ = 0, nh_ = 0, ell_ = 0;
    double alpha_ = 0.0, Q_ = 0.0;
    Eigen::VectorXd weights_;
    bool htype_ = false;
};

// Validates structural invariants (skew-symmetry, linear independence,
// H-type orthogonality/anticommutation) and derives alpha, Q and weights.
Space make_space(SpaceKind kind);

// Canonical H-type Heisenberg group H^n: first layer R^{2n}, one t coordinate,
// B a block-diagonal orthogonal skew matrix, kappa = 16.
Space heisenberg(int n = 1, double kappa = 16.0);

// Monte Carlo estimate of the Lebesgue volume of {N < lambda} using a
// lambda-adapted bounding box; deterministic in (seed).
double mc_volume_sublevel(const Space& space, double lambda, std::size_t n_points,
                          std::uint64_t seed);

// Coordinate box containing {N < radius} (per-coordinate symmetric bounds).
Eigen::VectorXd sublevel_box_halfwidths(const Space& space, double radius);

} // namespace sublab
