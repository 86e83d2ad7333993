#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

namespace sdal {

enum class RbfKernel {
    Gaussian,     // exp(-(d/eps)^2)
    Multiquadric, // sqrt((d/eps)^2 + 1)
    CubicSpline,  // d^3 (width-independent)
};

struct RbfKernelSpec {
    RbfKernel kind = RbfKernel::Multiquadric;
    double width = 1e-3;

    void validate() const;
};

double rbf_phi(RbfKernel kind, double distance, double width);

enum class RbfFitMode {
    Interpolation, // centers == training points, targets reproduced exactly
    Regression,    // fewer centers or a regularized solve
};

struct RbfFitInfo {
    RbfFitMode mode = RbfFitMode::Interpolation;
    bool regularized = false;
    double condition_estimate = 0.0;
    double ridge = 0.0;
    /// ||G W - T||_F / ||T||_F achieved by the solve (0 for zero targets).
    double relative_residual = 0.0;
};

/// Kernel-based shallow network: a single radial-basis layer with a linear
/// output map. Fitted networks are immutable; evaluation is pure.
class RbfNetwork {
public:
    /// Empty network (no centers); only useful as a placeholder before
    /// assignment from one of the fit functions or load().
    RbfNetwork() = default;

    /// Exact interpolation (centers = points). Duplicate points throw
    /// SingularSystemError. A Gram condition estimate above 1e14 triggers a
    /// ridge refit with lambda = 1e-12 * trace(G)/l and flips the reported
    /// mode to Regression.
    static RbfNetwork fit_interpolation(const std::vector<Eigen::VectorXd>& points,
                                        const Eigen::MatrixXd& targets, RbfKernelSpec kernel);

    /// Least-squares fit with at most `max_centers` centers, uniformly
    /// subsampled from the points by index; normal equations with the same
    /// ridge guard as interpolation.
    static RbfNetwork fit_regression(const std::vector<Eigen::VectorXd>& points,
                                     const Eigen::MatrixXd& targets, RbfKernelSpec kernel,
                                     int max_centers);

    Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;

    /// Evaluates only output components [begin, begin+length) into `out`.
    /// Lets callers with very wide outputs assemble results blockwise
    /// without a full-size temporary.
    void evaluate_block(const Eigen::VectorXd& x, Eigen::Index begin, Eigen::Index length,
                        double* out) const;

    Eigen::Index input_dim() const { return input_dim_; }
    Eigen::Index output_dim() const { return weights_.cols(); }
    Eigen::Index center_count() const { return static_cast<Eigen::Index>(centers_.size()); }
    const std::vector<Eigen::VectorXd>& centers() const { return centers_; }
    const Eigen::VectorXd& widths() const { return widths_; }
    const Eigen::MatrixXd& weights() const { return weights_; }
    RbfKernel kernel() const { return kernel_; }
    const RbfFitInfo& fit_info() const { return info_; }

    /// Binary section used inside ROM artifact files (little-endian f64).
    void save(std::ostream& os) const;
    static RbfNetwork load(std::istream& is);

private:
    Eigen::VectorXd kernel_vector(const Eigen::VectorXd& x) const;

    std::vector<Eigen::VectorXd> centers_;
    Eigen::VectorXd widths_; // per-center; fitting sets them uniform
    Eigen::MatrixXd weights_; // n_c x q
    RbfKernel kernel_ = RbfKernel::Multiquadric;
    Eigen::Index input_dim_ = 0;
    RbfFitInfo info_;
};

} // namespace sdal
