#include "sdal/rbf.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "sdal/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "network binary sections assume a little-endian host");

namespace sdal {

void RbfKernelSpec::validate() const {
    if (kind != RbfKernel::CubicSpline && !(width > 0.0)) {
        throw RangeError("kernel width must be positive");
    }
}

double rbf_phi(RbfKernel kind, double distance, double width) {
    switch (kind) {
    case RbfKernel::Gaussian: {
        const double a = distance / width;
        return std::exp(-a * a);
    }
    case RbfKernel::Multiquadric: {
        const double a = distance / width;
        return std::sqrt(a * a + 1.0);
    }
    case RbfKernel::CubicSpline:
        return distance * distance * distance;
    }
    throw RangeError("unknown kernel kind");
}

namespace {

constexpr double kConditionLimit = 1e14;

Eigen::MatrixXd kernel_matrix(const std::vector<Eigen::VectorXd>& points,
                              const std::vector<Eigen::VectorXd>& centers,
                              const Eigen::VectorXd& widths, RbfKernel kind) {
    Eigen::MatrixXd a(points.size(), centers.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < centers.size(); ++j) {
            a(i, j) = rbf_phi(kind, (points[i] - centers[j]).norm(), widths[j]);
        }
    }
    return a;
}

void check_training_inputs(const std::vector<Eigen::VectorXd>& points,
                           const Eigen::MatrixXd& targets) {
    if (points.empty()) throw InsufficientDataError("RBF fit needs at least one point");
    if (targets.rows() != static_cast<Eigen::Index>(points.size())) {
        throw DimensionError("target row count " + std::to_string(targets.rows()) +
                             " does not match point count " + std::to_string(points.size()));
    }
    const Eigen::Index dim = points[0].size();
    for (const auto& p : points) {
        if (p.size() != dim) throw DimensionError("RBF points have mixed dimensions");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (points[i] == points[j]) {
                throw SingularSystemError("duplicate points at indices " + std::to_string(i) +
                                          " and " + std::to_string(j) +
                                          " make the kernel system singular");
            }
        }
    }
}

struct SolveOutcome {
    Eigen::MatrixXd weights;
    bool regularized = false;
    double condition = 0.0;
    double ridge = 0.0;
};

// The Gram matrices of the multiquadric and cubic kernels are symmetric but
// indefinite, so plain Cholesky-type factorizations are out; partial-pivot
// LU handles all three kernels and exposes a condition estimate.
SolveOutcome solve_square(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& targets) {
    SolveOutcome out;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(gram);
    const double rcond = lu.rcond();
    out.condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (out.condition <= kConditionLimit) {
        out.weights = lu.solve(targets);
        return out;
    }
    out.regularized = true;
    out.ridge = 1e-12 * gram.trace() / static_cast<double>(gram.rows());
    Eigen::MatrixXd damped = gram;
    damped.diagonal().array() += out.ridge;
    out.weights = Eigen::PartialPivLU<Eigen::MatrixXd>(damped).solve(targets);
    return out;
}

} // namespace

RbfNetwork RbfNetwork::fit_interpolation(const std::vector<Eigen::VectorXd>& points,
                                         const Eigen::MatrixXd& targets, RbfKernelSpec kernel) {
    kernel.validate();
    check_training_inputs(points, targets);

    RbfNetwork net;
    net.kernel_ = kernel.kind;
    net.input_dim_ = points[0].size();
    net.centers_ = points;
    net.widths_ = Eigen::VectorXd::Constant(points.size(), kernel.width);

    const Eigen::MatrixXd gram = kernel_matrix(points, net.centers_, net.widths_, kernel.kind);
    SolveOutcome solved = solve_square(gram, targets);
    net.weights_ = std::move(solved.weights);

    net.info_.mode = solved.regularized ? RbfFitMode::Regression : RbfFitMode::Interpolation;
    net.info_.regularized = solved.regularized;
    net.info_.condition_estimate = solved.condition;
    net.info_.ridge = solved.ridge;
    const double tnorm = targets.norm();
    net.info_.relative_residual =
        tnorm > 0.0 ? (gram * net.weights_ - targets).norm() / tnorm : 0.0;
    return net;
}

RbfNetwork RbfNetwork::fit_regression(const std::vector<Eigen::VectorXd>& points,
                                      const Eigen::MatrixXd& targets, RbfKernelSpec kernel,
                                      int max_centers) {
    kernel.validate();
    check_training_inputs(points, targets);
    if (max_centers < 1) throw RangeError("max_centers must be positive");

    const auto l = static_cast<Eigen::Index>(points.size());
    if (l <= max_centers) {
        return fit_interpolation(points, targets, kernel);
    }

    RbfNetwork net;
    net.kernel_ = kernel.kind;
    net.input_dim_ = points[0].size();
    net.centers_.reserve(max_centers);
    for (int i = 0; i < max_centers; ++i) {
        // Uniform subsample by index.
        const auto idx = static_cast<std::size_t>(static_cast<std::int64_t>(i) * l / max_centers);
        net.centers_.push_back(points[idx]);
    }
    net.widths_ = Eigen::VectorXd::Constant(max_centers, kernel.width);

    const Eigen::MatrixXd a = kernel_matrix(points, net.centers_, net.widths_, kernel.kind);
    const Eigen::MatrixXd normal = a.transpose() * a;
    const Eigen::MatrixXd rhs = a.transpose() * targets;
    SolveOutcome solved = solve_square(normal, rhs);
    net.weights_ = std::move(solved.weights);

    net.info_.mode = RbfFitMode::Regression;
    net.info_.regularized = solved.regularized;
    net.info_.condition_estimate = solved.condition;
    net.info_.ridge = solved.ridge;
    const double tnorm = targets.norm();
    net.info_.relative_residual =
        tnorm > 0.0 ? (a * net.weights_ - targets).norm() / tnorm : 0.0;
    return net;
}

Eigen::VectorXd RbfNetwork::kernel_vector(const Eigen::VectorXd& x) const {
    if (x.size() != input_dim_) {
        throw DimensionError("RBF input dimension " + std::to_string(x.size()) +
                             " does not match network input dimension " +
                             std::to_string(input_dim_));
    }
    Eigen::VectorXd phi(center_count());
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        phi[i] = rbf_phi(kernel_, (x - centers_[i]).norm(), widths_[i]);
    }
    return phi;
}

Eigen::VectorXd RbfNetwork::evaluate(const Eigen::VectorXd& x) const {
    return weights_.transpose() * kernel_vector(x);
}

void RbfNetwork::evaluate_block(const Eigen::VectorXd& x, Eigen::Index begin, Eigen::Index length,
                                double* out) const {
    if (begin < 0 || length < 0 || begin + length > output_dim()) {
        throw IndexError("RBF output block out of range");
    }
    const Eigen::VectorXd phi = kernel_vector(x);
    Eigen::Map<Eigen::VectorXd>(out, length).noalias() =
        weights_.middleCols(begin, length).transpose() * phi;
}

namespace {

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("truncated RBF network section");
    return v;
}

} // namespace

void RbfNetwork::save(std::ostream& os) const {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(kernel_));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(input_dim_));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(center_count()));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(output_dim()));
    for (const auto& c : centers_) {
        os.write(reinterpret_cast<const char*>(c.data()),
                 static_cast<std::streamsize>(sizeof(double)) * c.size());
    }
    os.write(reinterpret_cast<const char*>(widths_.data()),
             static_cast<std::streamsize>(sizeof(double)) * widths_.size());
    os.write(reinterpret_cast<const char*>(weights_.data()),
             static_cast<std::streamsize>(sizeof(double)) * weights_.size());
    if (!os) throw IoError("failed to write RBF network section");
}

RbfNetwork RbfNetwork::load(std::istream& is) {
    RbfNetwork net;
    const auto kind = get<std::uint32_t>(is);
    if (kind > static_cast<std::uint32_t>(RbfKernel::CubicSpline)) {
        throw IoError("unknown kernel id " + std::to_string(kind));
    }
    net.kernel_ = static_cast<RbfKernel>(kind);
    net.input_dim_ = static_cast<Eigen::Index>(get<std::uint64_t>(is));
    const auto n_c = static_cast<Eigen::Index>(get<std::uint64_t>(is));
    const auto q = static_cast<Eigen::Index>(get<std::uint64_t>(is));
    net.centers_.resize(n_c, Eigen::VectorXd(net.input_dim_));
    for (auto& c : net.centers_) {
        is.read(reinterpret_cast<char*>(c.data()),
                static_cast<std::streamsize>(sizeof(double)) * net.input_dim_);
    }
    net.widths_.resize(n_c);
    is.read(reinterpret_cast<char*>(net.widths_.data()),
            static_cast<std::streamsize>(sizeof(double)) * n_c);
    net.weights_.resize(n_c, q);
    is.read(reinterpret_cast<char*>(net.weights_.data()),
            static_cast<std::streamsize>(sizeof(double)) * n_c * q);
    if (!is) throw IoError("truncated RBF network section");
    return net;
}

} // namespace sdal
