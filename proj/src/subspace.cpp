#include "sdal/subspace.hpp"

#include <algorithm>
#include <cmath>

#include "sdal/errors.hpp"

namespace sdal {

namespace {

void check_same_ambient(const OrthonormalBasis& x, const OrthonormalBasis& y) {
    if (x.ambient_dim() != y.ambient_dim()) {
        throw DimensionError("subspace bases live in different ambient spaces: " +
                             std::to_string(x.ambient_dim()) + " vs " +
                             std::to_string(y.ambient_dim()));
    }
}

// The p x q inner-product matrix between the two bases. Everything in this
// module reduces to functions of this product.
Eigen::MatrixXd inner_product_matrix(const OrthonormalBasis& x, const OrthonormalBasis& y) {
    check_same_ambient(x, y);
    return x.columns().transpose() * y.columns();
}

} // namespace

OrthonormalBasis::OrthonormalBasis(Eigen::MatrixXd columns) : cols_(std::move(columns)) {
    if (cols_.rows() == 0 || cols_.cols() == 0) {
        throw DegenerateInputError("orthonormal basis must have at least one column and row");
    }
    if (cols_.cols() > cols_.rows()) {
        throw DimensionError("subspace dimension " + std::to_string(cols_.cols()) +
                             " exceeds ambient dimension " + std::to_string(cols_.rows()));
    }
    const Eigen::Index p = cols_.cols();
    const Eigen::MatrixXd gram = cols_.transpose() * cols_;
    const double defect = (gram - Eigen::MatrixXd::Identity(p, p)).norm();
    if (!(defect <= kOrthoTol)) {
        throw DimensionError("columns are not orthonormal (defect " + std::to_string(defect) +
                             " > 1e-10); use OrthonormalBasis::orthonormalized");
    }
}

OrthonormalBasis OrthonormalBasis::orthonormalized(const Eigen::MatrixXd& span_columns) {
    if (span_columns.rows() == 0 || span_columns.cols() == 0) {
        throw DegenerateInputError("cannot orthonormalize an empty matrix");
    }
    if (span_columns.cols() > span_columns.rows()) {
        throw DimensionError("cannot orthonormalize more columns than rows");
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(span_columns);
    Eigen::MatrixXd q = qr.householderQ() *
                        Eigen::MatrixXd::Identity(span_columns.rows(), span_columns.cols());
    return OrthonormalBasis(std::move(q));
}

Eigen::VectorXd principal_angles(const OrthonormalBasis& x, const OrthonormalBasis& y) {
    check_same_ambient(x, y);
    const OrthonormalBasis& small = x.subspace_dim() <= y.subspace_dim() ? x : y;
    const OrthonormalBasis& big = x.subspace_dim() <= y.subspace_dim() ? y : x;

    // Cosines from the SVD of the inner-product matrix; arccos loses half
    // the working precision as sigma -> 1, so small angles are recomputed
    // from the sine form sigma((I - P_big) small), Bjorck-Golub style.
    const Eigen::MatrixXd m = big.columns().transpose() * small.columns();
    const Eigen::VectorXd cosines = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
    const Eigen::MatrixXd residual = small.columns() - big.columns() * m;
    const Eigen::VectorXd sines_desc =
        Eigen::JacobiSVD<Eigen::MatrixXd>(residual).singularValues();

    const Eigen::Index s = cosines.size();
    Eigen::VectorXd angles(s);
    for (Eigen::Index k = 0; k < s; ++k) {
        const double c = std::clamp(cosines[k], 0.0, 1.0);
        // Angles ascend with k as cosines descend; the matching sine is the
        // k-th smallest.
        const double sn = std::clamp(sines_desc[s - 1 - k], 0.0, 1.0);
        angles[k] = c * c >= 0.5 ? std::asin(sn) : std::acos(c);
    }
    std::sort(angles.begin(), angles.end());
    return angles;
}

double distance_d1(const OrthonormalBasis& x, const OrthonormalBasis& y, double zero_angle_tol) {
    Eigen::VectorXd angles = principal_angles(x, y);
    if (zero_angle_tol > 0.0) {
        for (Eigen::Index k = 0; k < angles.size(); ++k) {
            if (angles[k] <= zero_angle_tol) angles[k] = 0.0;
        }
    }
    return angles.norm();
}

double similarity_dtilde(const OrthonormalBasis& x, const OrthonormalBasis& y) {
    return inner_product_matrix(x, y).norm();
}

namespace {

// Squared d2 without an SVD. The plain form max(p,q) - ||X^T Y||_F^2
// cancels catastrophically near zero (same-span inputs land at ~1e-15,
// whose square root is ~3e-8), so values that small are recomputed as the
// residual norm ||Y - X(X^T Y)||_F^2, which is the same quantity written
// without the subtraction of two near-equal numbers.
double d2_squared(const OrthonormalBasis& x, const OrthonormalBasis& y) {
    const OrthonormalBasis& small = x.subspace_dim() <= y.subspace_dim() ? x : y;
    const OrthonormalBasis& big = x.subspace_dim() <= y.subspace_dim() ? y : x;
    const Eigen::MatrixXd m = inner_product_matrix(small, big);
    const double max_dim = static_cast<double>(big.subspace_dim());
    const double plain = max_dim - m.squaredNorm();
    if (plain > max_dim * 1e-10) return plain;
    return (big.columns() - small.columns() * m).squaredNorm();
}

} // namespace

double distance_d2(const OrthonormalBasis& x, const OrthonormalBasis& y) {
    return std::sqrt(std::max(0.0, d2_squared(x, y)));
}

double distance_d2_normalized(const OrthonormalBasis& x, const OrthonormalBasis& y) {
    const double max_dim = static_cast<double>(std::max(x.subspace_dim(), y.subspace_dim()));
    return std::sqrt(std::max(0.0, d2_squared(x, y) / max_dim));
}

double subspace_distance(const OrthonormalBasis& x, const OrthonormalBasis& y,
                         SubspaceMeasure measure) {
    return measure == SubspaceMeasure::D1 ? distance_d1(x, y) : distance_d2_normalized(x, y);
}

std::vector<double> pairwise_distances(std::span<const OrthonormalBasis> bases,
                                       std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                       SubspaceMeasure measure) {
    for (std::size_t i = 1; i < bases.size(); ++i) {
        if (bases[i].ambient_dim() != bases[0].ambient_dim()) {
            throw DimensionError("pairwise_distances: bases do not share an ambient dimension");
        }
    }
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        if (a >= bases.size() || b >= bases.size()) {
            throw IndexError("pairwise_distances: pair index out of range");
        }
        out.push_back(subspace_distance(bases[a], bases[b], measure));
    }
    return out;
}

} // namespace sdal
