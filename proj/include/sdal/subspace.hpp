#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

namespace sdal {

/// Orthonormal basis of a linear subspace of R^n, stored column-wise.
///
/// Orthonormality is validated on construction: ||Q^T Q - I||_F must not
/// exceed kOrthoTol. Downstream subspace distances silently corrupt if a
/// basis drifts from orthonormality, so degraded inputs must go through
/// orthonormalized() instead.
class OrthonormalBasis {
public:
    static constexpr double kOrthoTol = 1e-10;

    /// Wraps a matrix whose columns are already orthonormal; throws
    /// DegenerateInputError on an empty matrix and DimensionError when the
    /// orthonormality check fails.
    explicit OrthonormalBasis(Eigen::MatrixXd columns);

    /// Re-orthonormalizes the column span via Householder QR and wraps the
    /// result. The input must have full column rank.
    static OrthonormalBasis orthonormalized(const Eigen::MatrixXd& span_columns);

    const Eigen::MatrixXd& columns() const { return cols_; }
    Eigen::Index ambient_dim() const { return cols_.rows(); }
    Eigen::Index subspace_dim() const { return cols_.cols(); }

private:
    Eigen::MatrixXd cols_;
};

/// Principal angles between span(x) and span(y), in radians.
///
/// Computed as arccos of the singular values of X^T Y (clamped to [0,1]
/// against round-off), returned sorted nondecreasing with length
/// min(p, q). Entries lie in [0, pi/2].
Eigen::VectorXd principal_angles(const OrthonormalBasis& x, const OrthonormalBasis& y);

/// 2-norm of the principal-angle vector. A premetric across subspace
/// dimensions: it vanishes whenever one span contains the other, so it is
/// not a metric for p != q.
///
/// `zero_angle_tol` treats angles at or below the tolerance as exact zeros
/// before taking the norm; floating point never produces exact subset
/// relations, so the cutoff is the caller's to choose. Default 0 (no
/// snapping).
double distance_d1(const OrthonormalBasis& x, const OrthonormalBasis& y,
                   double zero_angle_tol = 0.0);

/// Frobenius norm of X^T Y. SVD-free similarity in [0, sqrt(min(p,q))];
/// equals sqrt(sum_k cos^2(theta_k)).
double similarity_dtilde(const OrthonormalBasis& x, const OrthonormalBasis& y);

/// sqrt(max(p,q) - dtilde^2), a metric across subspaces of any dimensions.
/// The radicand is clamped at zero to absorb round-off.
double distance_d2(const OrthonormalBasis& x, const OrthonormalBasis& y);

/// distance_d2 normalized by its maximal value sqrt(max(p,q)); lies in
/// [0,1] and reduces to the normalized chordal metric when p == q. No SVD
/// is performed, which is what makes repeated pairwise evaluations cheap.
double distance_d2_normalized(const OrthonormalBasis& x, const OrthonormalBasis& y);

enum class SubspaceMeasure {
    D1,
    D2hat,
};

double subspace_distance(const OrthonormalBasis& x, const OrthonormalBasis& y,
                         SubspaceMeasure measure);

/// Applies `measure` to each (i, j) pair of `bases`. Element k of the
/// result corresponds to pairs[k]; evaluation order never affects values.
std::vector<double> pairwise_distances(std::span<const OrthonormalBasis> bases,
                                       std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                       SubspaceMeasure measure);

} // namespace sdal
