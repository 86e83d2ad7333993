#pragma once

#include <Eigen/Dense>

#include "sdal/subspace.hpp"

namespace sdal {

/// Space-time solution samples for a single parameter value.
///
/// `values` holds one solution column per time step: N spatial degrees of
/// freedom by N_t+1 time steps. `time_grid` must be strictly increasing
/// with t_0 = 0; its length must equal the column count. `parameter` may
/// be empty when the producing context carries it separately (the CSV
/// snapshot format stores no parameter).
struct SnapshotMatrix {
    Eigen::MatrixXd values;
    Eigen::VectorXd parameter;
    Eigen::VectorXd time_grid;

    Eigen::Index spatial_dim() const { return values.rows(); }
    Eigen::Index time_steps() const { return values.cols(); }

    /// Throws on NaN/Inf entries, column-count/grid mismatch, or a
    /// non-monotone grid.
    void validate() const;
};

/// Truncated POD of one snapshot matrix.
///
/// `singular_values` holds the full numerically nonzero spectrum
/// (sigma_1..sigma_s, nonincreasing); the basis keeps the leading `rank`
/// left singular vectors, where rank is the smallest r with
///   1 - sum_{k<=r} sigma_k^2 / sum_{k<=s} sigma_k^2 <= energy_criterion.
struct PodSubspace {
    OrthonormalBasis basis;
    Eigen::VectorXd singular_values;
    int rank = 0;
    double energy_criterion = 0.0;
};

/// Relative singular-value threshold below which the spectrum is treated
/// as numerically zero when counting s.
inline constexpr double kPodZeroRelTol = 1e-12;

/// Thin SVD of the snapshots with energy-criterion truncation.
/// eta must lie strictly in (0,1); an all-zero snapshot matrix throws
/// DegenerateInputError.
PodSubspace compute_pod(const SnapshotMatrix& snapshots, double eta);

/// Phi^T * values: reduced coordinates of the snapshots, rank x (N_t+1).
Eigen::MatrixXd pod_project(const PodSubspace& subspace, const SnapshotMatrix& snapshots);

/// Phi * reduced: lift reduced coordinates back to the ambient space.
Eigen::MatrixXd pod_lift(const PodSubspace& subspace, const Eigen::MatrixXd& reduced);

/// Per-time-step relative projection error:
/// entry j = ||U_j - Phi Phi^T U_j||_2 / ||U_j||_2.
/// A zero-norm snapshot column throws DegenerateInputError naming the column.
Eigen::VectorXd pod_reconstruction_error(const PodSubspace& subspace,
                                         const SnapshotMatrix& snapshots);

} // namespace sdal
