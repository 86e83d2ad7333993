#include "sdal/pod.hpp"

#include <cmath>
#include <string>

#include "sdal/errors.hpp"

namespace sdal {

void SnapshotMatrix::validate() const {
    if (values.rows() == 0 || values.cols() == 0) {
        throw DegenerateInputError("snapshot matrix is empty");
    }
    if (time_grid.size() != values.cols()) {
        throw DimensionError("snapshot column count " + std::to_string(values.cols()) +
                             " does not match time grid length " +
                             std::to_string(time_grid.size()));
    }
    if (!values.allFinite() || !time_grid.allFinite() || !parameter.allFinite()) {
        throw DegenerateInputError("snapshot matrix contains NaN/Inf entries");
    }
    if (time_grid[0] != 0.0) {
        throw RangeError("time grid must start at t = 0");
    }
    for (Eigen::Index j = 1; j < time_grid.size(); ++j) {
        if (!(time_grid[j] > time_grid[j - 1])) {
            throw RangeError("time grid must be strictly increasing");
        }
    }
}

PodSubspace compute_pod(const SnapshotMatrix& snapshots, double eta) {
    snapshots.validate();
    if (!(eta > 0.0 && eta < 1.0)) {
        throw RangeError("energy criterion must lie in (0,1), got " + std::to_string(eta));
    }

    const Eigen::MatrixXd& u = snapshots.values;
    Eigen::BDCSVD<Eigen::MatrixXd> svd;
    Eigen::MatrixXd left;
    Eigen::VectorXd sigma;
    // Economy SVD of the thinner orientation; the left singular vectors of U
    // are the right singular vectors of U^T.
    if (u.rows() >= u.cols()) {
        svd.compute(u, Eigen::ComputeThinU);
        left = svd.matrixU();
        sigma = svd.singularValues();
    } else {
        svd.compute(u.transpose(), Eigen::ComputeThinV);
        left = svd.matrixV();
        sigma = svd.singularValues();
    }

    if (sigma.size() == 0 || sigma[0] <= 0.0) {
        throw DegenerateInputError("snapshot matrix is numerically zero; POD is undefined");
    }

    // s = count of numerically nonzero singular values.
    const double zero_cut = kPodZeroRelTol * sigma[0];
    Eigen::Index s = 0;
    while (s < sigma.size() && sigma[s] >= zero_cut) ++s;

    const Eigen::VectorXd retained = sigma.head(s);
    const double total_energy = retained.squaredNorm();

    // Smallest r whose discarded energy fraction is within eta.
    Eigen::Index rank = s;
    double kept = 0.0;
    for (Eigen::Index r = 1; r <= s; ++r) {
        kept += retained[r - 1] * retained[r - 1];
        if (1.0 - kept / total_energy <= eta) {
            rank = r;
            break;
        }
    }

    return PodSubspace{OrthonormalBasis(left.leftCols(rank)), retained,
                       static_cast<int>(rank), eta};
}

Eigen::MatrixXd pod_project(const PodSubspace& subspace, const SnapshotMatrix& snapshots) {
    if (subspace.basis.ambient_dim() != snapshots.values.rows()) {
        throw DimensionError("POD basis ambient dimension " +
                             std::to_string(subspace.basis.ambient_dim()) +
                             " does not match snapshot rows " +
                             std::to_string(snapshots.values.rows()));
    }
    return subspace.basis.columns().transpose() * snapshots.values;
}

Eigen::MatrixXd pod_lift(const PodSubspace& subspace, const Eigen::MatrixXd& reduced) {
    if (reduced.rows() != subspace.basis.subspace_dim()) {
        throw DimensionError("reduced coordinates have " + std::to_string(reduced.rows()) +
                             " rows, POD rank is " +
                             std::to_string(subspace.basis.subspace_dim()));
    }
    return subspace.basis.columns() * reduced;
}

Eigen::VectorXd pod_reconstruction_error(const PodSubspace& subspace,
                                         const SnapshotMatrix& snapshots) {
    const Eigen::MatrixXd approx = pod_lift(subspace, pod_project(subspace, snapshots));
    Eigen::VectorXd err(snapshots.values.cols());
    for (Eigen::Index j = 0; j < snapshots.values.cols(); ++j) {
        const double denom = snapshots.values.col(j).norm();
        if (denom == 0.0) {
            throw DegenerateInputError("snapshot column " + std::to_string(j) +
                                       " has zero norm; relative error is undefined");
        }
        err[j] = (snapshots.values.col(j) - approx.col(j)).norm() / denom;
    }
    return err;
}

} // namespace sdal
