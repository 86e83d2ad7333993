#pragma once

#include <utility>
#include <vector>

#include "sdal/param_space.hpp"
#include "sdal/pod.hpp"
#include "sdal/rbf.hpp"

namespace sdal {

/// Offline artifact of the POD-KSNN ROM: a kernel network interpolating
/// vectorized snapshot matrices over the parameter domain, plus everything
/// the online phase needs to rebuild per-query objects.
struct PodKsnnOffline {
    RbfNetwork mu_net; // input dim N_mu, output dim N*(N_t+1)
    RbfKernelSpec time_kernel;
    Eigen::VectorXd time_grid;
    Eigen::Index spatial_dim = 0;
    double energy_criterion_online = 1e-6; // eta-hat for the per-query POD
};

/// Fits the parameter-domain interpolant over column-stacked snapshots.
/// All snapshots must agree on the spatial dimension and time grid
/// (IngestionError otherwise); at least 2 training parameters required.
PodKsnnOffline pod_ksnn_offline_build(const std::vector<ParameterPoint>& training,
                                      const std::vector<SnapshotMatrix>& snapshots,
                                      RbfKernelSpec mu_kernel, RbfKernelSpec time_kernel,
                                      double eta_hat);

/// Per-query products of the online phase, reusable for further time
/// queries at the same parameter.
struct PodKsnnOnlineResult {
    PodSubspace basis;                  // Phi-tilde(mu*)
    Eigen::MatrixXd reduced_trajectory; // r* x (N_t+1)
    RbfNetwork time_net;
};

struct PodKsnnQueryOptions {
    /// Times outside [0, T] are rejected by default; kernel extrapolation
    /// is unreliable.
    bool allow_extrapolation = false;
};

/// Full online pipeline at (mu*, t*): interpolate the snapshot matrix,
/// re-POD it under the stored energy criterion, fit the time interpolant
/// over the reduced trajectory and lift the result. Never mutates the
/// offline artifact.
std::pair<Eigen::VectorXd, PodKsnnOnlineResult>
pod_ksnn_online_query(const PodKsnnOffline& offline, const ParameterPoint& mu, double t,
                      PodKsnnQueryOptions options = {});

/// Re-query an existing online result at a new time (cache path for
/// repeated queries at one parameter).
Eigen::VectorXd pod_ksnn_evaluate(const PodKsnnOffline& offline,
                                  const PodKsnnOnlineResult& online, double t,
                                  PodKsnnQueryOptions options = {});

} // namespace sdal
