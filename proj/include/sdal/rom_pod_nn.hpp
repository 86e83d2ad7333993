#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "sdal/mlp.hpp"
#include "sdal/param_space.hpp"
#include "sdal/pod.hpp"
#include "sdal/rbf.hpp"

namespace sdal {

/// Second-stage POD basis: SVD of the horizontally stacked
/// parameter-specific bases, truncated under its own energy criterion.
struct GlobalBasis {
    OrthonormalBasis basis;
    Eigen::VectorXd singular_values; // numerically nonzero spectrum
    int rank = 0;
    double energy_criterion = 0.0;
};

GlobalBasis build_global_basis(const std::vector<PodSubspace>& subspaces, double eta_global);

/// Reduced trajectories B(mu_i) = V^T U(mu_i), one r x (N_t+1) matrix per
/// training parameter.
std::vector<Eigen::MatrixXd> reduce_training(const GlobalBasis& global,
                                             const std::vector<SnapshotMatrix>& snapshots);

enum class RegressorKind : std::uint32_t {
    RbfNetwork = 1,
    FeedforwardNN = 2,
};

struct RegressorHyperparams {
    RbfKernelSpec kernel{RbfKernel::Multiquadric, 1e-3};
    /// Above this sample count the RBF kind switches to regression mode
    /// with uniformly subsampled centers.
    int max_centers = 400;
    /// Fraction of samples used for fitting (1.0 = no split). The held-out
    /// remainder, when any, is only reported, never trained on.
    double train_split = 1.0;
    std::uint64_t seed = 0;
    Mlp::Config mlp;
};

/// Map (t, mu) -> reduced coefficients. Inputs are affinely normalized to
/// [0,1]^(N_mu+1) before reaching the underlying model, so unscaled time
/// and parameter ranges cannot skew kernel distances.
class ReducedRegressor {
public:
    static ReducedRegressor fit(const std::vector<Eigen::VectorXd>& inputs,
                                const Eigen::MatrixXd& targets, RegressorKind kind,
                                const RegressorHyperparams& params);

    Eigen::VectorXd evaluate(const Eigen::VectorXd& input) const;

    RegressorKind kind() const { return kind_; }
    Eigen::Index input_dim() const { return offset_.size(); }
    Eigen::Index output_dim() const;
    /// RMSE on the held-out fraction; 0 when train_split = 1.
    double holdout_rmse() const { return holdout_rmse_; }

    void save(std::ostream& os) const;
    static ReducedRegressor load(std::istream& is);

private:
    ReducedRegressor() = default;

    Eigen::VectorXd normalize(const Eigen::VectorXd& x) const;

    RegressorKind kind_ = RegressorKind::RbfNetwork;
    Eigen::VectorXd offset_;
    Eigen::VectorXd scale_;
    std::shared_ptr<const RbfNetwork> rbf_;
    std::shared_ptr<const Mlp> mlp_;
    double holdout_rmse_ = 0.0;
};

/// Training data for the regressor: inputs (t_j, mu_i) and targets
/// beta^j(mu_i) assembled from the reduced trajectories.
struct RegressionData {
    std::vector<Eigen::VectorXd> inputs;
    Eigen::MatrixXd targets;
};

RegressionData make_regression_data(const std::vector<ParameterPoint>& training,
                                    const Eigen::VectorXd& time_grid,
                                    const std::vector<Eigen::MatrixXd>& reduced);

/// u_s(t*, mu*) = V * beta_hat(t*, mu*).
Eigen::VectorXd pod_nn_online_query(const GlobalBasis& global, const ReducedRegressor& regressor,
                                    double t, const ParameterPoint& mu);

} // namespace sdal
