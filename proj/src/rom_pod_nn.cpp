#include "sdal/rom_pod_nn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "sdal/errors.hpp"

namespace sdal {

GlobalBasis build_global_basis(const std::vector<PodSubspace>& subspaces, double eta_global) {
    if (subspaces.empty()) {
        throw InsufficientDataError("global basis needs at least one subspace");
    }
    if (!(eta_global > 0.0 && eta_global < 1.0)) {
        throw RangeError("global energy criterion must lie in (0,1)");
    }
    const Eigen::Index n = subspaces[0].basis.ambient_dim();
    Eigen::Index total_cols = 0;
    for (const auto& sub : subspaces) {
        if (sub.basis.ambient_dim() != n) {
            throw DimensionError("subspaces disagree on the ambient dimension");
        }
        total_cols += sub.basis.subspace_dim();
    }

    Eigen::MatrixXd stacked(n, total_cols);
    Eigen::Index col = 0;
    for (const auto& sub : subspaces) {
        stacked.middleCols(col, sub.basis.subspace_dim()) = sub.basis.columns();
        col += sub.basis.subspace_dim();
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd;
    Eigen::MatrixXd left;
    Eigen::VectorXd sigma;
    if (stacked.rows() >= stacked.cols()) {
        svd.compute(stacked, Eigen::ComputeThinU);
        left = svd.matrixU();
        sigma = svd.singularValues();
    } else {
        svd.compute(stacked.transpose(), Eigen::ComputeThinV);
        left = svd.matrixV();
        sigma = svd.singularValues();
    }

    const double zero_cut = kPodZeroRelTol * sigma[0];
    Eigen::Index s = 0;
    while (s < sigma.size() && sigma[s] >= zero_cut) ++s;
    const Eigen::VectorXd retained = sigma.head(s);
    const double total = retained.squaredNorm();

    Eigen::Index rank = s;
    double kept = 0.0;
    for (Eigen::Index r = 1; r <= s; ++r) {
        kept += retained[r - 1] * retained[r - 1];
        if (1.0 - kept / total <= eta_global) {
            rank = r;
            break;
        }
    }
    return GlobalBasis{OrthonormalBasis(left.leftCols(rank)), retained, static_cast<int>(rank),
                       eta_global};
}

std::vector<Eigen::MatrixXd> reduce_training(const GlobalBasis& global,
                                             const std::vector<SnapshotMatrix>& snapshots) {
    std::vector<Eigen::MatrixXd> reduced;
    reduced.reserve(snapshots.size());
    for (const auto& snap : snapshots) {
        if (snap.values.rows() != global.basis.ambient_dim()) {
            throw DimensionError("snapshot spatial dimension does not match the global basis");
        }
        reduced.push_back(global.basis.columns().transpose() * snap.values);
    }
    return reduced;
}

RegressionData make_regression_data(const std::vector<ParameterPoint>& training,
                                    const Eigen::VectorXd& time_grid,
                                    const std::vector<Eigen::MatrixXd>& reduced) {
    if (training.size() != reduced.size()) {
        throw DimensionError("reduced trajectories are not aligned with the training set");
    }
    if (training.empty()) throw InsufficientDataError("no training parameters");
    const Eigen::Index n_mu = training[0].size();
    const Eigen::Index n_time = time_grid.size();
    const Eigen::Index r = reduced[0].rows();

    RegressionData data;
    data.inputs.reserve(training.size() * n_time);
    data.targets.resize(static_cast<Eigen::Index>(training.size()) * n_time, r);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < training.size(); ++i) {
        if (reduced[i].rows() != r || reduced[i].cols() != n_time) {
            throw DimensionError("reduced trajectory shape mismatch");
        }
        for (Eigen::Index j = 0; j < n_time; ++j) {
            Eigen::VectorXd in(n_mu + 1);
            in[0] = time_grid[j];
            in.tail(n_mu) = training[i];
            data.inputs.push_back(std::move(in));
            data.targets.row(row++) = reduced[i].col(j).transpose();
        }
    }
    return data;
}

Eigen::VectorXd ReducedRegressor::normalize(const Eigen::VectorXd& x) const {
    if (x.size() != offset_.size()) {
        throw DimensionError("regressor input dimension mismatch");
    }
    return (x - offset_).cwiseQuotient(scale_);
}

ReducedRegressor ReducedRegressor::fit(const std::vector<Eigen::VectorXd>& inputs,
                                       const Eigen::MatrixXd& targets, RegressorKind kind,
                                       const RegressorHyperparams& params) {
    if (inputs.size() < 2) {
        throw InsufficientDataError("regressor fit needs at least 2 samples");
    }
    if (targets.rows() != static_cast<Eigen::Index>(inputs.size())) {
        throw DimensionError("regressor target rows do not match the sample count");
    }
    if (!(params.train_split > 0.0 && params.train_split <= 1.0)) {
        throw RangeError("train_split must lie in (0,1]");
    }

    ReducedRegressor reg;
    reg.kind_ = kind;

    const Eigen::Index dim = inputs[0].size();
    reg.offset_ = inputs[0];
    Eigen::VectorXd high = inputs[0];
    for (const auto& x : inputs) {
        if (x.size() != dim) throw DimensionError("regressor inputs have mixed dimensions");
        reg.offset_ = reg.offset_.cwiseMin(x);
        high = high.cwiseMax(x);
    }
    reg.scale_ = (high - reg.offset_).cwiseMax(1e-300);

    // Optional split: a deterministic shuffle keeps the fit reproducible.
    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), 0);
    auto n_fit = static_cast<std::size_t>(
        std::ceil(params.train_split * static_cast<double>(inputs.size())));
    n_fit = std::max<std::size_t>(2, std::min(n_fit, inputs.size()));
    if (n_fit < inputs.size()) {
        std::mt19937_64 rng(params.seed);
        std::shuffle(order.begin(), order.end(), rng);
    }

    std::vector<Eigen::VectorXd> fit_inputs;
    fit_inputs.reserve(n_fit);
    Eigen::MatrixXd fit_targets(static_cast<Eigen::Index>(n_fit), targets.cols());
    for (std::size_t i = 0; i < n_fit; ++i) {
        fit_inputs.push_back(reg.normalize(inputs[order[i]]));
        fit_targets.row(static_cast<Eigen::Index>(i)) = targets.row(order[i]);
    }

    if (kind == RegressorKind::RbfNetwork) {
        reg.rbf_ = std::make_shared<RbfNetwork>(RbfNetwork::fit_regression(
            fit_inputs, fit_targets, params.kernel, params.max_centers));
    } else {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(n_fit), dim);
        for (std::size_t i = 0; i < n_fit; ++i) x.row(static_cast<Eigen::Index>(i)) = fit_inputs[i];
        Mlp::Config cfg = params.mlp;
        cfg.seed = params.seed;
        reg.mlp_ = std::make_shared<Mlp>(Mlp::train(x, fit_targets, cfg));
    }

    if (n_fit < inputs.size()) {
        double sq = 0.0;
        Eigen::Index count = 0;
        for (std::size_t i = n_fit; i < inputs.size(); ++i) {
            const Eigen::VectorXd pred = reg.evaluate(inputs[order[i]]);
            sq += (pred - targets.row(order[i]).transpose()).squaredNorm();
            count += targets.cols();
        }
        reg.holdout_rmse_ = std::sqrt(sq / static_cast<double>(count));
    }
    return reg;
}

Eigen::VectorXd ReducedRegressor::evaluate(const Eigen::VectorXd& input) const {
    const Eigen::VectorXd z = normalize(input);
    return kind_ == RegressorKind::RbfNetwork ? rbf_->evaluate(z) : mlp_->evaluate(z);
}

Eigen::Index ReducedRegressor::output_dim() const {
    return kind_ == RegressorKind::RbfNetwork ? rbf_->output_dim() : mlp_->output_dim();
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
    if (!is) throw IoError("truncated regressor section");
    return v;
}

} // namespace

void ReducedRegressor::save(std::ostream& os) const {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(kind_));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(offset_.size()));
    os.write(reinterpret_cast<const char*>(offset_.data()),
             static_cast<std::streamsize>(sizeof(double)) * offset_.size());
    os.write(reinterpret_cast<const char*>(scale_.data()),
             static_cast<std::streamsize>(sizeof(double)) * scale_.size());
    put<double>(os, holdout_rmse_);
    if (kind_ == RegressorKind::RbfNetwork) {
        rbf_->save(os);
    } else {
        mlp_->save(os);
    }
}

ReducedRegressor ReducedRegressor::load(std::istream& is) {
    ReducedRegressor reg;
    const auto kind = get<std::uint32_t>(is);
    if (kind != static_cast<std::uint32_t>(RegressorKind::RbfNetwork) &&
        kind != static_cast<std::uint32_t>(RegressorKind::FeedforwardNN)) {
        throw IoError("unknown regressor kind " + std::to_string(kind));
    }
    reg.kind_ = static_cast<RegressorKind>(kind);
    const auto dim = static_cast<Eigen::Index>(get<std::uint64_t>(is));
    reg.offset_.resize(dim);
    is.read(reinterpret_cast<char*>(reg.offset_.data()),
            static_cast<std::streamsize>(sizeof(double)) * dim);
    reg.scale_.resize(dim);
    is.read(reinterpret_cast<char*>(reg.scale_.data()),
            static_cast<std::streamsize>(sizeof(double)) * dim);
    if (!is) throw IoError("truncated regressor section");
    reg.holdout_rmse_ = get<double>(is);
    if (reg.kind_ == RegressorKind::RbfNetwork) {
        reg.rbf_ = std::make_shared<RbfNetwork>(RbfNetwork::load(is));
    } else {
        reg.mlp_ = std::make_shared<Mlp>(Mlp::load(is));
    }
    return reg;
}

Eigen::VectorXd pod_nn_online_query(const GlobalBasis& global, const ReducedRegressor& regressor,
                                    double t, const ParameterPoint& mu) {
    if (regressor.input_dim() != mu.size() + 1) {
        throw DimensionError("regressor expects input dimension " +
                             std::to_string(regressor.input_dim()) + ", query has " +
                             std::to_string(mu.size() + 1));
    }
    if (regressor.output_dim() != global.basis.subspace_dim()) {
        throw DimensionError("regressor output dimension does not match the global basis rank");
    }
    Eigen::VectorXd input(mu.size() + 1);
    input[0] = t;
    input.tail(mu.size()) = mu;
    return global.basis.columns() * regressor.evaluate(input);
}

} // namespace sdal
