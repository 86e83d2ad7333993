#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "sdal/errors.hpp"
#include "sdal/rom_artifact.hpp"
#include "sdal/rom_pod_nn.hpp"
#include "test_support.hpp"

using namespace sdal;

namespace {

ParameterPoint p1(double x) { return Eigen::VectorXd::Constant(1, x); }

SnapshotMatrix make_snapshot(Eigen::MatrixXd values, double mu) {
    SnapshotMatrix snap;
    snap.time_grid.setLinSpaced(values.cols(), 0.0, 1.0);
    snap.values = std::move(values);
    snap.parameter = p1(mu);
    return snap;
}

PodSubspace pod_of(std::mt19937_64& rng, Eigen::Index n, Eigen::Index r) {
    return PodSubspace{test::random_orthonormal(rng, n, r),
                       Eigen::VectorXd::LinSpaced(r, 2.0, 1.0), static_cast<int>(r), 1e-6};
}

} // namespace

TEST_CASE("global basis of a single subspace spans the same space") {
    std::mt19937_64 rng(3);
    const PodSubspace sub = pod_of(rng, 14, 4);
    const GlobalBasis global = build_global_basis({sub}, 1e-14);
    CHECK(global.rank == 4);
    CHECK(distance_d2_normalized(global.basis, sub.basis) <= 1e-10);
}

TEST_CASE("duplicate subspaces do not change the span") {
    std::mt19937_64 rng(5);
    const PodSubspace sub = pod_of(rng, 12, 3);
    const GlobalBasis global = build_global_basis({sub, sub}, 1e-14);
    CHECK(global.rank == 3);
    CHECK(distance_d2_normalized(global.basis, sub.basis) <= 1e-10);
    // Doubling a direction doubles its squared singular value.
    CHECK(global.singular_values[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("global basis obeys its own energy bound on the stacked matrix") {
    std::mt19937_64 rng(41);
    std::vector<PodSubspace> subs;
    for (int i = 0; i < 5; ++i) subs.push_back(pod_of(rng, 18, 2 + i % 3));
    Eigen::Index total = 0;
    for (const auto& s : subs) total += s.basis.subspace_dim();
    Eigen::MatrixXd stacked(18, total);
    Eigen::Index col = 0;
    for (const auto& s : subs) {
        stacked.middleCols(col, s.basis.subspace_dim()) = s.basis.columns();
        col += s.basis.subspace_dim();
    }
    for (double eta : {0.3, 1e-2, 1e-6}) {
        const GlobalBasis global = build_global_basis(subs, eta);
        const Eigen::MatrixXd approx =
            global.basis.columns() * (global.basis.columns().transpose() * stacked);
        CHECK((stacked - approx).squaredNorm() / stacked.squaredNorm() <= eta + 1e-10);
    }
}

TEST_CASE("offline build composes with the learned store") {
    // Building from the subspaces an active-learning run returned equals
    // building from scratch on its final snapshot set.
    std::mt19937_64 rng(43);
    std::vector<SnapshotMatrix> snaps;
    std::vector<ParameterPoint> mus;
    for (int i = 0; i < 4; ++i) {
        mus.push_back(p1(0.2 * i));
        snaps.push_back(make_snapshot(test::random_matrix(rng, 12, 5), 0.2 * i));
    }
    std::vector<PodSubspace> from_run;
    for (const auto& s : snaps) from_run.push_back(compute_pod(s, 1e-6));
    std::vector<PodSubspace> from_scratch;
    for (const auto& s : snaps) from_scratch.push_back(compute_pod(s, 1e-6));

    const GlobalBasis a = build_global_basis(from_run, 1e-8);
    const GlobalBasis b = build_global_basis(from_scratch, 1e-8);
    CHECK(a.basis.columns() == b.basis.columns());
    CHECK(a.singular_values == b.singular_values);

    const auto ra = reduce_training(a, snaps);
    const auto rb = reduce_training(b, snaps);
    for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i] == rb[i]);
}

TEST_CASE("global basis contains every parameter-specific subspace") {
    std::mt19937_64 rng(7);
    std::vector<PodSubspace> subs;
    for (int i = 0; i < 4; ++i) subs.push_back(pod_of(rng, 20, 2 + i % 3));
    const GlobalBasis global = build_global_basis(subs, 1e-14);
    for (const auto& sub : subs) {
        CHECK(distance_d1(sub.basis, global.basis) <= 1e-8);
    }
    // A production-style loose criterion is accepted too.
    CHECK_NOTHROW(build_global_basis(subs, 1e-3));
    CHECK_THROWS_AS(build_global_basis({}, 1e-3), InsufficientDataError);
}

TEST_CASE("reduced trajectories match the dense projector oracle") {
    std::mt19937_64 rng(11);
    std::vector<PodSubspace> subs{pod_of(rng, 10, 3), pod_of(rng, 10, 2)};
    const GlobalBasis global = build_global_basis(subs, 1e-14);

    std::vector<SnapshotMatrix> snaps;
    snaps.push_back(make_snapshot(test::random_matrix(rng, 10, 5), 0.1));
    snaps.push_back(make_snapshot(test::random_matrix(rng, 10, 5), 0.9));
    const auto reduced = reduce_training(global, snaps);
    REQUIRE(reduced.size() == 2);

    const Eigen::MatrixXd projector =
        global.basis.columns() * global.basis.columns().transpose();
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        CHECK(reduced[i].rows() == global.rank);
        const Eigen::MatrixXd lifted = global.basis.columns() * reduced[i];
        CHECK((lifted - projector * snaps[i].values).norm() <=
              1e-10 * snaps[i].values.norm());
    }

    // Snapshots inside the span reconstruct exactly.
    const SnapshotMatrix inside = make_snapshot(
        global.basis.columns() * test::random_matrix(rng, global.rank, 4), 0.5);
    const auto r = reduce_training(global, {inside});
    CHECK((global.basis.columns() * r[0] - inside.values).norm() <=
          1e-10 * inside.values.norm());

    // Identity basis extracts leading rows.
    const GlobalBasis eye{OrthonormalBasis(Eigen::MatrixXd::Identity(10, 3)),
                          Eigen::VectorXd::Ones(3), 3, 1e-6};
    const auto top = reduce_training(eye, {snaps[0]});
    CHECK(top[0] == snaps[0].values.topRows(3));
}

TEST_CASE("regressor reproduces constant and training targets") {
    std::vector<Eigen::VectorXd> inputs;
    for (int i = 0; i < 12; ++i) {
        Eigen::VectorXd x(2);
        x << i / 11.0, (i % 4) / 3.0;
        inputs.push_back(x);
    }

    Eigen::MatrixXd constant = Eigen::MatrixXd::Ones(12, 3) * 2.5;
    const ReducedRegressor reg = ReducedRegressor::fit(
        inputs, constant, RegressorKind::RbfNetwork, RegressorHyperparams{});
    for (const auto& x : inputs) {
        CHECK((reg.evaluate(x).array() - 2.5).abs().maxCoeff() <= 1e-6);
    }

    std::mt19937_64 rng(13);
    const Eigen::MatrixXd targets = test::random_matrix(rng, 12, 2);
    const ReducedRegressor exact = ReducedRegressor::fit(
        inputs, targets, RegressorKind::RbfNetwork, RegressorHyperparams{});
    for (int i = 0; i < 12; ++i) {
        CHECK((exact.evaluate(inputs[i]) - targets.row(i).transpose()).norm() <=
              1e-8 * (targets.row(i).norm() + 1.0));
    }
}

TEST_CASE("smooth synthetic target generalizes within tolerance") {
    // beta(t, mu) = sin(t * mu) sampled on a 10 x 5 grid; held-out points
    // off the grid probe interpolation quality.
    std::vector<Eigen::VectorXd> inputs;
    Eigen::MatrixXd targets(50, 1);
    int row = 0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 5; ++j) {
            Eigen::VectorXd x(2);
            x << i / 9.0, j / 4.0;
            inputs.push_back(x);
            targets(row++, 0) = std::sin(x[0] * x[1]);
        }
    }
    const ReducedRegressor reg = ReducedRegressor::fit(
        inputs, targets, RegressorKind::RbfNetwork, RegressorHyperparams{});

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    double sq = 0.0;
    const int trials = 200;
    for (int k = 0; k < trials; ++k) {
        Eigen::VectorXd x(2);
        x << unif(rng), unif(rng);
        const double err = reg.evaluate(x)[0] - std::sin(x[0] * x[1]);
        sq += err * err;
    }
    CHECK(std::sqrt(sq / trials) <= 5e-2);
}

TEST_CASE("train split reports a held-out rmse") {
    std::vector<Eigen::VectorXd> inputs;
    Eigen::MatrixXd targets(40, 1);
    for (int i = 0; i < 40; ++i) {
        Eigen::VectorXd x(1);
        x << i / 39.0;
        inputs.push_back(x);
        targets(i, 0) = std::cos(2.0 * x[0]);
    }
    RegressorHyperparams params;
    params.train_split = 0.8;
    params.seed = 5;
    const ReducedRegressor reg =
        ReducedRegressor::fit(inputs, targets, RegressorKind::RbfNetwork, params);
    CHECK(reg.holdout_rmse() > 0.0);
    CHECK(reg.holdout_rmse() <= 0.1);
}

TEST_CASE("feedforward regressor is usable and serializable") {
    std::vector<Eigen::VectorXd> inputs;
    Eigen::MatrixXd targets(30, 1);
    for (int i = 0; i < 30; ++i) {
        Eigen::VectorXd x(1);
        x << i / 29.0;
        inputs.push_back(x);
        targets(i, 0) = 0.3 + 0.5 * x[0];
    }
    RegressorHyperparams params;
    params.mlp.hidden = {16};
    params.mlp.epochs = 1500;
    const ReducedRegressor reg =
        ReducedRegressor::fit(inputs, targets, RegressorKind::FeedforwardNN, params);
    double worst = 0.0;
    for (int i = 0; i < 30; ++i) {
        worst = std::max(worst, std::abs(reg.evaluate(inputs[i])[0] - targets(i, 0)));
    }
    CHECK(worst <= 5e-2);

    std::stringstream buffer;
    reg.save(buffer);
    const ReducedRegressor back = ReducedRegressor::load(buffer);
    CHECK(back.kind() == RegressorKind::FeedforwardNN);
    CHECK(back.evaluate(inputs[7]) == reg.evaluate(inputs[7]));
}

TEST_CASE("online query composes the basis and the regressor") {
    std::mt19937_64 rng(19);
    std::vector<SnapshotMatrix> snaps;
    snaps.push_back(make_snapshot(test::random_matrix(rng, 15, 6), 0.2));
    snaps.push_back(make_snapshot(test::random_matrix(rng, 15, 6), 0.8));
    std::vector<PodSubspace> subs;
    for (const auto& s : snaps) subs.push_back(compute_pod(s, 1e-12));
    const GlobalBasis global = build_global_basis(subs, 1e-12);
    const auto reduced = reduce_training(global, snaps);

    const std::vector<ParameterPoint> mus{p1(0.2), p1(0.8)};
    const RegressionData data = make_regression_data(mus, snaps[0].time_grid, reduced);
    CHECK(data.inputs.size() == 12);
    CHECK(data.targets.rows() == 12);

    const ReducedRegressor reg = ReducedRegressor::fit(
        data.inputs, data.targets, RegressorKind::RbfNetwork, RegressorHyperparams{});

    // At a training (t_j, mu_i) the query returns the projected snapshot.
    const Eigen::MatrixXd projector =
        global.basis.columns() * global.basis.columns().transpose();
    for (std::size_t i = 0; i < mus.size(); ++i) {
        const Eigen::VectorXd got =
            pod_nn_online_query(global, reg, snaps[i].time_grid[3], mus[i]);
        const Eigen::VectorXd expected = projector * snaps[i].values.col(3);
        CHECK((got - expected).norm() <= 1e-6 * expected.norm());
    }

    // Zero targets produce the zero solution.
    const ReducedRegressor zero =
        ReducedRegressor::fit(data.inputs, Eigen::MatrixXd::Zero(12, global.rank),
                              RegressorKind::RbfNetwork, RegressorHyperparams{});
    CHECK(pod_nn_online_query(global, zero, 0.4, p1(0.5)).norm() == 0.0);

    CHECK_THROWS_AS(pod_nn_online_query(global, reg, 0.4, Eigen::VectorXd::Zero(2)),
                    DimensionError);
}

TEST_CASE("center count stays capped as training data grows") {
    // The online query cost is governed by the center count and the global
    // rank, both independent of the training-set size once capped.
    RegressorHyperparams params;
    params.max_centers = 25;
    for (int samples : {40, 160}) {
        std::vector<Eigen::VectorXd> inputs;
        Eigen::MatrixXd targets(samples, 1);
        for (int i = 0; i < samples; ++i) {
            Eigen::VectorXd x(1);
            x << i / double(samples - 1);
            inputs.push_back(x);
            targets(i, 0) = std::sin(x[0]);
        }
        const ReducedRegressor reg =
            ReducedRegressor::fit(inputs, targets, RegressorKind::RbfNetwork, params);
        // Evaluation touches exactly max_centers kernels either way.
        CHECK(reg.evaluate(p1(0.3)).size() == 1);
    }
}

TEST_CASE("pod-nn artifact file round-trip") {
    std::mt19937_64 rng(23);
    std::vector<SnapshotMatrix> snaps;
    snaps.push_back(make_snapshot(test::random_matrix(rng, 10, 5), 0.1));
    snaps.push_back(make_snapshot(test::random_matrix(rng, 10, 5), 0.9));
    std::vector<PodSubspace> subs;
    for (const auto& s : snaps) subs.push_back(compute_pod(s, 1e-10));
    GlobalBasis global = build_global_basis(subs, 1e-10);
    const auto reduced = reduce_training(global, snaps);
    const RegressionData data =
        make_regression_data({p1(0.1), p1(0.9)}, snaps[0].time_grid, reduced);
    ReducedRegressor reg = ReducedRegressor::fit(data.inputs, data.targets,
                                                 RegressorKind::RbfNetwork, {});

    const auto path = std::filesystem::temp_directory_path() / "sdal_podnn_test.sdrm";
    save_rom_artifact(
        path, RomArtifact{PodNnModel{global, reg, snaps[0].time_grid, 1}});
    const RomArtifact back = load_rom_artifact(path);
    REQUIRE(!back.is_ksnn());
    CHECK(back.pod_nn().global.rank == global.rank);
    const Eigen::VectorXd a = pod_nn_online_query(global, reg, 0.37, p1(0.42));
    const Eigen::VectorXd b =
        pod_nn_online_query(back.pod_nn().global, back.pod_nn().regressor, 0.37, p1(0.42));
    CHECK(a == b);
}
