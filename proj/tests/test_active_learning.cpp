#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "sdal/active_learning.hpp"
#include "sdal/errors.hpp"
#include "test_support.hpp"

using namespace sdal;

namespace {

ParameterPoint p1(double x) { return Eigen::VectorXd::Constant(1, x); }

std::vector<ParameterPoint> points_1d(std::initializer_list<double> xs) {
    std::vector<ParameterPoint> out;
    for (double x : xs) out.push_back(p1(x));
    return out;
}

// Synthetic FOM whose mu-specific subspace is the line spanned by
// (cos g(mu), sin g(mu), 0, 0) with g(mu) = sqrt(mu). For two such lines
// the normalized distance is |sin(g(a) - g(b))|, so distances are fully
// hand-computable: the gap 0 -> 0.4 is wider than 0.4 -> 1.
class RotatingLineFom final : public FomOracle {
public:
    SnapshotMatrix query(const ParameterPoint& mu) override {
        ++queries;
        const double angle = std::sqrt(mu[0]);
        Eigen::VectorXd direction(4);
        direction << std::cos(angle), std::sin(angle), 0.0, 0.0;
        SnapshotMatrix snap;
        snap.parameter = mu;
        snap.time_grid.setLinSpaced(3, 0.0, 1.0);
        Eigen::RowVectorXd coeffs(3);
        coeffs << 1.0, 0.5, 0.25;
        snap.values = direction * coeffs;
        return snap;
    }

    int queries = 0;
};

class FailingFom final : public FomOracle {
public:
    SnapshotMatrix query(const ParameterPoint& mu) override {
        if (std::abs(mu[0] - 0.2) < 1e-12) {
            throw std::runtime_error("solver blew up");
        }
        return inner.query(mu);
    }
    RotatingLineFom inner;
};

std::vector<SnapshotMatrix> snapshots_for(FomOracle& fom,
                                          const std::vector<ParameterPoint>& points) {
    std::vector<SnapshotMatrix> out;
    for (const auto& mu : points) out.push_back(fom.query(mu));
    return out;
}

ActiveLearnConfig budget_config(int max_query) {
    ActiveLearnConfig cfg;
    cfg.variant = ActiveLearnConfig::Variant::BudgetA;
    cfg.max_query = max_query;
    cfg.energy_criterion = 1e-6;
    return cfg;
}

ActiveLearnConfig tolerance_config(double tol_d, double tol_e) {
    ActiveLearnConfig cfg;
    cfg.variant = ActiveLearnConfig::Variant::ToleranceB;
    cfg.tol_d = tol_d;
    cfg.tol_e = tol_e;
    return cfg;
}

} // namespace

TEST_CASE("variant A selects inside the widest subspace gap first") {
    RotatingLineFom fom;
    const auto training = points_1d({0.0, 0.4, 1.0});
    ParameterStore store(training, points_1d({0.1, 0.2, 0.3, 0.5, 0.6, 0.7, 0.8, 0.9}));

    // Hand-evaluated pair distances: sin(sqrt(0.4)) = 0.5909 for (0, 0.4)
    // vs sin(1 - sqrt(0.4)) = 0.3573 for (0.4, 1).
    auto result = run_variant_a(store, snapshots_for(fom, training), fom, budget_config(1));
    REQUIRE(result.trace.records.size() == 1);
    const TraceRecord& rec = result.trace.records[0];
    CHECK(rec.selected[0] == 0.2); // midpoint of (0, 0.4) is exactly a candidate
    CHECK(rec.pair_a[0] == 0.0);
    CHECK(rec.pair_b[0] == 0.4);
    CHECK(result.initial_d_max == doctest::Approx(std::sin(std::sqrt(0.4))).epsilon(1e-9));
}

TEST_CASE("variant A budget accounting") {
    RotatingLineFom fom;
    const auto training = points_1d({0.0, 0.4, 1.0});
    ParameterStore store(training, points_1d({0.1, 0.2, 0.3, 0.5, 0.6, 0.7, 0.8, 0.9}));
    const auto initial = snapshots_for(fom, training);
    fom.queries = 0;

    auto result = run_variant_a(store, initial, fom, budget_config(5));
    CHECK(result.fom_queries == 5);
    CHECK(fom.queries == 5);
    CHECK(result.trace.records.size() == 5);
    CHECK(result.converged);
    CHECK(!result.candidates_exhausted);
    CHECK(result.store.training().size() == 8);
    CHECK(result.snapshots.size() == 8);
    CHECK(result.subspaces.size() == 8);
    // Iteration indices strictly increasing from 1.
    for (std::size_t i = 0; i < result.trace.records.size(); ++i) {
        CHECK(result.trace.records[i].iter == static_cast<int>(i) + 1);
    }
}

TEST_CASE("variant A with a zero budget is a no-op") {
    RotatingLineFom fom;
    const auto training = points_1d({0.0, 1.0});
    ParameterStore store(training, points_1d({0.5}));
    auto result = run_variant_a(store, snapshots_for(fom, training), fom, budget_config(0));
    CHECK(result.trace.records.empty());
    CHECK(result.fom_queries == 0);
    CHECK(result.store.training().size() == 2);
}

TEST_CASE("variant A stops cleanly when candidates run out") {
    RotatingLineFom fom;
    const auto training = points_1d({0.0, 1.0});
    ParameterStore store(training, points_1d({0.5, 0.25}));
    auto result = run_variant_a(store, snapshots_for(fom, training), fom, budget_config(10));
    CHECK(result.candidates_exhausted);
    CHECK(!result.converged);
    CHECK(result.fom_queries == 2); // min(max_query, |initial P*|)
    CHECK(result.store.candidates().empty());
}

TEST_CASE("FOM failures carry iteration context") {
    FailingFom fom;
    const auto training = points_1d({0.0, 0.4, 1.0});
    ParameterStore store(training, points_1d({0.1, 0.2, 0.3}));
    const auto initial = snapshots_for(fom.inner, training);
    CHECK_THROWS_WITH_AS(run_variant_a(store, initial, fom, budget_config(3)),
                         doctest::Contains("iteration 1"), FomError);
}

TEST_CASE("distance cache equals a from-scratch recomputation") {
    RotatingLineFom fom;
    const auto training = points_1d({0.0, 0.3, 1.0});
    ParameterStore store(training, points_1d({0.1, 0.2, 0.5, 0.6, 0.8}));
    auto result = run_variant_a(store, snapshots_for(fom, training), fom, budget_config(4));

    std::vector<OrthonormalBasis> bases;
    for (const auto& sub : result.subspaces) bases.push_back(sub.basis);
    for (const auto& [pair, cached] : result.store.distance_cache()) {
        const double fresh = subspace_distance(bases[pair.first], bases[pair.second],
                                               SubspaceMeasure::D2hat);
        CHECK(cached == fresh); // bit-for-bit
    }
    CHECK(result.store.distance_cache().size() == result.store.pairs().size());
}

TEST_CASE("deterministic traces") {
    auto run_once = [] {
        RotatingLineFom fom;
        const auto training = points_1d({0.0, 0.4, 1.0});
        ParameterStore store(training, points_1d({0.1, 0.2, 0.3, 0.5, 0.7, 0.9}));
        return run_variant_a(store, snapshots_for(fom, training), fom, budget_config(4));
    };
    const auto a = run_once();
    const auto b = run_once();
    REQUIRE(a.trace.records.size() == b.trace.records.size());
    for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
        CHECK(a.trace.records[i].selected == b.trace.records[i].selected);
        CHECK(a.trace.records[i].d_max == b.trace.records[i].d_max);
    }
}

TEST_CASE("variant B converges immediately when tolerances already hold") {
    RotatingLineFom fom;
    // Dense training: neighboring gaps are small, subspaces are exact
    // lines so the POD projection error vanishes.
    const auto training = points_1d({0.0, 0.2, 0.4, 0.6, 0.8, 1.0});
    ParameterStore store(training, points_1d({0.1, 0.3}));
    auto result =
        run_variant_b(store, snapshots_for(fom, training), fom, tolerance_config(0.5, 1e-6));
    CHECK(result.converged);
    CHECK(result.trace.records.empty());
    CHECK(result.fom_queries == 0);
    REQUIRE(result.final_estimator.has_value());
    CHECK(*result.final_estimator <= 1e-6);
}

TEST_CASE("variant B drives the max distance under tol_d") {
    RotatingLineFom fom;
    const auto training = points_1d({0.0, 1.0});
    // The subspace angle varies like sqrt(mu), so the candidate grid must
    // be dense near zero for the gap there to close.
    std::vector<ParameterPoint> candidates;
    for (int i = 1; i < 100; ++i) candidates.push_back(p1(i / 100.0));
    ParameterStore store(training, candidates);
    auto result =
        run_variant_b(store, snapshots_for(fom, training), fom, tolerance_config(0.15, 1e-6));
    CHECK(result.converged);
    CHECK(result.final_d_max <= 0.15);
    CHECK(result.fom_queries > 0);
    REQUIRE(result.final_estimator.has_value());
    CHECK(*result.final_estimator <= 1e-6);
    // The estimator value is attached to the last iteration's record.
    CHECK(result.trace.records.back().estimator.has_value());
}

TEST_CASE("variant B with a huge error tolerance runs the inner loop once") {
    RotatingLineFom fom;
    const auto training = points_1d({0.0, 1.0});
    std::vector<ParameterPoint> candidates;
    for (int i = 1; i < 20; ++i) candidates.push_back(p1(i / 20.0));
    ParameterStore store(training, candidates);
    auto result =
        run_variant_b(store, snapshots_for(fom, training), fom, tolerance_config(0.3, 1e9));
    CHECK(result.converged);
    CHECK(result.final_d_max <= 0.3);
    REQUIRE(result.final_estimator.has_value()); // evaluated exactly once
}

TEST_CASE("variant B reports non-convergence on exhaustion") {
    RotatingLineFom fom;
    const auto training = points_1d({0.0, 1.0});
    ParameterStore store(training, points_1d({0.5}));
    // tol_d is unreachable with a single candidate.
    auto result =
        run_variant_b(store, snapshots_for(fom, training), fom, tolerance_config(1e-4, 1e-9));
    CHECK(!result.converged);
    CHECK(result.candidates_exhausted);
    CHECK(result.store.candidates().empty());
}

TEST_CASE("error estimator on exact subspaces is numerically zero") {
    RotatingLineFom fom;
    const auto training = points_1d({0.0, 0.5, 1.0});
    const auto snapshots = snapshots_for(fom, training);
    std::vector<PodSubspace> subspaces;
    for (const auto& snap : snapshots) subspaces.push_back(compute_pod(snap, 1e-12));
    const double estimate = estimate_rom_error(training, points_1d({0.25, 0.75}), snapshots,
                                               subspaces, {RbfKernel::Multiquadric, 1e-3});
    CHECK(estimate <= 1e-8);
}

TEST_CASE("error estimator sees a dominant outlier exactly") {
    // Manufactured data: the middle training point's subspace misses its
    // snapshots at relative error 0.5 for every time step; the others are
    // exact. A candidate placed at the outlier reads the interpolant there.
    const auto training = points_1d({0.0, 0.5, 1.0});
    const Eigen::MatrixXd e1 = test::axis_columns(3, {0});

    std::vector<SnapshotMatrix> snapshots(3);
    std::vector<PodSubspace> subspaces;
    Eigen::RowVectorXd coeffs(4);
    coeffs << 1.0, 2.0, 3.0, 4.0;
    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd direction(3);
        direction << (i == 1 ? std::sqrt(3.0) : 1.0), (i == 1 ? 1.0 : 0.0), 0.0;
        snapshots[i].values = direction * coeffs;
        snapshots[i].time_grid.setLinSpaced(4, 0.0, 1.0);
        snapshots[i].parameter = training[i];
        subspaces.push_back(
            PodSubspace{OrthonormalBasis(e1), Eigen::VectorXd::Ones(1), 1, 1e-6});
    }
    // ||(sqrt(3), 1) - (sqrt(3), 0)|| / ||(sqrt(3), 1)|| = 1/2.
    const double estimate = estimate_rom_error(training, points_1d({0.5 + 0.0}), snapshots,
                                               subspaces, {RbfKernel::Multiquadric, 1e-3});
    CHECK(estimate >= 0.5 * (1.0 - 1e-6));
    CHECK(estimate <= 0.5 * (1.0 + 1e-6));
}

TEST_CASE("error estimator matches a dense independent recomputation") {
    RotatingLineFom fom;
    const auto training = points_1d({0.0, 0.2, 0.45, 0.7, 1.0});
    const auto candidates = points_1d({0.1, 0.5, 0.85});
    auto snapshots = snapshots_for(fom, training);
    // Perturb the snapshots so the rank-1 subspaces are inexact and the
    // errors are nontrivial.
    std::mt19937_64 rng(97);
    for (auto& snap : snapshots) {
        snap.values += 0.05 * test::random_matrix(rng, snap.values.rows(), snap.values.cols());
    }
    std::vector<PodSubspace> subspaces;
    for (const auto& snap : snapshots) subspaces.push_back(compute_pod(snap, 0.05));

    const RbfKernelSpec kernel{RbfKernel::Multiquadric, 1e-3};
    const double estimate =
        estimate_rom_error(training, candidates, snapshots, subspaces, kernel);

    // Dense path: explicit projectors, independent FullPivLu solve of the
    // kernel system, manual max scans.
    const Eigen::Index n_time = snapshots[0].values.cols();
    Eigen::MatrixXd eps(training.size(), n_time);
    for (std::size_t i = 0; i < training.size(); ++i) {
        const Eigen::MatrixXd projector =
            subspaces[i].basis.columns() * subspaces[i].basis.columns().transpose();
        const Eigen::MatrixXd err =
            snapshots[i].values - projector * snapshots[i].values;
        for (Eigen::Index j = 0; j < n_time; ++j) {
            eps(i, j) = err.col(j).norm() / snapshots[i].values.col(j).norm();
        }
    }
    Eigen::MatrixXd gram(training.size(), training.size());
    for (std::size_t a = 0; a < training.size(); ++a) {
        for (std::size_t b = 0; b < training.size(); ++b) {
            gram(a, b) =
                rbf_phi(kernel.kind, (training[a] - training[b]).norm(), kernel.width);
        }
    }
    const Eigen::MatrixXd weights = Eigen::FullPivLU<Eigen::MatrixXd>(gram).solve(eps);
    double expected = 0.0;
    for (const auto& mu : candidates) {
        Eigen::VectorXd phi(training.size());
        for (std::size_t a = 0; a < training.size(); ++a) {
            phi[a] = rbf_phi(kernel.kind, (mu - training[a]).norm(), kernel.width);
        }
        expected = std::max(expected, (weights.transpose() * phi).cwiseAbs().maxCoeff());
    }
    CHECK(estimate == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("error estimator input validation") {
    RotatingLineFom fom;
    const auto one = points_1d({0.5});
    auto snaps = snapshots_for(fom, one);
    std::vector<PodSubspace> subs{compute_pod(snaps[0], 1e-6)};
    CHECK_THROWS_AS(estimate_rom_error(one, points_1d({0.1}), snaps, subs, {}),
                    InsufficientDataError);

    const auto two = points_1d({0.2, 0.8});
    auto snaps2 = snapshots_for(fom, two);
    std::vector<PodSubspace> subs2;
    for (const auto& s : snaps2) subs2.push_back(compute_pod(s, 1e-6));
    CHECK_THROWS_AS(estimate_rom_error(two, {}, snaps2, subs2, {}), EstimatorError);
}

TEST_CASE("trace csv carries the unevaluated-estimator sentinel") {
    RotatingLineFom fom;
    const auto training = points_1d({0.0, 0.4, 1.0});
    ParameterStore store(training, points_1d({0.2, 0.7}));
    auto result = run_variant_a(store, snapshots_for(fom, training), fom, budget_config(2));

    const auto path = std::filesystem::temp_directory_path() / "sdal_trace_test.csv";
    write_trace_csv(path, result);
    std::ifstream is(path);
    std::string header, row;
    REQUIRE(std::getline(is, header));
    CHECK(header ==
          "iter,mu,pair_a,pair_b,d_max,rank_a,rank_b,rank_new,estimator");
    REQUIRE(std::getline(is, row));
    CHECK(row.substr(row.rfind(',') + 1) == "100");
}
