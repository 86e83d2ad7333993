#include "sdal/active_learning.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "sdal/errors.hpp"

namespace sdal {

void ActiveLearnConfig::validate() const {
    if (!(energy_criterion > 0.0 && energy_criterion < 1.0)) {
        throw RangeError("energy criterion must lie in (0,1)");
    }
    if (variant == Variant::BudgetA) {
        if (max_query < 0) throw RangeError("max_query must be nonnegative");
    } else {
        if (!(tol_d > 0.0)) throw RangeError("tol_d must be positive");
        if (!(tol_e > 0.0)) throw RangeError("tol_e must be positive");
        if (outer_cap < 0) throw RangeError("outer_cap must be nonnegative");
    }
    estimator_kernel.validate();
}

namespace {

std::string point_to_string(const ParameterPoint& p) {
    std::ostringstream os;
    os << "[";
    for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << "]";
    return os.str();
}

// Shared mutable state of both loop variants.
struct LoopState {
    ParameterStore store;
    std::vector<SnapshotMatrix> snapshots;
    std::vector<PodSubspace> subspaces;
    FomOracle& fom;
    const ActiveLearnConfig& config;

    ActiveLearnTrace trace;
    double initial_d_max = 0.0;
    std::optional<double> final_estimator;
    bool converged = false;
    bool candidates_exhausted = false;
    int fom_queries = 0;
    int iter = 1;

    LoopState(ParameterStore s, std::vector<SnapshotMatrix> snaps, FomOracle& f,
              const ActiveLearnConfig& cfg)
        : store(std::move(s)), snapshots(std::move(snaps)), fom(f), config(cfg) {}

    void initialize() {
        if (store.training().empty() || snapshots.size() != store.training().size()) {
            throw InsufficientDataError(
                "active learning needs one initial snapshot per training point");
        }
        subspaces.reserve(snapshots.size());
        for (const auto& snap : snapshots) {
            subspaces.push_back(compute_pod(snap, config.energy_criterion));
        }
        store.rebuild_pairs();
        evaluate_uncached();
        initial_d_max = max_cached_distance();
    }

    void evaluate_uncached() {
        for (const IndexPair& pair : store.uncached_pairs()) {
            const double d = subspace_distance(subspaces[pair.first].basis,
                                               subspaces[pair.second].basis, config.measure);
            store.store_distance(pair, d);
        }
    }

    double max_cached_distance() const {
        double best = 0.0;
        for (const auto& [pair, d] : store.distance_cache()) best = std::max(best, d);
        return best;
    }

    // Farthest pair; ties resolved by the pair set's lexicographic order.
    IndexPair argmax_pair() const {
        IndexPair best{0, 0};
        double best_d = -std::numeric_limits<double>::infinity();
        for (const IndexPair& pair : store.pairs()) {
            const auto d = store.cached_distance(pair);
            if (d && *d > best_d) {
                best_d = *d;
                best = pair;
            }
        }
        return best;
    }

    bool candidates_left() const { return !store.candidates().empty(); }

    // One greedy step: select near the worst pair's midpoint, query the
    // FOM, build the subspace, refresh pairs and distances. Returns the
    // max pair distance after the commit.
    double take_sample(const IndexPair& worst) {
        const ParameterPoint sample = store.select_new_sample(worst);
        const ParameterPoint mu_a = store.training()[worst.first];
        const ParameterPoint mu_b = store.training()[worst.second];
        const int rank_a = subspaces[worst.first].rank;
        const int rank_b = subspaces[worst.second].rank;

        store.commit_sample(sample);
        SnapshotMatrix snap;
        try {
            snap = fom.query(sample);
        } catch (const std::exception& e) {
            throw FomError("FOM query failed at iteration " + std::to_string(iter) + ", mu = " +
                           point_to_string(sample) + ": " + e.what());
        }
        ++fom_queries;
        snapshots.push_back(snap);
        subspaces.push_back(compute_pod(snap, config.energy_criterion));

        evaluate_uncached();
        const double d_max = max_cached_distance();

        TraceRecord rec;
        rec.iter = iter;
        rec.selected = sample;
        rec.pair_a = mu_a;
        rec.pair_b = mu_b;
        rec.d_max = d_max;
        rec.rank_a = rank_a;
        rec.rank_b = rank_b;
        rec.rank_new = subspaces.back().rank;
        trace.records.push_back(std::move(rec));
        ++iter;
        return d_max;
    }

    ActiveLearnResult finish() {
        const double final_d_max = max_cached_distance();
        return ActiveLearnResult{std::move(store),    std::move(snapshots), std::move(subspaces),
                                 std::move(trace),    initial_d_max,        final_d_max,
                                 final_estimator,     converged,            candidates_exhausted,
                                 fom_queries};
    }
};

} // namespace

ActiveLearnResult run_variant_a(ParameterStore store,
                                std::vector<SnapshotMatrix> initial_snapshots, FomOracle& fom,
                                const ActiveLearnConfig& config) {
    config.validate();
    if (config.variant != ActiveLearnConfig::Variant::BudgetA) {
        throw RangeError("run_variant_a called with a non-budget configuration");
    }
    LoopState state(std::move(store), std::move(initial_snapshots), fom, config);
    state.initialize();

    while (state.iter <= config.max_query) {
        if (!state.candidates_left()) {
            state.candidates_exhausted = true;
            break;
        }
        state.take_sample(state.argmax_pair());
    }
    state.converged = state.fom_queries == config.max_query;
    return state.finish();
}

ActiveLearnResult run_variant_b(ParameterStore store,
                                std::vector<SnapshotMatrix> initial_snapshots, FomOracle& fom,
                                const ActiveLearnConfig& config) {
    config.validate();
    if (config.variant != ActiveLearnConfig::Variant::ToleranceB) {
        throw RangeError("run_variant_b called with a non-tolerance configuration");
    }
    LoopState state(std::move(store), std::move(initial_snapshots), fom, config);
    state.initialize();

    double d_max = state.initial_d_max;
    int outer_rounds = 0;
    while (true) {
        while (d_max > config.tol_d) {
            if (!state.candidates_left()) {
                state.candidates_exhausted = true;
                break;
            }
            d_max = state.take_sample(state.argmax_pair());
        }

        if (!state.candidates_left()) {
            // Nothing left to certify against; report a not-converged run.
            state.candidates_exhausted = true;
            state.converged = false;
            break;
        }

        const double estimate =
            estimate_rom_error(state.store.training(), state.store.candidates(),
                               state.snapshots, state.subspaces, config.estimator_kernel);
        state.final_estimator = estimate;
        if (!state.trace.records.empty()) {
            state.trace.records.back().estimator = estimate;
        }
        if (estimate <= config.tol_e) {
            state.converged = true;
            break;
        }
        ++outer_rounds;
        if (config.outer_cap > 0 && outer_rounds >= config.outer_cap) {
            state.converged = false;
            break;
        }
        // Re-arm the inner loop (the listing resets its sentinel above
        // tol_d here).
        d_max = std::numeric_limits<double>::infinity();
    }
    return state.finish();
}

double estimate_rom_error(const std::vector<ParameterPoint>& training,
                          const std::vector<ParameterPoint>& candidates,
                          const std::vector<SnapshotMatrix>& snapshots,
                          const std::vector<PodSubspace>& subspaces,
                          const RbfKernelSpec& kernel) {
    if (training.size() < 2) {
        throw InsufficientDataError("error estimator needs at least 2 training points");
    }
    if (candidates.empty()) {
        throw EstimatorError("error estimator has no candidate points to certify");
    }
    if (snapshots.size() != training.size() || subspaces.size() != training.size()) {
        throw DimensionError("error estimator inputs are not aligned with the training set");
    }

    // Row i = per-time-step relative POD projection errors at training
    // point i; the interpolant is vector-valued over the time grid.
    const Eigen::Index n_time = snapshots[0].values.cols();
    Eigen::MatrixXd eps(training.size(), n_time);
    for (std::size_t i = 0; i < training.size(); ++i) {
        if (snapshots[i].values.cols() != n_time) {
            throw IngestionError("snapshots disagree on the number of time steps");
        }
        eps.row(i) = pod_reconstruction_error(subspaces[i], snapshots[i]).transpose();
    }

    const RbfNetwork net = RbfNetwork::fit_interpolation(training, eps, kernel);
    double worst = 0.0;
    for (const ParameterPoint& mu : candidates) {
        worst = std::max(worst, net.evaluate(mu).cwiseAbs().maxCoeff());
    }
    return worst;
}

double error_estimator(const ParameterStore& store, const std::vector<SnapshotMatrix>& snapshots,
                       const std::vector<PodSubspace>& subspaces, const RbfKernelSpec& kernel) {
    return estimate_rom_error(store.training(), store.candidates(), snapshots, subspaces, kernel);
}

void write_trace_csv(const std::filesystem::path& path, const ActiveLearnResult& result) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");

    const Eigen::Index dim = result.store.param_dim();
    auto vec_header = [&](const std::string& stem) {
        std::string h;
        for (Eigen::Index d = 0; d < dim; ++d) {
            h += ",";
            h += stem;
            if (dim > 1) h += "_" + std::to_string(d);
        }
        return h;
    };
    os << "iter" << vec_header("mu") << vec_header("pair_a") << vec_header("pair_b")
       << ",d_max,rank_a,rank_b,rank_new,estimator\n";

    char buf[32];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const TraceRecord& rec : result.trace.records) {
        os << rec.iter;
        for (Eigen::Index d = 0; d < dim; ++d) os << "," << fmt(rec.selected[d]);
        for (Eigen::Index d = 0; d < dim; ++d) os << "," << fmt(rec.pair_a[d]);
        for (Eigen::Index d = 0; d < dim; ++d) os << "," << fmt(rec.pair_b[d]);
        os << "," << fmt(rec.d_max) << "," << rec.rank_a << "," << rec.rank_b << ","
           << rec.rank_new << "," << fmt(rec.estimator.value_or(100.0)) << "\n";
    }
    if (!os) throw IoError("write failed for " + path.string());
}

} // namespace sdal
