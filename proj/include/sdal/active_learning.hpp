#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "sdal/fom.hpp"
#include "sdal/param_space.hpp"
#include "sdal/pod.hpp"
#include "sdal/rbf.hpp"
#include "sdal/subspace.hpp"

namespace sdal {

struct ActiveLearnConfig {
    enum class Variant { BudgetA, ToleranceB };

    Variant variant = Variant::ToleranceB;
    SubspaceMeasure measure = SubspaceMeasure::D2hat;
    double energy_criterion = 1e-6;

    int max_query = 0; // Variant A: FOM queries beyond the initial set

    double tol_d = 0.0; // Variant B: subspace distance tolerance
    double tol_e = 0.0; // Variant B: estimated ROM error tolerance
    /// Safety cap on outer (estimator) rounds in Variant B; the listing can
    /// cycle if the estimate stagnates above tol_e. 0 disables the cap.
    int outer_cap = 100;

    RbfKernelSpec estimator_kernel{RbfKernel::Multiquadric, 1e-3};

    void validate() const;
};

/// One active-learning iteration: which sample was taken, which pair drove
/// it, the max pair distance after the commit, and the subspace ranks of
/// the driving pair and of the new sample.
struct TraceRecord {
    int iter = 0;
    ParameterPoint selected;
    ParameterPoint pair_a;
    ParameterPoint pair_b;
    double d_max = 0.0;
    int rank_a = 0;
    int rank_b = 0;
    int rank_new = 0;
    /// Estimator value when it was evaluated right after this iteration.
    std::optional<double> estimator;
};

struct ActiveLearnTrace {
    std::vector<TraceRecord> records;
};

struct ActiveLearnResult {
    ParameterStore store;
    std::vector<SnapshotMatrix> snapshots; // aligned with store.training()
    std::vector<PodSubspace> subspaces;    // aligned with store.training()
    ActiveLearnTrace trace;
    double initial_d_max = 0.0;
    double final_d_max = 0.0;
    std::optional<double> final_estimator;
    bool converged = false;
    bool candidates_exhausted = false;
    int fom_queries = 0;
};

/// Budget-driven loop: greedily bisect the farthest neighboring subspace
/// pair until exactly max_query FOM queries were spent or the candidates
/// run out (clean early stop, flagged in the result).
ActiveLearnResult run_variant_a(ParameterStore store,
                                std::vector<SnapshotMatrix> initial_snapshots, FomOracle& fom,
                                const ActiveLearnConfig& config);

/// Tolerance-driven loop: the inner loop adds samples while the max pair
/// distance exceeds tol_d; the outer loop then checks the estimated ROM
/// error and re-enters until it drops to tol_e. Candidate exhaustion ends
/// the run with converged = false.
ActiveLearnResult run_variant_b(ParameterStore store,
                                std::vector<SnapshotMatrix> initial_snapshots, FomOracle& fom,
                                const ActiveLearnConfig& config);

/// Max over candidate points of the time-sup of an RBF interpolant fitted
/// to the per-time-step relative POD projection errors at the training
/// points. Needs at least 2 training points and a nonempty candidate set.
double estimate_rom_error(const std::vector<ParameterPoint>& training,
                          const std::vector<ParameterPoint>& candidates,
                          const std::vector<SnapshotMatrix>& snapshots,
                          const std::vector<PodSubspace>& subspaces,
                          const RbfKernelSpec& kernel);

double error_estimator(const ParameterStore& store, const std::vector<SnapshotMatrix>& snapshots,
                       const std::vector<PodSubspace>& subspaces, const RbfKernelSpec& kernel);

/// Trace CSV: iter, selected mu, driving pair, d_max, pair/new ranks and
/// the estimator column (the sentinel 100 marks rows without an estimator
/// evaluation, mirroring the loop's initialization convention).
void write_trace_csv(const std::filesystem::path& path, const ActiveLearnResult& result);

} // namespace sdal
