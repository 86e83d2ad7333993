#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace sdal {

using ParameterPoint = Eigen::VectorXd;

/// Unordered pair of training indices, stored normalized (first < second).
using IndexPair = std::pair<std::size_t, std::size_t>;

IndexPair make_pair_key(std::size_t a, std::size_t b);

bool points_equal(const ParameterPoint& a, const ParameterPoint& b);

struct StoreOptions {
    /// Neighbors per point when the parameter dimension exceeds 1; a 1-D
    /// parameter space always uses the consecutive sorted chain.
    int knn = 2;
    /// Compute neighbor/midpoint geometry on coordinates affinely rescaled
    /// per-dimension to [0,1] over the initial training+candidate bounding
    /// box. Off by default (raw coordinates).
    bool unit_rescale = false;
};

/// Training set P, candidate set P*, neighbor index-pair set and the
/// per-pair distance cache that drives active learning.
///
/// Training points keep their insertion index for life, so committing a
/// candidate never invalidates surviving pairs or cache entries.
class ParameterStore {
public:
    ParameterStore(std::vector<ParameterPoint> training, std::vector<ParameterPoint> candidates,
                   StoreOptions options = {});

    const std::vector<ParameterPoint>& training() const { return training_; }
    const std::vector<ParameterPoint>& candidates() const { return candidates_; }
    const std::set<IndexPair>& pairs() const { return pairs_; }
    const StoreOptions& options() const { return options_; }
    Eigen::Index param_dim() const { return dim_; }

    /// Recomputes the neighbor pair set: consecutive sorted chain for 1-D
    /// parameters (exactly m-1 pairs), k-nearest-neighbor pairs via kd-tree
    /// otherwise. Drops cache entries whose pair disappeared. Throws
    /// InsufficientDataError with fewer than 2 training points.
    void rebuild_pairs();

    /// Candidate closest to the midpoint of the worst pair; ties go to the
    /// lowest candidate index. Does not mutate the store. Throws
    /// CandidatesExhaustedError when no candidates remain.
    ParameterPoint select_new_sample(const IndexPair& worst_pair) const;

    struct CommitResult {
        std::size_t new_training_index = 0;
        /// Pairs present after the rebuild with no cached distance yet.
        std::vector<IndexPair> pairs_to_evaluate;
        std::size_t retained_cache_entries = 0;
    };

    /// Moves `sample` from candidates to training (it must be a current
    /// candidate, else ConsistencyError), rebuilds pairs, prunes the cache
    /// and reports which pairs need fresh distance evaluations.
    CommitResult commit_sample(const ParameterPoint& sample);

    std::optional<double> cached_distance(const IndexPair& pair) const;
    void store_distance(const IndexPair& pair, double value);
    const std::map<IndexPair, double>& distance_cache() const { return cache_; }

    /// Pairs currently lacking a cached distance.
    std::vector<IndexPair> uncached_pairs() const;

private:
    Eigen::VectorXd rescaled(const ParameterPoint& p) const;

    std::vector<ParameterPoint> training_;
    std::vector<ParameterPoint> candidates_;
    std::set<IndexPair> pairs_;
    std::map<IndexPair, double> cache_;
    StoreOptions options_;
    Eigen::Index dim_ = 0;
    Eigen::VectorXd scale_low_;
    Eigen::VectorXd scale_span_;
};

// Point-set file and generator helpers (one point per CSV row).
std::vector<ParameterPoint> load_points_csv(const std::filesystem::path& path);
void write_points_csv(const std::filesystem::path& path,
                      const std::vector<ParameterPoint>& points);

std::vector<ParameterPoint> linspace_points(double lo, double hi, int count);
/// Log-spaced values between lo and hi (both positive).
std::vector<ParameterPoint> logspace_points(double lo, double hi, int count);
/// Latin hypercube over per-dimension bounds with a fixed seed.
std::vector<ParameterPoint> latin_hypercube(const std::vector<std::pair<double, double>>& bounds,
                                            int count, std::uint64_t seed);

} // namespace sdal
