#include "sdal/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "sdal/errors.hpp"
#include "sdal/kdtree.hpp"

namespace sdal {

IndexPair make_pair_key(std::size_t a, std::size_t b) {
    return a < b ? IndexPair{a, b} : IndexPair{b, a};
}

bool points_equal(const ParameterPoint& a, const ParameterPoint& b) {
    return a.size() == b.size() && (a.array() == b.array()).all();
}

namespace {

void check_point(const ParameterPoint& p, Eigen::Index dim, const char* role) {
    if (p.size() == 0) throw DimensionError(std::string(role) + " point has zero dimension");
    if (p.size() != dim) {
        throw DimensionError(std::string(role) + " point dimension " + std::to_string(p.size()) +
                             " does not match store dimension " + std::to_string(dim));
    }
    if (!p.allFinite()) throw DegenerateInputError(std::string(role) + " point has non-finite entries");
}

} // namespace

ParameterStore::ParameterStore(std::vector<ParameterPoint> training,
                               std::vector<ParameterPoint> candidates, StoreOptions options)
    : training_(std::move(training)), candidates_(std::move(candidates)), options_(options) {
    if (training_.empty()) throw InsufficientDataError("training set is empty");
    if (options_.knn < 1) throw RangeError("knn must be at least 1");
    dim_ = training_[0].size();
    for (const auto& p : training_) check_point(p, dim_, "training");
    for (const auto& p : candidates_) check_point(p, dim_, "candidate");

    for (std::size_t i = 0; i < training_.size(); ++i) {
        for (std::size_t j = i + 1; j < training_.size(); ++j) {
            if (points_equal(training_[i], training_[j])) {
                throw ConsistencyError("duplicate training point at indices " + std::to_string(i) +
                                       " and " + std::to_string(j));
            }
        }
    }
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
        for (std::size_t j = i + 1; j < candidates_.size(); ++j) {
            if (points_equal(candidates_[i], candidates_[j])) {
                throw ConsistencyError("duplicate candidate point at indices " +
                                       std::to_string(i) + " and " + std::to_string(j));
            }
        }
        for (const auto& t : training_) {
            if (points_equal(candidates_[i], t)) {
                throw ConsistencyError("candidate " + std::to_string(i) +
                                       " coincides with a training point");
            }
        }
    }

    // Rescale box frozen over the initial union so that committed samples
    // do not change the geometry used for later selections.
    scale_low_ = Eigen::VectorXd::Constant(dim_, std::numeric_limits<double>::infinity());
    Eigen::VectorXd high = Eigen::VectorXd::Constant(dim_, -std::numeric_limits<double>::infinity());
    for (const auto& p : training_) {
        scale_low_ = scale_low_.cwiseMin(p);
        high = high.cwiseMax(p);
    }
    for (const auto& p : candidates_) {
        scale_low_ = scale_low_.cwiseMin(p);
        high = high.cwiseMax(p);
    }
    scale_span_ = (high - scale_low_).cwiseMax(1e-300);
}

Eigen::VectorXd ParameterStore::rescaled(const ParameterPoint& p) const {
    if (!options_.unit_rescale) return p;
    return (p - scale_low_).cwiseQuotient(scale_span_);
}

void ParameterStore::rebuild_pairs() {
    if (training_.size() < 2) {
        throw InsufficientDataError("neighbor pairs need at least 2 training points, have " +
                                    std::to_string(training_.size()));
    }
    pairs_.clear();
    if (dim_ == 1) {
        std::vector<std::size_t> order(training_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return training_[a][0] < training_[b][0];
        });
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            pairs_.insert(make_pair_key(order[i], order[i + 1]));
        }
    } else {
        std::vector<Eigen::VectorXd> scaled;
        scaled.reserve(training_.size());
        for (const auto& p : training_) scaled.push_back(rescaled(p));
        KdTree tree(scaled);
        const std::size_t k = std::min<std::size_t>(options_.knn, training_.size() - 1);
        for (std::size_t i = 0; i < training_.size(); ++i) {
            for (std::size_t j : tree.nearest(scaled[i], k, i)) {
                pairs_.insert(make_pair_key(i, j));
            }
        }
    }
    // Cache keys must stay a subset of the pair set.
    for (auto it = cache_.begin(); it != cache_.end();) {
        it = pairs_.count(it->first) ? std::next(it) : cache_.erase(it);
    }
}

ParameterPoint ParameterStore::select_new_sample(const IndexPair& worst_pair) const {
    if (candidates_.empty()) {
        throw CandidatesExhaustedError("candidate set is empty; active learning must stop");
    }
    if (worst_pair.first >= training_.size() || worst_pair.second >= training_.size()) {
        throw IndexError("worst pair references an invalid training index");
    }
    const Eigen::VectorXd mid =
        rescaled(0.5 * (training_[worst_pair.first] + training_[worst_pair.second]));
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < candidates_.size(); ++j) {
        const double d = (rescaled(candidates_[j]) - mid).squaredNorm();
        if (d < best_dist) {
            best_dist = d;
            best = j;
        }
    }
    return candidates_[best];
}

ParameterStore::CommitResult ParameterStore::commit_sample(const ParameterPoint& sample) {
    check_point(sample, dim_, "committed");
    auto it = std::find_if(candidates_.begin(), candidates_.end(),
                           [&](const ParameterPoint& c) { return points_equal(c, sample); });
    if (it == candidates_.end()) {
        throw ConsistencyError("committed sample is not a current candidate");
    }
    candidates_.erase(it);
    training_.push_back(sample);

    rebuild_pairs();

    CommitResult result;
    result.new_training_index = training_.size() - 1;
    result.retained_cache_entries = cache_.size();
    result.pairs_to_evaluate = uncached_pairs();
    return result;
}

std::optional<double> ParameterStore::cached_distance(const IndexPair& pair) const {
    auto it = cache_.find(pair);
    if (it == cache_.end()) return std::nullopt;
    return it->second;
}

void ParameterStore::store_distance(const IndexPair& pair, double value) {
    if (!pairs_.count(pair)) {
        throw ConsistencyError("cannot cache a distance for a pair outside the pair set");
    }
    cache_[pair] = value;
}

std::vector<IndexPair> ParameterStore::uncached_pairs() const {
    std::vector<IndexPair> out;
    for (const auto& p : pairs_) {
        if (!cache_.count(p)) out.push_back(p);
    }
    return out;
}

std::vector<ParameterPoint> load_points_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    std::vector<ParameterPoint> points;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> coords;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                coords.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw IoError(path.string() + ":" + std::to_string(lineno) +
                              ": cannot parse '" + cell + "' as a number");
            }
        }
        points.push_back(Eigen::Map<const Eigen::VectorXd>(coords.data(), coords.size()));
    }
    if (points.empty()) throw IoError(path.string() + ": no parameter points");
    return points;
}

void write_points_csv(const std::filesystem::path& path,
                      const std::vector<ParameterPoint>& points) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    char buf[32];
    for (const auto& p : points) {
        for (Eigen::Index j = 0; j < p.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", p[j]);
            os << (j ? "," : "") << buf;
        }
        os << "\n";
    }
    if (!os) throw IoError("write failed for " + path.string());
}

std::vector<ParameterPoint> linspace_points(double lo, double hi, int count) {
    if (count < 1) throw RangeError("point count must be positive");
    if (count == 1) return {Eigen::VectorXd::Constant(1, lo)};
    std::vector<ParameterPoint> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / (count - 1);
        out.push_back(Eigen::VectorXd::Constant(1, lo + t * (hi - lo)));
    }
    return out;
}

std::vector<ParameterPoint> logspace_points(double lo, double hi, int count) {
    if (!(lo > 0.0 && hi > 0.0)) throw RangeError("log spacing requires positive bounds");
    auto exponents = linspace_points(std::log10(lo), std::log10(hi), count);
    for (auto& p : exponents) p[0] = std::pow(10.0, p[0]);
    return exponents;
}

std::vector<ParameterPoint> latin_hypercube(const std::vector<std::pair<double, double>>& bounds,
                                            int count, std::uint64_t seed) {
    if (bounds.empty()) throw RangeError("latin hypercube needs at least one dimension");
    if (count < 1) throw RangeError("point count must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto dims = static_cast<Eigen::Index>(bounds.size());

    std::vector<ParameterPoint> out(count, Eigen::VectorXd::Zero(dims));
    std::vector<int> strata(count);
    for (Eigen::Index d = 0; d < dims; ++d) {
        for (int i = 0; i < count; ++i) strata[i] = i;
        std::shuffle(strata.begin(), strata.end(), rng);
        const auto [lo, hi] = bounds[d];
        for (int i = 0; i < count; ++i) {
            const double u = (strata[i] + unit(rng)) / count;
            out[i][d] = lo + u * (hi - lo);
        }
    }
    return out;
}

} // namespace sdal
