#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "sdal/errors.hpp"

namespace sdal {

/// Static kd-tree over a point set for exact k-nearest-neighbor queries.
///
/// Build and traversal order are fully deterministic: median splits break
/// coordinate ties by original point index, so identical inputs give
/// identical trees and identical neighbor orderings.
class KdTree {
public:
    explicit KdTree(std::vector<Eigen::VectorXd> points) : points_(std::move(points)) {
        if (points_.empty()) throw InsufficientDataError("kd-tree needs at least one point");
        dim_ = points_[0].size();
        for (const auto& p : points_) {
            if (p.size() != dim_) throw DimensionError("kd-tree points have mixed dimensions");
        }
        order_.resize(points_.size());
        for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
        nodes_.reserve(points_.size());
        root_ = build(0, points_.size(), 0);
    }

    /// Indices of the k nearest points to `query` by Euclidean distance,
    /// sorted by (distance, index). `exclude` omits one point (self-lookups).
    std::vector<std::size_t> nearest(const Eigen::VectorXd& query, std::size_t k,
                                     std::optional<std::size_t> exclude = std::nullopt) const {
        if (query.size() != dim_) throw DimensionError("kd-tree query dimension mismatch");
        std::vector<std::pair<double, std::size_t>> best; // max-heap by (dist2, index)
        search(root_, query, k, exclude, best);
        std::sort(best.begin(), best.end());
        std::vector<std::size_t> out;
        out.reserve(best.size());
        for (const auto& [d2, idx] : best) out.push_back(idx);
        return out;
    }

    std::size_t size() const { return points_.size(); }

private:
    struct Node {
        std::size_t point = 0;
        int axis = 0;
        int left = -1;
        int right = -1;
    };

    int build(std::size_t lo, std::size_t hi, int depth) {
        if (lo >= hi) return -1;
        const int axis = depth % static_cast<int>(dim_);
        const std::size_t mid = lo + (hi - lo) / 2;
        std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                         [&](std::size_t a, std::size_t b) {
                             if (points_[a][axis] != points_[b][axis])
                                 return points_[a][axis] < points_[b][axis];
                             return a < b;
                         });
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(Node{order_[mid], axis, -1, -1});
        nodes_[id].left = build(lo, mid, depth + 1);
        nodes_[id].right = build(mid + 1, hi, depth + 1);
        return id;
    }

    void search(int node_id, const Eigen::VectorXd& query, std::size_t k,
                std::optional<std::size_t> exclude,
                std::vector<std::pair<double, std::size_t>>& best) const {
        if (node_id < 0) return;
        const Node& node = nodes_[node_id];
        const Eigen::VectorXd& p = points_[node.point];

        if (!exclude || *exclude != node.point) {
            const double d2 = (p - query).squaredNorm();
            if (best.size() < k) {
                best.emplace_back(d2, node.point);
                std::push_heap(best.begin(), best.end());
            } else if (std::make_pair(d2, node.point) < best.front()) {
                std::pop_heap(best.begin(), best.end());
                best.back() = {d2, node.point};
                std::push_heap(best.begin(), best.end());
            }
        }

        const double delta = query[node.axis] - p[node.axis];
        const int near = delta < 0.0 ? node.left : node.right;
        const int far = delta < 0.0 ? node.right : node.left;
        search(near, query, k, exclude, best);
        const double worst = best.size() < k ? std::numeric_limits<double>::infinity()
                                             : best.front().first;
        if (delta * delta <= worst) {
            search(far, query, k, exclude, best);
        }
    }

    std::vector<Eigen::VectorXd> points_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
    Eigen::Index dim_ = 0;
    int root_ = -1;
};

} // namespace sdal
