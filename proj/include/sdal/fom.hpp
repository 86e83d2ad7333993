#pragma once

#include <vector>

#include "sdal/param_space.hpp"
#include "sdal/pod.hpp"

namespace sdal {

/// Source of high-fidelity snapshots. Implementations include the bundled
/// Burgers solver and archives of precomputed snapshot files; external
/// solvers plug in the same way.
class FomOracle {
public:
    virtual ~FomOracle() = default;
    virtual SnapshotMatrix query(const ParameterPoint& mu) = 0;
};

/// Serves precomputed snapshots, matching the query parameter against the
/// parameters embedded in the stored files.
class SnapshotArchiveFom final : public FomOracle {
public:
    explicit SnapshotArchiveFom(std::vector<SnapshotMatrix> snapshots);

    SnapshotMatrix query(const ParameterPoint& mu) override;

    std::size_t size() const { return snapshots_.size(); }

private:
    std::vector<SnapshotMatrix> snapshots_;
};

} // namespace sdal
