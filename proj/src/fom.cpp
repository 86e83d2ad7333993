#include "sdal/fom.hpp"

#include <sstream>

#include "sdal/errors.hpp"

namespace sdal {

SnapshotArchiveFom::SnapshotArchiveFom(std::vector<SnapshotMatrix> snapshots)
    : snapshots_(std::move(snapshots)) {
    if (snapshots_.empty()) throw InsufficientDataError("snapshot archive is empty");
    for (const auto& snap : snapshots_) {
        snap.validate();
        if (snap.parameter.size() == 0) {
            throw IngestionError("archive snapshot carries no parameter vector");
        }
    }
}

SnapshotMatrix SnapshotArchiveFom::query(const ParameterPoint& mu) {
    for (const auto& snap : snapshots_) {
        if (snap.parameter.size() != mu.size()) continue;
        const double scale = std::max(mu.norm(), 1.0);
        if ((snap.parameter - mu).norm() <= 1e-12 * scale) {
            return snap;
        }
    }
    std::ostringstream os;
    os << "no archived snapshot for parameter [";
    for (Eigen::Index i = 0; i < mu.size(); ++i) os << (i ? ", " : "") << mu[i];
    os << "]";
    throw FomError(os.str());
}

} // namespace sdal
