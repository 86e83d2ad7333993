#pragma once

#include <filesystem>

#include "sdal/pod.hpp"

namespace sdal {

// Shared snapshot formats.
//
// CSV: first row is the time grid (header t_0,...,t_Nt), each subsequent
// row is one spatial DOF across time. Carries no parameter vector.
//
// Binary (.sdal): magic "SDAL", u32 version, u64 N, u64 N_t+1, u64 N_mu,
// parameter (f64 x N_mu), time grid (f64 x N_t+1), column-major f64
// payload; all little-endian.

void write_snapshot_csv(const std::filesystem::path& path, const SnapshotMatrix& snap);
SnapshotMatrix read_snapshot_csv(const std::filesystem::path& path);

void write_snapshot_binary(const std::filesystem::path& path, const SnapshotMatrix& snap);
SnapshotMatrix read_snapshot_binary(const std::filesystem::path& path);

/// Dispatches on extension: ".csv" for text, anything else binary.
void write_snapshot(const std::filesystem::path& path, const SnapshotMatrix& snap);
SnapshotMatrix read_snapshot(const std::filesystem::path& path);

} // namespace sdal
