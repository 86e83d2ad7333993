#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "sdal/errors.hpp"
#include "sdal/snapshot_io.hpp"
#include "test_support.hpp"

using namespace sdal;

namespace {

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "sdal_io_test";
    std::filesystem::create_directories(dir);
    return dir;
}

SnapshotMatrix random_snapshot(std::mt19937_64& rng, Eigen::Index n, Eigen::Index cols) {
    SnapshotMatrix snap;
    snap.values = test::random_matrix(rng, n, cols);
    snap.time_grid.setLinSpaced(cols, 0.0, 1.0);
    snap.parameter = test::random_matrix(rng, 2, 1);
    return snap;
}

} // namespace

TEST_CASE("binary round-trip is bit exact") {
    std::mt19937_64 rng(29);
    const auto path = temp_dir() / "snap.sdal";
    for (int trial = 0; trial < 5; ++trial) {
        const SnapshotMatrix snap = random_snapshot(rng, 4 + trial, 3 + trial);
        write_snapshot_binary(path, snap);
        const SnapshotMatrix back = read_snapshot_binary(path);
        CHECK(back.values == snap.values);
        CHECK(back.time_grid == snap.time_grid);
        CHECK(back.parameter == snap.parameter);
    }
}

TEST_CASE("csv round-trip preserves doubles exactly") {
    std::mt19937_64 rng(31);
    const auto path = temp_dir() / "snap.csv";
    const SnapshotMatrix snap = random_snapshot(rng, 7, 5);
    write_snapshot_csv(path, snap);
    const SnapshotMatrix back = read_snapshot_csv(path);
    CHECK(back.values == snap.values);
    CHECK(back.time_grid == snap.time_grid);
    CHECK(back.parameter.size() == 0); // the CSV layout carries no parameter
}

TEST_CASE("extension dispatch") {
    std::mt19937_64 rng(37);
    const SnapshotMatrix snap = random_snapshot(rng, 3, 4);
    const auto bin = temp_dir() / "auto.sdal";
    const auto csv = temp_dir() / "auto.csv";
    write_snapshot(bin, snap);
    write_snapshot(csv, snap);
    CHECK(read_snapshot(bin).values == snap.values);
    CHECK(read_snapshot(csv).values == snap.values);
}

TEST_CASE("io error paths") {
    CHECK_THROWS_AS(read_snapshot_binary(temp_dir() / "missing.sdal"), IoError);

    const auto bad = temp_dir() / "bad.sdal";
    {
        std::ofstream os(bad, std::ios::binary);
        os << "NOPE";
    }
    CHECK_THROWS_AS(read_snapshot_binary(bad), IoError);

    const auto ragged = temp_dir() / "ragged.csv";
    {
        std::ofstream os(ragged);
        os << "0,0.5,1\n1,2,3\n4,5\n";
    }
    CHECK_THROWS_AS(read_snapshot_csv(ragged), IoError);

    const auto text = temp_dir() / "text.csv";
    {
        std::ofstream os(text);
        os << "0,0.5\nhello,2\n";
    }
    CHECK_THROWS_AS(read_snapshot_csv(text), IoError);

    // Truncated payload.
    std::mt19937_64 rng(41);
    const auto trunc = temp_dir() / "trunc.sdal";
    write_snapshot_binary(trunc, random_snapshot(rng, 6, 6));
    const auto size = std::filesystem::file_size(trunc);
    std::filesystem::resize_file(trunc, size - 16);
    CHECK_THROWS_AS(read_snapshot_binary(trunc), IoError);
}
