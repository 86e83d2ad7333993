#include "sdal/snapshot_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sdal/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot binary format assumes a little-endian host");

namespace sdal {

namespace {

constexpr char kMagic[4] = {'S', 'D', 'A', 'L'};
constexpr std::uint32_t kVersion = 1;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_csv_row(const std::string& line, const std::filesystem::path& path,
                                  std::size_t lineno) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(cell, &pos));
        } catch (const std::exception&) {
            throw IoError(path.string() + ":" + std::to_string(lineno) +
                          ": cannot parse '" + cell + "' as a number");
        }
    }
    return out;
}

template <typename T>
void write_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is, const std::filesystem::path& path) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError(path.string() + ": truncated snapshot file");
    return v;
}

} // namespace

void write_snapshot_csv(const std::filesystem::path& path, const SnapshotMatrix& snap) {
    snap.validate();
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    for (Eigen::Index j = 0; j < snap.time_grid.size(); ++j) {
        os << (j ? "," : "") << format_double(snap.time_grid[j]);
    }
    os << "\n";
    for (Eigen::Index i = 0; i < snap.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < snap.values.cols(); ++j) {
            os << (j ? "," : "") << format_double(snap.values(i, j));
        }
        os << "\n";
    }
    if (!os) throw IoError("write failed for " + path.string());
}

SnapshotMatrix read_snapshot_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw IoError(path.string() + ": empty snapshot file");
    const std::vector<double> grid = parse_csv_row(line, path, 1);

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        rows.push_back(parse_csv_row(line, path, lineno));
        if (rows.back().size() != grid.size()) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(grid.size()) + " columns, got " +
                          std::to_string(rows.back().size()));
        }
    }
    if (rows.empty()) throw IoError(path.string() + ": no DOF rows after the header");

    SnapshotMatrix snap;
    snap.time_grid = Eigen::Map<const Eigen::VectorXd>(grid.data(), grid.size());
    snap.values.resize(rows.size(), grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        snap.values.row(i) = Eigen::Map<const Eigen::RowVectorXd>(rows[i].data(), rows[i].size());
    }
    snap.validate();
    return snap;
}

void write_snapshot_binary(const std::filesystem::path& path, const SnapshotMatrix& snap) {
    snap.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write(kMagic, 4);
    write_raw(os, kVersion);
    write_raw(os, static_cast<std::uint64_t>(snap.values.rows()));
    write_raw(os, static_cast<std::uint64_t>(snap.values.cols()));
    write_raw(os, static_cast<std::uint64_t>(snap.parameter.size()));
    os.write(reinterpret_cast<const char*>(snap.parameter.data()),
             static_cast<std::streamsize>(sizeof(double)) * snap.parameter.size());
    os.write(reinterpret_cast<const char*>(snap.time_grid.data()),
             static_cast<std::streamsize>(sizeof(double)) * snap.time_grid.size());
    os.write(reinterpret_cast<const char*>(snap.values.data()),
             static_cast<std::streamsize>(sizeof(double)) * snap.values.size());
    if (!os) throw IoError("write failed for " + path.string());
}

SnapshotMatrix read_snapshot_binary(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != std::string(kMagic, 4)) {
        throw IoError(path.string() + ": not a snapshot file (bad magic)");
    }
    const auto version = read_raw<std::uint32_t>(is, path);
    if (version != kVersion) {
        throw IoError(path.string() + ": unsupported snapshot version " + std::to_string(version));
    }
    const auto n = read_raw<std::uint64_t>(is, path);
    const auto cols = read_raw<std::uint64_t>(is, path);
    const auto n_mu = read_raw<std::uint64_t>(is, path);

    SnapshotMatrix snap;
    snap.parameter.resize(static_cast<Eigen::Index>(n_mu));
    snap.time_grid.resize(static_cast<Eigen::Index>(cols));
    snap.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
    is.read(reinterpret_cast<char*>(snap.parameter.data()),
            static_cast<std::streamsize>(sizeof(double) * n_mu));
    is.read(reinterpret_cast<char*>(snap.time_grid.data()),
            static_cast<std::streamsize>(sizeof(double) * cols));
    is.read(reinterpret_cast<char*>(snap.values.data()),
            static_cast<std::streamsize>(sizeof(double) * n * cols));
    if (!is) throw IoError(path.string() + ": truncated snapshot file");
    snap.validate();
    return snap;
}

void write_snapshot(const std::filesystem::path& path, const SnapshotMatrix& snap) {
    if (path.extension() == ".csv") {
        write_snapshot_csv(path, snap);
    } else {
        write_snapshot_binary(path, snap);
    }
}

SnapshotMatrix read_snapshot(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? read_snapshot_csv(path) : read_snapshot_binary(path);
}

} // namespace sdal
