#include "sdal/rom_artifact.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <system_error>

#include "sdal/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "ROM artifact format assumes a little-endian host");

namespace sdal {

namespace {

constexpr char kMagic[4] = {'S', 'D', 'R', 'M'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kKindKsnn = 1;
constexpr std::uint32_t kKindPodNn = 2;

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("truncated ROM artifact");
    return v;
}

void put_vector(std::ostream& os, const Eigen::VectorXd& v) {
    put<std::uint64_t>(os, static_cast<std::uint64_t>(v.size()));
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(sizeof(double)) * v.size());
}

Eigen::VectorXd get_vector(std::istream& is) {
    const auto n = static_cast<Eigen::Index>(get<std::uint64_t>(is));
    Eigen::VectorXd v(n);
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(sizeof(double)) * n);
    if (!is) throw IoError("truncated ROM artifact");
    return v;
}

void put_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    put<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(sizeof(double)) * m.size());
}

Eigen::MatrixXd get_matrix(std::istream& is) {
    const auto rows = static_cast<Eigen::Index>(get<std::uint64_t>(is));
    const auto cols = static_cast<Eigen::Index>(get<std::uint64_t>(is));
    Eigen::MatrixXd m(rows, cols);
    is.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double)) * rows * cols);
    if (!is) throw IoError("truncated ROM artifact");
    return m;
}

void write_body(std::ostream& os, const RomArtifact& artifact) {
    os.write(kMagic, 4);
    put(os, kVersion);
    if (artifact.is_ksnn()) {
        const PodKsnnOffline& m = artifact.ksnn();
        put(os, kKindKsnn);
        put<double>(os, m.energy_criterion_online);
        put<std::uint64_t>(os, static_cast<std::uint64_t>(m.spatial_dim));
        put_vector(os, m.time_grid);
        put<std::uint32_t>(os, static_cast<std::uint32_t>(m.time_kernel.kind));
        put<double>(os, m.time_kernel.width);
        m.mu_net.save(os);
    } else {
        const PodNnModel& m = artifact.pod_nn();
        put(os, kKindPodNn);
        put<std::uint64_t>(os, static_cast<std::uint64_t>(m.param_dim));
        put_vector(os, m.time_grid);
        put_matrix(os, m.global.basis.columns());
        put_vector(os, m.global.singular_values);
        put<double>(os, m.global.energy_criterion);
        m.regressor.save(os);
    }
}

} // namespace

Eigen::Index RomArtifact::param_dim() const {
    return is_ksnn() ? ksnn().mu_net.input_dim() : pod_nn().param_dim;
}

const Eigen::VectorXd& RomArtifact::time_grid() const {
    return is_ksnn() ? ksnn().time_grid : pod_nn().time_grid;
}

void save_rom_artifact(const std::filesystem::path& path, const RomArtifact& artifact) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
        write_body(os, artifact);
        if (!os) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                      ec.message());
    }
}

RomArtifact load_rom_artifact(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != std::string(kMagic, 4)) {
        throw IoError(path.string() + ": not a ROM artifact (bad magic)");
    }
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion) {
        throw IoError(path.string() + ": unsupported artifact version " + std::to_string(version));
    }
    const auto kind = get<std::uint32_t>(is);
    if (kind == kKindKsnn) {
        PodKsnnOffline m;
        m.energy_criterion_online = get<double>(is);
        m.spatial_dim = static_cast<Eigen::Index>(get<std::uint64_t>(is));
        m.time_grid = get_vector(is);
        m.time_kernel.kind = static_cast<RbfKernel>(get<std::uint32_t>(is));
        m.time_kernel.width = get<double>(is);
        m.mu_net = RbfNetwork::load(is);
        return RomArtifact{std::move(m)};
    }
    if (kind == kKindPodNn) {
        const auto param_dim = static_cast<Eigen::Index>(get<std::uint64_t>(is));
        Eigen::VectorXd grid = get_vector(is);
        Eigen::MatrixXd basis = get_matrix(is);
        Eigen::VectorXd sigma = get_vector(is);
        const double eta = get<double>(is);
        ReducedRegressor regressor = ReducedRegressor::load(is);
        GlobalBasis global{OrthonormalBasis(std::move(basis)), std::move(sigma),
                           0, eta};
        global.rank = static_cast<int>(global.basis.subspace_dim());
        return RomArtifact{PodNnModel{std::move(global), std::move(regressor), std::move(grid),
                                      param_dim}};
    }
    throw IoError(path.string() + ": unknown ROM kind " + std::to_string(kind));
}

} // namespace sdal
