#include "sdal/cli_commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include "sdal/active_learning.hpp"
#include "sdal/burgers.hpp"
#include "sdal/errors.hpp"
#include "sdal/rom_artifact.hpp"
#include "sdal/run_config.hpp"
#include "sdal/snapshot_io.hpp"

namespace sdal {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::unique_ptr<FomOracle> make_fom(const LearnRunConfig& cfg) {
    if (cfg.fom == LearnRunConfig::FomKind::Burgers) {
        return std::make_unique<BurgersFom>(cfg.burgers, cfg.log10_param);
    }
    std::vector<SnapshotMatrix> snaps;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(cfg.archive_dir)) {
        if (entry.path().extension() == ".sdal" || entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) snaps.push_back(read_snapshot(f));
    return std::make_unique<SnapshotArchiveFom>(std::move(snaps));
}

std::string snapshot_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%05zu.sdal", index);
    return buf;
}

struct LearnOutputs {
    std::vector<ParameterPoint> training;
    std::vector<SnapshotMatrix> snapshots;
};

LearnOutputs load_learn_dir(const std::filesystem::path& dir) {
    LearnOutputs out;
    out.training = load_points_csv(dir / "parameters.csv");
    for (std::size_t i = 0; i < out.training.size(); ++i) {
        out.snapshots.push_back(read_snapshot_binary(dir / "snapshots" / snapshot_name(i)));
    }
    return out;
}

// Solution CSV in the shared layout (header = times, one DOF per row) but
// without the snapshot-grid constraints, since query times are arbitrary.
void write_solution_csv(const std::filesystem::path& path, const std::vector<double>& times,
                        const Eigen::MatrixXd& columns) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    for (std::size_t j = 0; j < times.size(); ++j) os << (j ? "," : "") << fmt(times[j]);
    os << "\n";
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
        for (Eigen::Index j = 0; j < columns.cols(); ++j) {
            os << (j ? "," : "") << fmt(columns(i, j));
        }
        os << "\n";
    }
    if (!os) throw IoError("write failed for " + path.string());
}

int run_guarded(std::ostream& log, const char* what, const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ConfigError& e) {
        log << what << ": config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        log << what << ": error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int cmd_learn(const std::filesystem::path& config_path, std::ostream& log) {
    return run_guarded(log, "learn", [&] {
        const LearnRunConfig cfg = load_learn_config(config_path);
        std::unique_ptr<FomOracle> fom = make_fom(cfg);

        ParameterStore store(cfg.training, cfg.candidates, cfg.store);
        std::vector<SnapshotMatrix> initial;
        initial.reserve(cfg.training.size());
        for (const auto& mu : cfg.training) initial.push_back(fom->query(mu));

        const ActiveLearnResult result =
            cfg.learn.variant == ActiveLearnConfig::Variant::BudgetA
                ? run_variant_a(std::move(store), std::move(initial), *fom, cfg.learn)
                : run_variant_b(std::move(store), std::move(initial), *fom, cfg.learn);

        std::filesystem::create_directories(cfg.output_dir / "snapshots");
        write_points_csv(cfg.output_dir / "parameters.csv", result.store.training());
        for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
            SnapshotMatrix snap = result.snapshots[i];
            snap.parameter = result.store.training()[i];
            write_snapshot_binary(cfg.output_dir / "snapshots" / snapshot_name(i), snap);
        }
        write_trace_csv(cfg.output_dir / "trace.csv", result);

        std::ofstream summary(cfg.output_dir / "summary.txt");
        if (!summary) throw IoError("cannot write summary.txt");
        summary << "variant = "
                << (cfg.learn.variant == ActiveLearnConfig::Variant::BudgetA ? "A" : "B") << "\n"
                << "measure = "
                << (cfg.learn.measure == SubspaceMeasure::D1 ? "D1" : "D2hat") << "\n"
                << "energy_criterion = " << fmt(cfg.learn.energy_criterion) << "\n"
                << "initial_training = " << cfg.training.size() << "\n"
                << "selected_count = " << result.trace.records.size() << "\n"
                << "fom_queries = " << result.fom_queries << "\n"
                << "initial_d_max = " << fmt(result.initial_d_max) << "\n"
                << "final_d_max = " << fmt(result.final_d_max) << "\n"
                << "final_estimator = "
                << (result.final_estimator ? fmt(*result.final_estimator) : "none") << "\n"
                << "converged = " << (result.converged ? "true" : "false") << "\n"
                << "candidates_exhausted = " << (result.candidates_exhausted ? "true" : "false")
                << "\n";

        log << "learn: " << result.fom_queries << " FOM queries, final d_max "
            << fmt(result.final_d_max) << ", outputs in " << cfg.output_dir.string() << "\n";
    });
}

int cmd_rom_build(const std::filesystem::path& config_path, std::ostream& log) {
    return run_guarded(log, "rom build", [&] {
        const RomBuildConfig cfg = load_rom_build_config(config_path);
        const LearnOutputs data = load_learn_dir(cfg.learn_dir);

        RomArtifact artifact{PodKsnnOffline{}};
        if (cfg.kind == RomBuildConfig::Kind::PodKsnn) {
            artifact.model = pod_ksnn_offline_build(data.training, data.snapshots, cfg.kernel,
                                                    cfg.time_kernel, cfg.eta_hat);
        } else {
            std::vector<PodSubspace> subspaces;
            subspaces.reserve(data.snapshots.size());
            for (const auto& snap : data.snapshots) subspaces.push_back(compute_pod(snap, cfg.eta));
            GlobalBasis global = build_global_basis(subspaces, cfg.eta_global);
            const std::vector<Eigen::MatrixXd> reduced = reduce_training(global, data.snapshots);
            const RegressionData reg_data =
                make_regression_data(data.training, data.snapshots[0].time_grid, reduced);
            ReducedRegressor regressor = ReducedRegressor::fit(
                reg_data.inputs, reg_data.targets, cfg.regressor, cfg.regressor_params);
            artifact.model = PodNnModel{std::move(global), std::move(regressor),
                                        data.snapshots[0].time_grid,
                                        static_cast<Eigen::Index>(data.training[0].size())};
        }

        if (cfg.artifact.has_parent_path()) {
            std::filesystem::create_directories(cfg.artifact.parent_path());
        }
        save_rom_artifact(cfg.artifact, artifact);
        log << "rom build: wrote " << cfg.artifact.string() << "\n";
    });
}

int cmd_rom_query(const RomQueryArgs& args, std::ostream& log) {
    return run_guarded(log, "rom query", [&] {
        const RomArtifact artifact = load_rom_artifact(args.artifact);
        if (static_cast<Eigen::Index>(args.mu.size()) != artifact.param_dim()) {
            throw DimensionError("artifact expects a parameter of dimension " +
                                 std::to_string(artifact.param_dim()) + ", got " +
                                 std::to_string(args.mu.size()));
        }
        const ParameterPoint mu =
            Eigen::Map<const Eigen::VectorXd>(args.mu.data(), args.mu.size());

        std::vector<double> times = args.times;
        if (times.empty()) {
            times.assign(artifact.time_grid().begin(), artifact.time_grid().end());
        }

        const auto start = std::chrono::steady_clock::now();
        Eigen::MatrixXd solutions;
        if (artifact.is_ksnn()) {
            PodKsnnQueryOptions opts{args.allow_extrapolation};
            auto [first, online] = pod_ksnn_online_query(artifact.ksnn(), mu, times[0], opts);
            solutions.resize(first.size(), times.size());
            solutions.col(0) = first;
            for (std::size_t j = 1; j < times.size(); ++j) {
                solutions.col(j) = pod_ksnn_evaluate(artifact.ksnn(), online, times[j], opts);
            }
        } else {
            const PodNnModel& m = artifact.pod_nn();
            solutions.resize(m.global.basis.ambient_dim(), times.size());
            for (std::size_t j = 0; j < times.size(); ++j) {
                solutions.col(j) = pod_nn_online_query(m.global, m.regressor, times[j], mu);
            }
        }
        const double rom_seconds = seconds_since(start);

        std::filesystem::create_directories(args.output_dir);
        if (args.format == "binary") {
            SnapshotMatrix snap;
            snap.values = solutions;
            snap.parameter = mu;
            snap.time_grid = Eigen::Map<const Eigen::VectorXd>(times.data(), times.size());
            write_snapshot_binary(args.output_dir / "solution.sdal", snap);
        } else if (args.format == "csv") {
            write_solution_csv(args.output_dir / "solution.csv", times, solutions);
        } else {
            throw ConfigError("format must be csv or binary, got '" + args.format + "'");
        }

        // Reference: explicit file wins; otherwise a timed FOM solve when a
        // config was supplied.
        std::optional<SnapshotMatrix> reference;
        double fom_seconds = -1.0;
        if (args.fom_config) {
            const LearnRunConfig fom_cfg = load_learn_config(*args.fom_config);
            if (fom_cfg.fom != LearnRunConfig::FomKind::Burgers) {
                throw ConfigError("fom timing reference requires a burgers config");
            }
            BurgersFom fom(fom_cfg.burgers, fom_cfg.log10_param);
            const auto fom_start = std::chrono::steady_clock::now();
            SnapshotMatrix snap = fom.query(mu);
            fom_seconds = seconds_since(fom_start);
            if (!args.reference) reference = std::move(snap);
        }
        if (args.reference) reference = read_snapshot(*args.reference);

        if (reference) {
            std::ofstream report(args.output_dir / "report.csv");
            if (!report) throw IoError("cannot write report.csv");
            report << "t,relative_error\n";
            const double t_final = reference->time_grid[reference->time_grid.size() - 1];
            for (std::size_t j = 0; j < times.size(); ++j) {
                Eigen::Index col = -1;
                for (Eigen::Index k = 0; k < reference->time_grid.size(); ++k) {
                    if (std::abs(reference->time_grid[k] - times[j]) <=
                        1e-9 * std::max(1.0, t_final)) {
                        col = k;
                        break;
                    }
                }
                if (col < 0) {
                    throw RangeError("reference snapshot has no column at t = " + fmt(times[j]) +
                                     "; error reports need query times that lie on the "
                                     "reference time grid (omit --t to use the artifact grid)");
                }
                const double denom = reference->values.col(col).norm();
                if (denom == 0.0) {
                    throw DegenerateInputError("reference column at t = " + fmt(times[j]) +
                                               " has zero norm");
                }
                const double err = (solutions.col(j) - reference->values.col(col)).norm() / denom;
                report << fmt(times[j]) << "," << fmt(err) << "\n";
            }
        }

        std::ofstream summary(args.output_dir / "query_summary.txt");
        if (!summary) throw IoError("cannot write query_summary.txt");
        const double per_query = rom_seconds / static_cast<double>(times.size());
        summary << "rom_seconds_total = " << fmt(rom_seconds) << "\n"
                << "rom_queries = " << times.size() << "\n"
                << "rom_seconds_per_query = " << fmt(per_query) << "\n"
                << "fom_seconds = " << (fom_seconds >= 0.0 ? fmt(fom_seconds) : "") << "\n"
                << "speedup = " << (fom_seconds >= 0.0 ? fmt(fom_seconds / per_query) : "")
                << "\n";

        log << "rom query: " << times.size() << " time samples in " << fmt(rom_seconds)
            << " s, outputs in " << args.output_dir.string() << "\n";
    });
}

int cmd_fom_burgers(const FomRunArgs& args, std::ostream& log) {
    return run_guarded(log, "fom", [&] {
        BurgersConfig cfg;
        cfg.nx = args.nx;
        cfg.x_lo = args.x_lo;
        cfg.x_hi = args.x_hi;
        cfg.final_time = args.final_time;
        cfg.nt = args.nt;
        if (args.ic == "sine") {
            cfg.ic = BurgersConfig::InitialCondition::SineMean;
        } else if (args.ic == "constant") {
            cfg.ic = BurgersConfig::InitialCondition::Constant;
        } else {
            throw ConfigError("initial condition must be sine or constant, got '" + args.ic +
                              "'");
        }
        const SnapshotMatrix snap = solve_burgers(cfg, args.nu);
        if (args.output.has_parent_path()) {
            std::filesystem::create_directories(args.output.parent_path());
        }
        write_snapshot(args.output, snap);
        log << "fom: wrote " << args.output.string() << "\n";
    });
}

int cmd_trace_export(const std::filesystem::path& trace_csv,
                     const std::filesystem::path& output_dir, std::ostream& log) {
    return run_guarded(log, "trace export", [&] {
        std::ifstream is(trace_csv);
        if (!is) throw IoError("cannot open " + trace_csv.string());
        std::string header;
        if (!std::getline(is, header)) throw IoError(trace_csv.string() + ": empty trace");

        std::vector<std::string> columns;
        {
            std::stringstream ss(header);
            std::string c;
            while (std::getline(ss, c, ',')) columns.push_back(c);
        }
        auto find_col = [&](const std::string& name) {
            for (std::size_t i = 0; i < columns.size(); ++i) {
                if (columns[i] == name) return static_cast<long>(i);
            }
            return -1L;
        };
        const long c_iter = find_col("iter");
        const long c_dmax = find_col("d_max");
        const long c_rank_a = find_col("rank_a");
        const long c_rank_b = find_col("rank_b");
        const long c_rank_new = find_col("rank_new");
        if (c_iter < 0 || c_dmax < 0 || c_rank_a < 0) {
            throw IoError(trace_csv.string() + ": not a trace CSV (missing columns)");
        }
        // mu columns sit between iter and pair_a.
        long mu_begin = c_iter + 1;
        long mu_end = mu_begin;
        while (mu_end < static_cast<long>(columns.size()) &&
               columns[mu_end].rfind("mu", 0) == 0) {
            ++mu_end;
        }

        std::filesystem::create_directories(output_dir);
        std::ofstream dmax_os(output_dir / "dmax_vs_iter.csv");
        std::ofstream dims_os(output_dir / "selected_mu_dims.csv");
        if (!dmax_os || !dims_os) throw IoError("cannot write export files");
        dmax_os << "iter,d_max\n";
        dims_os << "iter";
        for (long i = mu_begin; i < mu_end; ++i) dims_os << "," << columns[i];
        dims_os << ",rank_a,rank_b,rank_new\n";

        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string c;
            while (std::getline(ss, c, ',')) cells.push_back(c);
            if (cells.size() != columns.size()) {
                throw IoError(trace_csv.string() + ": ragged trace row");
            }
            dmax_os << cells[c_iter] << "," << cells[c_dmax] << "\n";
            dims_os << cells[c_iter];
            for (long i = mu_begin; i < mu_end; ++i) dims_os << "," << cells[i];
            dims_os << "," << cells[c_rank_a] << "," << cells[c_rank_b] << ","
                    << cells[c_rank_new] << "\n";
        }
        log << "trace export: wrote " << (output_dir / "dmax_vs_iter.csv").string() << " and "
            << (output_dir / "selected_mu_dims.csv").string() << "\n";
    });
}

} // namespace sdal
