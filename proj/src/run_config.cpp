#include "sdal/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sdal/errors.hpp"

namespace sdal {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

[[noreturn]] void bad_key(const KeyValueFile& file, const std::string& key,
                          const std::string& what) {
    throw ConfigError(file.path().string() + ":" + std::to_string(file.line_of(key)) + ": key '" +
                      key + "' " + what);
}

} // namespace

KeyValueFile KeyValueFile::parse(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    KeyValueFile file;
    file.path_ = path;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": empty key");
        }
        if (file.entries_.count(key)) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": duplicate key '" +
                              key + "' (first at line " +
                              std::to_string(file.entries_[key].line) + ")");
        }
        file.entries_[key] = Entry{value, lineno, false};
    }
    return file;
}

bool KeyValueFile::has(const std::string& key) const { return entries_.count(key) > 0; }

std::size_t KeyValueFile::line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
}

const KeyValueFile::Entry& KeyValueFile::lookup(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw ConfigError(path_.string() + ": missing required key '" + key + "'");
    }
    it->second.consumed = true;
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key) { return lookup(key).value; }

std::string KeyValueFile::get_string_or(const std::string& key, const std::string& fallback) {
    return has(key) ? get_string(key) : fallback;
}

double KeyValueFile::get_double(const std::string& key) {
    const Entry& e = lookup(key);
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        bad_key(*this, key, "is not a number: '" + e.value + "'");
    }
}

double KeyValueFile::get_double_or(const std::string& key, double fallback) {
    return has(key) ? get_double(key) : fallback;
}

int KeyValueFile::get_int(const std::string& key) {
    const Entry& e = lookup(key);
    try {
        std::size_t pos = 0;
        const int v = std::stoi(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        bad_key(*this, key, "is not an integer: '" + e.value + "'");
    }
}

int KeyValueFile::get_int_or(const std::string& key, int fallback) {
    return has(key) ? get_int(key) : fallback;
}

bool KeyValueFile::get_bool_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_key(*this, key, "is not a boolean: '" + v + "'");
}

void KeyValueFile::require_all_consumed() const {
    for (const auto& [key, entry] : entries_) {
        if (!entry.consumed) {
            throw ConfigError(path_.string() + ":" + std::to_string(entry.line) +
                              ": unknown key '" + key + "'");
        }
    }
}

RbfKernel parse_kernel_name(const std::string& name) {
    if (name == "gaussian") return RbfKernel::Gaussian;
    if (name == "multiquadric") return RbfKernel::Multiquadric;
    if (name == "cubic-spline" || name == "cubic") return RbfKernel::CubicSpline;
    throw ConfigError("unknown kernel '" + name +
                      "' (expected gaussian, multiquadric or cubic-spline)");
}

namespace {

// Grid specs: lin:lo:hi:n, log:lo:hi:n, lhs:n:lo:hi[:lo:hi...].
std::vector<ParameterPoint> generate_grid(const std::string& spec, std::uint64_t seed,
                                          const KeyValueFile& file) {
    const auto parts = split(spec, ':');
    auto need = [&](std::size_t count) {
        if (parts.size() != count) {
            throw ConfigError(file.path().string() + ": grid spec '" + spec +
                              "' has the wrong field count");
        }
    };
    auto to_double = [&](const std::string& s) {
        try {
            return std::stod(s);
        } catch (const std::exception&) {
            throw ConfigError(file.path().string() + ": grid spec field '" + s +
                              "' is not a number");
        }
    };
    auto to_int = [&](const std::string& s) {
        try {
            return std::stoi(s);
        } catch (const std::exception&) {
            throw ConfigError(file.path().string() + ": grid spec field '" + s +
                              "' is not an integer");
        }
    };

    if (parts.empty()) throw ConfigError("empty grid spec");
    if (parts[0] == "lin") {
        need(4);
        return linspace_points(to_double(parts[1]), to_double(parts[2]), to_int(parts[3]));
    }
    if (parts[0] == "log") {
        need(4);
        return logspace_points(to_double(parts[1]), to_double(parts[2]), to_int(parts[3]));
    }
    if (parts[0] == "lhs") {
        if (parts.size() < 4 || parts.size() % 2 != 0) {
            throw ConfigError(file.path().string() + ": lhs spec needs lhs:n:lo:hi[:lo:hi...]");
        }
        const int n = to_int(parts[1]);
        std::vector<std::pair<double, double>> bounds;
        for (std::size_t i = 2; i + 1 < parts.size(); i += 2) {
            bounds.emplace_back(to_double(parts[i]), to_double(parts[i + 1]));
        }
        return latin_hypercube(bounds, n, seed);
    }
    throw ConfigError(file.path().string() + ": unknown grid kind '" + parts[0] +
                      "' (expected lin, log or lhs)");
}

std::vector<int> parse_index_list(const std::string& value, const KeyValueFile& file) {
    std::vector<int> out;
    for (const std::string& item : split(value, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ConfigError(file.path().string() + ": index '" + item + "' is not an integer");
        }
    }
    return out;
}

double learn_summary_energy_criterion(const std::filesystem::path& learn_dir) {
    const auto summary = learn_dir / "summary.txt";
    std::ifstream is(summary);
    if (!is) {
        throw ConfigError("energy_criterion_online not given and " + summary.string() +
                          " is unreadable");
    }
    std::string line;
    while (std::getline(is, line)) {
        const std::string key = "energy_criterion = ";
        if (line.rfind(key, 0) == 0) {
            try {
                return std::stod(line.substr(key.size()));
            } catch (const std::exception&) {
                break;
            }
        }
    }
    throw ConfigError(summary.string() + " carries no energy_criterion to default from");
}

} // namespace

LearnRunConfig load_learn_config(const std::filesystem::path& path) {
    KeyValueFile file = KeyValueFile::parse(path);
    LearnRunConfig cfg;

    const std::string variant = file.get_string("variant");
    if (variant == "A") {
        cfg.learn.variant = ActiveLearnConfig::Variant::BudgetA;
        cfg.learn.max_query = file.get_int("max_query");
    } else if (variant == "B") {
        cfg.learn.variant = ActiveLearnConfig::Variant::ToleranceB;
        cfg.learn.tol_d = file.get_double("tol_d");
        cfg.learn.tol_e = file.get_double("tol_e");
        cfg.learn.outer_cap = file.get_int_or("outer_cap", 100);
    } else {
        throw ConfigError(path.string() + ":" + std::to_string(file.line_of("variant")) +
                          ": variant must be A or B, got '" + variant + "'");
    }

    const std::string measure = file.get_string_or("measure", "D2hat");
    if (measure == "D1") {
        cfg.learn.measure = SubspaceMeasure::D1;
    } else if (measure == "D2hat") {
        cfg.learn.measure = SubspaceMeasure::D2hat;
    } else {
        throw ConfigError(path.string() + ": measure must be D1 or D2hat, got '" + measure + "'");
    }

    cfg.learn.energy_criterion = file.get_double("energy_criterion");
    cfg.learn.estimator_kernel.kind =
        parse_kernel_name(file.get_string_or("estimator_kernel", "multiquadric"));
    cfg.learn.estimator_kernel.width = file.get_double_or("estimator_width", 1e-3);

    cfg.store.knn = file.get_int_or("knn", 2);
    cfg.store.unit_rescale = file.get_bool_or("unit_rescale", false);

    cfg.seed = static_cast<std::uint64_t>(file.get_int_or("seed", 0));

    const std::string fom = file.get_string_or("fom", "burgers");
    if (fom == "burgers") {
        cfg.fom = LearnRunConfig::FomKind::Burgers;
        cfg.burgers.nx = file.get_int_or("burgers_nx", 256);
        cfg.burgers.x_lo = file.get_double_or("burgers_x_lo", 0.0);
        cfg.burgers.x_hi = file.get_double_or("burgers_x_hi", 1.0);
        cfg.burgers.final_time = file.get_double_or("burgers_T", 1.0);
        cfg.burgers.nt = file.get_int_or("burgers_nt", 100);
        const std::string ic = file.get_string_or("burgers_ic", "sine");
        if (ic == "sine") {
            cfg.burgers.ic = BurgersConfig::InitialCondition::SineMean;
        } else if (ic == "constant") {
            cfg.burgers.ic = BurgersConfig::InitialCondition::Constant;
        } else {
            throw ConfigError(path.string() + ": burgers_ic must be sine or constant");
        }
        cfg.burgers.validate();
    } else if (fom == "archive") {
        cfg.fom = LearnRunConfig::FomKind::Archive;
        cfg.archive_dir = file.get_string("archive_dir");
    } else {
        throw ConfigError(path.string() + ": fom must be burgers or archive, got '" + fom + "'");
    }

    const std::string transform = file.get_string_or("param_transform", "none");
    if (transform == "log10") {
        cfg.log10_param = true;
    } else if (transform != "none") {
        throw ConfigError(path.string() + ": param_transform must be none or log10");
    }

    // Parameter sets: either a grid plus training indices, or two CSVs.
    if (file.has("grid")) {
        std::vector<ParameterPoint> grid =
            generate_grid(file.get_string("grid"), cfg.seed, file);
        if (cfg.log10_param) {
            for (auto& p : grid) {
                for (Eigen::Index d = 0; d < p.size(); ++d) {
                    if (!(p[d] > 0.0)) {
                        throw ConfigError(path.string() +
                                          ": param_transform=log10 needs positive grid values");
                    }
                    p[d] = std::log10(p[d]);
                }
            }
        }
        std::vector<int> idx = parse_index_list(file.get_string("train_indices"), file);
        std::vector<bool> is_train(grid.size(), false);
        for (int i : idx) {
            if (i < 0 || static_cast<std::size_t>(i) >= grid.size()) {
                throw ConfigError(path.string() + ": train index " + std::to_string(i) +
                                  " is outside the grid of size " + std::to_string(grid.size()));
            }
            if (is_train[i]) {
                throw ConfigError(path.string() + ": duplicate train index " + std::to_string(i));
            }
            is_train[i] = true;
            cfg.training.push_back(grid[i]);
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!is_train[i]) cfg.candidates.push_back(grid[i]);
        }
    } else {
        cfg.training = load_points_csv(file.get_string("train_csv"));
        cfg.candidates = load_points_csv(file.get_string("candidate_csv"));
    }

    cfg.output_dir = file.get_string("output_dir");
    if (const char* env = std::getenv("SDAL_OUTPUT_DIR")) {
        cfg.output_dir = env;
    }

    file.require_all_consumed();
    cfg.learn.validate();
    return cfg;
}

RomBuildConfig load_rom_build_config(const std::filesystem::path& path) {
    KeyValueFile file = KeyValueFile::parse(path);
    RomBuildConfig cfg;

    const std::string kind = file.get_string("rom");
    if (kind == "pod-ksnn") {
        cfg.kind = RomBuildConfig::Kind::PodKsnn;
    } else if (kind == "pod-nn") {
        cfg.kind = RomBuildConfig::Kind::PodNn;
    } else {
        throw ConfigError(path.string() + ": rom must be pod-ksnn or pod-nn, got '" + kind + "'");
    }

    cfg.learn_dir = file.get_string("learn_dir");
    cfg.artifact = file.get_string("artifact");

    if (cfg.kind == RomBuildConfig::Kind::PodKsnn) {
        cfg.kernel.kind = parse_kernel_name(file.get_string_or("kernel", "multiquadric"));
        cfg.kernel.width = file.get_double_or("kernel_width", 1e-3);
        cfg.time_kernel.kind =
            parse_kernel_name(file.get_string_or("time_kernel", "multiquadric"));
        cfg.time_kernel.width = file.get_double_or("time_kernel_width", cfg.kernel.width);
        // Defaults to the energy criterion the learn run used, read from
        // its summary; an explicit key overrides.
        if (file.has("energy_criterion_online")) {
            cfg.eta_hat = file.get_double("energy_criterion_online");
        } else {
            cfg.eta_hat = learn_summary_energy_criterion(cfg.learn_dir);
        }
    } else {
        cfg.eta = file.get_double("eta");
        cfg.eta_global = file.get_double("eta_global");
        const std::string reg = file.get_string_or("regressor", "rbf");
        if (reg == "rbf") {
            cfg.regressor = RegressorKind::RbfNetwork;
        } else if (reg == "mlp") {
            cfg.regressor = RegressorKind::FeedforwardNN;
        } else {
            throw ConfigError(path.string() + ": regressor must be rbf or mlp, got '" + reg +
                              "'");
        }
        cfg.regressor_params.kernel.kind =
            parse_kernel_name(file.get_string_or("regressor_kernel", "multiquadric"));
        cfg.regressor_params.kernel.width = file.get_double_or("regressor_width", 1e-3);
        cfg.regressor_params.max_centers = file.get_int_or("max_centers", 400);
        cfg.regressor_params.train_split = file.get_double_or("train_split", 1.0);
        cfg.regressor_params.seed = static_cast<std::uint64_t>(file.get_int_or("seed", 0));
        if (cfg.regressor == RegressorKind::FeedforwardNN) {
            cfg.regressor_params.mlp.epochs = file.get_int_or("mlp_epochs", 2000);
            cfg.regressor_params.mlp.lr0 = file.get_double_or("mlp_lr0", 0.01);
            cfg.regressor_params.mlp.halve_every = file.get_int_or("mlp_halve_every", 1000);
            if (file.has("mlp_hidden")) {
                cfg.regressor_params.mlp.hidden.clear();
                for (const std::string& w : split(file.get_string("mlp_hidden"), ',')) {
                    try {
                        cfg.regressor_params.mlp.hidden.push_back(std::stoi(w));
                    } catch (const std::exception&) {
                        throw ConfigError(path.string() + ": mlp_hidden entry '" + w +
                                          "' is not an integer");
                    }
                }
            }
        }
    }

    file.require_all_consumed();
    return cfg;
}

} // namespace sdal
