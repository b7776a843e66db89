#include "zeno_dd/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zenodd/errors.hpp"

namespace zeno_dd {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string normalize_key(std::string_view key) {
    std::string k = trim(key);
    std::replace(k.begin(), k.end(), '_', '-');
    return k;
}

template <class T>
T parse_integer(std::string_view key, std::string_view value) {
    T out{};
    const std::string v = trim(value);
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
        throw UsageError("invalid integer for '" + std::string(key) + "': '" + v + "'");
    }
    return out;
}

double parse_double(std::string_view key, std::string_view value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(out)) {
        throw UsageError("invalid number for '" + std::string(key) + "': '" + v + "'");
    }
    return out;
}

std::vector<std::string> split_list(std::string_view value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in{std::string(value)};
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

zenodd::ComplexMatrix read_matrix(const std::string& path) {
    try {
        return zenodd::parse_matrix(read_file(path));
    } catch (const zenodd::ParseError& e) {
        throw UsageError("'" + path + "': " + e.what());
    }
}

}  // namespace

void apply_setting(ExperimentConfig& cfg, std::string_view raw_key, std::string_view raw_value) {
    const std::string key = normalize_key(raw_key);
    const std::string value = trim(raw_value);
    if (key == "model") {
        cfg.model = value;
    } else if (key == "d1") {
        cfg.d1 = parse_integer<zenodd::Index>(key, value);
    } else if (key == "d2") {
        cfg.d2 = parse_integer<zenodd::Index>(key, value);
    } else if (key == "big-t" || key == "t") {
        cfg.big_t = parse_double(key, value);
    } else if (key == "set") {
        cfg.set = value;
    } else if (key == "n-min") {
        cfg.n_min = parse_integer<int>(key, value);
    } else if (key == "n-max") {
        cfg.n_max = parse_integer<int>(key, value);
    } else if (key == "n-points") {
        cfg.n_points = parse_integer<int>(key, value);
    } else if (key == "n-values") {
        cfg.n_values.clear();
        for (const std::string& item : split_list(value)) {
            cfg.n_values.push_back(parse_integer<int>(key, item));
        }
    } else if (key == "samples") {
        cfg.samples = parse_integer<std::size_t>(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_integer<std::uint64_t>(key, value);
    } else if (key == "sigma1") {
        cfg.sigma1 = value;
    } else if (key == "sigma2") {
        cfg.sigma2 = value;
    } else if (key == "threshold") {
        cfg.threshold = parse_double(key, value);
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "threads") {
        cfg.threads = parse_integer<unsigned>(key, value);
    } else if (key == "statistics" || key == "statistic") {
        cfg.statistics = split_list(value);
    } else if (key == "inject-fault") {
        cfg.inject_fault = value;
    } else {
        throw UsageError("unknown config key '" + key + "'");
    }
}

void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        apply_setting(cfg, std::string_view(line).substr(0, eq),
                      std::string_view(line).substr(eq + 1));
    }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    apply_config_text(cfg, read_file(path));
}

std::vector<int> geometric_grid(int n_min, int n_max, int points) {
    if (n_min < 1 || n_max < n_min) throw UsageError("n-grid: need 1 <= n-min <= n-max");
    if (points < 1) throw UsageError("n-grid: n-points must be positive");
    if (points == 1 || n_min == n_max) return {n_min};
    const double ratio = std::pow(static_cast<double>(n_max) / n_min, 1.0 / (points - 1));
    std::vector<int> grid;
    for (int k = 0; k < points; ++k) {
        int x = static_cast<int>(std::lround(n_min * std::pow(ratio, k)));
        if (!grid.empty()) x = std::max(x, grid.back() + 1);
        x = std::min(x, n_max);
        if (k == points - 1) x = n_max;
        if (grid.empty() || x > grid.back()) grid.push_back(x);
    }
    return grid;
}

std::vector<int> n_grid(const ExperimentConfig& cfg) {
    if (cfg.n_values.empty()) return geometric_grid(cfg.n_min, cfg.n_max, cfg.n_points);
    std::vector<int> grid = cfg.n_values;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.front() < 1) throw UsageError("n-values: every n must be >= 1");
    return grid;
}

zenodd::BipartiteModel build_model(const ExperimentConfig& cfg) {
    if (!(cfg.big_t >= 0.0)) throw UsageError("big-t must be >= 0");
    const std::string& m = cfg.model;
    if (m == "reference" || m == "appendix-b") {
        if (cfg.d1 != 2 || cfg.d2 != 2) throw UsageError("the reference model is two qubits (d1 = d2 = 2)");
        const zenodd::BipartiteModel base = zenodd::reference_model();
        return zenodd::BipartiteModel::from_hamiltonian(base.h, 2, 2, cfg.big_t);
    }
    std::string seed_text;
    if (starts_with(m, "random(") && m.back() == ')') {
        seed_text = m.substr(7, m.size() - 8);
    } else if (starts_with(m, "random:")) {
        seed_text = m.substr(7);
    }
    try {
        if (!seed_text.empty()) {
            return zenodd::random_model(parse_integer<std::uint64_t>("model", seed_text), cfg.d1,
                                        cfg.d2, cfg.big_t);
        }
        if (starts_with(m, "file:")) {
            return zenodd::BipartiteModel::from_hamiltonian(read_matrix(m.substr(5)), cfg.d1,
                                                            cfg.d2, cfg.big_t);
        }
    } catch (const zenodd::DimensionError& e) {
        throw UsageError(std::string("model: ") + e.what());
    } catch (const zenodd::PreconditionError& e) {
        throw UsageError(std::string("model: ") + e.what());
    }
    throw UsageError("unknown model '" + m + "' (reference, random(SEED) or file:PATH)");
}

// Set file: blocks introduced by "@ LABEL WEIGHT" followed by matrix rows.
zenodd::DecouplingSet build_set(const ExperimentConfig& cfg) {
    zenodd::DecouplingSet set;
    if (cfg.set == "pauli") {
        set = zenodd::DecouplingSet::pauli();
    } else if (cfg.set == "pauli-atypical") {
        set = zenodd::DecouplingSet::pauli_atypical();
    } else if (starts_with(cfg.set, "file:")) {
        const std::string path = cfg.set.substr(5);
        std::istringstream in(read_file(path));
        std::string line;
        std::string block;
        const auto flush = [&] {
            if (set.labels.empty()) return;
            try {
                set.unitaries.push_back(zenodd::parse_matrix(block));
            } catch (const zenodd::ParseError& e) {
                throw UsageError("'" + path + "' block " + set.labels.back() + ": " + e.what());
            }
            block.clear();
        };
        while (std::getline(in, line)) {
            const std::string t = trim(line);
            if (!t.empty() && t[0] == '@') {
                flush();
                std::istringstream head(t.substr(1));
                std::string label;
                std::string weight = "1";
                head >> label >> weight;
                if (label.empty()) throw UsageError("'" + path + "': block without a label");
                set.labels.push_back(label);
                set.weights.push_back(parse_double("weight", weight));
            } else {
                block += line + "\n";
            }
        }
        flush();
    } else {
        throw UsageError("unknown set '" + cfg.set + "' (pauli, pauli-atypical or file:PATH)");
    }
    try {
        set.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("set: ") + e.what());
    }
    if (set.dim() != cfg.d1) {
        throw UsageError("set: pulses are " + std::to_string(set.dim()) + "x" +
                         std::to_string(set.dim()) + " but d1 = " + std::to_string(cfg.d1));
    }
    return set;
}

zenodd::ComplexMatrix build_sigma(std::string_view spec, zenodd::Index d) {
    zenodd::ComplexMatrix sigma;
    if (spec == "pure-0") {
        sigma = zenodd::ComplexMatrix::Zero(d, d);
        sigma(0, 0) = 1.0;
    } else if (spec == "max-mixed") {
        sigma = zenodd::identity(d) / static_cast<double>(d);
    } else if (starts_with(spec, "file:")) {
        sigma = read_matrix(std::string(spec.substr(5)));
    } else {
        throw UsageError("unknown sigma '" + std::string(spec) + "' (pure-0, max-mixed or file:PATH)");
    }
    if (sigma.rows() != d || sigma.cols() != d) {
        throw UsageError("sigma '" + std::string(spec) + "' must be " + std::to_string(d) + "x" +
                         std::to_string(d));
    }
    try {
        zenodd::require_density(sigma, "sigma");
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return sigma;
}

std::string sigma_label(std::string_view spec) {
    if (starts_with(spec, "file:")) {
        return std::filesystem::path(std::string(spec.substr(5))).stem().string();
    }
    return std::string(spec);
}

unsigned resolve_threads(const ExperimentConfig& cfg) {
    if (cfg.threads) return std::max(1u, *cfg.threads);
    if (const char* env = std::getenv("ZENO_DD_THREADS"); env != nullptr && *env != '\0') {
        return std::max(1u, parse_integer<unsigned>("ZENO_DD_THREADS", env));
    }
    return 1;
}

}  // namespace zeno_dd
