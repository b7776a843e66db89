#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zenodd/model.hpp"
#include "zenodd/protocol.hpp"

namespace zeno_dd {

// Bad flag values or config keys (exit code 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable input or unwritable output (exit code 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string model = "reference";  // reference (alias appendix-b) | random(SEED) | file:PATH
    zenodd::Index d1 = 2;
    zenodd::Index d2 = 2;
    double big_t = 1.0;
    std::string set = "pauli";  // pauli | pauli-atypical | file:PATH
    int n_min = 1;
    int n_max = 100;
    int n_points = 24;
    std::vector<int> n_values;  // explicit grid; overrides min/max/points
    std::optional<std::size_t> samples;
    std::uint64_t seed = 1;
    std::string sigma1 = "pure-0";  // pure-0 | max-mixed | file:PATH
    std::string sigma2 = "pure-0";
    double threshold = 0.99;
    std::string out = ".";
    std::optional<unsigned> threads;
    std::vector<std::string> statistics;
    std::string inject_fault;  // "" | projector
};

/// Applies one `key = value` setting. Keys use dashes or underscores
/// interchangeably. Throws UsageError on an unknown key or bad value.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Flat `key = value` text with `#` comments.
void apply_config_text(ExperimentConfig& cfg, std::string_view text);

/// Reads and applies a config file. Throws IoError when it cannot be read.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

/// Ascending distinct integers: x_k = max(x_{k-1} + 1, round(min r^k)) with
/// r = (max/min)^(1/(points-1)), clamped to max and deduplicated. The default
/// [1, 100] x 24 grid has 24 distinct points.
std::vector<int> geometric_grid(int n_min, int n_max, int points);

/// cfg.n_values when set, else the geometric grid.
std::vector<int> n_grid(const ExperimentConfig& cfg);

zenodd::BipartiteModel build_model(const ExperimentConfig& cfg);
zenodd::DecouplingSet build_set(const ExperimentConfig& cfg);

/// pure-0 is |0><0|, max-mixed is 1/d; file:PATH holds a matrix.
zenodd::ComplexMatrix build_sigma(std::string_view spec, zenodd::Index d);

/// Filename token for a sigma spec: pure-0, max-mixed or the file stem.
std::string sigma_label(std::string_view spec);

/// cfg.threads, else ZENO_DD_THREADS, else 1.
unsigned resolve_threads(const ExperimentConfig& cfg);

}  // namespace zeno_dd
