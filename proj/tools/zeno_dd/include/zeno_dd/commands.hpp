#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zeno_dd/config.hpp"
#include "zeno_dd/csv.hpp"
#include "zenodd/bounds.hpp"

namespace zeno_dd {

struct CommandResult {
    std::vector<CsvSeries> series;
    std::vector<std::pair<std::string, std::string>> text_files;  // filename, content
    std::vector<std::string> report;    // human-readable lines
    std::vector<std::string> failures;  // non-empty means exit code 1

    bool ok() const { return failures.empty(); }
};

/// How a registered statistic is shown in the trajectories CSV.
struct Presentation {
    std::string statistic;
    int partner = 0;       // 1: uses sigma1, 2: uses sigma2, 0: none
    bool deficit = false;  // mean column holds 1 - E[X]
    /// Ceiling on the presented mean; empty when no bound applies.
    std::function<double(const zenodd::BoundInputs&)> bound;
};

/// Throws UsageError for an unregistered name.
Presentation presentation(const std::string& statistic);

/// Statistics with a bound, the default set for `trajectories`.
std::vector<std::string> bounded_statistics();

/// Bound inputs for a model and partner states at step count n.
zenodd::BoundInputs bound_inputs(const zenodd::BipartiteModel& model,
                                 const zenodd::ComplexMatrix& sigma1,
                                 const zenodd::ComplexMatrix& sigma2, int n);

std::string series_filename(const std::string& command, const std::string& statistic,
                            const std::string& sigma, const std::vector<int>& grid);

/// Columns n, error, bound, sandwich_error, sandwich_bound.
CommandResult cmd_zeno(const ExperimentConfig& cfg);

/// One CSV per statistic: n, mean, stderr, bound. Default 100 samples.
CommandResult cmd_trajectories(const ExperimentConfig& cfg);

/// n, probability, stderr for P[X <= threshold]. Default statistic purity-1,
/// 1000 samples.
CommandResult cmd_tail(const ExperimentConfig& cfg);

/// Means and standard errors of the three pulse-inversion distances.
CommandResult cmd_pulse_inversion(const ExperimentConfig& cfg);

/// The check suite; every failed check is listed in `failures`.
CommandResult cmd_verify(const ExperimentConfig& cfg);

/// Hamiltonian, projector and reference sequences, plus purity of the
/// reduced system-1 Choi state along both sequence prefixes.
CommandResult cmd_fixtures(const ExperimentConfig& cfg);

/// Writes every series and text file of a result into cfg.out.
void write_result(const CommandResult& result, const std::string& out_dir);

}  // namespace zeno_dd
