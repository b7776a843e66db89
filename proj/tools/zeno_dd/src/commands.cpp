#include "zeno_dd/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "zenodd/errors.hpp"
#include "zenodd/montecarlo.hpp"
#include "zenodd/rng.hpp"

namespace zeno_dd {

using zenodd::BoundInputs;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBoundSlack = 1e-12;

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

double purity_deficit_bound(double floor) { return 1.0 - floor * floor; }

const std::vector<Presentation>& presentations() {
    static const std::vector<Presentation> table = {
        {"purity-1", 2, true,
         [](const BoundInputs& in) { return purity_deficit_bound(zenodd::tr1_purity_floor(in).clipped); }},
        {"purity-2", 1, true,
         [](const BoundInputs& in) { return purity_deficit_bound(zenodd::tr2_purity_floor(in).clipped); }},
        {"opnorm-1", 2, true,
         [](const BoundInputs& in) { return 1.0 - zenodd::tr1_purity_floor(in).clipped; }},
        {"opnorm-2", 1, true,
         [](const BoundInputs& in) { return 1.0 - zenodd::tr2_purity_floor(in).clipped; }},
        {"fidelity-2-zeno", 1, true,
         [](const BoundInputs& in) { return 1.0 - zenodd::tr2_purity_floor(in).clipped; }},
        {"frob-dist-2-zeno", 1, false,
         [](const BoundInputs& in) { return zenodd::tr2_distance_bound(in).choi; }},
        {"opnorm-dist-1-leading", 2, false,
         [](const BoundInputs& in) { return zenodd::tr1_pure_choi_distance(in); }},
        {"frob-dist-superop-1-closest-unitary", 2, false,
         [](const BoundInputs& in) { return zenodd::closest_unitary_mean_bounds(in).fro_mean; }},
        {"frob-dist-superop-2-closest-unitary", 1, false,
         [](const BoundInputs& in) { return zenodd::tr2_superop_distance_bound(in); }},
        {"diamond-upper-1-closest-unitary", 2, false,
         [](const BoundInputs& in) { return zenodd::closest_unitary_mean_bounds(in).diamond_mean; }},
        {"trace-dist-1-identity", 2, false, {}},
        {"trace-dist-1-closest-unitary", 2, false, {}},
        {"trace-dist-1-inverted-unitary-identity", 2, false, {}},
        {"purity-total", 0, false, {}},
    };
    return table;
}

std::size_t samples_or(const ExperimentConfig& cfg, std::size_t fallback) {
    const std::size_t s = cfg.samples.value_or(fallback);
    if (s < 1) throw UsageError("samples must be >= 1");
    return s;
}

/// Per-n master seed, so each grid point has its own independent streams.
std::uint64_t seed_for(const ExperimentConfig& cfg, int n) {
    return zenodd::Rng::stream_seed(cfg.seed, static_cast<std::uint64_t>(n));
}

zenodd::StatisticParams params_for(const ExperimentConfig& cfg) {
    return {build_sigma(cfg.sigma1, cfg.d1), build_sigma(cfg.sigma2, cfg.d2)};
}

zenodd::Statistic statistic_or_usage(const std::string& name, const zenodd::BipartiteModel& model,
                                     const zenodd::StatisticParams& params) {
    try {
        return zenodd::make_statistic(name, model, params);
    } catch (const zenodd::PreconditionError& e) {
        throw UsageError(e.what());
    }
}

}  // namespace

Presentation presentation(const std::string& statistic) {
    for (const Presentation& p : presentations()) {
        if (p.statistic == statistic) return p;
    }
    throw UsageError("unknown statistic '" + statistic + "'");
}

std::vector<std::string> bounded_statistics() {
    std::vector<std::string> out;
    for (const Presentation& p : presentations()) {
        if (p.bound) out.push_back(p.statistic);
    }
    return out;
}

BoundInputs bound_inputs(const zenodd::BipartiteModel& model, const zenodd::ComplexMatrix& sigma1,
                         const zenodd::ComplexMatrix& sigma2, int n) {
    BoundInputs in;
    in.d1 = model.d1;
    in.d2 = model.d2;
    in.big_t = model.big_t;
    in.n = n;
    in.sigma_fro = sigma1.norm();
    in.sigma_inf = zenodd::schatten_norm(sigma2, zenodd::SchattenP::Infinity);
    return in;
}

std::string series_filename(const std::string& command, const std::string& statistic,
                            const std::string& sigma, const std::vector<int>& grid) {
    return command + "_" + statistic + "_" + sigma + "_n" + std::to_string(grid.front()) + "-" +
           std::to_string(grid.back()) + ".csv";
}

CommandResult cmd_zeno(const ExperimentConfig& cfg) {
    const zenodd::BipartiteModel model = build_model(cfg);
    const std::vector<int> grid = n_grid(cfg);
    const zenodd::ComplexMatrix gen = zenodd::generator_superop(model.h).matrix;
    const zenodd::ComplexMatrix proj = zenodd::projector_d(model.d1, model.d2).matrix;
    const zenodd::ComplexMatrix target = zenodd::zeno_product_target(gen, proj, model.t_total);

    CommandResult result;
    CsvSeries csv{series_filename("zeno", "error", "none", grid),
                  {"n", "error", "bound", "sandwich_error", "sandwich_bound"},
                  {}};
    for (int n : grid) {
        const auto err = [&](zenodd::ZenoVariant v) {
            return zenodd::schatten_norm(
                zenodd::zeno_product(gen, proj, model.t_total, n, v) - target,
                zenodd::SchattenP::Infinity);
        };
        const double e_last = err(zenodd::ZenoVariant::PLast);
        const double e_sandwich = err(zenodd::ZenoVariant::PSandwich);
        const double b_last = zenodd::zeno_bound(model.big_t, n);
        const double b_sandwich = zenodd::zeno_bound_sandwich(model.big_t, n);
        if (e_last > b_last + kBoundSlack) {
            result.failures.push_back("zeno n=" + std::to_string(n) + ": error " + fmt(e_last) +
                                      " exceeds bound " + fmt(b_last));
        }
        if (e_sandwich > b_sandwich + kBoundSlack) {
            result.failures.push_back("zeno sandwich n=" + std::to_string(n) + ": error " +
                                      fmt(e_sandwich) + " exceeds bound " + fmt(b_sandwich));
        }
        csv.add_row({static_cast<double>(n), e_last, b_last, e_sandwich, b_sandwich});
    }
    result.series.push_back(std::move(csv));
    return result;
}

CommandResult cmd_trajectories(const ExperimentConfig& cfg) {
    const zenodd::BipartiteModel model = build_model(cfg);
    const zenodd::DecouplingSet set = build_set(cfg);
    const zenodd::StatisticParams params = params_for(cfg);
    const std::vector<int> grid = n_grid(cfg);
    const std::size_t samples = samples_or(cfg, 100);
    const unsigned threads = resolve_threads(cfg);
    const std::vector<std::string> names =
        cfg.statistics.empty() ? bounded_statistics() : cfg.statistics;

    std::vector<Presentation> shown;
    std::vector<zenodd::Statistic> stats;
    for (const std::string& name : names) {
        shown.push_back(presentation(name));
        stats.push_back(statistic_or_usage(name, model, params));
    }

    CommandResult result;
    for (const Presentation& p : shown) {
        const std::string sigma = p.partner == 1   ? sigma_label(cfg.sigma1)
                                  : p.partner == 2 ? sigma_label(cfg.sigma2)
                                                   : "none";
        result.series.push_back(
            {series_filename("trajectories", p.statistic, sigma, grid), {"n", "mean", "stderr", "bound"}, {}});
    }

    const zenodd::MultiStatistic all = [&](const zenodd::TrajectoryContext& ctx) {
        std::vector<double> v;
        v.reserve(stats.size());
        for (const zenodd::Statistic& s : stats) v.push_back(s.evaluate(ctx));
        return v;
    };

    for (int n : grid) {
        const std::uint64_t seed = seed_for(cfg, n);
        const auto values = zenodd::sample_values(model, set, n, samples, seed, all, threads);
        const BoundInputs in = bound_inputs(model, params.sigma1, params.sigma2, n);
        for (std::size_t k = 0; k < stats.size(); ++k) {
            const Presentation& p = shown[k];
            const zenodd::EstimateReport r = zenodd::summarize(values, k, n, seed, p.statistic);
            const double mean = p.deficit ? 1.0 - r.mean : r.mean;
            const double bound = p.bound ? p.bound(in) : kNaN;
            if (p.bound && samples >= 2 && mean > bound + 3.0 * r.std_error + kBoundSlack) {
                result.failures.push_back(p.statistic + " n=" + std::to_string(n) + ": mean " +
                                          fmt(mean) + " exceeds bound " + fmt(bound) +
                                          " + 3 stderr (" + fmt(r.std_error) + ")");
            }
            result.series[k].add_row({static_cast<double>(n), mean, r.std_error, bound});
        }
    }
    return result;
}

CommandResult cmd_tail(const ExperimentConfig& cfg) {
    if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) {
        throw UsageError("threshold must lie in [0, 1]");
    }
    const zenodd::BipartiteModel model = build_model(cfg);
    const zenodd::DecouplingSet set = build_set(cfg);
    const zenodd::StatisticParams params = params_for(cfg);
    const std::vector<int> grid = n_grid(cfg);
    const std::size_t samples = samples_or(cfg, 1000);
    const unsigned threads = resolve_threads(cfg);
    if (cfg.statistics.size() > 1) throw UsageError("tail takes a single statistic");
    const std::string name = cfg.statistics.empty() ? "purity-1" : cfg.statistics.front();
    const Presentation p = presentation(name);
    const zenodd::Statistic stat = statistic_or_usage(name, model, params);
    const std::string sigma = p.partner == 1   ? sigma_label(cfg.sigma1)
                              : p.partner == 2 ? sigma_label(cfg.sigma2)
                                               : "none";

    CommandResult result;
    CsvSeries csv{series_filename("tail", name, sigma, grid), {"n", "probability", "stderr"}, {}};
    for (int n : grid) {
        const zenodd::TailReport r = zenodd::tail_probability(
            model, set, n, samples, seed_for(cfg, n), stat, cfg.threshold, zenodd::TailSide::AtMost, threads);
        csv.add_row({static_cast<double>(n), r.probability, r.std_error});
    }
    result.series.push_back(std::move(csv));
    return result;
}

CommandResult cmd_pulse_inversion(const ExperimentConfig& cfg) {
    const zenodd::BipartiteModel model = build_model(cfg);
    const zenodd::DecouplingSet set = build_set(cfg);
    const zenodd::ComplexMatrix sigma2 = build_sigma(cfg.sigma2, cfg.d2);
    const std::vector<int> grid = n_grid(cfg);
    const std::size_t samples = samples_or(cfg, 100);
    const unsigned threads = resolve_threads(cfg);
    constexpr double kTol = 1e-9;

    CommandResult result;
    CsvSeries csv{series_filename("pulse-inversion", "trace-dist-1", sigma_label(cfg.sigma2), grid),
                  {"n", "inverted_identity", "inverted_identity_stderr", "unitary_identity",
                   "unitary_identity_stderr", "closest_unitary", "closest_unitary_stderr"},
                  {}};
    const zenodd::MultiStatistic distances = [&](const zenodd::TrajectoryContext& ctx) {
        const zenodd::PulseInversionDistances d = zenodd::pulse_inversion_distances(ctx, sigma2);
        return std::vector<double>{d.inverted_to_identity, d.inverted_unitary_to_identity,
                                   d.channel_to_closest_unitary, d.inverted_to_closest_unitary};
    };
    for (int n : grid) {
        const std::uint64_t seed = seed_for(cfg, n);
        const auto values = zenodd::sample_values(model, set, n, samples, seed, distances, threads);
        for (std::size_t j = 0; j < values.size(); ++j) {
            const auto& v = values[j];
            if (v[0] > v[1] + v[2] + kTol) {
                result.failures.push_back("pulse-inversion n=" + std::to_string(n) + " sample " +
                                          std::to_string(j) + ": triangle inequality violated by " +
                                          fmt(v[0] - v[1] - v[2]));
            }
            if (std::abs(v[2] - v[3]) > kTol) {
                result.failures.push_back("pulse-inversion n=" + std::to_string(n) + " sample " +
                                          std::to_string(j) +
                                          ": closest-unitary distance changed under inversion by " +
                                          fmt(v[2] - v[3]));
            }
        }
        std::vector<double> row{static_cast<double>(n)};
        for (std::size_t k = 0; k < 3; ++k) {
            const zenodd::EstimateReport r = zenodd::summarize(values, k, n, seed, "");
            row.push_back(r.mean);
            row.push_back(r.std_error);
        }
        csv.add_row(std::move(row));
    }
    result.series.push_back(std::move(csv));
    return result;
}

CommandResult cmd_fixtures(const ExperimentConfig& cfg) {
    const zenodd::BipartiteModel model = build_model(cfg);
    if (model.d1 != 2 || model.d2 != 2) throw UsageError("fixtures: the reference sequences are two-qubit");
    const zenodd::DecouplingSet set = zenodd::DecouplingSet::pauli();
    const zenodd::ComplexMatrix sigma2 = build_sigma(cfg.sigma2, cfg.d2);
    const std::vector<int> grid = n_grid(cfg);
    const zenodd::TrajectorySample typical = zenodd::typical_sequence();
    const zenodd::TrajectorySample atypical = zenodd::atypical_sequence();
    if (grid.back() > typical.n) {
        throw UsageError("fixtures: the reference sequences cover n <= " + std::to_string(typical.n));
    }

    CommandResult result;
    result.text_files.emplace_back("fixtures_hamiltonian.txt", zenodd::format_matrix(model.h));
    result.text_files.emplace_back(
        "fixtures_projector.txt",
        zenodd::format_matrix(zenodd::projector_d(model.d1, model.d2).matrix));
    result.text_files.emplace_back("fixtures_sequences.txt",
                                   std::string(zenodd::kTypicalSequenceText) + "\n" +
                                       std::string(zenodd::kAtypicalSequenceText) + "\n");

    CsvSeries csv{series_filename("fixtures", "purity-1", sigma_label(cfg.sigma2), grid),
                  {"n", "typical", "atypical"},
                  {}};
    const auto purity_along = [&](const zenodd::TrajectorySample& seq, int n) {
        const zenodd::TrajectorySample prefix = zenodd::sequence_prefix(seq, n);
        const zenodd::Superoperator s = zenodd::trajectory_evolution(model, set, prefix);
        return zenodd::choi_of_reduced_map(s, sigma2, zenodd::Subsystem::Two).purity();
    };
    for (int n : grid) {
        csv.add_row({static_cast<double>(n), purity_along(typical, n), purity_along(atypical, n)});
    }
    result.series.push_back(std::move(csv));
    return result;
}

void write_result(const CommandResult& result, const std::string& out_dir) {
    for (const CsvSeries& s : result.series) write_text(out_dir, s.filename, render_csv(s));
    for (const auto& [name, text] : result.text_files) write_text(out_dir, name, text);
}

}  // namespace zeno_dd
