#include "zenodd/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "zenodd/errors.hpp"
#include "zenodd/rng.hpp"

namespace zenodd {

namespace {

ChoiState system1_choi(const TrajectoryContext& ctx, const ComplexMatrix& sigma2) {
    return choi_of_reduced_map(ctx.evolution, sigma2, Subsystem::Two);
}

ChoiState system2_choi(const TrajectoryContext& ctx, const ComplexMatrix& sigma1) {
    return choi_of_reduced_map(ctx.evolution, sigma1, Subsystem::One);
}

double trace_distance(const ChoiState& a, const ChoiState& b) {
    return schatten_norm(a.matrix() - b.matrix(), SchattenP::One);
}

/// ||T^ - U^||_2 for the leading-Kraus unitary of T.
double superop_distance_to_closest_unitary(const Superoperator& reduced) {
    const ChoiState choi = choi_from_superop(reduced);
    const ClosestUnitaryChannel cu = closest_unitary_channel(choi);
    return (reduced.matrix - superop_from_unitary(cu.unitary).matrix).norm();
}

/// ||Lambda - |v)(v| ||_inf = max(1 - lambda_0, lambda_1) for PSD Lambda of trace 1.
double distance_to_leading_projector(const ChoiState& choi) {
    const RealVector& ev = choi.spectrum().eigenvalues;
    const double second = ev.size() > 1 ? ev(1) : 0.0;
    return std::max(1.0 - ev(0), second);
}

void require_partner(const ComplexMatrix& sigma, Index d, const char* which) {
    if (sigma.rows() != d || sigma.cols() != d) {
        throw PreconditionError(std::string("statistic: ") + which + " must be " +
                                std::to_string(d) + "x" + std::to_string(d));
    }
    require_density(sigma, which);
}

using Evaluator = std::function<double(const TrajectoryContext&)>;

struct RegistryEntry {
    const char* name;
    std::function<Evaluator(const BipartiteModel&, const StatisticParams&)> build;
};

const std::vector<RegistryEntry>& registry() {
    static const std::vector<RegistryEntry> entries = {
        {"purity-1",
         [](const BipartiteModel&, const StatisticParams& p) -> Evaluator {
             return [s2 = p.sigma2](const TrajectoryContext& c) { return system1_choi(c, s2).purity(); };
         }},
        {"purity-2",
         [](const BipartiteModel&, const StatisticParams& p) -> Evaluator {
             return [s1 = p.sigma1](const TrajectoryContext& c) { return system2_choi(c, s1).purity(); };
         }},
        {"opnorm-1",
         [](const BipartiteModel&, const StatisticParams& p) -> Evaluator {
             return [s2 = p.sigma2](const TrajectoryContext& c) { return system1_choi(c, s2).opnorm(); };
         }},
        {"opnorm-2",
         [](const BipartiteModel&, const StatisticParams& p) -> Evaluator {
             return [s1 = p.sigma1](const TrajectoryContext& c) { return system2_choi(c, s1).opnorm(); };
         }},
        {"fidelity-2-zeno",
         [](const BipartiteModel& m, const StatisticParams& p) -> Evaluator {
             return [s1 = p.sigma1, u2 = expm_i(m.h2, m.t_total)](const TrajectoryContext& c) {
                 return fidelity_to_unitary(system2_choi(c, s1), u2);
             };
         }},
        {"frob-dist-2-zeno",
         [](const BipartiteModel& m, const StatisticParams& p) -> Evaluator {
             return [s1 = p.sigma1, target = choi_of_unitary(expm_i(m.h2, m.t_total))](
                        const TrajectoryContext& c) {
                 return (system2_choi(c, s1).matrix() - target.matrix()).norm();
             };
         }},
        {"trace-dist-1-identity",
         [](const BipartiteModel&, const StatisticParams& p) -> Evaluator {
             return [s2 = p.sigma2](const TrajectoryContext& c) {
                 return pulse_inversion_distances(c, s2).inverted_to_identity;
             };
         }},
        {"frob-dist-superop-1-closest-unitary",
         [](const BipartiteModel&, const StatisticParams& p) -> Evaluator {
             return [s2 = p.sigma2](const TrajectoryContext& c) {
                 return superop_distance_to_closest_unitary(
                     reduced_map(c.evolution, s2, Subsystem::Two));
             };
         }},
        {"diamond-upper-1-closest-unitary",
         [](const BipartiteModel& m, const StatisticParams& p) -> Evaluator {
             return [s2 = p.sigma2, d1 = static_cast<double>(m.d1)](const TrajectoryContext& c) {
                 return 3.0 * d1 * (1.0 - system1_choi(c, s2).opnorm());
             };
         }},
        {"opnorm-dist-1-leading",
         [](const BipartiteModel&, const StatisticParams& p) -> Evaluator {
             return [s2 = p.sigma2](const TrajectoryContext& c) {
                 return distance_to_leading_projector(system1_choi(c, s2));
             };
         }},
        {"frob-dist-superop-2-closest-unitary",
         [](const BipartiteModel&, const StatisticParams& p) -> Evaluator {
             return [s1 = p.sigma1](const TrajectoryContext& c) {
                 return superop_distance_to_closest_unitary(
                     reduced_map(c.evolution, s1, Subsystem::One));
             };
         }},
        {"trace-dist-1-closest-unitary",
         [](const BipartiteModel&, const StatisticParams& p) -> Evaluator {
             return [s2 = p.sigma2](const TrajectoryContext& c) {
                 return pulse_inversion_distances(c, s2).channel_to_closest_unitary;
             };
         }},
        {"trace-dist-1-inverted-unitary-identity",
         [](const BipartiteModel&, const StatisticParams& p) -> Evaluator {
             return [s2 = p.sigma2](const TrajectoryContext& c) {
                 return pulse_inversion_distances(c, s2).inverted_unitary_to_identity;
             };
         }},
        {"purity-total",
         [](const BipartiteModel&, const StatisticParams&) -> Evaluator {
             return [](const TrajectoryContext& c) { return choi_from_superop(c.evolution).purity(); };
         }},
    };
    return entries;
}

}  // namespace

StatisticParams StatisticParams::pure_zero(Index d1, Index d2) {
    StatisticParams p;
    p.sigma1 = ComplexMatrix::Zero(d1, d1);
    p.sigma1(0, 0) = 1.0;
    p.sigma2 = ComplexMatrix::Zero(d2, d2);
    p.sigma2(0, 0) = 1.0;
    return p;
}

const std::vector<std::string>& statistic_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const RegistryEntry& e : registry()) out.emplace_back(e.name);
        return out;
    }();
    return names;
}

Statistic make_statistic(std::string_view name, const BipartiteModel& model,
                         const StatisticParams& params) {
    for (const RegistryEntry& e : registry()) {
        if (name == e.name) {
            require_partner(params.sigma1, model.d1, "sigma1");
            require_partner(params.sigma2, model.d2, "sigma2");
            return {e.name, e.build(model, params)};
        }
    }
    throw PreconditionError("unknown statistic '" + std::string(name) + "'");
}

PulseInversionDistances pulse_inversion_distances(const TrajectoryContext& ctx,
                                                  const ComplexMatrix& sigma2) {
    const ChoiState plain = system1_choi(ctx, sigma2);
    const Superoperator inverted =
        superop_from_unitary(ctx.engine.inverted_unitary(ctx.sample.indices));
    const ChoiState tilde = choi_of_reduced_map(inverted, sigma2, Subsystem::Two);
    const ChoiState identity_choi = choi_of_unitary(identity(ctx.model.d1));
    const ChoiState u = choi_of_unitary(closest_unitary_channel(plain).unitary);
    const ChoiState u_tilde = choi_of_unitary(closest_unitary_channel(tilde).unitary);

    PulseInversionDistances out;
    out.inverted_to_identity = trace_distance(tilde, identity_choi);
    out.inverted_unitary_to_identity = trace_distance(u_tilde, identity_choi);
    out.channel_to_closest_unitary = trace_distance(plain, u);
    out.inverted_to_closest_unitary = trace_distance(tilde, u_tilde);
    return out;
}

TrajectorySample sample_trajectory(const DecouplingSet& set, int n, std::uint64_t master_seed,
                                   std::uint64_t ordinal) {
    if (n < 1) throw PreconditionError("sample_trajectory: n must be >= 1");
    const std::vector<double> q = set.probabilities();
    std::vector<double> cumulative(q.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
        acc += q[k];
        cumulative[k] = acc;
    }
    Rng rng = Rng::stream(master_seed, ordinal);
    TrajectorySample s;
    s.n = n;
    s.seed = Rng::stream_seed(master_seed, ordinal);
    s.indices.resize(static_cast<std::size_t>(n) + 1);
    for (std::size_t& idx : s.indices) {
        const double u = rng.uniform01() * acc;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), q.size() - 1);
    }
    return s;
}

std::vector<std::vector<double>> sample_values(const BipartiteModel& model,
                                               const DecouplingSet& set, int n,
                                               std::size_t samples, std::uint64_t master_seed,
                                               const MultiStatistic& evaluate, unsigned threads) {
    const TrajectoryEngine engine(model, set, n);
    std::vector<std::vector<double>> values(samples);
    std::vector<std::string> errors(samples);
    std::vector<char> failed(samples, 0);

    const auto run = [&](std::size_t ordinal) {
        try {
            const TrajectorySample sample = sample_trajectory(set, n, master_seed, ordinal);
            const Superoperator evolution = engine.evolve(sample.indices);
            const TrajectoryContext ctx{model, set, engine, sample, evolution};
            std::vector<double> v = evaluate(ctx);
            for (double x : v) {
                if (!std::isfinite(x)) throw std::domain_error("statistic returned a non-finite value");
            }
            values[ordinal] = std::move(v);
        } catch (const std::exception& e) {
            failed[ordinal] = 1;
            errors[ordinal] = e.what();
        }
    };

    const unsigned workers =
        static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, samples)));
    if (workers <= 1) {
        for (std::size_t k = 0; k < samples; ++k) run(k);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t k = w; k < samples; k += workers) run(k);
            });
        }
        for (std::thread& t : pool) t.join();
    }

    for (std::size_t k = 0; k < samples; ++k) {
        if (failed[k]) {
            throw StatisticError("trajectory " + std::to_string(k) + " (n = " + std::to_string(n) +
                                     "): " + errors[k],
                                 k);
        }
    }
    return values;
}

EstimateReport summarize(const std::vector<std::vector<double>>& values, std::size_t column,
                         int n, std::uint64_t seed, std::string statistic) {
    EstimateReport r;
    r.n = n;
    r.samples = values.size();
    r.seed = seed;
    r.statistic = std::move(statistic);
    if (values.empty()) {
        r.mean = r.variance = r.std_error = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    double sum = 0.0;
    for (const auto& row : values) sum += row.at(column);
    r.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) {
        r.variance = r.std_error = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    double sq = 0.0;
    for (const auto& row : values) {
        const double dev = row[column] - r.mean;
        sq += dev * dev;
    }
    r.variance = sq / static_cast<double>(values.size() - 1);
    r.std_error = std::sqrt(r.variance / static_cast<double>(values.size()));
    return r;
}

EstimateReport estimate(const BipartiteModel& model, const DecouplingSet& set, int n,
                        std::size_t samples, std::uint64_t master_seed, const Statistic& statistic,
                        unsigned threads) {
    if (samples < 2) throw PreconditionError("estimate: at least two samples are required");
    const auto values = sample_values(
        model, set, n, samples, master_seed,
        [&](const TrajectoryContext& c) { return std::vector<double>{statistic.evaluate(c)}; },
        threads);
    return summarize(values, 0, n, master_seed, statistic.name);
}

TailReport tail_probability(const BipartiteModel& model, const DecouplingSet& set, int n,
                            std::size_t samples, std::uint64_t master_seed,
                            const Statistic& statistic, double threshold, TailSide side,
                            unsigned threads) {
    if (samples < 1) throw PreconditionError("tail_probability: at least one sample is required");
    const auto values = sample_values(
        model, set, n, samples, master_seed,
        [&](const TrajectoryContext& c) { return std::vector<double>{statistic.evaluate(c)}; },
        threads);
    std::size_t hits = 0;
    for (const auto& row : values) {
        const bool hit = side == TailSide::AtMost ? row[0] <= threshold : row[0] >= threshold;
        hits += hit ? 1 : 0;
    }
    TailReport r;
    r.samples = samples;
    r.probability = static_cast<double>(hits) / static_cast<double>(samples);
    r.std_error = std::sqrt(r.probability * (1.0 - r.probability) / static_cast<double>(samples));
    return r;
}

double ExactDistribution::mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) m += weights[k] * values[k];
    return m;
}

double ExactDistribution::variance() const {
    const double m = mean();
    double v = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double dev = values[k] - m;
        v += weights[k] * dev * dev;
    }
    return v;
}

double ExactDistribution::tail(double threshold, TailSide side) const {
    double p = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const bool hit = side == TailSide::AtMost ? values[k] <= threshold : values[k] >= threshold;
        if (hit) p += weights[k];
    }
    return p;
}

ExactDistribution enumerate_statistic(const BipartiteModel& model, const DecouplingSet& set, int n,
                                      const Statistic& statistic, std::size_t cap) {
    const std::size_t count = sequence_count(set, n, cap);
    const TrajectoryEngine engine(model, set, n);
    ExactDistribution out;
    out.values.reserve(count);
    out.weights.reserve(count);
    for_each_sequence(set, n, cap, [&](std::span<const std::size_t> idx, double w) {
        TrajectorySample sample;
        sample.n = n;
        sample.indices.assign(idx.begin(), idx.end());
        const Superoperator evolution = engine.evolve(sample.indices);
        const TrajectoryContext ctx{model, set, engine, sample, evolution};
        out.values.push_back(statistic.evaluate(ctx));
        out.weights.push_back(w);
    });
    return out;
}

}  // namespace zenodd
