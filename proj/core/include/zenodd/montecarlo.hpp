#pragma once

// Seeded trajectory sampling and the per-trajectory statistics behind the
// decoupling experiments.
//
// Trajectory `ordinal` draws its pulses from Rng::stream(master_seed,
// ordinal). Values are stored per ordinal and reduced in ordinal order, so
// every result is bit-identical for any thread count.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "zenodd/channel.hpp"
#include "zenodd/model.hpp"
#include "zenodd/protocol.hpp"

namespace zenodd {

struct TrajectoryContext {
    const BipartiteModel& model;
    const DecouplingSet& set;
    const TrajectoryEngine& engine;
    const TrajectorySample& sample;
    const Superoperator& evolution;
};

struct Statistic {
    std::string name;
    std::function<double(const TrajectoryContext&)> evaluate;
};

/// Evaluates several quantities from one trajectory.
using MultiStatistic = std::function<std::vector<double>(const TrajectoryContext&)>;

/// Partner states: sigma1 on system 1 (for system-2 statistics), sigma2 on
/// system 2 (for system-1 statistics).
struct StatisticParams {
    ComplexMatrix sigma1;
    ComplexMatrix sigma2;

    /// |0><0| on both systems.
    static StatisticParams pure_zero(Index d1, Index d2);
};

/// Registered statistic names, in registry order.
const std::vector<std::string>& statistic_names();

/// Builds a registered statistic. Throws PreconditionError for an unknown
/// name or an invalid partner state.
Statistic make_statistic(std::string_view name, const BipartiteModel& model,
                         const StatisticParams& params);

struct PulseInversionDistances {
    double inverted_to_identity = 0.0;          // ||Lambda~_1 - Lambda(1)||_1
    double inverted_unitary_to_identity = 0.0;  // ||Lambda(U~) - Lambda(1)||_1
    double channel_to_closest_unitary = 0.0;    // ||Lambda_1 - Lambda(U)||_1
    double inverted_to_closest_unitary = 0.0;   // ||Lambda~_1 - Lambda(U~)||_1
};

/// Trace distances of the system-1 reduced map (partner sigma2) with and
/// without pulse inversion. U and U~ are the leading-Kraus unitaries.
PulseInversionDistances pulse_inversion_distances(const TrajectoryContext& ctx,
                                                  const ComplexMatrix& sigma2);

/// n + 1 pulse indices drawn by the set's weights from Rng::stream(master_seed,
/// ordinal). The sample's seed field holds the derived stream seed.
TrajectorySample sample_trajectory(const DecouplingSet& set, int n, std::uint64_t master_seed,
                                   std::uint64_t ordinal);

/// values[ordinal][k] for `samples` trajectories. A throwing evaluator is
/// reported as StatisticError carrying the lowest failing ordinal.
std::vector<std::vector<double>> sample_values(const BipartiteModel& model,
                                               const DecouplingSet& set, int n,
                                               std::size_t samples, std::uint64_t master_seed,
                                               const MultiStatistic& evaluate,
                                               unsigned threads = 1);

struct EstimateReport {
    int n = 0;
    std::size_t samples = 0;
    double mean = 0.0;
    double variance = 0.0;   // unbiased; NaN for a single sample
    double std_error = 0.0;  // sqrt(variance / samples); NaN for a single sample
    std::uint64_t seed = 0;
    std::string statistic;
};

/// Summary of column `column` of sample_values() output.
EstimateReport summarize(const std::vector<std::vector<double>>& values, std::size_t column,
                         int n, std::uint64_t seed, std::string statistic);

/// Requires samples >= 2 (PreconditionError).
EstimateReport estimate(const BipartiteModel& model, const DecouplingSet& set, int n,
                        std::size_t samples, std::uint64_t master_seed, const Statistic& statistic,
                        unsigned threads = 1);

enum class TailSide { AtMost, AtLeast };

struct TailReport {
    double probability = 0.0;
    double std_error = 0.0;  // binomial, sqrt(p (1 - p) / samples)
    std::size_t samples = 0;
};

TailReport tail_probability(const BipartiteModel& model, const DecouplingSet& set, int n,
                            std::size_t samples, std::uint64_t master_seed,
                            const Statistic& statistic, double threshold,
                            TailSide side = TailSide::AtMost, unsigned threads = 1);

/// Statistic values over every pulse sequence with their probabilities.
struct ExactDistribution {
    std::vector<double> values;
    std::vector<double> weights;

    double mean() const;
    double variance() const;  // population variance under the weights
    double tail(double threshold, TailSide side = TailSide::AtMost) const;
};

/// Exhaustive enumeration of the |V|^(n+1) trajectories. Throws
/// EnumerationCapError above `cap`.
ExactDistribution enumerate_statistic(const BipartiteModel& model, const DecouplingSet& set, int n,
                                      const Statistic& statistic,
                                      std::size_t cap = kDefaultEnumerationCap);

}  // namespace zenodd
