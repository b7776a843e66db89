#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "zenodd/errors.hpp"
#include "zenodd/montecarlo.hpp"
#include "zenodd/rng.hpp"

using namespace zenodd;

namespace {

// Purity of the Choi state of rho1 -> tr_2[U (rho1 x sigma2) U^dag], built
// from matrix units.
double reduced_purity_1(const ComplexMatrix& u, const ComplexMatrix& sigma2, Index d1) {
    const Index d2 = sigma2.rows();
    ComplexMatrix choi = ComplexMatrix::Zero(d1 * d1, d1 * d1);
    for (Index i = 0; i < d1; ++i) {
        for (Index j = 0; j < d1; ++j) {
            ComplexMatrix unit = ComplexMatrix::Zero(d1, d1);
            unit(i, j) = 1.0;
            const ComplexMatrix image = oracle::reduced_image_1({u}, unit, sigma2);
            choi += oracle::kron(image, unit);
        }
    }
    choi /= static_cast<double>(d1);
    (void)d2;
    return (choi * choi).trace().real();
}

MultiStatistic single(const Statistic& s) {
    return [s](const TrajectoryContext& ctx) { return std::vector<double>{s.evaluate(ctx)}; };
}

}  // namespace

TEST(Registry, EveryNameBuildsAndEvaluates) {
    const BipartiteModel m = reference_model();
    const DecouplingSet set = DecouplingSet::pauli();
    const StatisticParams params = StatisticParams::pure_zero(2, 2);
    EXPECT_GE(statistic_names().size(), 14u);
    const TrajectorySample sample = sample_trajectory(set, 6, 3, 0);
    const TrajectoryEngine engine(m, set, 6);
    const Superoperator evolution = engine.evolve(sample.indices);
    const TrajectoryContext ctx{m, set, engine, sample, evolution};
    for (const std::string& name : statistic_names()) {
        const Statistic s = make_statistic(name, m, params);
        EXPECT_EQ(s.name, name);
        const double v = s.evaluate(ctx);
        EXPECT_TRUE(std::isfinite(v)) << name;
        EXPECT_GE(v, -1e-12) << name;
    }
    EXPECT_THROW(make_statistic("no-such-statistic", m, params), PreconditionError);
    StatisticParams bad = params;
    bad.sigma2 = 2.0 * bad.sigma2;
    EXPECT_THROW(make_statistic("purity-1", m, bad), PreconditionError);
    bad = params;
    bad.sigma1 = identity(3) / 3.0;
    EXPECT_THROW(make_statistic("purity-2", m, bad), PreconditionError);
}

TEST(Registry, Purity1MatchesUnitaryOracle) {
    const BipartiteModel m = random_model(5);
    const DecouplingSet set = DecouplingSet::pauli();
    const ComplexMatrix sigma2 = oracle::density(2, 6);
    StatisticParams params = StatisticParams::pure_zero(2, 2);
    params.sigma2 = sigma2;
    const Statistic s = make_statistic("purity-1", m, params);
    for (std::uint64_t k = 0; k < 5; ++k) {
        const TrajectorySample sample = sample_trajectory(set, 4, 11, k);
        const TrajectoryEngine engine(m, set, 4);
        const Superoperator evolution = engine.evolve(sample.indices);
        const TrajectoryContext ctx{m, set, engine, sample, evolution};
        EXPECT_NEAR(s.evaluate(ctx), reduced_purity_1(engine.unitary(sample.indices), sigma2, 2), 1e-12);
    }
}

TEST(Registry, PulseInversionTriangle) {
    const BipartiteModel m = reference_model();
    const DecouplingSet set = DecouplingSet::pauli();
    const TrajectoryEngine engine(m, set, 10);
    const ComplexMatrix sigma2 = StatisticParams::pure_zero(2, 2).sigma2;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const TrajectorySample sample = sample_trajectory(set, 10, 2, k);
        const Superoperator evolution = engine.evolve(sample.indices);
        const PulseInversionDistances d =
            pulse_inversion_distances({m, set, engine, sample, evolution}, sigma2);
        EXPECT_LE(d.inverted_to_identity,
                  d.inverted_to_closest_unitary + d.inverted_unitary_to_identity + 1e-9);
        // Inversion by a unitary leaves the distance to the closest unitary unchanged.
        EXPECT_NEAR(d.inverted_to_closest_unitary, d.channel_to_closest_unitary, 1e-9);
    }
}

TEST(Sampling, StreamsAndWeights) {
    const DecouplingSet a = DecouplingSet::pauli_atypical();
    const TrajectorySample s = sample_trajectory(a, 5, 9, 4);
    EXPECT_EQ(s.indices.size(), 6u);
    EXPECT_EQ(s.seed, Rng::stream_seed(9, 4));
    EXPECT_EQ(s.indices, sample_trajectory(a, 5, 9, 4).indices);
    std::size_t identities = 0, total = 0;
    for (std::uint64_t k = 0; k < 2000; ++k) {
        for (std::size_t idx : sample_trajectory(a, 9, 1, k).indices) {
            identities += idx == 0;
            ++total;
        }
    }
    const double frac = static_cast<double>(identities) / static_cast<double>(total);
    const double p = 20.0 / 23.0;
    EXPECT_NEAR(frac, p, 5.0 * std::sqrt(p * (1 - p) / static_cast<double>(total)));
    EXPECT_THROW(sample_trajectory(a, 0, 1, 0), PreconditionError);
}

TEST(Sampling, ThreadCountDoesNotChangeValues) {
    const BipartiteModel m = reference_model();
    const DecouplingSet set = DecouplingSet::pauli();
    const Statistic s = make_statistic("opnorm-1", m, StatisticParams::pure_zero(2, 2));
    const auto one = sample_values(m, set, 12, 37, 5, single(s), 1);
    const auto many = sample_values(m, set, 12, 37, 5, single(s), 6);
    ASSERT_EQ(one.size(), 37u);
    EXPECT_EQ(one, many);
}

TEST(Sampling, FailingOrdinalIsReported) {
    const BipartiteModel m = reference_model();
    const DecouplingSet set = DecouplingSet::pauli();
    const std::uint64_t bad_a = Rng::stream_seed(8, 5);
    const std::uint64_t bad_b = Rng::stream_seed(8, 9);
    const MultiStatistic throwing = [&](const TrajectoryContext& ctx) {
        if (ctx.sample.seed == bad_a || ctx.sample.seed == bad_b) throw std::runtime_error("boom");
        return std::vector<double>{1.0};
    };
    for (unsigned threads : {1u, 4u}) {
        try {
            sample_values(m, set, 3, 20, 8, throwing, threads);
            ADD_FAILURE() << "expected StatisticError";
        } catch (const StatisticError& e) {
            EXPECT_EQ(e.ordinal(), 5u);
        }
    }
    const MultiStatistic nan = [&](const TrajectoryContext& ctx) {
        return std::vector<double>{ctx.sample.seed == bad_b ? std::nan("") : 0.0};
    };
    try {
        sample_values(m, set, 3, 20, 8, nan, 3);
        ADD_FAILURE() << "expected StatisticError";
    } catch (const StatisticError& e) {
        EXPECT_EQ(e.ordinal(), 9u);
    }
}

TEST(Summary, MatchesDirectFormulas) {
    const std::vector<std::vector<double>> values = {{1.0, 5.0}, {2.0, 5.0}, {4.0, 5.0}, {9.0, 5.0}};
    const EstimateReport r = summarize(values, 0, 7, 3, "x");
    EXPECT_DOUBLE_EQ(r.mean, 4.0);
    EXPECT_DOUBLE_EQ(r.variance, (9.0 + 4.0 + 0.0 + 25.0) / 3.0);
    EXPECT_DOUBLE_EQ(r.std_error, std::sqrt(r.variance / 4.0));
    EXPECT_EQ(r.n, 7);
    EXPECT_EQ(r.samples, 4u);
    EXPECT_EQ(r.statistic, "x");
    const EstimateReport c = summarize(values, 1, 7, 3, "c");
    EXPECT_DOUBLE_EQ(c.variance, 0.0);
    const EstimateReport lone = summarize({{2.0}}, 0, 1, 0, "y");
    EXPECT_DOUBLE_EQ(lone.mean, 2.0);
    EXPECT_TRUE(std::isnan(lone.variance));
    EXPECT_TRUE(std::isnan(lone.std_error));
}

TEST(Exact, DistributionAgainstDirectEnumeration) {
    const BipartiteModel m = reference_model();
    const DecouplingSet set = DecouplingSet::pauli_atypical();
    const StatisticParams params = StatisticParams::pure_zero(2, 2);
    const Statistic s = make_statistic("purity-1", m, params);
    const ExactDistribution dist = enumerate_statistic(m, set, 2, s);
    ASSERT_EQ(dist.values.size(), 64u);
    double total = 0.0, mean = 0.0;
    for (std::size_t k = 0; k < dist.values.size(); ++k) {
        total += dist.weights[k];
        mean += dist.weights[k] * dist.values[k];
    }
    EXPECT_NEAR(total, 1.0, 1e-14);
    EXPECT_NEAR(dist.mean(), mean, 1e-14);

    // Independent route: enumerate sequences here and evaluate with the oracle.
    const TrajectoryEngine engine(m, set, 2);
    double oracle_mean = 0.0, oracle_sq = 0.0, oracle_tail = 0.0;
    for_each_sequence(set, 2, 1000, [&](std::span<const std::size_t> idx, double w) {
        const double v = reduced_purity_1(engine.unitary(idx), params.sigma2, 2);
        oracle_mean += w * v;
        oracle_sq += w * v * v;
        if (v <= 0.9) oracle_tail += w;
    });
    EXPECT_NEAR(dist.mean(), oracle_mean, 1e-12);
    EXPECT_NEAR(dist.variance(), oracle_sq - oracle_mean * oracle_mean, 1e-12);
    EXPECT_NEAR(dist.tail(0.9), oracle_tail, 1e-12);
    EXPECT_NEAR(dist.tail(0.9, TailSide::AtLeast) + dist.tail(0.9), 1.0, 1e-12);
    EXPECT_THROW(enumerate_statistic(m, set, 12, s, 1000), EnumerationCapError);
}

TEST(Estimate, AgreesWithExactMean) {
    const BipartiteModel m = reference_model();
    const DecouplingSet set = DecouplingSet::pauli();
    const Statistic s = make_statistic("opnorm-2", m, StatisticParams::pure_zero(2, 2));
    const ExactDistribution dist = enumerate_statistic(m, set, 3, s);
    const EstimateReport r = estimate(m, set, 3, 2000, 21, s, 2);
    EXPECT_NEAR(r.mean, dist.mean(), 4.0 * r.std_error + 1e-12);
    EXPECT_NEAR(r.variance, dist.variance(), 0.2 * dist.variance() + 1e-12);
    EXPECT_THROW(estimate(m, set, 3, 1, 21, s), PreconditionError);
}

TEST(Tail, AgreesWithExactTail) {
    const BipartiteModel m = reference_model();
    const DecouplingSet set = DecouplingSet::pauli();
    const Statistic s = make_statistic("purity-1", m, StatisticParams::pure_zero(2, 2));
    const ExactDistribution dist = enumerate_statistic(m, set, 3, s);
    const double threshold = 0.95;
    const TailReport t = tail_probability(m, set, 3, 3000, 4, s, threshold);
    const double p = dist.tail(threshold);
    EXPECT_NEAR(t.probability, p, 4.0 * std::sqrt(p * (1 - p) / 3000.0) + 1e-12);
    EXPECT_NEAR(t.std_error, std::sqrt(t.probability * (1 - t.probability) / 3000.0), 1e-15);
    const TailReport above = tail_probability(m, set, 3, 3000, 4, s, threshold, TailSide::AtLeast);
    EXPECT_GE(above.probability + t.probability, 1.0 - 1e-12);
}
