#include <cmath>

#include <gtest/gtest.h>

#include "zenodd/bounds.hpp"
#include "zenodd/errors.hpp"

using namespace zenodd;

namespace {

BoundInputs qubits(int n, double sigma_fro = 1.0, double sigma_inf = 1.0) {
    BoundInputs in;
    in.n = n;
    in.sigma_fro = sigma_fro;
    in.sigma_inf = sigma_inf;
    return in;
}

}  // namespace

TEST(ZenoBounds, Values) {
    EXPECT_DOUBLE_EQ(zeno_bound(1.0, 10), 0.2);
    EXPECT_DOUBLE_EQ(zeno_bound(2.0, 4), 1.5);
    EXPECT_DOUBLE_EQ(zeno_bound_sandwich(1.0, 10), 0.1);
    EXPECT_DOUBLE_EQ(zeno_bound_sandwich(3.0, 3), 3.0);
    EXPECT_THROW(zeno_bound(1.0, 0), PreconditionError);
    EXPECT_THROW(zeno_bound_sandwich(-1.0, 2), PreconditionError);
}

TEST(Rates, Shorthands) {
    BoundInputs in = qubits(4, 1.0 / std::sqrt(2.0), 0.5);
    in.big_t = 2.0;
    EXPECT_NEAR(in.system2_rate(), std::sqrt(2.0) * (1.0 / std::sqrt(2.0)) * 4.0 / 4.0, 1e-15);
    EXPECT_NEAR(in.system1_rate(), 2.0 * 0.5 * 4.0 / 4.0, 1e-15);
}

TEST(Rates, ValidateRanges) {
    EXPECT_THROW(qubits(0).validate(), PreconditionError);
    EXPECT_THROW(qubits(1, 0.5).validate(), PreconditionError);  // below 1/sqrt(2)
    EXPECT_THROW(qubits(1, 1.0, 0.4).validate(), PreconditionError);
    EXPECT_THROW(qubits(1, 1.1).validate(), PreconditionError);
    BoundInputs t = qubits(1);
    t.big_t = -0.1;
    EXPECT_THROW(t.validate(), PreconditionError);
    EXPECT_NO_THROW(qubits(1, 1.0 / std::sqrt(2.0), 0.5).validate());
}

TEST(PlottedCurves, System1Purity) {
    for (int n : {2, 3, 10, 100}) {
        const double pure = tr1_purity_floor(qubits(n)).clipped;
        EXPECT_NEAR(1.0 - pure * pure, 1.0 - std::pow(1.0 - 2.0 / n, 2), 1e-14) << n;
        const double mixed = tr1_purity_floor(qubits(n, 1.0, 0.5)).clipped;
        EXPECT_NEAR(1.0 - mixed * mixed, 1.0 - std::pow(1.0 - 1.0 / n, 2), 1e-14) << n;
        EXPECT_NEAR(1.0 - pure, 2.0 / n, 1e-14);
        EXPECT_NEAR(1.0 - mixed, 1.0 / n, 1e-14);
    }
}

TEST(PlottedCurves, System2) {
    for (int n : {2, 5, 50}) {
        const double floor = tr2_purity_floor(qubits(n)).clipped;
        EXPECT_NEAR(1.0 - floor * floor, 1.0 - std::pow(1.0 - std::sqrt(2.0) / n, 2), 1e-14);
        EXPECT_NEAR(1.0 - floor, std::sqrt(2.0) / n, 1e-14);
        EXPECT_NEAR(tr2_distance_bound(qubits(n)).choi, std::sqrt(2.0 * std::sqrt(2.0) / n), 1e-14);
        EXPECT_NEAR(tr2_distance_bound(qubits(n)).diamond, 4.0 * std::sqrt(2.0 * std::sqrt(2.0) / n), 1e-13);
        EXPECT_NEAR(av2_bounds(qubits(n)).diamond, 4.0 * std::sqrt(2.0) / n, 1e-14);
    }
}

TEST(PlottedCurves, LeadingAndClosestUnitary) {
    for (int n : {3, 8, 40}) {
        EXPECT_NEAR(tr1_pure_choi_distance(qubits(n)), 2.0 / n, 1e-15);
        const ClosestUnitaryMeanBounds c = closest_unitary_mean_bounds(qubits(n));
        EXPECT_NEAR(c.fro_mean, 4.0 * std::sqrt(1.0 - std::pow(1.0 - 2.0 / n, 4)), 1e-13);
        EXPECT_NEAR(c.fro_var, 16.0 * std::sqrt(1.0 - std::pow(1.0 - 2.0 / n, 4)), 1e-12);
        EXPECT_NEAR(c.diamond_mean, 6.0 * 2.0 / n, 1e-14);
        EXPECT_NEAR(c.diamond_var, 12.0 * 2.0 / n, 1e-14);
        const double a = std::sqrt(2.0) / n;
        EXPECT_NEAR(tr2_superop_distance_bound(qubits(n)), 4.0 * std::sqrt(1.0 - std::pow(1.0 - a, 4)), 1e-13);
    }
}

TEST(Clipping, VacuousRanges) {
    const ClippedBound f = tr1_purity_floor(qubits(1));
    EXPECT_DOUBLE_EQ(f.raw, -1.0);
    EXPECT_DOUBLE_EQ(f.clipped, 0.0);
    // (1 - b) clipped at zero inside the fourth power.
    EXPECT_NEAR(closest_unitary_mean_bounds(qubits(1)).fro_mean, 4.0, 1e-15);

    BoundInputs in = qubits(2);
    in.r = 0.5;
    const ClippedBound t = tr2_tail(in);
    EXPECT_NEAR(t.raw, (std::sqrt(2.0) / 2.0) / 0.5, 1e-14);
    EXPECT_DOUBLE_EQ(t.clipped, 1.0);
    in.n = 100;
    EXPECT_NEAR(tr2_tail(in).clipped, tr2_tail(in).raw, 0.0);
    in.r = 1.0;
    EXPECT_THROW(tr2_tail(in), PreconditionError);
    in.r = -0.1;
    EXPECT_THROW(tr2_tail(in), PreconditionError);
}

TEST(ChannelUnitary, Values) {
    const ChannelUnitaryBounds u = channel_unitary_bounds(2, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(u.lower, 0.0);
    EXPECT_DOUBLE_EQ(u.upper_fro, 0.0);
    EXPECT_DOUBLE_EQ(u.upper_diamond, 0.0);
    const double p = 0.5, op = 0.6;
    const ChannelUnitaryBounds b = channel_unitary_bounds(3, p, op);
    EXPECT_NEAR(b.lower, 3.0 * (1.0 - std::sqrt(p)), 1e-15);
    EXPECT_NEAR(b.upper_fro, 3.0 * std::sqrt(p - p * p) + 3.0 * std::sqrt(1.0 - p * p), 1e-15);
    EXPECT_NEAR(b.upper_fro_loose, 6.0 * std::sqrt(1.0 - p * p), 1e-15);
    EXPECT_NEAR(b.upper_diamond, 9.0 * 0.4, 1e-15);
    EXPECT_LE(b.upper_fro, b.upper_fro_loose);
    EXPECT_THROW(channel_unitary_bounds(2, 0.1, 0.3), PreconditionError);  // P < 1/d^2
    EXPECT_THROW(channel_unitary_bounds(2, 0.5, 0.9), PreconditionError);  // opnorm > sqrt P
    EXPECT_THROW(channel_unitary_bounds(2, 0.5, 0.4), PreconditionError);  // opnorm < P
}

TEST(BhatiaDavis, Forms) {
    EXPECT_DOUBLE_EQ(bhatia_davis(1.0, 0.0, 0.5), 0.25);
    EXPECT_DOUBLE_EQ(bhatia_davis(1.0, 0.25, 1.0), 0.0);
    EXPECT_THROW(bhatia_davis(1.0, 0.0, 1.5), PreconditionError);
    EXPECT_DOUBLE_EQ(bhatia_davis_from_floor(1.0, 0.5, 0.8), 0.2 * 0.5);
    EXPECT_DOUBLE_EQ(bhatia_davis_from_ceiling(2.0, 0.0, 0.3), 2.0 * 0.3);
    // The relaxed forms dominate the exact one whenever the mean respects them.
    for (double mean : {0.3, 0.5, 0.9}) {
        EXPECT_LE(bhatia_davis(1.0, 0.25, mean), bhatia_davis_from_floor(1.0, 0.25, 0.3) + 1e-15);
        EXPECT_LE(bhatia_davis(1.0, 0.25, mean), bhatia_davis_from_ceiling(1.0, 0.25, 0.9) + 1e-15);
    }
}

TEST(Variance, System2) {
    const int n = 4;
    const double a = std::sqrt(2.0) / n;
    const Tr2VarianceBounds v = tr2_variance_bounds(qubits(n));
    EXPECT_NEAR(v.purity, 0.5 * (1.0 - (1.0 - a) * (1.0 - a)), 1e-15);
    EXPECT_NEAR(v.opnorm, 0.5 * a, 1e-15);
    EXPECT_NEAR(v.fidelity, a, 1e-15);
    EXPECT_NEAR(v.frobenius, 2.0 * std::sqrt(2.0 * a), 1e-15);
    EXPECT_NEAR(v.diamond, 8.0 * std::sqrt(2.0 * a), 1e-14);
}

TEST(Variance, System1) {
    const int n = 5;
    const double b = 2.0 / n;
    const Tr1VarianceBounds v = tr1_variance_bounds(qubits(n));
    EXPECT_NEAR(v.purity, 0.5 * (1.0 - (1.0 - b) * (1.0 - b)), 1e-15);
    EXPECT_NEAR(v.opnorm, 0.5 * b, 1e-15);
    EXPECT_NEAR(v.leading, b, 1e-15);
}

TEST(Monotonicity, BoundsShrinkWithN) {
    double prev_floor = -1.0, prev_dist = 1e9;
    for (int n = 1; n <= 200; n *= 2) {
        const double floor = tr1_purity_floor(qubits(n)).clipped;
        const double dist = tr2_distance_bound(qubits(n)).choi;
        EXPECT_GE(floor, prev_floor);
        EXPECT_LE(dist, prev_dist);
        prev_floor = floor;
        prev_dist = dist;
    }
}
