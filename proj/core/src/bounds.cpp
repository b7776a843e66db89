#include "zenodd/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zenodd/errors.hpp"

namespace zenodd {

namespace {

constexpr double kSlack = 1e-9;

void require_steps(double big_t, int n) {
    if (n < 1) throw PreconditionError("bound: n must be >= 1");
    if (!(big_t >= 0.0) || !std::isfinite(big_t)) throw PreconditionError("bound: T must be >= 0");
}

double nonneg(double x) { return std::max(0.0, x); }

}  // namespace

void BoundInputs::validate() const {
    require_steps(big_t, n);
    if (d1 < 1 || d2 < 1) throw PreconditionError("bound: dimensions must be positive");
    const double fro_min = 1.0 / std::sqrt(static_cast<double>(d1));
    if (sigma_fro < fro_min - kSlack || sigma_fro > 1.0 + kSlack) {
        throw PreconditionError("bound: ||sigma1||_2 = " + std::to_string(sigma_fro) +
                                " outside [1/sqrt(d1), 1]");
    }
    const double inf_min = 1.0 / static_cast<double>(d2);
    if (sigma_inf < inf_min - kSlack || sigma_inf > 1.0 + kSlack) {
        throw PreconditionError("bound: ||sigma2||_inf = " + std::to_string(sigma_inf) +
                                " outside [1/d2, 1]");
    }
}

double BoundInputs::system2_rate() const {
    validate();
    return std::sqrt(static_cast<double>(d1)) * sigma_fro * big_t * big_t / n;
}

double BoundInputs::system1_rate() const {
    validate();
    return static_cast<double>(d2) * sigma_inf * big_t * big_t / n;
}

double zeno_bound(double big_t, int n) {
    require_steps(big_t, n);
    return big_t / n + big_t * big_t / n;
}

double zeno_bound_sandwich(double big_t, int n) {
    require_steps(big_t, n);
    return big_t * big_t / n;
}

Av2Bounds av2_bounds(const BoundInputs& in) {
    const double a = in.system2_rate();
    const auto d2 = static_cast<double>(in.d2);
    return {a, d2 * d2 * a};
}

ClippedBound tr2_purity_floor(const BoundInputs& in) {
    const double raw = 1.0 - in.system2_rate();
    return {raw, nonneg(raw)};
}

Tr2Distance tr2_distance_bound(const BoundInputs& in) {
    const double root = std::sqrt(2.0 * in.system2_rate());
    const auto d2 = static_cast<double>(in.d2);
    return {root, d2 * d2 * root};
}

ClippedBound tr2_tail(const BoundInputs& in) {
    if (!(in.r >= 0.0) || !(in.r < 1.0)) {
        throw PreconditionError("tr2_tail: threshold r must lie in [0, 1)");
    }
    const double raw = in.system2_rate() / (1.0 - in.r);
    return {raw, std::clamp(raw, 0.0, 1.0)};
}

ClippedBound tr1_purity_floor(const BoundInputs& in) {
    const double raw = 1.0 - in.system1_rate();
    return {raw, nonneg(raw)};
}

double tr1_pure_choi_distance(const BoundInputs& in) { return in.system1_rate(); }

ChannelUnitaryBounds channel_unitary_bounds(Index d, double purity, double opnorm) {
    if (d < 1) throw PreconditionError("channel_unitary_bounds: d must be positive");
    const auto dd = static_cast<double>(d);
    if (purity < 1.0 / (dd * dd) - kSlack || purity > 1.0 + kSlack) {
        throw PreconditionError("channel_unitary_bounds: purity outside [1/d^2, 1]");
    }
    if (opnorm < purity - kSlack || opnorm > std::sqrt(nonneg(purity)) + kSlack) {
        throw PreconditionError("channel_unitary_bounds: operator norm outside [P, sqrt(P)]");
    }
    const double p = std::clamp(purity, 0.0, 1.0);
    ChannelUnitaryBounds out;
    out.lower = dd * (1.0 - std::sqrt(p));
    out.upper_fro = dd * std::sqrt(nonneg(p - p * p)) + dd * std::sqrt(nonneg(1.0 - p * p));
    out.upper_fro_loose = 2.0 * dd * std::sqrt(nonneg(1.0 - p * p));
    out.upper_diamond = 3.0 * dd * nonneg(1.0 - opnorm);
    return out;
}

ClosestUnitaryMeanBounds closest_unitary_mean_bounds(const BoundInputs& in) {
    const double b = in.system1_rate();
    const auto d1 = static_cast<double>(in.d1);
    const double f = nonneg(1.0 - b);
    const double root = std::sqrt(nonneg(1.0 - f * f * f * f));
    ClosestUnitaryMeanBounds out;
    out.fro_mean = 2.0 * d1 * root;
    out.fro_var = bhatia_davis_from_ceiling(2.0 * d1, 0.0, out.fro_mean);
    out.diamond_mean = 3.0 * d1 * b;
    out.diamond_var = bhatia_davis_from_ceiling(2.0, 0.0, out.diamond_mean);
    return out;
}

double tr2_superop_distance_bound(const BoundInputs& in) {
    const double f = nonneg(1.0 - in.system2_rate());
    return 2.0 * static_cast<double>(in.d2) * std::sqrt(nonneg(1.0 - f * f * f * f));
}

double bhatia_davis(double max_val, double min_val, double mean) {
    if (!(min_val <= mean + 1e-12) || !(mean <= max_val + 1e-12)) {
        throw PreconditionError("bhatia_davis: need min <= mean <= max");
    }
    return nonneg((max_val - mean) * (mean - min_val));
}

double bhatia_davis_from_floor(double max_val, double min_val, double floor) {
    if (!(min_val <= max_val)) throw PreconditionError("bhatia_davis_from_floor: need min <= max");
    return nonneg(max_val - floor) * (max_val - min_val);
}

double bhatia_davis_from_ceiling(double max_val, double min_val, double ceiling) {
    if (!(min_val <= max_val)) throw PreconditionError("bhatia_davis_from_ceiling: need min <= max");
    return (max_val - min_val) * nonneg(ceiling - min_val);
}

// The purity and operator-norm forms use min = 1/d for the lower end of the
// range; that is the value whose relaxed Bhatia-Davis product gives the
// printed (1 - 1/d) prefactor.
Tr2VarianceBounds tr2_variance_bounds(const BoundInputs& in) {
    const double floor = tr2_purity_floor(in).clipped;
    const Tr2Distance dist = tr2_distance_bound(in);
    const double min_val = 1.0 / static_cast<double>(in.d2);
    Tr2VarianceBounds out;
    out.purity = bhatia_davis_from_floor(1.0, min_val, floor * floor);
    out.opnorm = bhatia_davis_from_floor(1.0, min_val, floor);
    out.fidelity = bhatia_davis_from_floor(1.0, 0.0, floor);
    out.frobenius = bhatia_davis_from_ceiling(2.0, 0.0, dist.choi);
    out.diamond = bhatia_davis_from_ceiling(2.0, 0.0, dist.diamond);
    return out;
}

Tr1VarianceBounds tr1_variance_bounds(const BoundInputs& in) {
    const double floor = tr1_purity_floor(in).clipped;
    const double min_val = 1.0 / static_cast<double>(in.d1);
    Tr1VarianceBounds out;
    out.purity = bhatia_davis_from_floor(1.0, min_val, floor * floor);
    out.opnorm = bhatia_davis_from_floor(1.0, min_val, floor);
    out.leading = bhatia_davis_from_ceiling(1.0, 0.0, tr1_pure_choi_distance(in));
    return out;
}

}  // namespace zenodd
