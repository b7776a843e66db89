#pragma once

// Closed-form error bounds for Zeno products and decoupling protocols.
//
// Shorthands used throughout, with T = t ||H^||_inf:
//   a = sqrt(d1) ||sigma1||_2 T^2 / n   (system 2, partner state sigma1)
//   b = d2 ||sigma2||_inf T^2 / n       (system 1, partner state sigma2)
// Floors below zero and probabilities above one are vacuous; evaluators that
// can hit those ranges return both the raw and the clipped value.

#include "zenodd/linalg.hpp"

namespace zenodd {

struct BoundInputs {
    Index d1 = 2;
    Index d2 = 2;
    double big_t = 1.0;
    int n = 1;
    double sigma_fro = 1.0;  // ||sigma1||_2 in [1/sqrt(d1), 1]
    double sigma_inf = 1.0;  // ||sigma2||_inf in [1/d2, 1]
    double r = 0.0;          // tail threshold

    /// Throws PreconditionError on n < 1, T < 0 or norms outside their range.
    void validate() const;

    double system2_rate() const;  // a
    double system1_rate() const;  // b
};

struct ClippedBound {
    double raw = 0.0;
    double clipped = 0.0;
};

/// ||(e^{-itH/n} P)^n - e^{-itPHP} P||_inf <= T/n + T^2/n. Also covers
/// (P e^{-itH/n})^n and the average protocol without a terminal pulse.
double zeno_bound(double big_t, int n);

/// ||(P e^{-itH/n} P)^n - e^{-itPHP} P||_inf <= T^2/n.
double zeno_bound_sandwich(double big_t, int n);

struct Av2Bounds {
    double choi_frobenius = 0.0;  // a
    double diamond = 0.0;         // d2^2 a
};
Av2Bounds av2_bounds(const BoundInputs& in);

/// 1 - a: floor on E[fidelity] <= E[||Lambda_2||_inf] <= sqrt(E[P]). Clipped at 0.
ClippedBound tr2_purity_floor(const BoundInputs& in);

struct Tr2Distance {
    double choi = 0.0;     // sqrt(2a), Frobenius distance to the Zeno Choi state
    double diamond = 0.0;  // d2^2 sqrt(2a)
};
Tr2Distance tr2_distance_bound(const BoundInputs& in);

/// P(fidelity <= r) <= a / (1 - r), clipped to [0, 1]. Throws
/// PreconditionError unless 0 <= r < 1.
ClippedBound tr2_tail(const BoundInputs& in);

/// 1 - b: floor on E[||Lambda_1||_inf] <= sqrt(E[P]). Clipped at 0.
ClippedBound tr1_purity_floor(const BoundInputs& in);

/// b: ceiling on E[||Lambda_1 - |v)(v| ||_inf] for the leading eigenvector v.
double tr1_pure_choi_distance(const BoundInputs& in);

struct ChannelUnitaryBounds {
    double lower = 0.0;            // d (1 - sqrt P)
    double upper_fro = 0.0;        // d sqrt(P - P^2) + d sqrt(1 - P^2)
    double upper_fro_loose = 0.0;  // 2 d sqrt(1 - P^2)
    double upper_diamond = 0.0;    // 3 d (1 - ||Lambda||_inf)
};

/// Distance of a channel from its leading-Kraus unitary. Requires
/// P in [1/d^2, 1] and P <= opnorm <= sqrt(P) (1e-9 slack), else PreconditionError.
ChannelUnitaryBounds channel_unitary_bounds(Index d, double purity, double opnorm);

struct ClosestUnitaryMeanBounds {
    double fro_mean = 0.0;      // 2 d1 sqrt(1 - (1 - b)^4)
    double fro_var = 0.0;       // 4 d1^2 sqrt(1 - (1 - b)^4)
    double diamond_mean = 0.0;  // 3 d1 b
    double diamond_var = 0.0;   // 6 d1 b
};
/// (1 - b) is clipped at 0 inside the fourth power.
ClosestUnitaryMeanBounds closest_unitary_mean_bounds(const BoundInputs& in);

/// Frobenius distance of the system-2 reduced map from its leading-Kraus
/// unitary: 2 d2 sqrt(1 - (1 - a)^4), (1 - a) clipped at 0.
double tr2_superop_distance_bound(const BoundInputs& in);

/// Var[X] <= (max - E)(E - min). Throws PreconditionError unless
/// min <= mean <= max (1e-12 slack).
double bhatia_davis(double max_val, double min_val, double mean);

/// Bhatia-Davis with only a floor E >= floor known: (max - floor)(max - min).
double bhatia_davis_from_floor(double max_val, double min_val, double floor);

/// Bhatia-Davis with only a ceiling E <= ceiling known: (max - min)(ceiling - min).
double bhatia_davis_from_ceiling(double max_val, double min_val, double ceiling);

struct Tr2VarianceBounds {
    double purity = 0.0;     // (1 - 1/d2)[1 - (1 - a)^2]
    double opnorm = 0.0;     // (1 - 1/d2) a
    double fidelity = 0.0;   // a
    double frobenius = 0.0;  // 2 sqrt(2a); range [0, 2] assumed
    double diamond = 0.0;    // 2 d2^2 sqrt(2a); range [0, 2]
};
Tr2VarianceBounds tr2_variance_bounds(const BoundInputs& in);

struct Tr1VarianceBounds {
    double purity = 0.0;   // (1 - 1/d1)[1 - (1 - b)^2]
    double opnorm = 0.0;   // (1 - 1/d1) b
    double leading = 0.0;  // b
};
Tr1VarianceBounds tr1_variance_bounds(const BoundInputs& in);

}  // namespace zenodd
