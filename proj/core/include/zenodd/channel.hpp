#pragma once

// Quantum-channel representations and the measures built on them.
//
// Choi states are normalized to unit trace, Lambda = (T x I)(|1)(1| / d).
// For a map on a bipartite space H1 x H2 the Choi matrix is stored with the
// subsystem order (1, 2, 1', 2'): output legs first, then reference legs.
// choi_to_paired_layout() is the single place that reorders this to
// (1, 1', 2, 2'); every reduced Choi state goes through it.

#include <cstdint>
#include <variant>
#include <vector>

#include "zenodd/linalg.hpp"

namespace zenodd {

enum class Subsystem { One = 1, Two = 2 };

/// d^2 x d^2 matrix of a linear map on d x d operators, acting on
/// row-vectorized operators.
struct Superoperator {
    Index dim = 0;
    ComplexMatrix matrix;

    static Superoperator identity(Index d);
    static Superoperator from_matrix(ComplexMatrix m);

    ComplexMatrix apply(const ComplexMatrix& rho) const;

    /// (1| S = (1| to `tol`, i.e. tr T(A) = tr A for every A.
    bool is_trace_preserving(double tol = 1e-9) const;

    Superoperator adjoint() const { return {dim, matrix.adjoint()}; }
};

/// Composition: (a * b) applies b first.
Superoperator operator*(const Superoperator& a, const Superoperator& b);

struct QuantumChannel {
    Index dim = 0;
    std::vector<ComplexMatrix> kraus;

    /// || sum_k E_k^dagger E_k - 1 ||_2.
    double kraus_defect() const;
};

/// Normalized positive semidefinite Choi matrix with its spectrum computed on
/// construction. Construction rejects non-Hermitian input (1e-10), trace away
/// from 1 (1e-9) and eigenvalues below -1e-9; eigenvalues in [-1e-9, 0) are
/// clamped to zero.
class ChoiState {
public:
    explicit ChoiState(ComplexMatrix matrix);

    /// Hilbert-space dimension d of the channel; the matrix is d^2 x d^2.
    Index dim() const { return dim_; }
    const ComplexMatrix& matrix() const { return matrix_; }
    /// Clamped eigenvalues (descending) and eigenvectors.
    const Spectrum& spectrum() const { return spectrum_; }

    double purity() const { return purity_; }
    /// Largest eigenvalue, ||Lambda||_inf.
    double opnorm() const { return spectrum_.eigenvalues(0); }
    /// Leading eigenvalue degenerate within 1e-12; the first eigenvector is used.
    bool leading_degenerate() const { return leading_degenerate_; }

private:
    Index dim_;
    ComplexMatrix matrix_;
    Spectrum spectrum_;
    double purity_;
    bool leading_degenerate_;
};

/// Rejects anything that is not a density operator (Hermitian, PSD to -1e-9,
/// trace 1 to 1e-9).
void require_density(const ComplexMatrix& rho, const char* what);

/// U kron conj(U); throws PreconditionError unless u is unitary to 1e-9.
Superoperator superop_from_unitary(const ComplexMatrix& u);

/// sum_k E_k kron conj(E_k). Throws PreconditionError when the Kraus
/// condition is off by more than 1e-6.
Superoperator superop_from_kraus(const QuantumChannel& channel);

/// Unnormalized-by-validation realignment (1/d) sum_ij T(|i><j|) x |i><j| for
/// any linear map; used for differences of channels.
ComplexMatrix choi_matrix_of_map(const Superoperator& s);

/// Choi state of a trace-preserving map; throws PreconditionError otherwise.
ChoiState choi_from_superop(const Superoperator& s);

/// Pure Choi state |u)(u| / d.
ChoiState choi_of_unitary(const ComplexMatrix& u);

Superoperator superop_from_choi(const ChoiState& choi);

/// Kraus operators E_k = sqrt(d lambda_k) devec(v_k), eigenvalues below 1e-12
/// dropped. They are Hilbert-Schmidt orthogonal: tr(E_k^dagger E_l) = d lambda_k delta_kl.
QuantumChannel kraus_from_choi(const ChoiState& choi);

inline double purity(const ChoiState& choi) { return choi.purity(); }

/// Reorders a Choi matrix of a map on d1 x d2 from (1, 2, 1', 2') to
/// (1, 1', 2, 2').
ComplexMatrix choi_to_paired_layout(const ComplexMatrix& choi, Index d1, Index d2);

/// Lambda_1 = tr_{22'} Lambda or Lambda_2 = tr_{11'} Lambda.
ChoiState reduced_choi(const ChoiState& choi, Subsystem which, Index d1, Index d2);

/// Superoperator of the reduced map with one subsystem prepared in
/// `fixed_state`: T_{1,s2}(rho) = tr_2 T(rho x s2) when fixed_on == Two,
/// T_{2,s1}(rho) = tr_1 T(s1 x rho) when fixed_on == One. The fixed
/// subsystem's dimension is taken from `fixed_state`.
Superoperator reduced_map(const Superoperator& s, const ComplexMatrix& fixed_state,
                          Subsystem fixed_on);

ChoiState choi_of_reduced_map(const Superoperator& s, const ComplexMatrix& fixed_state,
                              Subsystem fixed_on);

/// (1/d) (u| Lambda |u).
double fidelity_to_unitary(const ChoiState& choi, const ComplexMatrix& u);

struct ClosestUnitaryChannel {
    ComplexMatrix unitary;        // polar factor of the leading Kraus operator, canonical phase
    ComplexMatrix leading_kraus;  // E_0 = sqrt(d lambda_0) devec(v_0)
    double lower = 0.0;           // d (1 - sqrt P)
    double upper_frobenius = 0.0; // d sqrt(P - P^2) + d sqrt(1 - P^2)
    double upper_diamond = 0.0;   // 3 d (1 - ||Lambda||_inf)
    bool degenerate = false;      // leading eigenvalue tie
};

/// Leading-Kraus unitary approximation of a channel with the distance bounds
/// that come with it. Throws RankDeficientError when E_0 is singular.
ClosestUnitaryChannel closest_unitary_channel(const ChoiState& choi);

struct DiamondBounds {
    double lower = 0.0;  // ||Lambda_a - Lambda_b||_1
    double upper = 0.0;  // d ||Lambda_a - Lambda_b||_1
};

DiamondBounds diamond_bounds(const ChoiState& a, const ChoiState& b);

/// Lower estimate of ||S - T||_diamond: the running maximum of
/// ||((S - T) x I)(|psi><psi|)||_1 over `samples` Haar-like random pure
/// states on the doubled space, drawn from Rng(seed).
double sampled_diamond_lower(const Superoperator& sa, const Superoperator& sb,
                             std::size_t samples, std::uint64_t seed);

/// Channel with `kraus_count` operators G_k S^{-1/2}, S = sum G_k^dag G_k,
/// from complex Gaussian G_k drawn from Rng(seed).
QuantumChannel random_channel(Index d, std::size_t kraus_count, std::uint64_t seed);

/// G G^dag / tr(G G^dag) for a complex Gaussian d x d matrix G. Full rank
/// almost surely.
ComplexMatrix random_density(Index d, std::uint64_t seed);

struct MaxMixedSplit {
    double weight = 1.0;     // p = 1 / (d ||sigma||_inf)
    ComplexMatrix residual;  // omega; 1/d when p == 1
};

/// 1/d = p sigma + (1 - p) omega.
MaxMixedSplit max_mixed_split(const ComplexMatrix& sigma);

struct OpNormProbe {};
struct PurityProbe {};
using ReducedProbe = std::variant<ComplexVector, OpNormProbe, PurityProbe>;

/// Lower bounds that transfer from a reduced Choi state Lambda_k (maximally
/// mixed partner) to the Choi state of the reduced map with partner state
/// sigma, given ||sigma||_inf and the partner's dimension:
///   vector v : (v|Lambda_sigma|v) >= 1 - d_o ||sigma|| (1 - (v|Lambda_k|v))
///   opnorm   : ||Lambda_sigma||_inf >= 1 - d_o ||sigma|| (1 - ||Lambda_k||_inf)
///   purity   : sqrt(P(Lambda_sigma)) >= 1 - d_o ||sigma|| (1 - P(Lambda_k))
double reduced_choi_lower_bounds(const ChoiState& full_reduced, double sigma_norm_inf,
                                Index other_dim, const ReducedProbe& probe);

}  // namespace zenodd
