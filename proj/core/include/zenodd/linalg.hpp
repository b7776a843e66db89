#pragma once

// Dense complex linear algebra shared by every other module.
//
// Conventions fixed for the whole library:
//  * Multipartite indices are row-major: subsystem 0 is the most significant
//    digit, so tensor(a, b) keeps a's indices major.
//  * Vectorization is row-vectorization, vec(A)[i*d + j] = A(i, j), which
//    satisfies vec(A B C) = (A kron C^T) vec(B). There is no
//    column-vectorized variant.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace zenodd {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.
struct Spectrum {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;  // column k belongs to eigenvalues[k]
};

enum class SchattenP { One, Two, Infinity };

ComplexMatrix identity(Index d);

/// 'I', 'X', 'Y' or 'Z'.
ComplexMatrix pauli_matrix(char label);

/// Kronecker product with a's indices major.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// Trace over every subsystem not listed in `keep`. Kept subsystems retain
/// their relative order. Tracing everything yields a 1x1 matrix.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const Index> dims,
                            std::span<const Index> keep);

/// Reorders tensor factors: subsystem j of the result is subsystem order[j]
/// of the input.
ComplexMatrix permute_subsystems(const ComplexMatrix& m, std::span<const Index> dims,
                                 std::span<const Index> order);

/// Row-vectorization of a square matrix.
ComplexVector vectorize(const ComplexMatrix& a);

/// Inverse of vectorize; v must have a perfect-square length.
ComplexMatrix devectorize(const ComplexVector& v);

RealVector singular_values(const ComplexMatrix& a);

double schatten_norm(const ComplexMatrix& a, SchattenP p);

/// ||A - A^dagger||_2 <= tol * max(1, ||A||_2).
bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol);

/// ||U^dagger U - 1||_2 <= tol.
bool is_unitary(const ComplexMatrix& a, double tol = kHermitianTol);

/// Throws PreconditionError on NaN or Inf entries.
void require_finite(const ComplexMatrix& a, const char* what);

/// Spectral decomposition of a Hermitian matrix. The input is symmetrized to
/// (H + H^dagger)/2 first; anything further than kHermitianTol (relative)
/// from Hermitian is rejected.
Spectrum hermitian_spectrum(const ComplexMatrix& h);

/// exp(-i t H) for Hermitian H, through its spectral decomposition.
ComplexMatrix expm_i(const ComplexMatrix& h, double t);

/// Unitary factor U of the polar decomposition A = U |A|, which is also the
/// unitary closest to A in every unitarily invariant norm. Throws
/// RankDeficientError when the smallest singular value is <= 1e-12.
ComplexMatrix closest_unitary(const ComplexMatrix& a);

/// Multiplies by a global phase so the largest-magnitude entry (first one in
/// row-major order on ties) is real and positive.
ComplexMatrix with_canonical_phase(const ComplexMatrix& a);

/// Random traceless Hermitian matrix generated the way the reference
/// two-qubit Hamiltonian was: uniform [-1, 1] real and imaginary parts,
/// A + A^dagger, trace removed, operator norm scaled to 1, entries rounded to
/// two decimals. Rounding leaves |tr| <= 0.01 d and ||H||_inf in [0.95, 1.05].
ComplexMatrix random_traceless_hermitian(Index d, std::uint64_t seed);

}  // namespace zenodd
