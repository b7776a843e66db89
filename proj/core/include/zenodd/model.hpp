#pragma once

// Bipartite Hamiltonian model H = H1 x 1 + 1 x H2 + H12 on d1 x d2, with the
// decoupling projector and the generator superoperator built from it.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "zenodd/channel.hpp"
#include "zenodd/linalg.hpp"

namespace zenodd {

struct SchmidtSplit {
    ComplexMatrix h1;   // tr_2(h) / d2
    ComplexMatrix h2;   // tr_1(h) / d1
    ComplexMatrix h12;  // remainder, partial traces zero
};

/// Splits a traceless Hermitian h on d1 x d2. Throws DimensionError on a size
/// mismatch and PreconditionError when |tr h| > 1e-9 or h is not Hermitian.
SchmidtSplit schmidt_split(const ComplexMatrix& h, Index d1, Index d2);

struct BipartiteModel {
    Index d1 = 0;
    Index d2 = 0;
    ComplexMatrix h;
    ComplexMatrix h1;
    ComplexMatrix h2;
    ComplexMatrix h12;
    double generator_norm = 0.0;  // ||H^||_inf = lambda_max(h) - lambda_min(h)
    double t_total = 0.0;
    double big_t = 0.0;           // t_total * generator_norm

    /// Evolution time chosen so that t ||H^||_inf = big_t. When h is a
    /// multiple of the identity the generator vanishes and t = big_t = 0.
    static BipartiteModel from_hamiltonian(const ComplexMatrix& h, Index d1, Index d2,
                                           double big_t = 1.0);

    /// Same, with the evolution time given directly.
    static BipartiteModel with_time(const ComplexMatrix& h, Index d1, Index d2, double t_total);

    Index dim() const { return d1 * d2; }
};

/// Coefficients tr(P h) / 2^q for every Pauli string P over {I, X, Y, Z}^q,
/// keyed by labels such as "XZ" (first letter acts on the most significant
/// qubit).
using PauliDecomposition = std::map<std::string, double>;

/// Throws DimensionError unless h is 2^num_qubits square.
PauliDecomposition pauli_decompose(const ComplexMatrix& h, int num_qubits);

ComplexMatrix pauli_string(std::string_view label);

ComplexMatrix pauli_reconstruct(const PauliDecomposition& coefficients);

/// H^ = h x 1 - 1 x h^T, the matrix of rho -> [h, rho].
Superoperator generator_superop(const ComplexMatrix& h);

/// Group-average projector onto 1_1/d1 x (system 2): D^ vec(rho) =
/// vec(1_1/d1 x tr_1 rho), in the library's (1, 2, 1', 2') vec ordering.
Superoperator projector_d(Index d1, Index d2);

struct ZenoGenerator {
    Superoperator projected;  // D^ H^ D^
    Superoperator bath_form;  // (1^_1 x H^_2) D^
    double identity_gap = 0.0;  // ||projected - bath_form||_inf
};

/// Both forms of the Zeno generator. Throws IdentityViolation when they
/// differ by more than 1e-10 * max(1, ||H^||_inf). `projector` replaces D^
/// when given; a wrong projector must trip the identity check.
ZenoGenerator zeno_generator(const BipartiteModel& model,
                             const std::optional<Superoperator>& projector = std::nullopt);

/// The two-qubit reference model (entries rounded to two decimals), T = 1.
BipartiteModel reference_model();

/// Model from random_traceless_hermitian(d1 d2, seed). The rounding residue of
/// the trace is a global phase and is removed before splitting.
BipartiteModel random_model(std::uint64_t seed, Index d1 = 2, Index d2 = 2, double big_t = 1.0);

/// Plain-text matrix: one row per line, entries "re+imj" separated by
/// whitespace. Blank lines and lines starting with '#' are skipped.
std::string format_matrix(const ComplexMatrix& m);
ComplexMatrix parse_matrix(std::string_view text);

}  // namespace zenodd
