#include "zenodd/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "zenodd/errors.hpp"
#include "zenodd/rng.hpp"

namespace zenodd {

namespace {

Index square_root_dim(Index n, const char* what) {
    const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (d < 1 || d * d != n) {
        throw DimensionError(std::string(what) + ": size " + std::to_string(n) +
                             " is not a perfect square");
    }
    return d;
}

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

double safe_sqrt(double x) { return std::sqrt(std::max(0.0, x)); }

}  // namespace

Superoperator Superoperator::identity(Index d) {
    return {d, ComplexMatrix::Identity(d * d, d * d)};
}

Superoperator Superoperator::from_matrix(ComplexMatrix m) {
    if (m.rows() != m.cols()) throw DimensionError("superoperator matrix must be square");
    const Index d = square_root_dim(m.rows(), "Superoperator::from_matrix");
    return {d, std::move(m)};
}

ComplexMatrix Superoperator::apply(const ComplexMatrix& rho) const {
    if (rho.rows() != dim || rho.cols() != dim) {
        throw DimensionError("Superoperator::apply: expected " + std::to_string(dim) + "x" +
                             std::to_string(dim) + " operator");
    }
    return devectorize(matrix * vectorize(rho));
}

bool Superoperator::is_trace_preserving(double tol) const {
    // Row-vectorized identity picks out the trace: (1| vec(A) = tr A.
    const ComplexVector one = vectorize(zenodd::identity(dim));
    const ComplexVector pulled = matrix.adjoint() * one;
    return (pulled - one).norm() <= tol * std::max(1.0, one.norm());
}

Superoperator operator*(const Superoperator& a, const Superoperator& b) {
    if (a.dim != b.dim) throw DimensionError("superoperator composition: dimension mismatch");
    return {a.dim, a.matrix * b.matrix};
}

double QuantumChannel::kraus_defect() const {
    ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
    for (const ComplexMatrix& e : kraus) sum += e.adjoint() * e;
    return (sum - identity(dim)).norm();
}

ChoiState::ChoiState(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) throw DimensionError("Choi matrix must be square");
    dim_ = square_root_dim(matrix_.rows(), "ChoiState");
    require_finite(matrix_, "ChoiState");
    if (!is_hermitian(matrix_, kHermitianTol)) {
        throw PreconditionError("ChoiState: matrix is not Hermitian");
    }
    const Complex tr = matrix_.trace();
    if (std::abs(tr - 1.0) > 1e-9) {
        throw PreconditionError("ChoiState: trace " + std::to_string(tr.real()) + " differs from 1");
    }
    matrix_ = 0.5 * (matrix_ + matrix_.adjoint());
    spectrum_ = hermitian_spectrum(matrix_);
    const Index n = spectrum_.eigenvalues.size();
    if (spectrum_.eigenvalues(n - 1) < -1e-9) {
        throw PreconditionError("ChoiState: matrix is not positive semidefinite (eigenvalue " +
                                std::to_string(spectrum_.eigenvalues(n - 1)) + ")");
    }
    spectrum_.eigenvalues = spectrum_.eigenvalues.cwiseMax(0.0);
    purity_ = spectrum_.eigenvalues.squaredNorm();
    leading_degenerate_ = n > 1 && spectrum_.eigenvalues(0) - spectrum_.eigenvalues(1) <= 1e-12;
}

void require_density(const ComplexMatrix& rho, const char* what) {
    if (rho.rows() != rho.cols() || rho.rows() < 1) {
        throw DimensionError(std::string(what) + ": state must be a non-empty square matrix");
    }
    require_finite(rho, what);
    if (!is_hermitian(rho, kHermitianTol)) {
        throw PreconditionError(std::string(what) + ": state is not Hermitian");
    }
    if (std::abs(rho.trace() - 1.0) > 1e-9) {
        throw PreconditionError(std::string(what) + ": state does not have unit trace");
    }
    const Spectrum spec = hermitian_spectrum(rho);
    if (spec.eigenvalues(spec.eigenvalues.size() - 1) < -1e-9) {
        throw PreconditionError(std::string(what) + ": state is not positive semidefinite");
    }
}

Superoperator superop_from_unitary(const ComplexMatrix& u) {
    if (u.rows() != u.cols()) throw DimensionError("superop_from_unitary: matrix must be square");
    if (!is_unitary(u, 1e-9)) throw PreconditionError("superop_from_unitary: matrix is not unitary");
    return {u.rows(), tensor(u, u.conjugate())};
}

Superoperator superop_from_kraus(const QuantumChannel& channel) {
    if (channel.kraus.empty()) throw PreconditionError("superop_from_kraus: no Kraus operators");
    for (const ComplexMatrix& e : channel.kraus) {
        if (e.rows() != channel.dim || e.cols() != channel.dim) {
            throw DimensionError("superop_from_kraus: Kraus operator has the wrong shape");
        }
    }
    if (channel.kraus_defect() > 1e-6) {
        throw PreconditionError("superop_from_kraus: sum of E^dagger E differs from identity");
    }
    const Index d = channel.dim;
    ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
    for (const ComplexMatrix& e : channel.kraus) s += tensor(e, e.conjugate());
    return {d, s};
}

ComplexMatrix choi_matrix_of_map(const Superoperator& s) {
    const Index d = s.dim;
    if (s.matrix.rows() != d * d || s.matrix.cols() != d * d) {
        throw DimensionError("choi_matrix_of_map: superoperator shape does not match its dimension");
    }
    // Lambda[(a,i),(b,j)] = T(|i><j|)[a,b] / d = S[a*d+b, i*d+j] / d.
    ComplexMatrix out(d * d, d * d);
    const double inv_d = 1.0 / static_cast<double>(d);
    for (Index a = 0; a < d; ++a) {
        for (Index i = 0; i < d; ++i) {
            for (Index b = 0; b < d; ++b) {
                for (Index j = 0; j < d; ++j) {
                    out(a * d + i, b * d + j) = s.matrix(a * d + b, i * d + j) * inv_d;
                }
            }
        }
    }
    return out;
}

ChoiState choi_from_superop(const Superoperator& s) {
    if (!s.is_trace_preserving(1e-9)) {
        throw PreconditionError("choi_from_superop: map is not trace preserving");
    }
    return ChoiState(choi_matrix_of_map(s));
}

ChoiState choi_of_unitary(const ComplexMatrix& u) {
    if (u.rows() != u.cols()) throw DimensionError("choi_of_unitary: matrix must be square");
    const ComplexVector v = vectorize(u);
    return ChoiState(v * v.adjoint() / static_cast<double>(u.rows()));
}

Superoperator superop_from_choi(const ChoiState& choi) {
    const Index d = choi.dim();
    const ComplexMatrix& m = choi.matrix();
    ComplexMatrix s(d * d, d * d);
    const auto scale = static_cast<double>(d);
    for (Index a = 0; a < d; ++a) {
        for (Index i = 0; i < d; ++i) {
            for (Index b = 0; b < d; ++b) {
                for (Index j = 0; j < d; ++j) {
                    s(a * d + b, i * d + j) = m(a * d + i, b * d + j) * scale;
                }
            }
        }
    }
    return {d, s};
}

QuantumChannel kraus_from_choi(const ChoiState& choi) {
    const Index d = choi.dim();
    const Spectrum& spec = choi.spectrum();
    QuantumChannel out{d, {}};
    for (Index k = 0; k < spec.eigenvalues.size(); ++k) {
        const double lambda = spec.eigenvalues(k);
        if (lambda < 1e-12) continue;
        out.kraus.push_back(std::sqrt(static_cast<double>(d) * lambda) *
                            devectorize(spec.eigenvectors.col(k)));
    }
    return out;
}

ComplexMatrix choi_to_paired_layout(const ComplexMatrix& choi, Index d1, Index d2) {
    const std::array<Index, 4> dims{d1, d2, d1, d2};
    const std::array<Index, 4> order{0, 2, 1, 3};
    return permute_subsystems(choi, dims, order);
}

ChoiState reduced_choi(const ChoiState& choi, Subsystem which, Index d1, Index d2) {
    if (choi.dim() != d1 * d2) {
        throw DimensionError("reduced_choi: channel dimension " + std::to_string(choi.dim()) +
                             " is not " + std::to_string(d1) + "*" + std::to_string(d2));
    }
    const ComplexMatrix paired = choi_to_paired_layout(choi.matrix(), d1, d2);
    const std::array<Index, 4> dims{d1, d1, d2, d2};
    const std::array<Index, 2> keep_one{0, 1};
    const std::array<Index, 2> keep_two{2, 3};
    return ChoiState(partial_trace(paired, dims, which == Subsystem::One
                                                     ? std::span<const Index>(keep_one)
                                                     : std::span<const Index>(keep_two)));
}

Superoperator reduced_map(const Superoperator& s, const ComplexMatrix& fixed_state,
                          Subsystem fixed_on) {
    require_density(fixed_state, "reduced_map");
    const Index d_fixed = fixed_state.rows();
    if (s.dim % d_fixed != 0) {
        throw DimensionError("reduced_map: fixed state dimension " + std::to_string(d_fixed) +
                             " does not divide " + std::to_string(s.dim));
    }
    const Index d_open = s.dim / d_fixed;
    const bool fixed_second = fixed_on == Subsystem::Two;
    const std::array<Index, 2> dims = fixed_second ? std::array<Index, 2>{d_open, d_fixed}
                                                   : std::array<Index, 2>{d_fixed, d_open};
    const std::array<Index, 1> keep{fixed_second ? Index{0} : Index{1}};

    ComplexMatrix out(d_open * d_open, d_open * d_open);
    ComplexMatrix unit = ComplexMatrix::Zero(d_open, d_open);
    for (Index i = 0; i < d_open; ++i) {
        for (Index j = 0; j < d_open; ++j) {
            unit(i, j) = 1.0;
            const ComplexMatrix input =
                fixed_second ? tensor(unit, fixed_state) : tensor(fixed_state, unit);
            const ComplexMatrix image = s.apply(input);
            out.col(i * d_open + j) = vectorize(partial_trace(image, dims, keep));
            unit(i, j) = 0.0;
        }
    }
    return {d_open, out};
}

ChoiState choi_of_reduced_map(const Superoperator& s, const ComplexMatrix& fixed_state,
                              Subsystem fixed_on) {
    return choi_from_superop(reduced_map(s, fixed_state, fixed_on));
}

double fidelity_to_unitary(const ChoiState& choi, const ComplexMatrix& u) {
    if (u.rows() != choi.dim() || u.cols() != choi.dim()) {
        throw DimensionError("fidelity_to_unitary: unitary dimension does not match channel");
    }
    const ComplexVector v = vectorize(u);
    return (v.adjoint() * choi.matrix() * v)(0, 0).real() / static_cast<double>(choi.dim());
}

ClosestUnitaryChannel closest_unitary_channel(const ChoiState& choi) {
    const Index d = choi.dim();
    const auto dd = static_cast<double>(d);
    const Spectrum& spec = choi.spectrum();
    const double lambda0 = spec.eigenvalues(0);
    const double p = choi.purity();

    ClosestUnitaryChannel out;
    out.leading_kraus = std::sqrt(dd * lambda0) * devectorize(spec.eigenvectors.col(0));
    out.unitary = with_canonical_phase(closest_unitary(out.leading_kraus));
    out.lower = dd * (1.0 - std::sqrt(p));
    out.upper_frobenius = dd * safe_sqrt(p - p * p) + dd * safe_sqrt(1.0 - p * p);
    out.upper_diamond = 3.0 * dd * (1.0 - lambda0);
    out.degenerate = choi.leading_degenerate();
    return out;
}

DiamondBounds diamond_bounds(const ChoiState& a, const ChoiState& b) {
    if (a.dim() != b.dim()) throw DimensionError("diamond_bounds: dimension mismatch");
    const double trace_norm = schatten_norm(a.matrix() - b.matrix(), SchattenP::One);
    return {trace_norm, static_cast<double>(a.dim()) * trace_norm};
}

double sampled_diamond_lower(const Superoperator& sa, const Superoperator& sb,
                             std::size_t samples, std::uint64_t seed) {
    if (sa.dim != sb.dim) throw DimensionError("sampled_diamond_lower: dimension mismatch");
    const Index d = sa.dim;
    const ComplexMatrix delta = choi_matrix_of_map({d, sa.matrix - sb.matrix});
    const ComplexMatrix id = identity(d);
    Rng rng(seed);
    double best = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        // |psi) = vec(X) = (1 x X^T)|1) with ||X||_2 = 1.
        ComplexMatrix x(d, d);
        for (Index r = 0; r < d; ++r) {
            for (Index c = 0; c < d; ++c) {
                const double re = rng.normal();
                const double im = rng.normal();
                x(r, c) = Complex(re, im);
            }
        }
        x /= x.norm();
        const ComplexMatrix lift = tensor(id, x.transpose());
        const ComplexMatrix image = static_cast<double>(d) * lift * delta * lift.adjoint();
        best = std::max(best, schatten_norm(image, SchattenP::One));
    }
    return best;
}

namespace {

ComplexMatrix gaussian_matrix(Index d, Rng& rng) {
    ComplexMatrix g(d, d);
    for (Index r = 0; r < d; ++r) {
        for (Index c = 0; c < d; ++c) {
            const double re = rng.normal();
            const double im = rng.normal();
            g(r, c) = Complex(re, im);
        }
    }
    return g;
}

}  // namespace

QuantumChannel random_channel(Index d, std::size_t kraus_count, std::uint64_t seed) {
    if (d < 1 || kraus_count < 1) {
        throw PreconditionError("random_channel: need d >= 1 and at least one Kraus operator");
    }
    Rng rng(seed);
    std::vector<ComplexMatrix> g;
    ComplexMatrix s = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < kraus_count; ++k) {
        g.push_back(gaussian_matrix(d, rng));
        s += g.back().adjoint() * g.back();
    }
    const Spectrum spec = hermitian_spectrum(0.5 * (s + s.adjoint()));
    RealVector inv_sqrt = spec.eigenvalues.cwiseSqrt().cwiseInverse();
    const ComplexMatrix s_inv_sqrt =
        spec.eigenvectors * inv_sqrt.cast<Complex>().asDiagonal() * spec.eigenvectors.adjoint();
    QuantumChannel out{d, {}};
    for (const ComplexMatrix& gk : g) out.kraus.push_back(gk * s_inv_sqrt);
    return out;
}

ComplexMatrix random_density(Index d, std::uint64_t seed) {
    if (d < 1) throw PreconditionError("random_density: d must be positive");
    Rng rng(seed);
    const ComplexMatrix g = gaussian_matrix(d, rng);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + rho.adjoint());
}

MaxMixedSplit max_mixed_split(const ComplexMatrix& sigma) {
    require_density(sigma, "max_mixed_split");
    const Index d = sigma.rows();
    const auto dd = static_cast<double>(d);
    const Spectrum spec = hermitian_spectrum(sigma);
    const double top = spec.eigenvalues(0);
    const double p = 1.0 / (dd * top);
    if (p >= 1.0 - 1e-12) return {1.0, identity(d) / dd};

    RealVector weights(d);
    const double norm = 1.0 / (dd - 1.0 / top);
    for (Index i = 0; i < d; ++i) {
        weights(i) = norm * std::max(0.0, 1.0 - std::max(0.0, spec.eigenvalues(i)) / top);
    }
    ComplexMatrix omega = spec.eigenvectors * weights.cast<Complex>().asDiagonal() *
                          spec.eigenvectors.adjoint();
    return {p, 0.5 * (omega + omega.adjoint())};
}

double reduced_choi_lower_bounds(const ChoiState& full_reduced, double sigma_norm_inf,
                                Index other_dim, const ReducedProbe& probe) {
    if (!(sigma_norm_inf > 0.0) || sigma_norm_inf > 1.0 + 1e-12) {
        throw PreconditionError("reduced_choi_lower_bounds: ||sigma||_inf must lie in (0, 1]");
    }
    if (other_dim < 1) throw DimensionError("reduced_choi_lower_bounds: partner dimension must be positive");
    const double scale = static_cast<double>(other_dim) * sigma_norm_inf;

    double base = 0.0;
    if (const auto* v = std::get_if<ComplexVector>(&probe)) {
        if (v->size() != full_reduced.matrix().rows()) {
            throw DimensionError("reduced_choi_lower_bounds: probe vector has the wrong length");
        }
        const double nv = v->norm();
        if (std::abs(nv - 1.0) > 1e-9) {
            throw PreconditionError("reduced_choi_lower_bounds: probe vector must be normalized");
        }
        base = (v->adjoint() * full_reduced.matrix() * *v)(0, 0).real();
    } else if (std::holds_alternative<OpNormProbe>(probe)) {
        base = full_reduced.opnorm();
    } else {
        base = full_reduced.purity();
    }
    return 1.0 - scale * (1.0 - clamp_unit(base));
}

}  // namespace zenodd
