#include "zenodd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zenodd/errors.hpp"
#include "zenodd/rng.hpp"

namespace zenodd {

namespace {

Index product(std::span<const Index> dims) {
    Index total = 1;
    for (Index d : dims) {
        if (d < 1) throw DimensionError("subsystem dimensions must be positive");
        total *= d;
    }
    return total;
}

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(what) + ": matrix must be square, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

// Row-major digits of `index` for the given subsystem dimensions.
void digits_of(Index index, std::span<const Index> dims, std::vector<Index>& out) {
    out.resize(dims.size());
    for (std::size_t s = dims.size(); s-- > 0;) {
        out[s] = index % dims[s];
        index /= dims[s];
    }
}

}  // namespace

ComplexMatrix identity(Index d) { return ComplexMatrix::Identity(d, d); }

ComplexMatrix pauli_matrix(char label) {
    ComplexMatrix p = ComplexMatrix::Zero(2, 2);
    switch (label) {
        case 'I':
            p(0, 0) = 1.0;
            p(1, 1) = 1.0;
            break;
        case 'X':
            p(0, 1) = 1.0;
            p(1, 0) = 1.0;
            break;
        case 'Y':
            p(0, 1) = Complex(0.0, -1.0);
            p(1, 0) = Complex(0.0, 1.0);
            break;
        case 'Z':
            p(0, 0) = 1.0;
            p(1, 1) = -1.0;
            break;
        default:
            throw PreconditionError(std::string("unknown Pauli label '") + label + "'");
    }
    return p;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const Index> dims,
                            std::span<const Index> keep) {
    require_square(m, "partial_trace");
    const Index total = product(dims);
    if (total != m.rows()) {
        throw DimensionError("partial_trace: subsystem dimensions multiply to " +
                             std::to_string(total) + " but matrix has dimension " +
                             std::to_string(m.rows()));
    }
    std::vector<bool> kept(dims.size(), false);
    for (Index k : keep) {
        if (k < 0 || static_cast<std::size_t>(k) >= dims.size()) {
            throw DimensionError("partial_trace: kept subsystem index out of range");
        }
        kept[static_cast<std::size_t>(k)] = true;
    }

    // Split every full index into its kept part and its traced part once.
    std::vector<Index> kept_index(static_cast<std::size_t>(total));
    std::vector<Index> traced_index(static_cast<std::size_t>(total));
    Index kept_dim = 1;
    for (std::size_t s = 0; s < dims.size(); ++s) {
        if (kept[s]) kept_dim *= dims[s];
    }
    std::vector<Index> digits;
    for (Index r = 0; r < total; ++r) {
        digits_of(r, dims, digits);
        Index k = 0;
        Index t = 0;
        for (std::size_t s = 0; s < dims.size(); ++s) {
            if (kept[s]) {
                k = k * dims[s] + digits[s];
            } else {
                t = t * dims[s] + digits[s];
            }
        }
        kept_index[static_cast<std::size_t>(r)] = k;
        traced_index[static_cast<std::size_t>(r)] = t;
    }

    ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
    for (Index c = 0; c < total; ++c) {
        const auto cu = static_cast<std::size_t>(c);
        for (Index r = 0; r < total; ++r) {
            const auto ru = static_cast<std::size_t>(r);
            if (traced_index[ru] == traced_index[cu]) {
                out(kept_index[ru], kept_index[cu]) += m(r, c);
            }
        }
    }
    return out;
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m, std::span<const Index> dims,
                                 std::span<const Index> order) {
    require_square(m, "permute_subsystems");
    const Index total = product(dims);
    if (total != m.rows() || order.size() != dims.size()) {
        throw DimensionError("permute_subsystems: dimension mismatch");
    }
    std::vector<bool> seen(dims.size(), false);
    for (Index o : order) {
        if (o < 0 || static_cast<std::size_t>(o) >= dims.size() || seen[static_cast<std::size_t>(o)]) {
            throw DimensionError("permute_subsystems: order is not a permutation");
        }
        seen[static_cast<std::size_t>(o)] = true;
    }

    std::vector<Index> target(static_cast<std::size_t>(total));
    std::vector<Index> digits;
    for (Index r = 0; r < total; ++r) {
        digits_of(r, dims, digits);
        Index p = 0;
        for (Index o : order) {
            const auto ou = static_cast<std::size_t>(o);
            p = p * dims[ou] + digits[ou];
        }
        target[static_cast<std::size_t>(r)] = p;
    }

    ComplexMatrix out(total, total);
    for (Index c = 0; c < total; ++c) {
        for (Index r = 0; r < total; ++r) {
            out(target[static_cast<std::size_t>(r)], target[static_cast<std::size_t>(c)]) = m(r, c);
        }
    }
    return out;
}

ComplexVector vectorize(const ComplexMatrix& a) {
    require_square(a, "vectorize");
    const Index d = a.rows();
    ComplexVector v(d * d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            v(i * d + j) = a(i, j);
        }
    }
    return v;
}

ComplexMatrix devectorize(const ComplexVector& v) {
    const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) {
        throw DimensionError("devectorize: length " + std::to_string(v.size()) +
                             " is not a perfect square");
    }
    ComplexMatrix a(d, d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            a(i, j) = v(i * d + j);
        }
    }
    return a;
}

RealVector singular_values(const ComplexMatrix& a) {
    require_finite(a, "singular_values");
    if (a.size() == 0) return RealVector();
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    return svd.singularValues();
}

double schatten_norm(const ComplexMatrix& a, SchattenP p) {
    switch (p) {
        case SchattenP::Two:
            require_finite(a, "schatten_norm");
            return a.norm();
        case SchattenP::One:
            return singular_values(a).sum();
        case SchattenP::Infinity: {
            const RealVector s = singular_values(a);
            return s.size() == 0 ? 0.0 : s.maxCoeff();
        }
    }
    return 0.0;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return (a - a.adjoint()).norm() <= tol * std::max(1.0, a.norm());
}

bool is_unitary(const ComplexMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return (a.adjoint() * a - ComplexMatrix::Identity(a.rows(), a.cols())).norm() <= tol;
}

void require_finite(const ComplexMatrix& a, const char* what) {
    if (!a.allFinite()) {
        throw PreconditionError(std::string(what) + ": matrix has non-finite entries");
    }
}

Spectrum hermitian_spectrum(const ComplexMatrix& h) {
    require_square(h, "hermitian_spectrum");
    require_finite(h, "hermitian_spectrum");
    if (!is_hermitian(h)) {
        throw PreconditionError("hermitian_spectrum: matrix is not Hermitian");
    }
    const ComplexMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw PreconditionError("hermitian_spectrum: eigensolver did not converge");
    }
    // Eigen sorts ascending.
    Spectrum out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

ComplexMatrix expm_i(const ComplexMatrix& h, double t) {
    const Spectrum spec = hermitian_spectrum(h);
    ComplexVector phases(spec.eigenvalues.size());
    for (Index k = 0; k < phases.size(); ++k) {
        phases(k) = std::polar(1.0, -t * spec.eigenvalues(k));
    }
    return spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint();
}

ComplexMatrix closest_unitary(const ComplexMatrix& a) {
    require_square(a, "closest_unitary");
    require_finite(a, "closest_unitary");
    Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& s = svd.singularValues();
    if (s.size() == 0 || s.minCoeff() <= 1e-12) {
        throw RankDeficientError("closest_unitary: matrix is rank deficient, polar unitary is not unique");
    }
    return svd.matrixU() * svd.matrixV().adjoint();
}

ComplexMatrix with_canonical_phase(const ComplexMatrix& a) {
    Index best_r = 0;
    Index best_c = 0;
    double best = -1.0;
    for (Index r = 0; r < a.rows(); ++r) {
        for (Index c = 0; c < a.cols(); ++c) {
            // Ties within rounding noise go to the first entry in row-major order.
            const double mag = std::abs(a(r, c));
            if (mag > best * (1.0 + 1e-12) + 1e-15) {
                best = mag;
                best_r = r;
                best_c = c;
            }
        }
    }
    if (best <= 0.0) return a;
    const Complex phase = std::conj(a(best_r, best_c)) / best;
    ComplexMatrix out = a * phase;
    out(best_r, best_c) = Complex(best, 0.0);
    return out;
}

ComplexMatrix random_traceless_hermitian(Index d, std::uint64_t seed) {
    if (d < 2) throw DimensionError("random_traceless_hermitian: d must be >= 2");
    Rng rng(seed);
    ComplexMatrix a(d, d);
    for (Index r = 0; r < d; ++r) {
        for (Index c = 0; c < d; ++c) {
            const double re = rng.uniform(-1.0, 1.0);
            const double im = rng.uniform(-1.0, 1.0);
            a(r, c) = Complex(re, im);
        }
    }
    ComplexMatrix h = a + a.adjoint();
    h -= (h.trace() / static_cast<double>(d)) * identity(d);
    h /= schatten_norm(h, SchattenP::Infinity);

    const auto round2 = [](double x) { return std::round(x * 100.0) / 100.0; };
    ComplexMatrix out(d, d);
    for (Index r = 0; r < d; ++r) {
        out(r, r) = Complex(round2(h(r, r).real()), 0.0);
        for (Index c = r + 1; c < d; ++c) {
            const Complex v(round2(h(r, c).real()), round2(h(r, c).imag()));
            out(r, c) = v;
            out(c, r) = std::conj(v);
        }
    }
    return out;
}

}  // namespace zenodd
