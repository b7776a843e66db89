#include "zenodd/model.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "zenodd/errors.hpp"

namespace zenodd {

namespace {

constexpr std::array<char, 4> kPauliLetters{'I', 'X', 'Y', 'Z'};

double spectral_spread(const ComplexMatrix& h) {
    const Spectrum spec = hermitian_spectrum(h);
    return spec.eigenvalues(0) - spec.eigenvalues(spec.eigenvalues.size() - 1);
}

BipartiteModel build_model(const ComplexMatrix& h, Index d1, Index d2) {
    SchmidtSplit split = schmidt_split(h, d1, d2);
    BipartiteModel m;
    m.d1 = d1;
    m.d2 = d2;
    m.h = 0.5 * (h + h.adjoint());
    m.h1 = std::move(split.h1);
    m.h2 = std::move(split.h2);
    m.h12 = std::move(split.h12);
    m.generator_norm = spectral_spread(m.h);
    return m;
}

std::string format_double(double x) {
    if (x == 0.0) x = 0.0;  // drop the sign of negative zero
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

const char* parse_double(const char* first, const char* last, double& out) {
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc()) return nullptr;
    return res.ptr;
}

Complex parse_entry(std::string_view token, std::size_t line) {
    const auto fail = [&]() -> ParseError {
        return ParseError("matrix line " + std::to_string(line) + ": cannot parse entry '" +
                          std::string(token) + "'");
    };
    const char* first = token.data();
    const char* last = token.data() + token.size();
    double re = 0.0;
    const char* p = parse_double(first, last, re);
    if (p == nullptr) throw fail();
    if (p == last) return {re, 0.0};
    if (*p == 'j' && p + 1 == last) return {0.0, re};
    if (*p != '+' && *p != '-') throw fail();
    double im = 0.0;
    const char* q = parse_double(p, last, im);
    if (q == nullptr || q + 1 != last || *q != 'j') throw fail();
    return {re, im};
}

}  // namespace

SchmidtSplit schmidt_split(const ComplexMatrix& h, Index d1, Index d2) {
    if (d1 < 1 || d2 < 1 || h.rows() != d1 * d2 || h.cols() != d1 * d2) {
        throw DimensionError("schmidt_split: expected a " + std::to_string(d1 * d2) +
                             "-dimensional square matrix");
    }
    require_finite(h, "schmidt_split");
    if (!is_hermitian(h)) throw PreconditionError("schmidt_split: h is not Hermitian");
    if (std::abs(h.trace()) > 1e-9) {
        throw PreconditionError("schmidt_split: h is not traceless");
    }
    const ComplexMatrix sym = 0.5 * (h + h.adjoint());
    const std::array<Index, 2> dims{d1, d2};
    const std::array<Index, 1> keep1{0};
    const std::array<Index, 1> keep2{1};
    SchmidtSplit out;
    out.h1 = partial_trace(sym, dims, keep1) / static_cast<double>(d2);
    out.h2 = partial_trace(sym, dims, keep2) / static_cast<double>(d1);
    out.h12 = sym - tensor(out.h1, identity(d2)) - tensor(identity(d1), out.h2);
    return out;
}

BipartiteModel BipartiteModel::from_hamiltonian(const ComplexMatrix& h, Index d1, Index d2,
                                                double big_t) {
    if (!(big_t >= 0.0) || !std::isfinite(big_t)) {
        throw PreconditionError("BipartiteModel: T must be finite and non-negative");
    }
    BipartiteModel m = build_model(h, d1, d2);
    if (m.generator_norm > 0.0) {
        m.t_total = big_t / m.generator_norm;
        m.big_t = big_t;
    }
    return m;
}

BipartiteModel BipartiteModel::with_time(const ComplexMatrix& h, Index d1, Index d2,
                                         double t_total) {
    if (!(t_total >= 0.0) || !std::isfinite(t_total)) {
        throw PreconditionError("BipartiteModel: t must be finite and non-negative");
    }
    BipartiteModel m = build_model(h, d1, d2);
    m.t_total = t_total;
    m.big_t = t_total * m.generator_norm;
    return m;
}

ComplexMatrix pauli_string(std::string_view label) {
    if (label.empty()) throw PreconditionError("pauli_string: empty label");
    ComplexMatrix out = pauli_matrix(label[0]);
    for (std::size_t k = 1; k < label.size(); ++k) out = tensor(out, pauli_matrix(label[k]));
    return out;
}

PauliDecomposition pauli_decompose(const ComplexMatrix& h, int num_qubits) {
    if (num_qubits < 1 || num_qubits > 8) {
        throw DimensionError("pauli_decompose: qubit count must lie in [1, 8]");
    }
    const Index d = Index{1} << num_qubits;
    if (h.rows() != d || h.cols() != d) {
        throw DimensionError("pauli_decompose: matrix is not " + std::to_string(d) + "x" +
                             std::to_string(d));
    }
    PauliDecomposition out;
    std::string label(static_cast<std::size_t>(num_qubits), 'I');
    const std::size_t count = std::size_t{1} << (2 * num_qubits);
    for (std::size_t code = 0; code < count; ++code) {
        std::size_t rest = code;
        for (std::size_t q = label.size(); q-- > 0;) {
            label[q] = kPauliLetters[rest % 4];
            rest /= 4;
        }
        // tr(P h) = sum_ij P_ij h_ji.
        const ComplexMatrix p = pauli_string(label);
        const Complex tr = (p.transpose().cwiseProduct(h)).sum();
        out[label] = tr.real() / static_cast<double>(d);
    }
    return out;
}

ComplexMatrix pauli_reconstruct(const PauliDecomposition& coefficients) {
    if (coefficients.empty()) throw PreconditionError("pauli_reconstruct: no coefficients");
    const std::size_t q = coefficients.begin()->first.size();
    const Index d = Index{1} << q;
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (const auto& [label, c] : coefficients) {
        if (label.size() != q) throw DimensionError("pauli_reconstruct: mixed label lengths");
        out += c * pauli_string(label);
    }
    return out;
}

Superoperator generator_superop(const ComplexMatrix& h) {
    if (h.rows() != h.cols()) throw DimensionError("generator_superop: matrix must be square");
    require_finite(h, "generator_superop");
    if (!is_hermitian(h)) throw PreconditionError("generator_superop: h is not Hermitian");
    const Index d = h.rows();
    return {d, tensor(h, identity(d)) - tensor(identity(d), h.transpose())};
}

Superoperator projector_d(Index d1, Index d2) {
    if (d1 < 1 || d2 < 1) throw DimensionError("projector_d: dimensions must be positive");
    const Index d = d1 * d2;
    // vec index of |a1 a2><b1 b2| is ((a1 d2 + a2) d + b1 d2 + b2).
    const auto at = [&](Index a1, Index a2, Index b1, Index b2) {
        return (a1 * d2 + a2) * d + b1 * d2 + b2;
    };
    ComplexMatrix m = ComplexMatrix::Zero(d * d, d * d);
    const double w = 1.0 / static_cast<double>(d1);
    for (Index a1 = 0; a1 < d1; ++a1) {
        for (Index c1 = 0; c1 < d1; ++c1) {
            for (Index a2 = 0; a2 < d2; ++a2) {
                for (Index b2 = 0; b2 < d2; ++b2) {
                    m(at(a1, a2, a1, b2), at(c1, a2, c1, b2)) = w;
                }
            }
        }
    }
    return {d, m};
}

ZenoGenerator zeno_generator(const BipartiteModel& model,
                             const std::optional<Superoperator>& projector) {
    const Superoperator gen = generator_superop(model.h);
    const Superoperator d = projector ? *projector : projector_d(model.d1, model.d2);
    if (d.dim != gen.dim) throw DimensionError("zeno_generator: projector dimension mismatch");
    const Superoperator bath = generator_superop(tensor(identity(model.d1), model.h2));

    ZenoGenerator out;
    out.projected = {gen.dim, d.matrix * gen.matrix * d.matrix};
    out.bath_form = {gen.dim, bath.matrix * d.matrix};
    out.identity_gap = schatten_norm(out.projected.matrix - out.bath_form.matrix, SchattenP::Infinity);
    if (out.identity_gap > 1e-10 * std::max(1.0, model.generator_norm)) {
        throw IdentityViolation("zeno_generator: D H D differs from (1 x H2) D by " +
                                std::to_string(out.identity_gap));
    }
    return out;
}

BipartiteModel reference_model() {
    using C = Complex;
    ComplexMatrix h(4, 4);
    h << C(-0.10, 0.0), C(-0.03, -0.35), C(-0.22, -0.36), C(0.13, 0.21),
         C(-0.03, 0.35), C(-0.29, 0.0), C(0.20, 0.27), C(-0.02, -0.04),
         C(-0.22, 0.36), C(0.20, -0.27), C(-0.33, 0.0), C(0.30, 0.40),
         C(0.13, -0.21), C(-0.02, 0.04), C(0.30, -0.40), C(0.72, 0.0);
    return BipartiteModel::from_hamiltonian(h, 2, 2, 1.0);
}

BipartiteModel random_model(std::uint64_t seed, Index d1, Index d2, double big_t) {
    const Index d = d1 * d2;
    ComplexMatrix h = random_traceless_hermitian(d, seed);
    h -= (h.trace().real() / static_cast<double>(d)) * identity(d);
    return BipartiteModel::from_hamiltonian(h, d1, d2, big_t);
}

std::string format_matrix(const ComplexMatrix& m) {
    std::string out;
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (c > 0) out += ' ';
            const double im = m(r, c).imag();
            out += format_double(m(r, c).real());
            out += (std::signbit(im) && im != 0.0) ? "" : "+";
            out += format_double(im);
            out += 'j';
        }
        out += '\n';
    }
    return out;
}

ComplexMatrix parse_matrix(std::string_view text) {
    std::vector<std::vector<Complex>> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream tokens(line);
        std::vector<Complex> row;
        std::string token;
        while (tokens >> token) row.push_back(parse_entry(token, line_no));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("matrix line " + std::to_string(line_no) + ": expected " +
                             std::to_string(rows.front().size()) + " entries, got " +
                             std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("matrix text is empty");
    ComplexMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
        }
    }
    return m;
}

}  // namespace zenodd
