#include "zenodd/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <thread>

#include "zenodd/errors.hpp"

namespace zenodd {

const std::string_view kTypicalSequenceText =
    "Z,Z,Y,Y,Y,Y,X,X,I,I,I,Y,I,I,Y,Y,Y,Z,Z,X,Z,Y,Y,Y,Y,"
    "Z,X,Y,Z,I,X,Y,I,Z,Y,X,Y,Y,Z,I,Z,Z,X,Y,I,Y,Z,X,I,I,"
    "Z,X,Y,Y,Y,X,Y,Z,Y,Y,X,Y,Y,Y,Y,I,Z,Y,X,Y,Z,Z,X,I,X,"
    "I,X,Y,Y,Z,X,Y,Z,X,I,X,Z,Z,I,Z,Y,X,X,I,I,Z,Y,Y,X,Y,I";

const std::string_view kAtypicalSequenceText =
    "I,X,Y,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,X,"
    "I,X,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,"
    "I,Z,Z,I,I,I,I,I,I,I,Z,I,I,I,I,I,I,I,I,I,I,I,I,I,I,"
    "I,I,I,I,Z,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I,I";

namespace {

constexpr std::size_t kEnumerationBlock = 4096;

void require_steps(int n, const char* what) {
    if (n < 1) throw PreconditionError(std::string(what) + ": step count must be >= 1");
}

ComplexMatrix lift_pulse(const ComplexMatrix& v, Index d2) { return tensor(v, identity(d2)); }

void require_pulse_dim(const BipartiteModel& model, const DecouplingSet& set) {
    set.validate();
    if (set.dim() != model.d1) {
        throw DimensionError("decoupling set acts on dimension " + std::to_string(set.dim()) +
                             " but system 1 has dimension " + std::to_string(model.d1));
    }
}

ComplexMatrix matrix_power(const ComplexMatrix& base, int n) {
    ComplexMatrix out = ComplexMatrix::Identity(base.rows(), base.cols());
    for (int k = 0; k < n; ++k) out = base * out;
    return out;
}

void require_projection(const ComplexMatrix& p) {
    if (p.rows() != p.cols()) throw DimensionError("zeno_product: projection must be square");
    const double scale = std::max(1.0, p.norm());
    if ((p - p.adjoint()).norm() > 1e-10 * scale || (p * p - p).norm() > 1e-10 * scale) {
        throw PreconditionError("zeno_product: p is not a Hermitian projection");
    }
}

}  // namespace

DecouplingSet DecouplingSet::pauli() {
    DecouplingSet s;
    for (char c : {'I', 'X', 'Y', 'Z'}) {
        s.unitaries.push_back(pauli_matrix(c));
        s.weights.push_back(1.0);
        s.labels.emplace_back(1, c);
    }
    return s;
}

DecouplingSet DecouplingSet::pauli_atypical() {
    DecouplingSet s = pauli();
    s.weights[0] = 20.0;
    return s;
}

std::vector<double> DecouplingSet::probabilities() const {
    validate();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> p(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) p[k] = weights[k] / total;
    return p;
}

bool DecouplingSet::is_uniform() const {
    return std::all_of(weights.begin(), weights.end(),
                       [&](double w) { return w == weights.front(); });
}

void DecouplingSet::validate() const {
    if (unitaries.empty()) throw PreconditionError("decoupling set is empty");
    if (weights.size() != unitaries.size() || labels.size() != unitaries.size()) {
        throw PreconditionError("decoupling set: unitaries, weights and labels differ in length");
    }
    const Index d = unitaries.front().rows();
    for (std::size_t k = 0; k < unitaries.size(); ++k) {
        if (unitaries[k].rows() != d || unitaries[k].cols() != d) {
            throw DimensionError("decoupling set: pulse " + labels[k] + " has the wrong shape");
        }
        if (!is_unitary(unitaries[k], 1e-10)) {
            throw PreconditionError("decoupling set: pulse " + labels[k] + " is not unitary");
        }
        if (!(weights[k] > 0.0) || !std::isfinite(weights[k])) {
            throw PreconditionError("decoupling set: weight of " + labels[k] + " must be positive");
        }
    }
}

std::size_t DecouplingSet::index_of(std::string_view label) const {
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (labels[k] == label) return k;
    }
    if (label == "1") return index_of("I");
    throw ParseError("unknown pulse label '" + std::string(label) + "'");
}

std::string format_sequence(const DecouplingSet& set, const TrajectorySample& sample) {
    std::string out;
    for (std::size_t k = 0; k < sample.indices.size(); ++k) {
        if (k > 0) out += ',';
        out += set.labels.at(sample.indices[k]);
    }
    return out;
}

TrajectorySample parse_sequence(const DecouplingSet& set, std::string_view line) {
    TrajectorySample s;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const std::size_t comma = std::min(line.find(',', pos), line.size());
        std::string_view tok = line.substr(pos, comma - pos);
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
        if (tok.empty()) throw ParseError("empty label in pulse sequence");
        s.indices.push_back(set.index_of(tok));
        pos = comma + 1;
    }
    if (s.indices.size() < 2) throw ParseError("pulse sequence needs at least two labels");
    s.n = static_cast<int>(s.indices.size()) - 1;
    return s;
}

TrajectorySample sequence_prefix(const TrajectorySample& sample, int n) {
    require_steps(n, "sequence_prefix");
    if (n > sample.n) {
        throw PreconditionError("sequence_prefix: sample has only " + std::to_string(sample.n) +
                                " steps");
    }
    TrajectorySample out = sample;
    out.n = n;
    out.indices.resize(static_cast<std::size_t>(n) + 1);
    return out;
}

TrajectorySample typical_sequence() {
    return parse_sequence(DecouplingSet::pauli(), kTypicalSequenceText);
}

TrajectorySample atypical_sequence() {
    return parse_sequence(DecouplingSet::pauli(), kAtypicalSequenceText);
}

TrajectoryEngine::TrajectoryEngine(const BipartiteModel& model, const DecouplingSet& set, int n)
    : model_(model), n_(n) {
    require_steps(n, "TrajectoryEngine");
    require_pulse_dim(model, set);
    free_step_ = expm_i(model.h, model.t_total / n);
    pulses_.reserve(set.size());
    for (const ComplexMatrix& v : set.unitaries) pulses_.push_back(lift_pulse(v, model.d2));
}

void TrajectoryEngine::check(std::span<const std::size_t> indices) const {
    if (indices.size() != static_cast<std::size_t>(n_) + 1) {
        throw PreconditionError("trajectory: expected " + std::to_string(n_ + 1) +
                                " pulse indices, got " + std::to_string(indices.size()));
    }
    for (std::size_t k : indices) {
        if (k >= pulses_.size()) {
            throw PreconditionError("trajectory: pulse index " + std::to_string(k) + " out of range");
        }
    }
}

ComplexMatrix TrajectoryEngine::unitary(std::span<const std::size_t> indices,
                                        bool terminal_pulse) const {
    check(indices);
    ComplexMatrix u = pulses_[indices[0]];
    for (int k = 1; k <= n_; ++k) {
        u = free_step_ * u;
        if (k < n_ || terminal_pulse) u = pulses_[indices[static_cast<std::size_t>(k)]] * u;
    }
    return u;
}

ComplexMatrix TrajectoryEngine::inverted_unitary(std::span<const std::size_t> indices) const {
    check(indices);
    ComplexMatrix pulses_only = pulses_[indices[0]];
    for (std::size_t k = 1; k < indices.size(); ++k) pulses_only = pulses_[indices[k]] * pulses_only;
    return pulses_only.adjoint() * unitary(indices, true);
}

Superoperator TrajectoryEngine::evolve(std::span<const std::size_t> indices,
                                       bool terminal_pulse) const {
    return superop_from_unitary(unitary(indices, terminal_pulse));
}

Superoperator pdd_evolution(const BipartiteModel& model, const DecouplingSet& set, int m) {
    require_steps(m, "pdd_evolution");
    require_pulse_dim(model, set);
    const auto slots = static_cast<double>(m) * static_cast<double>(set.size());
    const ComplexMatrix e = expm_i(model.h, model.t_total / slots);
    ComplexMatrix cycle = identity(model.dim());
    for (const ComplexMatrix& v : set.unitaries) {
        const ComplexMatrix lifted = lift_pulse(v, model.d2);
        cycle = lifted.adjoint() * e * lifted * cycle;
    }
    return superop_from_unitary(matrix_power(cycle, m));
}

Superoperator trajectory_evolution(const BipartiteModel& model, const DecouplingSet& set,
                                   const TrajectorySample& sample, bool terminal_pulse) {
    const TrajectoryEngine engine(model, set, sample.n);
    return engine.evolve(sample.indices, terminal_pulse);
}

Superoperator average_evolution_exact(const BipartiteModel& model, int n, bool terminal_pulse) {
    require_steps(n, "average_evolution_exact");
    const Superoperator gen = generator_superop(model.h);
    const ComplexMatrix e = expm_i(gen.matrix, model.t_total / n);
    const ComplexMatrix d = projector_d(model.d1, model.d2).matrix;
    const ComplexMatrix step = terminal_pulse ? ComplexMatrix(d * e * d) : ComplexMatrix(e * d);
    return {gen.dim, matrix_power(step, n)};
}

Superoperator twirled_average_evolution(const BipartiteModel& model, const DecouplingSet& set,
                                        int n, bool terminal_pulse) {
    require_steps(n, "twirled_average_evolution");
    require_pulse_dim(model, set);
    const std::vector<double> q = set.probabilities();
    const Index d = model.dim();
    ComplexMatrix twirl = ComplexMatrix::Zero(d * d, d * d);
    for (std::size_t k = 0; k < set.size(); ++k) {
        twirl += q[k] * superop_from_unitary(lift_pulse(set.unitaries[k], model.d2)).matrix;
    }
    const ComplexMatrix e = expm_i(generator_superop(model.h).matrix, model.t_total / n);
    const ComplexMatrix body = matrix_power(ComplexMatrix(e * twirl), n);
    return {d, terminal_pulse ? ComplexMatrix(twirl * body) : body};
}

std::size_t sequence_count(const DecouplingSet& set, int n, std::size_t cap) {
    require_steps(n, "sequence_count");
    if (set.size() == 0) throw PreconditionError("decoupling set is empty");
    std::size_t count = 1;
    for (int k = 0; k <= n; ++k) {
        if (count > cap / set.size()) {
            throw EnumerationCapError("enumerating " + std::to_string(set.size()) + "^" +
                                      std::to_string(n + 1) + " sequences exceeds the cap of " +
                                      std::to_string(cap));
        }
        count *= set.size();
    }
    return count;
}

void for_each_sequence(const DecouplingSet& set, int n, std::size_t cap,
                       const std::function<void(std::span<const std::size_t>, double)>& visit) {
    const std::size_t count = sequence_count(set, n, cap);
    const std::vector<double> q = set.probabilities();
    std::vector<std::size_t> idx(static_cast<std::size_t>(n) + 1, 0);
    for (std::size_t code = 0; code < count; ++code) {
        std::size_t rest = code;
        double w = 1.0;
        for (std::size_t k = idx.size(); k-- > 0;) {
            idx[k] = rest % set.size();
            rest /= set.size();
        }
        for (std::size_t k : idx) w *= q[k];
        visit(idx, w);
    }
}

Superoperator brute_force_average(const BipartiteModel& model, const DecouplingSet& set, int n,
                                  std::size_t cap, unsigned threads) {
    require_pulse_dim(model, set);
    const std::size_t count = sequence_count(set, n, cap);
    const TrajectoryEngine engine(model, set, n);
    const std::vector<double> q = set.probabilities();
    const Index d = model.dim();
    const std::size_t blocks = (count + kEnumerationBlock - 1) / kEnumerationBlock;
    std::vector<ComplexMatrix> partial(blocks, ComplexMatrix::Zero(d * d, d * d));

    const auto run_block = [&](std::size_t b) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(n) + 1);
        const std::size_t end = std::min(count, (b + 1) * kEnumerationBlock);
        ComplexMatrix& acc = partial[b];
        for (std::size_t code = b * kEnumerationBlock; code < end; ++code) {
            std::size_t rest = code;
            double w = 1.0;
            for (std::size_t k = idx.size(); k-- > 0;) {
                idx[k] = rest % set.size();
                rest /= set.size();
                w *= q[idx[k]];
            }
            const ComplexMatrix u = engine.unitary(idx);
            acc.noalias() += w * tensor(u, u.conjugate());
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
    if (workers == 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t b = w; b < blocks; b += workers) run_block(b);
            });
        }
        for (std::thread& t : pool) t.join();
    }

    ComplexMatrix total = ComplexMatrix::Zero(d * d, d * d);
    for (const ComplexMatrix& p : partial) total += p;
    return {d, total};
}

ZenoLimit zeno_limit(const BipartiteModel& model) {
    const ZenoGenerator gen = zeno_generator(model);
    const ComplexMatrix d = projector_d(model.d1, model.d2).matrix;
    ZenoLimit out;
    out.limit = {model.dim(), expm_i(gen.projected.matrix, model.t_total) * d};
    const Superoperator bath = generator_superop(tensor(identity(model.d1), model.h2));
    out.bath_limit = {model.dim(), expm_i(bath.matrix, model.t_total) * d};
    out.identity_gap = schatten_norm(out.limit.matrix - out.bath_limit.matrix, SchattenP::Infinity);
    if (out.identity_gap > 1e-10) {
        throw IdentityViolation("zeno_limit: the two forms of the limit differ by " +
                                std::to_string(out.identity_gap));
    }
    return out;
}

ComplexMatrix zeno_product(const ComplexMatrix& h, const ComplexMatrix& p, double t, int n,
                           ZenoVariant variant) {
    require_steps(n, "zeno_product");
    require_projection(p);
    if (h.rows() != p.rows() || h.cols() != p.cols()) {
        throw DimensionError("zeno_product: h and p differ in shape");
    }
    const ComplexMatrix e = expm_i(h, t / n);
    switch (variant) {
        case ZenoVariant::PLast:
            return matrix_power(ComplexMatrix(e * p), n);
        case ZenoVariant::PSandwich:
            return matrix_power(ComplexMatrix(p * e * p), n);
        case ZenoVariant::PFirst:
            return matrix_power(ComplexMatrix(p * e), n);
    }
    return {};
}

ComplexMatrix zeno_product_target(const ComplexMatrix& h, const ComplexMatrix& p, double t) {
    require_projection(p);
    const ComplexMatrix php = p * h * p;
    return expm_i(0.5 * (php + php.adjoint()), t) * p;
}

Superoperator pulse_inverted_evolution(const BipartiteModel& model, const DecouplingSet& set,
                                       const TrajectorySample& sample) {
    const TrajectoryEngine engine(model, set, sample.n);
    return superop_from_unitary(engine.inverted_unitary(sample.indices));
}

}  // namespace zenodd
