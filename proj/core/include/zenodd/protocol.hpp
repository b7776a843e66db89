#pragma once

// Decoupling evolutions on a BipartiteModel. Pulses act on system 1 only,
// V -> (V x 1_2); every protocol returns the superoperator of the whole
// evolution over the model's total time t.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zenodd/channel.hpp"
#include "zenodd/model.hpp"

namespace zenodd {

inline constexpr std::size_t kDefaultEnumerationCap = 500000;

struct DecouplingSet {
    std::vector<ComplexMatrix> unitaries;
    std::vector<double> weights;  // relative, normalized on use
    std::vector<std::string> labels;

    /// {I, X, Y, Z}, uniform.
    static DecouplingSet pauli();
    /// {I, X, Y, Z} with the identity 20 times as likely as each Pauli.
    static DecouplingSet pauli_atypical();

    std::size_t size() const { return unitaries.size(); }
    Index dim() const { return unitaries.empty() ? 0 : unitaries.front().rows(); }
    std::vector<double> probabilities() const;
    bool is_uniform() const;

    /// Non-empty, consistent lengths, unitaries to 1e-10, positive finite weights.
    void validate() const;

    /// Index of a label; "1" is accepted for "I". Throws ParseError.
    std::size_t index_of(std::string_view label) const;
};

/// n free steps interleaved with n + 1 pulses, V_{indices[0]} acting first.
struct TrajectorySample {
    int n = 0;
    std::vector<std::size_t> indices;
    std::uint64_t seed = 0;  // provenance only
};

/// "Z,Z,Y,..." in pulse order.
std::string format_sequence(const DecouplingSet& set, const TrajectorySample& sample);

/// Parses a comma-separated label line; n = labels - 1.
TrajectorySample parse_sequence(const DecouplingSet& set, std::string_view line);

/// First n + 1 pulses of a longer sample.
TrajectorySample sequence_prefix(const TrajectorySample& sample, int n);

/// The two reference 101-pulse sequences over DecouplingSet::pauli() labels.
/// The atypical one was drawn with the pauli_atypical() weights.
TrajectorySample typical_sequence();
TrajectorySample atypical_sequence();
extern const std::string_view kTypicalSequenceText;
extern const std::string_view kAtypicalSequenceText;

/// Caches exp(-i H t/n) and the lifted pulses for one (model, set, n). The
/// trajectory product is accumulated on the d x d unitary and lifted to a
/// superoperator once.
class TrajectoryEngine {
public:
    TrajectoryEngine(const BipartiteModel& model, const DecouplingSet& set, int n);

    int n() const { return n_; }
    const BipartiteModel& model() const { return model_; }

    /// V_{n+1} e V_n ... e V_1 (terminal pulse dropped when `terminal_pulse` is false).
    ComplexMatrix unitary(std::span<const std::size_t> indices, bool terminal_pulse = true) const;
    /// (V_{n+1} ... V_1)^dagger times the trajectory unitary.
    ComplexMatrix inverted_unitary(std::span<const std::size_t> indices) const;

    Superoperator evolve(std::span<const std::size_t> indices, bool terminal_pulse = true) const;

    const ComplexMatrix& free_step() const { return free_step_; }
    const ComplexMatrix& pulse(std::size_t k) const { return pulses_[k]; }

private:
    void check(std::span<const std::size_t> indices) const;

    BipartiteModel model_;
    int n_;
    ComplexMatrix free_step_;
    std::vector<ComplexMatrix> pulses_;
};

/// ((V_|V|^dag e V_|V|) ... (V_1^dag e V_1))^m, e = exp(-i H t / (m |V|)).
Superoperator pdd_evolution(const BipartiteModel& model, const DecouplingSet& set, int m);

Superoperator trajectory_evolution(const BipartiteModel& model, const DecouplingSet& set,
                                   const TrajectorySample& sample, bool terminal_pulse = true);

/// (D^ E D^)^n with E = exp(-i H^ t/n); (E D^)^n without the terminal pulse.
Superoperator average_evolution_exact(const BipartiteModel& model, int n, bool terminal_pulse = true);

/// Weighted average through the twirl W = sum_k q_k V^_k: W (E W)^n, or
/// (E W)^n without the terminal pulse. Equals average_evolution_exact when
/// the set is a uniform unitary 1-design.
Superoperator twirled_average_evolution(const BipartiteModel& model, const DecouplingSet& set,
                                        int n, bool terminal_pulse = true);

/// Visits every pulse sequence of length n + 1 with its probability, in
/// lexicographic order. Throws EnumerationCapError above `cap` sequences.
void for_each_sequence(const DecouplingSet& set, int n, std::size_t cap,
                       const std::function<void(std::span<const std::size_t>, double)>& visit);

std::size_t sequence_count(const DecouplingSet& set, int n, std::size_t cap);

/// Explicit weighted sum of trajectory_evolution over all |V|^(n+1)
/// sequences. Sequences are summed in fixed blocks merged in block order, so
/// the result does not depend on `threads`.
Superoperator brute_force_average(const BipartiteModel& model, const DecouplingSet& set, int n,
                                  std::size_t cap = kDefaultEnumerationCap, unsigned threads = 1);

struct ZenoLimit {
    Superoperator limit;       // exp(-i t D^ H^ D^) D^
    Superoperator bath_limit;  // exp(-i t (1^_1 x H^_2)) D^
    double identity_gap = 0.0;
};

/// Throws IdentityViolation when the two forms differ by more than 1e-10.
ZenoLimit zeno_limit(const BipartiteModel& model);

enum class ZenoVariant { PLast, PSandwich, PFirst };

/// (e^{-itH/n} P)^n, (P e^{-itH/n} P)^n or (P e^{-itH/n})^n for Hermitian h
/// and a Hermitian projection p (to 1e-10, else PreconditionError).
ComplexMatrix zeno_product(const ComplexMatrix& h, const ComplexMatrix& p, double t, int n,
                           ZenoVariant variant);

/// exp(-i t P H P) P.
ComplexMatrix zeno_product_target(const ComplexMatrix& h, const ComplexMatrix& p, double t);

/// (V^_{n+1} ... V^_1)^dagger trajectory_evolution.
Superoperator pulse_inverted_evolution(const BipartiteModel& model, const DecouplingSet& set,
                                       const TrajectorySample& sample);

}  // namespace zenodd
