#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zeno_dd/commands.hpp"
#include "zenodd/bounds.hpp"
#include "zenodd/errors.hpp"
#include "zenodd/montecarlo.hpp"
#include "zenodd/rng.hpp"

namespace zeno_dd {

namespace {

using zenodd::ComplexMatrix;
using zenodd::SchattenP;
using zenodd::Superoperator;

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double opnorm(const ComplexMatrix& m) { return zenodd::schatten_norm(m, SchattenP::Infinity); }

// Collects checks of the form value <= bound (or >= bound) within tol.
class Suite {
public:
    explicit Suite(CommandResult& out) : out_(out) {}

    void at_most(const std::string& name, double value, double bound, double tol) {
        emit(name, value, bound, tol, bound - value, "<=");
    }
    void at_least(const std::string& name, double value, double bound, double tol) {
        emit(name, value, bound, tol, value - bound, ">=");
    }
    void fail(const std::string& name, const std::string& why) {
        out_.report.push_back("FAIL  " + name + ": " + why);
        out_.failures.push_back(name + ": " + why);
    }
    void skip(const std::string& name, const std::string& why) {
        out_.report.push_back("SKIP  " + name + ": " + why);
    }

    /// Runs `body`, turning any library exception into a failed check.
    void guarded(const std::string& name, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            fail(name, e.what());
        }
    }

private:
    void emit(const std::string& name, double value, double bound, double tol, double margin,
              const char* rel) {
        const bool pass = std::isfinite(margin) && margin >= -tol;
        out_.report.push_back(std::string(pass ? "PASS  " : "FAIL  ") + name + ": " + num(value) +
                              " " + rel + " " + num(bound) + "  margin " + num(margin) + "  tol " +
                              num(tol));
        if (!pass) {
            out_.failures.push_back(name + ": " + num(value) + " " + rel + " " + num(bound) +
                                    " violated by " + num(-margin));
        }
    }

    CommandResult& out_;
};

/// D^ plus a rank-one perturbation; breaks the decoupling identity.
Superoperator faulty_projector(zenodd::Index d1, zenodd::Index d2) {
    Superoperator p = zenodd::projector_d(d1, d2);
    const zenodd::Index last = p.matrix.rows() - 1;
    p.matrix(last, last) += 1e-3;
    return p;
}

void zeno_checks(Suite& s, const zenodd::BipartiteModel& model, const std::vector<int>& grid) {
    const ComplexMatrix gen = zenodd::generator_superop(model.h).matrix;
    const ComplexMatrix proj = zenodd::projector_d(model.d1, model.d2).matrix;
    const ComplexMatrix target = zenodd::zeno_product_target(gen, proj, model.t_total);
    struct Variant {
        const char* name;
        zenodd::ZenoVariant v;
        bool sandwich;
    };
    for (const Variant& v : {Variant{"zeno bound, projection last", zenodd::ZenoVariant::PLast, false},
                             Variant{"zeno bound, projection first", zenodd::ZenoVariant::PFirst, false},
                             Variant{"zeno bound, sandwiched", zenodd::ZenoVariant::PSandwich, true}}) {
        double worst_margin = INFINITY;
        double worst_value = 0.0;
        double worst_bound = 0.0;
        int worst_n = 0;
        for (int n : grid) {
            const double err =
                opnorm(zenodd::zeno_product(gen, proj, model.t_total, n, v.v) - target);
            const double bound = v.sandwich ? zenodd::zeno_bound_sandwich(model.big_t, n)
                                            : zenodd::zeno_bound(model.big_t, n);
            if (bound - err < worst_margin) {
                worst_margin = bound - err;
                worst_value = err;
                worst_bound = bound;
                worst_n = n;
            }
        }
        s.at_most(std::string(v.name) + " (worst n=" + std::to_string(worst_n) + ")", worst_value,
                  worst_bound, 1e-12);
    }

    // The averaged protocol is the same product built through the Pauli twirl.
    const zenodd::ZenoLimit limit = zenodd::zeno_limit(model);
    for (int n : {1, 4, 16}) {
        const double with_pulse =
            opnorm(zenodd::average_evolution_exact(model, n, true).matrix - limit.limit.matrix);
        s.at_most("average protocol with terminal pulse vs Zeno limit, n=" + std::to_string(n),
                  with_pulse, zenodd::zeno_bound_sandwich(model.big_t, n), 1e-12);
        const double without =
            opnorm(zenodd::average_evolution_exact(model, n, false).matrix - limit.limit.matrix);
        s.at_most("average protocol without terminal pulse vs Zeno limit, n=" + std::to_string(n),
                  without, zenodd::zeno_bound(model.big_t, n), 1e-12);
    }
}

void decoupling_checks(Suite& s, const zenodd::BipartiteModel& model, const ExperimentConfig& cfg) {
    const std::string name = "decoupling-by-average identity D^ H^ D^ = (1 x H^_2) D^";
    std::optional<Superoperator> projector;
    if (cfg.inject_fault == "projector") projector = faulty_projector(model.d1, model.d2);
    const double tol = 1e-10 * std::max(1.0, model.generator_norm);
    try {
        const zenodd::ZenoGenerator g = zenodd::zeno_generator(model, projector);
        s.at_most(name, g.identity_gap, 0.0, tol);
    } catch (const zenodd::IdentityViolation& e) {
        s.fail(name, e.what());
    }
    s.guarded("Zeno limit: projected and bath forms agree", [&] {
        const zenodd::ZenoLimit limit = zenodd::zeno_limit(model);
        s.at_most("Zeno limit: projected and bath forms agree", limit.identity_gap, 0.0, 1e-10);
    });
}

/// True when the set twirls to D^ (a uniform unitary 1-design on system 1).
bool twirls_to_projector(const zenodd::BipartiteModel& model, const zenodd::DecouplingSet& set) {
    const double gap = opnorm(zenodd::twirled_average_evolution(model, set, 1).matrix -
                              zenodd::average_evolution_exact(model, 1).matrix);
    return gap <= 1e-10;
}

void average_checks(Suite& s, const zenodd::BipartiteModel& model, const zenodd::DecouplingSet& set,
                    bool design, unsigned threads) {
    for (int n = 1; n <= 3; ++n) {
        const std::string tag = ", n=" + std::to_string(n);
        s.guarded("brute-force average" + tag, [&] {
            const Superoperator brute = zenodd::brute_force_average(model, set, n,
                                                                    zenodd::kDefaultEnumerationCap, threads);
            const Superoperator twirl = zenodd::twirled_average_evolution(model, set, n);
            s.at_most("brute-force average equals twirl product" + tag,
                      opnorm(brute.matrix - twirl.matrix), 0.0, 1e-10);
            if (design) {
                const Superoperator exact = zenodd::average_evolution_exact(model, n);
                s.at_most("brute-force average equals (D^ E D^)^n" + tag,
                          opnorm(brute.matrix - exact.matrix), 0.0, 1e-10);
            }
        });
    }
}

/// Tracks the grid point with the smallest margin.
struct Worst {
    double margin = INFINITY;
    double value = 0.0;
    double bound = 0.0;
    int n = 0;

    void offer(double v, double b, double m, int at) {
        if (m < margin) *this = {m, v, b, at};
    }
};

void system2_average_checks(Suite& s, const zenodd::BipartiteModel& model,
                            const zenodd::ComplexMatrix& sigma1, const zenodd::ComplexMatrix& sigma2,
                            const std::vector<int>& grid, std::uint64_t seed) {
    const ComplexMatrix u2 = zenodd::expm_i(model.h2, model.t_total);
    const zenodd::ChoiState zeno2 = zenodd::choi_of_unitary(u2);
    const Superoperator zeno2_map = zenodd::superop_from_unitary(u2);
    Worst distance;
    Worst chain;
    Worst diamond;
    for (int n : grid) {
        const Superoperator avg = zenodd::average_evolution_exact(model, n);
        const Superoperator reduced = zenodd::reduced_map(avg, sigma1, zenodd::Subsystem::One);
        const zenodd::ChoiState choi = zenodd::choi_from_superop(reduced);
        const zenodd::Av2Bounds b = zenodd::av2_bounds(bound_inputs(model, sigma1, sigma2, n));

        const double dist = (choi.matrix() - zeno2.matrix()).norm();
        distance.offer(dist, b.choi_frobenius, b.choi_frobenius - dist, n);

        // sqrt(P) >= opnorm >= fidelity >= 1 - a; report the weakest link.
        const double fid = zenodd::fidelity_to_unitary(choi, u2);
        const double floor = 1.0 - b.choi_frobenius;
        const double link = std::min({std::sqrt(choi.purity()) - choi.opnorm(), choi.opnorm() - fid,
                                      fid - floor});
        chain.offer(floor + link, floor, link, n);

        const double lower = zenodd::sampled_diamond_lower(reduced, zeno2_map, 64, seed + n);
        diamond.offer(lower, b.diamond, b.diamond - lower, n);
    }
    const auto at = [](const Worst& w) { return " (worst n=" + std::to_string(w.n) + ")"; };
    s.at_most("average system-2 Choi distance to Zeno unitary" + at(distance), distance.value,
              distance.bound, 1e-12);
    s.at_least("average system-2 chain sqrt(P) >= opnorm >= fidelity >= 1 - a" + at(chain), chain.value,
               chain.bound, 1e-12);
    s.at_most("average system-2 sampled diamond distance" + at(diamond), diamond.value, diamond.bound,
              1e-9);
}

void enumeration_checks(Suite& s, const zenodd::BipartiteModel& model, const zenodd::DecouplingSet& set,
                        const zenodd::StatisticParams& params) {
    const auto exact = [&](const char* name, int n) {
        return zenodd::enumerate_statistic(model, set, n, zenodd::make_statistic(name, model, params));
    };
    constexpr double kTol = 1e-9;
    for (int n = 1; n <= 3; ++n) {
        const std::string tag = " [exact, n=" + std::to_string(n) + "]";
        s.guarded("enumeration" + tag, [&] {
            const zenodd::BoundInputs in = bound_inputs(model, params.sigma1, params.sigma2, n);
            const double a = in.system2_rate();
            const double b = in.system1_rate();

            const auto fid = exact("fidelity-2-zeno", n);
            const auto frob = exact("frob-dist-2-zeno", n);
            const auto pur2 = exact("purity-2", n);
            const auto op2 = exact("opnorm-2", n);
            const auto pur1 = exact("purity-1", n);
            const auto op1 = exact("opnorm-1", n);
            const auto lead1 = exact("opnorm-dist-1-leading", n);
            const auto fro1 = exact("frob-dist-superop-1-closest-unitary", n);
            const auto dia1 = exact("diamond-upper-1-closest-unitary", n);
            const auto fro2 = exact("frob-dist-superop-2-closest-unitary", n);

            s.at_least("system-2 E[fidelity] >= 1 - a" + tag, fid.mean(), 1.0 - a, kTol);
            s.at_least("system-2 E[opnorm] >= 1 - a" + tag, op2.mean(), 1.0 - a, kTol);
            s.at_least("system-2 sqrt(E[P]) >= E[opnorm]" + tag, std::sqrt(pur2.mean()), op2.mean(), kTol);
            s.at_most("system-2 E[Frobenius distance to Zeno] <= sqrt(2a)" + tag, frob.mean(),
                      zenodd::tr2_distance_bound(in).choi, kTol);
            for (double r : {0.5, 0.9}) {
                zenodd::BoundInputs tail_in = in;
                tail_in.r = r;
                s.at_most("system-2 P[fidelity <= " + num(r) + "] <= a/(1-r)" + tag,
                          fid.tail(r), zenodd::tr2_tail(tail_in).raw, kTol);
            }
            const zenodd::Tr2VarianceBounds v2 = zenodd::tr2_variance_bounds(in);
            s.at_most("system-2 Var[P]" + tag, pur2.variance(), v2.purity, kTol);
            s.at_most("system-2 Var[opnorm]" + tag, op2.variance(), v2.opnorm, kTol);
            s.at_most("system-2 Var[fidelity]" + tag, fid.variance(), v2.fidelity, kTol);
            s.at_most("system-2 Var[Frobenius distance]" + tag, frob.variance(), v2.frobenius, kTol);

            s.at_least("system-1 E[opnorm] >= 1 - b" + tag, op1.mean(), 1.0 - b, kTol);
            s.at_least("system-1 sqrt(E[P]) >= E[opnorm]" + tag, std::sqrt(pur1.mean()), op1.mean(), kTol);
            s.at_most("system-1 E[distance to leading projector] <= b" + tag, lead1.mean(),
                      zenodd::tr1_pure_choi_distance(in), kTol);
            const zenodd::Tr1VarianceBounds v1 = zenodd::tr1_variance_bounds(in);
            s.at_most("system-1 Var[P]" + tag, pur1.variance(), v1.purity, kTol);
            s.at_most("system-1 Var[opnorm]" + tag, op1.variance(), v1.opnorm, kTol);
            s.at_most("system-1 Var[distance to leading projector]" + tag, lead1.variance(), v1.leading, kTol);

            const zenodd::ClosestUnitaryMeanBounds cu_bounds = zenodd::closest_unitary_mean_bounds(in);
            s.at_most("system-1 E[superop distance to closest unitary]" + tag, fro1.mean(), cu_bounds.fro_mean, kTol);
            s.at_most("system-1 Var[superop distance to closest unitary]" + tag, fro1.variance(),
                      cu_bounds.fro_var, kTol);
            s.at_most("system-1 E[3 d1 (1 - opnorm)] <= 3 d1 b" + tag, dia1.mean(), cu_bounds.diamond_mean, kTol);
            s.at_most("system-2 E[superop distance to closest unitary]" + tag, fro2.mean(),
                      zenodd::tr2_superop_distance_bound(in), kTol);
        });
    }
}

void trajectory_checks(Suite& s, const zenodd::BipartiteModel& model, const zenodd::DecouplingSet& set,
                       const zenodd::ComplexMatrix& sigma2, std::uint64_t seed, unsigned threads) {
    constexpr int kN = 20;
    constexpr std::size_t kSamples = 100;
    s.guarded("trajectory identities", [&] {
        const zenodd::MultiStatistic eval = [&](const zenodd::TrajectoryContext& c) {
            const zenodd::ChoiState full = zenodd::choi_from_superop(c.evolution);
            const zenodd::ChoiState l1 = zenodd::reduced_choi(full, zenodd::Subsystem::One, model.d1, model.d2);
            const zenodd::ChoiState l2 = zenodd::reduced_choi(full, zenodd::Subsystem::Two, model.d1, model.d2);
            const zenodd::ChoiState l1s = zenodd::choi_of_reduced_map(c.evolution, sigma2, zenodd::Subsystem::Two);
            const double s_inf = zenodd::schatten_norm(sigma2, SchattenP::Infinity);
            const double op_floor =
                zenodd::reduced_choi_lower_bounds(l1, s_inf, model.d2, zenodd::OpNormProbe{});
            const double pur_floor =
                zenodd::reduced_choi_lower_bounds(l1, s_inf, model.d2, zenodd::PurityProbe{});
            const zenodd::PulseInversionDistances pi = zenodd::pulse_inversion_distances(c, sigma2);
            const zenodd::ClosestUnitaryChannel cu = zenodd::closest_unitary_channel(l1s);
            const Superoperator e1 = zenodd::reduced_map(c.evolution, sigma2, zenodd::Subsystem::Two);
            const double dia_lower =
                zenodd::sampled_diamond_lower(e1, zenodd::superop_from_unitary(cu.unitary), 16,
                                              c.sample.seed);
            return std::vector<double>{
                std::abs(l1.purity() - l2.purity()),
                std::abs(l1.opnorm() - l2.opnorm()),
                op_floor - l1s.opnorm(),
                pur_floor - std::sqrt(l1s.purity()),
                pi.inverted_to_identity - pi.inverted_unitary_to_identity - pi.channel_to_closest_unitary,
                std::abs(pi.channel_to_closest_unitary - pi.inverted_to_closest_unitary),
                dia_lower - cu.upper_diamond,
            };
        };
        const auto values = zenodd::sample_values(model, set, kN, kSamples, seed, eval, threads);
        std::vector<double> worst(values.front().size(), -INFINITY);
        for (const auto& row : values) {
            for (std::size_t k = 0; k < row.size(); ++k) worst[k] = std::max(worst[k], row[k]);
        }
        const std::string tag = " [100 trajectories, n=20]";
        s.at_most("Schmidt symmetry |P(Lambda_1) - P(Lambda_2)|" + tag, worst[0], 0.0, 1e-10);
        s.at_most("Schmidt symmetry |opnorm(Lambda_1) - opnorm(Lambda_2)|" + tag, worst[1], 0.0, 1e-8);
        s.at_most("reduced Choi opnorm transfer to partner sigma2" + tag, worst[2], 0.0, 1e-10);
        s.at_most("reduced Choi purity transfer to partner sigma2" + tag, worst[3], 0.0, 1e-10);
        s.at_most("pulse-inversion triangle inequality" + tag, worst[4], 0.0, 1e-9);
        s.at_most("closest-unitary distance invariant under pulse inversion" + tag, worst[5], 0.0, 1e-9);
        s.at_most("sampled diamond distance <= 3 d (1 - opnorm)" + tag, worst[6], 0.0, 1e-9);
    });
}

void channel_checks(Suite& s, std::uint64_t seed) {
    constexpr double kTol = 1e-9;
    double sandwich = INFINITY;
    double fnorm = 0.0;
    double diamond = INFINITY;
    double pur_ev = INFINITY;
    double reduced = 0.0;
    double split = 0.0;
    s.guarded("random channel checks", [&] {
        for (std::uint64_t k = 0; k < 200; ++k) {
            const zenodd::Index d = 2 + static_cast<zenodd::Index>(k % 2);
            const std::size_t kraus = 1 + static_cast<std::size_t>((k / 2) % 4);
            const zenodd::QuantumChannel ch =
                zenodd::random_channel(d, kraus, zenodd::Rng::stream_seed(seed, k));
            const Superoperator t = zenodd::superop_from_kraus(ch);
            const zenodd::ChoiState choi = zenodd::choi_from_superop(t);
            const double p = choi.purity();
            const zenodd::ClosestUnitaryChannel cu = zenodd::closest_unitary_channel(choi);
            const double dist = (t.matrix - zenodd::superop_from_unitary(cu.unitary).matrix).norm();
            const zenodd::ChannelUnitaryBounds b = zenodd::channel_unitary_bounds(d, p, choi.opnorm());
            sandwich = std::min({sandwich, dist - b.lower, b.upper_fro - dist, b.upper_fro_loose - b.upper_fro});
            const double dd = static_cast<double>(d);
            fnorm = std::max(fnorm, std::abs(t.matrix.squaredNorm() - dd * dd * p));
            const double lower =
                zenodd::sampled_diamond_lower(t, zenodd::superop_from_unitary(cu.unitary), 16, seed + k);
            diamond = std::min(diamond, b.upper_diamond - lower);
            const double op = choi.opnorm();
            pur_ev = std::min({pur_ev, p - op * op, op - p});
        }
        for (std::uint64_t k = 0; k < 50; ++k) {
            const zenodd::QuantumChannel ch =
                zenodd::random_channel(4, 1 + k % 4, zenodd::Rng::stream_seed(seed + 1, k));
            const Superoperator t = zenodd::superop_from_kraus(ch);
            const zenodd::ChoiState full = zenodd::choi_from_superop(t);
            const ComplexMatrix half = zenodd::identity(2) / 2.0;
            const double e1 = (zenodd::reduced_choi(full, zenodd::Subsystem::One, 2, 2).matrix() -
                               zenodd::choi_of_reduced_map(t, half, zenodd::Subsystem::Two).matrix())
                                  .cwiseAbs()
                                  .maxCoeff();
            const double e2 = (zenodd::reduced_choi(full, zenodd::Subsystem::Two, 2, 2).matrix() -
                               zenodd::choi_of_reduced_map(t, half, zenodd::Subsystem::One).matrix())
                                  .cwiseAbs()
                                  .maxCoeff();
            reduced = std::max({reduced, e1, e2});

            const zenodd::Index d = 2 + static_cast<zenodd::Index>(k % 3);
            const ComplexMatrix sigma = zenodd::random_density(d, zenodd::Rng::stream_seed(seed + 2, k));
            const zenodd::MaxMixedSplit ms = zenodd::max_mixed_split(sigma);
            const ComplexMatrix rebuilt = ms.weight * sigma + (1.0 - ms.weight) * ms.residual;
            split = std::max(split, (rebuilt - zenodd::identity(d) / static_cast<double>(d)).cwiseAbs().maxCoeff());
        }
    });
    s.at_least("channel-to-unitary distance sandwich [200 random channels]", sandwich, 0.0, kTol);
    s.at_most("||T^||_2^2 = d^2 P(Lambda) [200 random channels]", fnorm, 0.0, kTol);
    s.at_least("sampled diamond distance <= 3 d (1 - opnorm) [200 random channels]", diamond, 0.0, kTol);
    s.at_least("opnorm^2 <= P <= opnorm [200 random channels]", pur_ev, 0.0, 1e-12);
    s.at_most("reduced Choi state = Choi of map with maximally mixed partner [50 channels]", reduced, 0.0, 1e-10);
    s.at_most("maximally mixed split reconstruction [50 densities]", split, 0.0, 1e-12);
}

}  // namespace

CommandResult cmd_verify(const ExperimentConfig& cfg) {
    if (!cfg.inject_fault.empty() && cfg.inject_fault != "projector") {
        throw UsageError("unknown fault '" + cfg.inject_fault + "' (only 'projector')");
    }
    const zenodd::BipartiteModel model = build_model(cfg);
    const zenodd::DecouplingSet set = build_set(cfg);
    const zenodd::StatisticParams params{build_sigma(cfg.sigma1, cfg.d1), build_sigma(cfg.sigma2, cfg.d2)};
    const std::vector<int> grid = n_grid(cfg);
    const unsigned threads = resolve_threads(cfg);

    CommandResult result;
    Suite s(result);
    decoupling_checks(s, model, cfg);
    s.guarded("zeno bounds", [&] { zeno_checks(s, model, grid); });
    const bool design = twirls_to_projector(model, set);
    average_checks(s, model, set, design, threads);
    if (design) {
        s.guarded("average system-2 bounds",
                  [&] { system2_average_checks(s, model, params.sigma1, params.sigma2, grid, cfg.seed); });
        enumeration_checks(s, model, set, params);
    } else {
        s.skip("trajectory bounds", "the decoupling set does not twirl to D^");
    }
    trajectory_checks(s, model, set, params.sigma2, cfg.seed, threads);
    channel_checks(s, cfg.seed);

    std::size_t passed = 0;
    for (const std::string& line : result.report) passed += line.rfind("PASS", 0) == 0 ? 1 : 0;
    result.report.push_back(std::to_string(passed) + " passed, " + std::to_string(result.failures.size()) +
                            " failed");
    return result;
}

}  // namespace zeno_dd
