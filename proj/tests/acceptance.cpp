// End-to-end acceptance suite: one pass/fail line per criterion. Exact
// constants are computed by the algebraic oracle before any sampled run, and
// every Monte Carlo statistic is held to a 4-sigma binomial window.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <vector>

#include "triq/optics.hpp"
#include "triq/oracle.hpp"
#include "triq/protocol_engine.hpp"
#include "triq/protocol_states.hpp"

using namespace triq;

namespace {

int failures = 0;

void report(int index, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d %s%s%s\n", pass ? "PASS" : "FAIL", index, name,
                detail.empty() ? "" : ": ", detail.c_str());
    if (!pass) ++failures;
}

bool window4(double observed, double expected, long n) {
    const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n));
    return std::abs(observed - expected) <= std::max(4.0 * sigma, 1e-12);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// 1. Every cross-overlap between the level basis and the Fourier basis has
//    squared magnitude 1/d, for d = 2..6, within 1e-10.
void criterion_mub() {
    bool pass = true;
    double worst = 0.0;
    for (int d = 2; d <= 6; ++d) {
        const Basis fb = fourier_basis(d);
        fb.check();
        for (int m = 0; m < d; ++m)
            for (int k = 0; k < d; ++k) {
                const double dev = std::abs(std::norm(fb.vectors[m][k]) - 1.0 / d);
                worst = std::max(worst, dev);
                if (dev > 1e-10) pass = false;
            }
    }
    report(1, "mutually unbiased overlaps, d = 2..6", pass, "max deviation " + fmt(worst));
}

// 2. Tracing the third party out of the shared state gives the uniform
//    mixture of the three symmetric two-level components, entrywise to 1e-10.
void criterion_reduced_state() {
    const MixedState rho = partial_trace(symmetric_state(3).state, {0, 1});
    Eigen::MatrixXcd mix = Eigen::MatrixXcd::Zero(9, 9);
    for (int idx = 0; idx < 3; ++idx) {
        const auto pr = subspace_pair(idx);
        const auto& v = sym_bell(pr[0], pr[1]).state.amplitudes;
        mix += (v * v.adjoint()) / 3.0;
    }
    const double dev = (rho.matrix - mix).cwiseAbs().maxCoeff();
    report(2, "reduced two-party state is the uniform Bell mixture", dev <= 1e-10,
           "max entry deviation " + fmt(dev));
}

// 3. All nine published two-bra collapse relations land on exactly one
//    Fourier vector under both pure conventions, and each printed right-hand
//    side is matched under at least one examined convention.
void criterion_collapse() {
    const CollapseReport r = verify_paper_collapse_relations();
    const bool pass =
        r.rows.size() == 9 && r.single_vector_under_pure_conventions && r.each_row_matched_somewhere;
    report(3, "two-bra collapse relations (convention report)", pass, "");
    for (const auto& row : r.rows) {
        std::printf("      row (u%d,u%d) -> printed u%d:", row.bob_m + 1, row.alice_m + 1,
                    row.printed_charlie_m + 1);
        for (const auto& c : row.conventions)
            std::printf(" %s=u%d%s", to_string(c.convention).c_str(), c.fourier_index + 1,
                        c.exact_match ? "(exact)" : c.direction_match ? "(dir)" : "");
        std::printf("\n");
    }
}

// 4. Exact same-basis Fourier correlations (2/9 diagonal, 1/18 off-diagonal,
//    unit total within 1e-12) and 1e5-round Monte Carlo agreement per cell.
void criterion_fourier_correlations() {
    const CorrelationTable t = correlation_table(fourier_basis(3));
    bool exact_ok = t.entries.size() == 9;
    double total = 0.0;
    for (const auto& e : t.entries) {
        total += e.prob;
        const double expect = e.alice == e.bob ? 2.0 / 9.0 : 1.0 / 18.0;
        if (std::abs(e.prob - expect) > 1e-12) exact_ok = false;
    }
    if (std::abs(total - 1.0) > 1e-12) exact_ok = false;

    const long n = 100000;
    const PureState psi = symmetric_state(3).state;
    const Basis fb = fourier_basis(3);
    std::vector<long> counts(27, 0);
    for (long trial = 0; trial < n; ++trial) {
        Rng rng = trial_rng(2024, static_cast<std::uint64_t>(trial));
        const MeasureResult m = measure(psi, {fb, fb, fb}, rng);
        ++counts[9 * m.outcome[0] + 3 * m.outcome[1] + m.outcome[2]];
    }
    bool mc_ok = true;
    for (const auto& e : t.entries) {
        const double freq =
            static_cast<double>(counts[9 * e.alice + 3 * e.bob + e.charlie]) / n;
        if (!window4(freq, e.prob, n)) mc_ok = false;
    }
    report(4, "Fourier correlation oracle + 1e5-round sampling", exact_ok && mc_ok,
           std::string("exact ") + (exact_ok ? "ok" : "BAD") + ", sampled " +
               (mc_ok ? "ok" : "BAD"));
}

// Shared by criteria 5 and 9.
bool secret_sharing_statistics(MeasurementBackend backend, std::string& detail) {
    SecretSharingConfig cfg;
    cfg.n_trials = 100000;
    // Note: the per-trial stream is seeded by seed XOR trial-index, so seeds
    // differing only in low bits permute the same trial streams; pick far-apart
    // seeds for genuinely independent runs.
    cfg.seed = backend == MeasurementBackend::Abstract ? 5 : 0x9e000000;
    cfg.backend = backend;
    const Transcript t = run_secret_sharing(cfg);

    const bool sift_ok = window4(t.stats.sift_fraction, 0.25, cfg.n_trials);
    const bool recon_ok = t.stats.reconstruction_success_rate == 1.0;

    // With bases undisclosed, one party's outcome value alone carries no
    // information about Alice's: the joint outcome-value distribution is
    // uniform (the level-basis anti-correlation and the Fourier correlation
    // cancel exactly under uniform basis choice).
    bool secrecy_ok = true;
    for (int observer : {1, 2}) {
        long joint[3][3] = {};
        long marg[3] = {};
        for (const auto& r : t.records) {
            ++joint[r.outcome[observer]][r.outcome[0]];
            ++marg[r.outcome[observer]];
        }
        for (int b = 0; b < 3; ++b)
            for (int a = 0; a < 3; ++a) {
                const double cond = static_cast<double>(joint[b][a]) / marg[b];
                if (!window4(cond, 1.0 / 3.0, marg[b])) secrecy_ok = false;
            }
    }
    detail = "sift " + fmt(t.stats.sift_fraction) + ", reconstruction " +
             fmt(t.stats.reconstruction_success_rate) + ", single-party secrecy " +
             (secrecy_ok ? "ok" : "BAD");
    return sift_ok && recon_ok && secrecy_ok;
}

// 5. 1e5-round secret sharing: sift fraction near 1/4, perfect reconstruction
//    on sifted rounds, and no single-observer information about Alice.
void criterion_secret_sharing() {
    std::string detail;
    const bool pass = secret_sharing_statistics(MeasurementBackend::Abstract, detail);
    report(5, "secret sharing statistics (1e5 rounds)", pass, detail);
}

// 6. Honest QKD: error rate exactly zero; sift fractions near 1/6 (fixed
//    pair) and 1/18 (random pairs); Bell components outside the fixed
//    subspace have exactly zero double-click probability.
void criterion_qkd_honest() {
    QkdConfig cfg;
    cfg.n_trials = 100000;
    cfg.seed = 6;
    const Transcript fixed = run_qkd(cfg);
    cfg.policy = SubspacePolicy::Random;
    const Transcript random = run_qkd(cfg);

    const bool qber_ok = fixed.stats.error_rate == 0.0 && random.stats.error_rate == 0.0;
    const bool sift_ok = window4(fixed.stats.sift_fraction, 1.0 / 6.0, cfg.n_trials) &&
                         window4(random.stats.sift_fraction, 1.0 / 18.0, cfg.n_trials);

    // exact double-click probability of the out-of-subspace Bell components
    double worst = 0.0;
    for (int branch : {1, 2}) {
        const auto pr = subspace_pair(branch);
        const PureState bell = sym_bell(pr[0], pr[1]).state;
        for (const auto& meas :
             {subspace_computational(3, 0, 1), subspace_superposition(3, 0, 1)}) {
            for (int ia = 0; ia < 2; ++ia) {
                const Eigen::MatrixXcd pa = meas.vectors[ia] * meas.vectors[ia].adjoint();
                PureState after = bell;
                after.amplitudes = apply_local(bell, 0, pa);
                const double p_a = after.amplitudes.squaredNorm();
                if (p_a == 0.0) continue;
                after.normalized = false;
                after.renormalize();
                const auto probs_b = subspace_probabilities(after, 1, meas);
                worst = std::max(worst, p_a * (probs_b[0] + probs_b[1]));
            }
        }
    }
    const bool dc_ok = worst == 0.0;
    report(6, "honest QKD: zero error rate, sift fractions, exclusivity",
           qber_ok && sift_ok && dc_ok,
           "qber fixed " + fmt(fixed.stats.error_rate) + " random " +
               fmt(random.stats.error_rate) + ", sift " + fmt(fixed.stats.sift_fraction) + "/" +
               fmt(random.stats.sift_fraction) + ", stray double-click " + fmt(worst));
}

// 7. Intercept-resend adversary: sampled error rate within 4 sigma of the
//    exact channel constant, which must be strictly positive.
void criterion_qkd_eve(const OracleConstants& oc) {
    QkdConfig cfg;
    cfg.n_trials = 100000;
    cfg.seed = 7;
    cfg.eve = EveStrategy{};
    const Transcript t = run_qkd(cfg);
    const bool pass = oc.eve_qber_2d > 0.0 && t.stats.n_sifted > 0 &&
                      window4(t.stats.error_rate, oc.eve_qber_2d, t.stats.n_sifted);
    report(7, "intercept-resend error rate vs exact channel", pass,
           "observed " + fmt(t.stats.error_rate) + " vs " + fmt(oc.eve_qber_2d) + " on " +
               std::to_string(t.stats.n_sifted) + " sifted rounds");
}

// 8. Heralded generation: balanced-coupler success probability 2/243 within
//    1e-12 with unit fidelity after local phase correction; identity coupler
//    heralds the single routing |0,1,2> at 1/27.
void criterion_herald(const OracleConstants& oc) {
    const HeraldResult dft = herald_tripartite(CouplerUnitary::dft(), DetectorAssignment{});
    const bool p_ok = std::abs(dft.success_probability - 2.0 / 243.0) <= 1e-12 &&
                      std::abs(dft.success_probability - oc.herald_success_dft) <= 1e-12;

    const PureState target = symmetric_state(3).state;
    const auto w = equal_up_to_local_diagonal_phases(dft.state, target, 1e-10);
    double fid = 0.0;
    if (w.equal) {
        PureState corrected = dft.state;
        for (Eigen::Index i = 0; i < corrected.amplitudes.size(); ++i) {
            const auto lv = corrected.unflatten(i);
            for (int k = 0; k < 3; ++k) corrected.amplitudes[i] *= w.phases[k][lv[k]];
        }
        fid = std::norm(target.amplitudes.dot(corrected.amplitudes));
    }
    const bool f_ok = w.equal && std::abs(fid - 1.0) <= 1e-10;

    const HeraldResult id = herald_tripartite(CouplerUnitary::identity(), DetectorAssignment{});
    const bool id_ok =
        std::abs(id.success_probability - 1.0 / 27.0) <= 1e-12 &&
        equal_up_to_global_phase(id.state, PureState::basis_ket({3, 3, 3}, {0, 1, 2}), 1e-10);

    report(8, "heralded generation probabilities and fidelity", p_ok && f_ok && id_ok,
           "success " + fmt(dft.success_probability) + ", corrected fidelity " + fmt(fid) +
               ", identity-coupler success " + fmt(id.success_probability));
}

// 9. The sorter + three-port measurement backend reproduces the abstract
//    secret-sharing statistics on 1e5 rounds.
void criterion_optics_equivalence() {
    std::string detail;
    const bool pass = secret_sharing_statistics(MeasurementBackend::Optics, detail);
    report(9, "optics backend reproduces abstract statistics", pass, detail);
}

// 10. n = 4 and 5: construction invariants, maximally mixed single-party
//     marginals, and permutation-valued level outcomes on 1e4 sampled rounds.
void criterion_generalization() {
    bool pass = true;
    std::string detail;
    for (int n = 4; n <= 5; ++n) {
        const SymmetricState s = symmetric_state(n);
        s.state.check();
        double worst = 0.0;
        for (int p = 0; p < n; ++p) {
            const MixedState m = partial_trace(s.state, {p});
            worst = std::max(
                worst,
                (m.matrix - Eigen::MatrixXcd::Identity(n, n) / double(n)).cwiseAbs().maxCoeff());
        }
        if (worst > 1e-10) pass = false;

        const Basis comp = computational_basis(n);
        const std::vector<std::optional<Basis>> sel(n, comp);
        long violations = 0;
        for (long trial = 0; trial < 10000; ++trial) {
            Rng rng = trial_rng(100 + static_cast<std::uint64_t>(n),
                                static_cast<std::uint64_t>(trial));
            const MeasureResult m = measure(s.state, sel, rng);
            if (std::set<int>(m.outcome.begin(), m.outcome.end()).size() !=
                static_cast<std::size_t>(n))
                ++violations;
        }
        if (violations != 0) pass = false;
        detail += (n == 4 ? "" : "; ") + std::string("n=") + std::to_string(n) +
                  " marginal dev " + fmt(worst) + ", violations " + std::to_string(violations);
    }
    report(10, "n = 4, 5 generalization", pass, detail);
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    const OracleConstants oc = compute_oracle_constants();  // frozen before any sampling

    criterion_mub();
    criterion_reduced_state();
    criterion_collapse();
    criterion_fourier_correlations();
    criterion_secret_sharing();
    criterion_qkd_honest();
    criterion_qkd_eve(oc);
    criterion_herald(oc);
    criterion_optics_equivalence();
    criterion_generalization();

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d/10 criteria passed in %.1f s\n", 10 - failures, secs);
    return failures == 0 ? 0 : 1;
}
