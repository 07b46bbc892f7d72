#include "triq/protocol_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "triq/optics.hpp"

namespace triq {

std::string to_string(PartyBasis b) {
    return b == PartyBasis::Computational ? "computational" : "fourier";
}
std::string to_string(QkdBasisKind b) {
    return b == QkdBasisKind::SubspaceComputational ? "subspace-computational"
                                                    : "subspace-superposition";
}
std::string to_string(SiftReason r) {
    switch (r) {
        case SiftReason::None: return "none";
        case SiftReason::BasisMismatch: return "basis-mismatch";
        case SiftReason::SubspaceMismatch: return "subspace-mismatch";
        case SiftReason::MissingClick: return "missing-click";
        case SiftReason::CharliePresent: return "charlie-present";
    }
    return "?";
}

std::array<int, 2> subspace_pair(int index) {
    switch (index) {
        case 0: return {0, 1};
        case 1: return {1, 2};
        case 2: return {0, 2};
    }
    throw std::invalid_argument("subspace pair index out of range");
}

int subspace_pair_index(int i, int j) {
    if (i > j) std::swap(i, j);
    if (i == 0 && j == 1) return 0;
    if (i == 1 && j == 2) return 1;
    if (i == 0 && j == 2) return 2;
    throw std::invalid_argument("no such subspace pair");
}

TranscriptStats compute_stats(const Transcript& t) {
    TranscriptStats s;
    s.n_trials = static_cast<long>(t.records.size());
    long errors = 0, recon_ok = 0, recon_total = 0;
    for (const auto& r : t.records) {
        if (!r.sifted) continue;
        ++s.n_sifted;
        if (r.key_alice >= 0 && r.key_bob >= 0 && r.key_alice != r.key_bob) ++errors;
        if (t.protocol == "secret-sharing") {
            ++recon_total;
            const int rec = reconstruct_alice(r.outcome[1], r.outcome[2],
                                              static_cast<PartyBasis>(r.basis[0]));
            if (rec == r.outcome[0]) ++recon_ok;
        }
    }
    if (s.n_trials > 0)
        s.sift_fraction = static_cast<double>(s.n_sifted) / static_cast<double>(s.n_trials);
    if (s.n_sifted > 0) s.error_rate = static_cast<double>(errors) / static_cast<double>(s.n_sifted);
    if (recon_total > 0)
        s.reconstruction_success_rate =
            static_cast<double>(recon_ok) / static_cast<double>(recon_total);
    return s;
}

namespace {

const CorrelationTable& fourier_table() {
    static const CorrelationTable table = correlation_table(fourier_basis(3));
    return table;
}

Basis protocol_basis(PartyBasis b, MeasurementBackend backend) {
    if (backend == MeasurementBackend::Optics) {
        return b == PartyBasis::Computational
                   ? sorter_calibrated_basis(standard_three_level_cascade())
                   : three_port_basis();
    }
    return b == PartyBasis::Computational ? computational_basis(3) : fourier_basis(3);
}

SubspaceMeasurement qkd_measurement(QkdBasisKind kind, const std::array<int, 2>& pair) {
    return kind == QkdBasisKind::SubspaceComputational
               ? subspace_computational(3, pair[0], pair[1])
               : subspace_superposition(3, pair[0], pair[1]);
}

}  // namespace

Transcript run_secret_sharing(const SecretSharingConfig& cfg) {
    if (cfg.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    if (cfg.basis_set.empty()) throw std::invalid_argument("basis set must be nonempty");

    // Bases are identical each round; build them once.
    std::vector<Basis> bases;
    for (const PartyBasis b : cfg.basis_set) bases.push_back(protocol_basis(b, cfg.backend));

    Transcript t;
    t.seed = cfg.seed;
    t.protocol = "secret-sharing";
    t.records.reserve(cfg.n_trials);

    const int nb = static_cast<int>(cfg.basis_set.size());
    for (long trial = 0; trial < cfg.n_trials; ++trial) {
        Rng rng = trial_rng(cfg.seed, static_cast<std::uint64_t>(trial));
        TrialRecord rec;
        rec.trial = trial;

        std::array<int, 3> choice{};
        for (int p = 0; p < 3; ++p) {
            choice[p] = nb == 1 ? 0 : static_cast<int>(uniform01(rng) * nb);
            if (choice[p] >= nb) choice[p] = nb - 1;
            rec.basis[p] = static_cast<int>(cfg.basis_set[choice[p]]);
        }

        // Sequential measurement, Alice then Bob then Charlie.
        PureState state = symmetric_state(3).state;
        for (int p = 0; p < 3; ++p) {
            std::vector<std::optional<Basis>> sel(3);
            sel[p] = bases[choice[p]];
            MeasureResult m = measure(state, sel, rng);
            rec.outcome[p] = m.outcome[p];
            rec.click[p] = true;
            state = std::move(m.post);
        }

        for (int p = 0; p < 3; ++p)
            t.messages.push_back({p, trial, MessageKind::BasisAnnouncement, rec.basis[p]});

        if (rec.basis[0] == rec.basis[1] && rec.basis[1] == rec.basis[2]) {
            rec.sifted = true;
            // Bob and Charlie pool their outcomes to recover Alice's.
            t.messages.push_back({1, trial, MessageKind::ReconciliationShare, rec.outcome[1]});
            t.messages.push_back({2, trial, MessageKind::ReconciliationShare, rec.outcome[2]});
        } else {
            rec.reason = SiftReason::BasisMismatch;
        }
        t.records.push_back(rec);
    }
    t.stats = compute_stats(t);
    return t;
}

int reconstruct_alice(int bob_outcome, int charlie_outcome, PartyBasis basis) {
    if (bob_outcome < 0 || bob_outcome > 2 || charlie_outcome < 0 || charlie_outcome > 2)
        throw std::invalid_argument("outcomes must be in 0..2");
    if (basis == PartyBasis::Computational) {
        if (bob_outcome == charlie_outcome)
            throw std::runtime_error("invalid record: equal computational outcomes cannot occur");
        return 3 - bob_outcome - charlie_outcome;
    }
    const int a = fourier_table().alice_for(bob_outcome, charlie_outcome);
    if (a < 0) throw std::runtime_error("invalid record: pair absent from the correlation table");
    return a;
}

namespace {

void eve_intercept(PureState& state, const EveStrategy& eve, TrialRecord& rec, Rng& rng) {
    const int nb = static_cast<int>(eve.basis_set.size());
    if (nb == 0) throw std::invalid_argument("Eve's basis set must be nonempty");
    int pick = 0;
    if (eve.policy == EveStrategy::Policy::Random && nb > 1) {
        pick = static_cast<int>(uniform01(rng) * nb);
        if (pick >= nb) pick = nb - 1;
    }
    rec.eve_basis = pick;
    const EveStrategy::BasisId id = eve.basis_set[pick];
    if (id == EveStrategy::BasisId::FullComputational) {
        std::vector<std::optional<Basis>> sel(state.num_parties());
        sel[eve.target_party] = computational_basis(3);
        MeasureResult m = measure(state, sel, rng);
        rec.eve_clicked = true;
        rec.eve_outcome = m.outcome[eve.target_party];
        state = std::move(m.post);
        return;
    }
    const QkdBasisKind kind = id == EveStrategy::BasisId::SubspaceComputational
                                  ? QkdBasisKind::SubspaceComputational
                                  : QkdBasisKind::SubspaceSuperposition;
    auto res = subspace_measure(state, eve.target_party, qkd_measurement(kind, eve.pair), rng);
    rec.eve_clicked = res.outcome.click;
    rec.eve_outcome = res.outcome.outcome;
    state = std::move(res.post);
}

}  // namespace

Transcript run_qkd(const QkdConfig& cfg) {
    if (cfg.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    if (cfg.charlie_mode == CharlieMode::Probabilistic &&
        (cfg.charlie_loss_prob < 0.0 || cfg.charlie_loss_prob > 1.0))
        throw std::invalid_argument("charlie_loss_prob must lie in [0,1]");
    const int fixed_index = subspace_pair_index(cfg.fixed_pair[0], cfg.fixed_pair[1]);

    Transcript t;
    t.seed = cfg.seed;
    t.protocol = "qkd";
    t.records.reserve(cfg.n_trials);

    for (long trial = 0; trial < cfg.n_trials; ++trial) {
        Rng rng = trial_rng(cfg.seed, static_cast<std::uint64_t>(trial));
        TrialRecord rec;
        rec.trial = trial;

        const bool lost = cfg.charlie_mode == CharlieMode::Lost
                              ? true
                              : uniform01(rng) < cfg.charlie_loss_prob;
        if (!lost) {
            rec.charlie_present = true;
            rec.reason = SiftReason::CharliePresent;
            if (cfg.secret_sharing_when_present) {
                // All three measure computationally; the round contributes no
                // QKD key material but stays in the transcript.
                PureState full = symmetric_state(3).state;
                const Basis comp = computational_basis(3);
                for (int p = 0; p < 3; ++p) {
                    std::vector<std::optional<Basis>> sel(3);
                    sel[p] = comp;
                    MeasureResult m = measure(full, sel, rng);
                    rec.outcome[p] = m.outcome[p];
                    rec.click[p] = true;
                    full = std::move(m.post);
                }
            }
            t.records.push_back(rec);
            continue;
        }

        // Charlie's particle is gone: the Alice-Bob state is the reduced
        // density matrix, i.e. a uniform mixture of the three symmetric Bell
        // components; draw the branch.
        rec.latent_branch = static_cast<int>(uniform01(rng) * 3.0);
        if (rec.latent_branch > 2) rec.latent_branch = 2;
        const auto branch = subspace_pair(rec.latent_branch);
        PureState state = sym_bell(branch[0], branch[1]).state;

        if (cfg.eve) eve_intercept(state, *cfg.eve, rec, rng);

        std::array<QkdBasisKind, 2> kind{};
        std::array<int, 2> pidx{};
        for (int p = 0; p < 2; ++p) {
            kind[p] = uniform01(rng) < 0.5 ? QkdBasisKind::SubspaceComputational
                                           : QkdBasisKind::SubspaceSuperposition;
            rec.basis[p] = static_cast<int>(kind[p]);
            pidx[p] = cfg.policy == SubspacePolicy::Fixed
                          ? fixed_index
                          : std::min(2, static_cast<int>(uniform01(rng) * 3.0));
            rec.pair_index[p] = pidx[p];
        }

        for (int p = 0; p < 2; ++p) {
            auto res = subspace_measure(state, p, qkd_measurement(kind[p], subspace_pair(pidx[p])),
                                        rng);
            rec.click[p] = res.outcome.click;
            rec.outcome[p] = res.outcome.outcome;
            state = std::move(res.post);
        }

        for (int p = 0; p < 2; ++p) {
            t.messages.push_back({p, trial, MessageKind::BasisAnnouncement, rec.basis[p]});
            t.messages.push_back({p, trial, MessageKind::SubspaceAnnouncement, rec.pair_index[p]});
            t.messages.push_back({p, trial, MessageKind::ClickAnnouncement, rec.click[p] ? 1 : 0});
        }

        if (rec.basis[0] != rec.basis[1]) {
            rec.reason = SiftReason::BasisMismatch;
        } else if (rec.pair_index[0] != rec.pair_index[1]) {
            rec.reason = SiftReason::SubspaceMismatch;
        } else if (!rec.click[0] || !rec.click[1]) {
            rec.reason = SiftReason::MissingClick;
        } else {
            rec.sifted = true;
            // Key mapping: within the ordered pair, the computational branch
            // anti-correlates, the superposition branch correlates directly.
            rec.key_alice = rec.outcome[0];
            rec.key_bob = kind[1] == QkdBasisKind::SubspaceComputational ? 1 - rec.outcome[1]
                                                                         : rec.outcome[1];
        }
        t.records.push_back(rec);
    }
    t.stats = compute_stats(t);
    return t;
}

QberEstimate estimate_qber(const Transcript& t, double sample_fraction, std::uint64_t seed) {
    if (sample_fraction <= 0.0 || sample_fraction >= 1.0)
        throw std::invalid_argument("sample_fraction must lie strictly between 0 and 1");
    std::vector<const TrialRecord*> sifted;
    for (const auto& r : t.records)
        if (r.sifted && r.key_alice >= 0 && r.key_bob >= 0) sifted.push_back(&r);
    if (sifted.empty()) throw std::runtime_error("no sifted key to estimate from");

    Rng rng = trial_rng(seed, 0);
    std::vector<size_t> order(sifted.size());
    std::iota(order.begin(), order.end(), 0);
    for (size_t i = order.size() - 1; i > 0; --i) {
        const size_t j = static_cast<size_t>(uniform01(rng) * static_cast<double>(i + 1));
        std::swap(order[i], order[std::min(j, i)]);
    }
    const size_t n_sample =
        std::max<size_t>(1, static_cast<size_t>(sample_fraction * sifted.size()));

    QberEstimate est;
    est.sample_size = static_cast<long>(n_sample);
    long errors = 0;
    for (size_t i = 0; i < order.size(); ++i) {
        const TrialRecord* r = sifted[order[i]];
        if (i < n_sample) {
            if (r->key_alice != r->key_bob) ++errors;
        } else {
            est.remaining_key_alice.push_back(r->key_alice);
            est.remaining_key_bob.push_back(r->key_bob);
        }
    }
    const double n = static_cast<double>(n_sample);
    est.estimate = static_cast<double>(errors) / n;
    const double z = 1.959963984540054;  // 95% two-sided
    const double z2 = z * z;
    const double center = (est.estimate + z2 / (2 * n)) / (1 + z2 / n);
    const double half =
        z * std::sqrt(est.estimate * (1 - est.estimate) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    est.wilson_low = std::max(0.0, center - half);
    est.wilson_high = std::min(1.0, center + half);
    return est;
}

}  // namespace triq
