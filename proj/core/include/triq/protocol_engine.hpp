// Round-by-round execution of the two protocols: three-party secret sharing
// on the symmetric tripartite state, and two-party QKD on the residual
// entanglement left after Charlie's particle is lost. Includes sifting,
// reconstruction, an intercept-resend adversary, and QBER estimation.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "triq/protocol_states.hpp"
#include "triq/qudit.hpp"

namespace triq {

enum class PartyBasis { Computational = 0, Fourier = 1 };
enum class QkdBasisKind { SubspaceComputational = 0, SubspaceSuperposition = 1 };
enum class SubspacePolicy { Fixed, Random };
enum class MeasurementBackend { Abstract, Optics };
enum class CharlieMode { Lost, Probabilistic };

enum class SiftReason { None, BasisMismatch, SubspaceMismatch, MissingClick, CharliePresent };

std::string to_string(PartyBasis b);
std::string to_string(QkdBasisKind b);
std::string to_string(SiftReason r);

// The three unordered subspace pairs {0,1}, {1,2}, {0,2}; index 0..2.
std::array<int, 2> subspace_pair(int index);
int subspace_pair_index(int i, int j);

struct TrialRecord {
    long trial = 0;
    // Basis code per party: secret sharing uses PartyBasis values, QKD uses
    // QkdBasisKind values for Alice (0) and Bob (1); -1 = party did not act.
    std::array<int, 3> basis{-1, -1, -1};
    std::array<bool, 3> click{false, false, false};
    std::array<int, 3> outcome{-1, -1, -1};
    // QKD: subspace pair index per party (into subspace_pair), -1 otherwise.
    std::array<int, 2> pair_index{-1, -1};
    bool charlie_present = false;  // probabilistic-loss rounds where Charlie kept his particle
    int latent_branch = -1;        // QKD: which Bell component of the reduced state this round drew
    int key_alice = -1, key_bob = -1;
    int eve_basis = -1, eve_outcome = -1;
    bool eve_clicked = false;
    bool sifted = false;
    SiftReason reason = SiftReason::None;
};

enum class MessageKind {
    BasisAnnouncement,
    SubspaceAnnouncement,
    ClickAnnouncement,
    ReconciliationShare,
};

// Announcements never carry outcome values; outcomes travel only in
// reconciliation shares exchanged after sifting.
struct ClassicalMessage {
    int sender = 0;  // party index
    long round = 0;
    MessageKind kind = MessageKind::BasisAnnouncement;
    int payload = 0;
};

struct TranscriptStats {
    long n_trials = 0;
    long n_sifted = 0;
    double sift_fraction = 0.0;
    double error_rate = 0.0;                   // QKD: sifted key disagreement
    double reconstruction_success_rate = 0.0;  // secret sharing
};

struct Transcript {
    std::uint64_t seed = 0;
    std::string protocol;
    std::vector<TrialRecord> records;
    std::vector<ClassicalMessage> messages;
    TranscriptStats stats;
};

// Recomputes the statistics from the records; the stored stats must agree
// exactly.
TranscriptStats compute_stats(const Transcript& t);

struct SecretSharingConfig {
    long n_trials = 1;
    std::uint64_t seed = 0;
    std::vector<PartyBasis> basis_set = {PartyBasis::Computational, PartyBasis::Fourier};
    MeasurementBackend backend = MeasurementBackend::Abstract;
};

Transcript run_secret_sharing(const SecretSharingConfig& cfg);

// Alice's outcome from Bob's and Charlie's, for a sifted same-basis round.
// Computational: the level absent from {bob, charlie}. Fourier: inverse lookup
// in the exact correlation table. Throws std::runtime_error on a pair that
// cannot occur (corrupted transcript or adversary).
int reconstruct_alice(int bob_outcome, int charlie_outcome, PartyBasis basis);

struct EveStrategy {
    enum class Policy { Fixed, Random };
    enum class BasisId { SubspaceComputational, SubspaceSuperposition, FullComputational };

    int target_party = 1;  // 0 = Alice's particle, 1 = Bob's
    Policy policy = Policy::Random;
    std::vector<BasisId> basis_set = {BasisId::SubspaceComputational,
                                      BasisId::SubspaceSuperposition};
    std::array<int, 2> pair{0, 1};  // subspace Eve assumes for her 2D bases
};

struct QkdConfig {
    long n_trials = 1;
    std::uint64_t seed = 0;
    SubspacePolicy policy = SubspacePolicy::Fixed;
    std::array<int, 2> fixed_pair{0, 1};
    std::optional<EveStrategy> eve;
    CharlieMode charlie_mode = CharlieMode::Lost;
    double charlie_loss_prob = 1.0;            // Probabilistic mode only
    bool secret_sharing_when_present = false;  // measure all three when Charlie survives
};

Transcript run_qkd(const QkdConfig& cfg);

struct QberEstimate {
    double estimate = 0.0;
    double wilson_low = 0.0, wilson_high = 1.0;  // 95% Wilson interval
    long sample_size = 0;
    std::vector<int> remaining_key_alice, remaining_key_bob;
};

// Publicly compares a random sample of the sifted key; the compared symbols
// are removed from the remaining key.
QberEstimate estimate_qber(const Transcript& t, double sample_fraction, std::uint64_t seed);

}  // namespace triq
