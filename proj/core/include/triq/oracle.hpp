// Exact (non-Monte-Carlo) computation of every protocol constant the
// statistical tests are checked against. Everything here is derived from
// density-matrix algebra at runtime; nothing is hand-typed.

#pragma once

#include <string>
#include <vector>

#include "triq/protocol_engine.hpp"

namespace triq {

struct OracleConstant {
    std::string name;
    double value = 0.0;
    std::string provenance;  // formula or construction the value came from
};

struct OracleConstants {
    double fourier_diagonal_prob = 0.0;     // same-vector Alice-Bob Fourier pairs
    double fourier_offdiagonal_prob = 0.0;  // differing-vector pairs
    double secret_sharing_sift_fraction = 0.0;
    double qkd_sift_fixed = 0.0;
    double qkd_sift_random = 0.0;
    double double_click_prob_same_basis = 0.0;  // reduced state, fixed pair, same basis
    double herald_success_dft = 0.0;
    double herald_success_identity = 0.0;
    double eve_qber_2d = 0.0;  // intercept-resend, random over the two 2D bases
    double eve_qber_3d = 0.0;  // intercept-resend, full computational basis

    std::vector<OracleConstant> labeled() const;
};

OracleConstants compute_oracle_constants();

// Reduced Alice-Bob density matrix (Charlie traced out of the tripartite
// symmetric state).
MixedState reduced_alice_bob();

// Exact probability that both parties click when measuring the reduced state
// with the given subspace measurements.
double exact_double_click_probability(const MixedState& rho, const SubspaceMeasurement& alice,
                                      const SubspaceMeasurement& bob);

// Exact sift fraction of the honest QKD protocol under the given policy.
double exact_qkd_sift_fraction(SubspacePolicy policy);

// Exact sifted-key error rate under an intercept-resend adversary, computed
// by composing Eve's projective channel with the parties' measurements on the
// reduced density matrix (fixed subspace {0,1}).
double exact_intercept_resend_qber(const EveStrategy& eve);

}  // namespace triq
