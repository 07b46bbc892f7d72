// Construction of the shared protocol states (the fully symmetric n-party
// n-level state and its two-party Bell components) and the exact correlation
// structure both protocols rely on.

#pragma once

#include <string>
#include <vector>

#include "triq/qudit.hpp"

namespace triq {

struct SymmetricState {
    int n = 0;            // number of parties = number of levels
    PureState state;      // n! nonzero amplitudes of 1/sqrt(n!) on permutation kets
};

// Equal-amplitude sum over all permutation kets |sigma(0),...,sigma(n-1)>.
// Valid for 2 <= n <= 6 (n! * n^n memory guard).
SymmetricState symmetric_state(int n);

struct SymBellPair {
    int i = 0, j = 0;     // distinct levels in 0..2
    PureState state;      // (|ij> + |ji>)/sqrt2 on two three-level parties
};

SymBellPair sym_bell(int i, int j);

struct CorrelationTable {
    std::string basis_label;
    struct Entry {
        int alice = 0, bob = 0, charlie = 0;
        double prob = 0.0;
    };
    std::vector<Entry> entries;  // nonzero-probability triples only

    // -1 when the pair never occurs.
    int charlie_for(int alice, int bob) const;
    int alice_for(int bob, int charlie) const;

    // Determinism ((alice,bob) fixes charlie), reconstructibility
    // ((bob,charlie) fixes alice), and total probability 1.
    void check_invariants() const;
};

// Exact three-party outcome correlations of the symmetric tripartite state
// when all parties measure in the same basis.
CorrelationTable correlation_table(const Basis& basis);

// Conventions for contracting two bra vectors against the tripartite state.
// The published collapse table lists Bob's vector first and Alice's second;
// "second-slot" conjugation conjugates Alice's vector only.
enum class ProjectionConvention {
    ConjugateBoth,
    ConjugateNone,
    ConjugateSecondSlot,
    ConjugateFirstSlot,
};

std::string to_string(ProjectionConvention c);

struct CollapseRow {
    int bob_m = 0, alice_m = 0;       // Fourier labels of the projecting bras
    int printed_charlie_m = 0;        // Fourier label on the published right-hand side
    cxd printed_coef{1.0, 0.0};       // published unit-modulus coefficient

    struct ConventionResult {
        ProjectionConvention convention;
        int fourier_index = -1;       // which Fourier vector the collapse hits
        cxd phase{0.0, 0.0};          // collapsed direction = phase * u_{fourier_index}
        double collapse_norm = 0.0;   // norm of the unnormalized projection
        bool single_vector = false;   // unit overlap with exactly one Fourier vector
        bool direction_match = false; // fourier_index equals the printed label
        bool exact_match = false;     // direction and coefficient both as printed
    };
    std::vector<ConventionResult> conventions;
};

struct CollapseReport {
    std::vector<CollapseRow> rows;
    // Every row collapses onto exactly one Fourier vector under both pure
    // (all-conjugated / none-conjugated) conventions.
    bool single_vector_under_pure_conventions = false;
    // Every printed right-hand side is reproduced, at least as a direction,
    // under at least one of the examined conventions.
    bool each_row_matched_somewhere = false;
};

// Exact 27-amplitude contraction of all nine published two-party collapse
// relations under four inner-product conventions.
CollapseReport verify_paper_collapse_relations();

}  // namespace triq
