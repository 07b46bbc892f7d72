#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "triq/protocol_states.hpp"

using namespace triq;

namespace {
long factorial(int n) {
    long f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}
}  // namespace

TEST_CASE("symmetric state has n! equal amplitudes on permutation kets") {
    for (int n = 2; n <= 5; ++n) {
        const SymmetricState s = symmetric_state(n);
        CHECK(s.n == n);
        s.state.check();
        const double expect = 1.0 / std::sqrt(static_cast<double>(factorial(n)));
        long support = 0;
        for (Eigen::Index i = 0; i < s.state.amplitudes.size(); ++i) {
            const double mag = std::abs(s.state.amplitudes[i]);
            if (mag < kAlgebraTol) continue;
            ++support;
            CHECK(mag == doctest::Approx(expect).epsilon(1e-12));
            // support must be a permutation of 0..n-1
            auto lv = s.state.unflatten(i);
            std::vector<bool> seen(n, false);
            for (int v : lv) {
                REQUIRE(v >= 0);
                REQUIRE(v < n);
                CHECK_FALSE(seen[v]);
                seen[v] = true;
            }
        }
        CHECK(support == factorial(n));
    }
    CHECK_THROWS_AS(symmetric_state(1), std::invalid_argument);
    CHECK_THROWS_AS(symmetric_state(7), std::invalid_argument);
}

TEST_CASE("each single-party marginal of the symmetric state is maximally mixed") {
    for (int n = 2; n <= 4; ++n) {
        const SymmetricState s = symmetric_state(n);
        for (int p = 0; p < n; ++p) {
            const MixedState m = partial_trace(s.state, {p});
            const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n) / double(n);
            CHECK((m.matrix - id).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("the two-party reduced state is the equal Bell-component mixture") {
    const MixedState rho = partial_trace(symmetric_state(3).state, {0, 1});
    Eigen::MatrixXcd mix = Eigen::MatrixXcd::Zero(9, 9);
    const std::array<std::array<int, 2>, 3> pairs{{{0, 1}, {1, 2}, {0, 2}}};
    for (const auto& [i, j] : pairs) {
        const auto& v = sym_bell(i, j).state.amplitudes;
        mix += (1.0 / 3.0) * v * v.adjoint();
    }
    CHECK((rho.matrix - mix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sym_bell is the normalized symmetric two-level component") {
    const SymBellPair b = sym_bell(0, 2);
    CHECK(b.state.amplitudes.size() == 9);
    const double s2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(b.state.amplitudes[b.state.flat_index({0, 2})] - cxd{s2, 0.0}) < kAlgebraTol);
    CHECK(std::abs(b.state.amplitudes[b.state.flat_index({2, 0})] - cxd{s2, 0.0}) < kAlgebraTol);
    CHECK(b.state.amplitudes.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(sym_bell(1, 1), std::invalid_argument);
    CHECK_THROWS_AS(sym_bell(0, 3), std::invalid_argument);
}

TEST_CASE("computational correlation table is the six permutations at 1/6") {
    const CorrelationTable t = correlation_table(computational_basis(3));
    t.check_invariants();
    CHECK(t.entries.size() == 6);
    for (const auto& e : t.entries) {
        CHECK(e.prob == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
        CHECK(e.alice != e.bob);
        CHECK(e.bob != e.charlie);
        CHECK(e.alice != e.charlie);
    }
    CHECK(t.charlie_for(0, 1) == 2);
    CHECK(t.charlie_for(0, 0) == -1);
    CHECK(t.alice_for(1, 2) == 0);
}

TEST_CASE("Fourier correlation table: determinism and reconstructibility") {
    const CorrelationTable t = correlation_table(fourier_basis(3));
    t.check_invariants();
    CHECK(t.entries.size() == 9);
    double total = 0.0;
    for (const auto& e : t.entries) {
        total += e.prob;
        const double expect = e.alice == e.bob ? 2.0 / 9.0 : 1.0 / 18.0;
        CHECK(e.prob == doctest::Approx(expect).epsilon(1e-10));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    // every (alice,bob) pair fixes charlie and every (bob,charlie) fixes alice
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const int c = t.charlie_for(a, b);
            REQUIRE(c >= 0);
            CHECK(t.alice_for(b, c) == a);
        }
}

TEST_CASE("published collapse table: directions reproduce under second-slot conjugation") {
    const CollapseReport r = verify_paper_collapse_relations();
    REQUIRE(r.rows.size() == 9);
    CHECK(r.single_vector_under_pure_conventions);
    CHECK(r.each_row_matched_somewhere);

    int dir_second = 0, dir_both = 0, dir_none = 0, exact_none = 0;
    double born_total = 0.0;
    for (const auto& row : r.rows) {
        for (const auto& c : row.conventions) {
            CHECK(c.fourier_index >= 0);
            CHECK(c.single_vector);
            // collapse weights take only the two allowed values
            const double n2 = c.collapse_norm * c.collapse_norm;
            CHECK((std::abs(n2 - 2.0 / 9.0) < 1e-9 || std::abs(n2 - 1.0 / 18.0) < 1e-9));
            if (c.convention == ProjectionConvention::ConjugateBoth) born_total += n2;
            switch (c.convention) {
                case ProjectionConvention::ConjugateSecondSlot:
                    dir_second += c.direction_match;
                    break;
                case ProjectionConvention::ConjugateBoth:
                    dir_both += c.direction_match;
                    break;
                case ProjectionConvention::ConjugateNone:
                    dir_none += c.direction_match;
                    exact_none += c.exact_match;
                    break;
                default:
                    break;
            }
        }
    }
    CHECK(born_total == doctest::Approx(1.0).epsilon(1e-9));  // Born weights are complete
    CHECK(dir_second == 9);   // conjugating only the second listed bra matches all rows
    CHECK(dir_both == 3);     // the pure conventions match only the uniform-vector rows
    CHECK(dir_none == 3);
    CHECK(exact_none == 3);   // printed coefficients reproduce exactly on those rows
}
