#include "triq/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "triq/optics.hpp"

namespace triq {
namespace {

// Joint operator I (x) op or op (x) I on the 9-dimensional Alice-Bob space.
Eigen::MatrixXcd on_party(int party, const Eigen::MatrixXcd& op) {
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(3, 3);
    const Eigen::MatrixXcd& a = party == 0 ? op : id;
    const Eigen::MatrixXcd& b = party == 0 ? id : op;
    Eigen::MatrixXcd out(9, 9);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out.block(3 * r, 3 * c, 3, 3) = a(r, c) * b;
    return out;
}

Eigen::MatrixXcd projective_channel(const Eigen::MatrixXcd& rho, int party,
                                    const std::vector<Eigen::MatrixXcd>& projectors) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(9, 9);
    for (const auto& p : projectors) {
        const Eigen::MatrixXcd jp = on_party(party, p);
        out += jp * rho * jp.adjoint();
    }
    return out;
}

std::vector<Eigen::MatrixXcd> eve_projectors(EveStrategy::BasisId id,
                                             const std::array<int, 2>& pair) {
    std::vector<Eigen::MatrixXcd> out;
    if (id == EveStrategy::BasisId::FullComputational) {
        const Basis comp = computational_basis(3);
        for (const auto& v : comp.vectors) out.push_back(v * v.adjoint());
        return out;
    }
    const SubspaceMeasurement meas = id == EveStrategy::BasisId::SubspaceComputational
                                         ? subspace_computational(3, pair[0], pair[1])
                                         : subspace_superposition(3, pair[0], pair[1]);
    for (const auto& v : meas.vectors) out.push_back(v * v.adjoint());
    out.push_back(meas.complement_projector());
    return out;
}

}  // namespace

MixedState reduced_alice_bob() { return partial_trace(symmetric_state(3).state, {0, 1}); }

double exact_double_click_probability(const MixedState& rho, const SubspaceMeasurement& alice,
                                      const SubspaceMeasurement& bob) {
    double p = 0.0;
    for (const auto& va : alice.vectors)
        for (const auto& vb : bob.vectors) {
            const Eigen::MatrixXcd proj =
                on_party(0, va * va.adjoint()) * on_party(1, vb * vb.adjoint());
            p += (proj * rho.matrix).trace().real();
        }
    return p;
}

double exact_qkd_sift_fraction(SubspacePolicy policy) {
    const MixedState rho = reduced_alice_bob();
    double sift = 0.0;
    const int n_pairs = policy == SubspacePolicy::Fixed ? 1 : 3;
    const double pair_weight = policy == SubspacePolicy::Fixed ? 1.0 : 1.0 / 9.0;
    for (int pi = 0; pi < n_pairs; ++pi) {
        const auto pr = subspace_pair(pi);
        for (int kind = 0; kind < 2; ++kind) {
            const SubspaceMeasurement m =
                kind == 0 ? subspace_computational(3, pr[0], pr[1])
                          : subspace_superposition(3, pr[0], pr[1]);
            // both parties independently chose this (kind, pair): 1/4 per kind
            // combination, pair_weight for agreeing pair choices
            sift += 0.25 * pair_weight * exact_double_click_probability(rho, m, m);
        }
    }
    return sift;
}

double exact_intercept_resend_qber(const EveStrategy& eve) {
    const MixedState rho0 = reduced_alice_bob();
    const int nb = static_cast<int>(eve.basis_set.size());
    if (nb == 0) throw std::invalid_argument("Eve's basis set must be nonempty");
    const double eve_weight =
        eve.policy == EveStrategy::Policy::Fixed ? 1.0 : 1.0 / static_cast<double>(nb);
    const int n_eve = eve.policy == EveStrategy::Policy::Fixed ? 1 : nb;

    double sift = 0.0, err = 0.0;
    const std::array<int, 2> pr{0, 1};
    for (int e = 0; e < n_eve; ++e) {
        const Eigen::MatrixXcd rho_e = projective_channel(
            rho0.matrix, eve.target_party, eve_projectors(eve.basis_set[e], eve.pair));
        for (int kind = 0; kind < 2; ++kind) {
            const SubspaceMeasurement m = kind == 0 ? subspace_computational(3, pr[0], pr[1])
                                                    : subspace_superposition(3, pr[0], pr[1]);
            for (int ia = 0; ia < 2; ++ia)
                for (int ib = 0; ib < 2; ++ib) {
                    const Eigen::MatrixXcd proj =
                        on_party(0, m.vectors[ia] * m.vectors[ia].adjoint()) *
                        on_party(1, m.vectors[ib] * m.vectors[ib].adjoint());
                    const double p = eve_weight * 0.25 * (proj * rho_e).trace().real();
                    sift += p;
                    const int key_a = ia;
                    const int key_b = kind == 0 ? 1 - ib : ib;
                    if (key_a != key_b) err += p;
                }
        }
    }
    if (sift <= 0.0) throw std::runtime_error("Eve channel leaves no sifted rounds");
    return err / sift;
}

std::vector<OracleConstant> OracleConstants::labeled() const {
    return {
        {"fourier_diagonal_prob", fourier_diagonal_prob,
         "exact 27-amplitude contraction of the tripartite state, same-vector Alice-Bob pairs"},
        {"fourier_offdiagonal_prob", fourier_offdiagonal_prob,
         "exact contraction, differing-vector Alice-Bob pairs"},
        {"secret_sharing_sift_fraction", secret_sharing_sift_fraction,
         "|basis_set|^(1-3) for independent uniform choices"},
        {"qkd_sift_fixed", qkd_sift_fixed,
         "basis-match 1/2 x exact double-click probability of the reduced state"},
        {"qkd_sift_random", qkd_sift_random,
         "additional 1/3 subspace-match factor over the three unordered pairs"},
        {"double_click_prob_same_basis", double_click_prob_same_basis,
         "trace of the joint click projector against the reduced density matrix"},
        {"herald_success_dft", herald_success_dft,
         "squared norm of the heralded amplitude sum, balanced tritter coupler"},
        {"herald_success_identity", herald_success_identity,
         "same with the identity coupler (single surviving routing)"},
        {"eve_qber_2d", eve_qber_2d,
         "exact channel composition, intercept-resend over the two 2D subspace bases"},
        {"eve_qber_3d", eve_qber_3d,
         "exact channel composition, intercept-resend in the full computational basis"},
    };
}

OracleConstants compute_oracle_constants() {
    OracleConstants c;

    const CorrelationTable table = correlation_table(fourier_basis(3));
    double diag = 0.0, off = 0.0;
    int n_diag = 0, n_off = 0;
    for (const auto& e : table.entries) {
        if (e.alice == e.bob) {
            diag += e.prob;
            ++n_diag;
        } else {
            off += e.prob;
            ++n_off;
        }
    }
    c.fourier_diagonal_prob = n_diag > 0 ? diag / n_diag : 0.0;
    c.fourier_offdiagonal_prob = n_off > 0 ? off / n_off : 0.0;

    // |B|^{1-3} for the default two-basis set
    c.secret_sharing_sift_fraction = std::pow(2.0, 1.0 - 3.0);

    c.qkd_sift_fixed = exact_qkd_sift_fraction(SubspacePolicy::Fixed);
    c.qkd_sift_random = exact_qkd_sift_fraction(SubspacePolicy::Random);

    const MixedState rho = reduced_alice_bob();
    const SubspaceMeasurement comp01 = subspace_computational(3, 0, 1);
    c.double_click_prob_same_basis = exact_double_click_probability(rho, comp01, comp01);

    c.herald_success_dft =
        herald_tripartite(CouplerUnitary::dft(), DetectorAssignment{}).success_probability;
    c.herald_success_identity =
        herald_tripartite(CouplerUnitary::identity(), DetectorAssignment{}).success_probability;

    EveStrategy eve2d;  // defaults: Bob's particle, random over the two 2D bases
    c.eve_qber_2d = exact_intercept_resend_qber(eve2d);
    EveStrategy eve3d;
    eve3d.policy = EveStrategy::Policy::Fixed;
    eve3d.basis_set = {EveStrategy::BasisId::FullComputational};
    c.eve_qber_3d = exact_intercept_resend_qber(eve3d);

    return c;
}

}  // namespace triq
