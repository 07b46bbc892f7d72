// Linear-optics realization: heralded generation of the tripartite state from
// three OAM-entangled pair sources via a three-beam coupler with triple
// coincidence, plus the Dove-prism sorter cascade, diffraction-order hologram
// shifts, and the three-port superposition analyzer.
//
// Photons are distinguishable by their OAM filters at the detectors, so the
// heralded amplitude is a sum over the (unique) source-to-port routings; no
// bosonic Fock treatment is attempted.

#pragma once

#include <string>
#include <vector>

#include "triq/qudit.hpp"

namespace triq {

struct SourceSpec {
    int dim = 3;
    Eigen::VectorXcd level_amplitudes;  // c_l for the pair state sum_l c_l |l,l>

    static SourceSpec uniform(int d = 3);
    void check() const;
};

// Two-party pair state sum_l c_l |l,l>.
PureState source_state(const SourceSpec& spec);

struct CouplerUnitary {
    Eigen::Matrix3cd u;  // u(j,k): photon entering input k exits port j

    void check() const;  // unitarity within 1e-10
    static CouplerUnitary dft();       // balanced tritter, u(j,k) = w^{jk}/sqrt3
    static CouplerUnitary identity();
};

struct DetectorAssignment {
    // port_oam[j] = OAM value the detector on port j accepts (set by the
    // diffraction-order hologram; defaults to l_j = j).
    std::array<int, 3> port_oam{0, 1, 2};
    void check() const;  // values distinct
};

struct HeraldResult {
    PureState state;             // conditional three-party state, renormalized
    double success_probability;  // squared norm before renormalization
};

// Conditional state of the three undetected partner photons given a triple
// coincidence. Supported only on permutation kets of the assigned OAM values;
// each ket's amplitude is the product of source amplitudes and coupler entries
// along the unique routing consistent with the detector filters.
HeraldResult herald_tripartite(const CouplerUnitary& coupler, const DetectorAssignment& assign,
                               const SourceSpec& spec = SourceSpec::uniform());

// Basis relabeling l -> l + delta_l on one party; shifting any occupied level
// out of 0..l_max is an error, not a truncation.
PureState hologram_shift(const PureState& state, int party, int delta_l, int l_max);

struct SorterStage {
    int delta_l = 0;     // hologram pre-shift applied before the interferometer
    double alpha = M_PI; // Dove-prism phase law theta(l) = l * alpha
};

struct SorterPort {
    std::string port;           // "s<i>:odd" or "s<k>:even" for the final stage
    double probability = 0.0;
    Eigen::VectorXcd amplitudes;  // renormalized single-photon state at the port
};

// Routes a single photon through a cascade of sorter stages. Each stage
// applies its hologram shift, then sends odd-phase components (theta = pi mod
// 2pi) out of its odd port while even-phase components continue to the next
// stage; the final stage's even port is also terminal. A stage whose phase law
// gives a non-{0,pi} phase for an occupied l is a model-limit error.
std::vector<SorterPort> sorter_route(const Eigen::VectorXcd& photon,
                                     const std::vector<SorterStage>& stages, int l_max = 8);

// Two-stage cascade that fully sorts l in {0,1,2}: alpha = pi then pi/2.
std::vector<SorterStage> standard_three_level_cascade();

// Port probabilities of the three-port analyzer: port m clicks with
// probability |<u_m|psi>|^2, u_m from fourier_basis(3).
std::vector<double> fourier_three_port(const Eigen::VectorXcd& photon);

// Measurement bases realized by the optics chain, for use as a protocol
// backend. The computational basis is calibrated by routing each OAM
// eigenstate through the cascade (port <-> level must be one-to-one); the
// superposition basis is the three-port analyzer's port set.
Basis sorter_calibrated_basis(const std::vector<SorterStage>& stages);
Basis three_port_basis();

}  // namespace triq
