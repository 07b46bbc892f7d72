// Exact finite-dimensional quantum state algebra: multi-party pure and mixed
// states, labeled measurement bases, subspace (click / no-click) measurements,
// partial trace, and phase-equivalence tests.
//
// Layout convention used everywhere: amplitudes are row-major with party 0
// varying slowest; levels a,b,c map to indices 0,1,2.

#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "triq/rng.hpp"

namespace triq {

using cxd = std::complex<double>;

inline constexpr double kAlgebraTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;

struct PureState {
    std::vector<int> party_dims;
    Eigen::VectorXcd amplitudes;
    bool normalized = false;

    int num_parties() const { return static_cast<int>(party_dims.size()); }
    Eigen::Index total_dim() const;

    // Row-major flat index of a per-party level assignment.
    Eigen::Index flat_index(const std::vector<int>& levels) const;
    std::vector<int> unflatten(Eigen::Index index) const;

    double norm_squared() const { return amplitudes.squaredNorm(); }
    PureState& renormalize();

    // Throws std::invalid_argument if the layout or normalization invariant
    // is violated.
    void check() const;

    static PureState basis_ket(std::vector<int> dims, const std::vector<int>& levels);
    static PureState single(int dim, int level) { return basis_ket({dim}, {level}); }
};

struct MixedState {
    std::vector<int> party_dims;
    Eigen::MatrixXcd matrix;

    int num_parties() const { return static_cast<int>(party_dims.size()); }
    Eigen::Index total_dim() const;
    void check() const;  // Hermitian, unit trace, PSD within tolerance

    static MixedState from_pure(const PureState& psi);
};

struct Basis {
    std::string label;
    int dim = 0;
    std::vector<Eigen::VectorXcd> vectors;

    void check() const;  // pairwise orthonormality
};

// A set of orthonormal "click" outcomes spanning a proper subspace; the
// complement projector is the no-click outcome.
struct SubspaceMeasurement {
    int dim = 0;
    std::vector<Eigen::VectorXcd> vectors;
    std::vector<std::string> labels;

    void check() const;
    Eigen::MatrixXcd complement_projector() const;
};

PureState tensor(const std::vector<PureState>& states);

MixedState partial_trace(const PureState& psi, const std::vector<int>& keep);
MixedState partial_trace(const MixedState& rho, const std::vector<int>& keep);

Basis computational_basis(int d);

// Fourier (DFT) basis: vector m has components omega^{mk}/sqrt(d) with
// omega = exp(i 2 pi / d). Mutually unbiased with the computational basis;
// at d = 3 this is the u1,u2,u3 set with phase 2 pi / 3.
Basis fourier_basis(int d);

// Two-outcome basis {(|i> + |j>)/sqrt2, (|i> - |j>)/sqrt2} embedded in
// dimension d, and the {|i>,|j>} pair, as subspace measurements.
SubspaceMeasurement subspace_computational(int d, int i, int j);
SubspaceMeasurement subspace_superposition(int d, int i, int j);

// Exact joint outcome distribution when party k is measured in bases[k].
// Row-major table over joint outcomes, sums to 1.
std::vector<double> born_probabilities(const PureState& psi, const std::vector<Basis>& bases);
std::vector<double> born_probabilities(const MixedState& rho, const std::vector<Basis>& bases);

struct MeasureResult {
    std::vector<int> outcome;  // -1 for unmeasured parties
    PureState post;
};

// Projective measurement of the selected parties (nullopt = leave alone);
// outcome sampled from the exact distribution, post-state is the renormalized
// projection. Deterministic given the generator state.
MeasureResult measure(const PureState& psi, const std::vector<std::optional<Basis>>& bases, Rng& rng);

struct SubspaceOutcome {
    bool click = false;
    int outcome = -1;   // index into meas.vectors when click
    std::string label;  // empty when no click
};

struct SubspacePureResult {
    SubspaceOutcome outcome;
    PureState post;
};
struct SubspaceMixedResult {
    SubspaceOutcome outcome;
    MixedState post;
};

SubspacePureResult subspace_measure(const PureState& psi, int party,
                                    const SubspaceMeasurement& meas, Rng& rng);
SubspaceMixedResult subspace_measure(const MixedState& rho, int party,
                                     const SubspaceMeasurement& meas, Rng& rng);

// Click and no-click probabilities without sampling (exact oracle).
std::vector<double> subspace_probabilities(const PureState& psi, int party,
                                           const SubspaceMeasurement& meas);
std::vector<double> subspace_probabilities(const MixedState& rho, int party,
                                           const SubspaceMeasurement& meas);

// Applies a single-party linear operator (dim x dim) to the joint state.
Eigen::VectorXcd apply_local(const PureState& psi, int party, const Eigen::MatrixXcd& op);

bool equal_up_to_global_phase(const PureState& x, const PureState& y, double tol);

struct LocalPhaseWitness {
    bool equal = false;
    cxd global_phase{1.0, 0.0};
    // phases[k][m] is the diagonal phase applied to level m of party k.
    std::vector<Eigen::VectorXcd> phases;
};

// Searches for per-party diagonal phase corrections D_k with
// (D_0 x ... x D_{n-1}) x == y. Phases are read off from maximal-magnitude
// amplitudes and then verified globally; returns equal=false on mismatch.
LocalPhaseWitness equal_up_to_local_diagonal_phases(const PureState& x, const PureState& y,
                                                    double tol);

}  // namespace triq
