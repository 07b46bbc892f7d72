#include "triq/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace triq {

SourceSpec SourceSpec::uniform(int d) {
    SourceSpec s;
    s.dim = d;
    s.level_amplitudes = Eigen::VectorXcd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
    return s;
}

void SourceSpec::check() const {
    if (dim < 1 || level_amplitudes.size() != dim)
        throw std::invalid_argument("source spec dimension mismatch");
    if (std::abs(level_amplitudes.squaredNorm() - 1.0) > kAlgebraTol)
        throw std::invalid_argument("source amplitudes not normalized");
}

PureState source_state(const SourceSpec& spec) {
    spec.check();
    PureState s;
    s.party_dims = {spec.dim, spec.dim};
    s.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(spec.dim) * spec.dim);
    for (int l = 0; l < spec.dim; ++l)
        s.amplitudes[static_cast<Eigen::Index>(l) * spec.dim + l] = spec.level_amplitudes[l];
    s.normalized = true;
    return s;
}

void CouplerUnitary::check() const {
    if ((u * u.adjoint() - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff() > kAlgebraTol)
        throw std::invalid_argument("coupler matrix is not unitary");
}

CouplerUnitary CouplerUnitary::dft() {
    CouplerUnitary c;
    const double inv = 1.0 / std::sqrt(3.0);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            const double ang = 2.0 * M_PI * j * k / 3.0;
            c.u(j, k) = inv * cxd{std::cos(ang), std::sin(ang)};
        }
    return c;
}

CouplerUnitary CouplerUnitary::identity() {
    CouplerUnitary c;
    c.u = Eigen::Matrix3cd::Identity();
    return c;
}

void DetectorAssignment::check() const {
    std::set<int> vals(port_oam.begin(), port_oam.end());
    if (vals.size() != port_oam.size())
        throw std::invalid_argument("detector OAM assignments must be distinct");
}

HeraldResult herald_tripartite(const CouplerUnitary& coupler, const DetectorAssignment& assign,
                               const SourceSpec& spec) {
    coupler.check();
    assign.check();
    spec.check();
    if (spec.dim != 3) throw std::invalid_argument("heralding is defined for three-level sources");
    for (int l : assign.port_oam)
        if (l < 0 || l >= spec.dim)
            throw std::invalid_argument("detector OAM value outside the source levels");

    PureState cond;
    cond.party_dims = {3, 3, 3};
    cond.amplitudes = Eigen::VectorXcd::Zero(27);

    // port_of[l] = the port whose detector accepts OAM l
    std::array<int, 3> port_of{};
    for (int j = 0; j < 3; ++j) port_of[assign.port_oam[j]] = j;

    // OAM is conserved through the coupler: the detected photon from source k
    // carries the same l = m_k as its undetected partner, so a triple
    // coincidence forces (m_1,m_2,m_3) to be a permutation of the assigned
    // values, with the unique routing sigma(k) = port_of[m_k].
    std::vector<int> m = {0, 1, 2};
    std::sort(m.begin(), m.end());
    do {
        cxd amp{1.0, 0.0};
        for (int k = 0; k < 3; ++k) amp *= spec.level_amplitudes[m[k]] * coupler.u(port_of[m[k]], k);
        cond.amplitudes[cond.flat_index(m)] = amp;
    } while (std::next_permutation(m.begin(), m.end()));

    HeraldResult res;
    res.success_probability = cond.amplitudes.squaredNorm();
    if (res.success_probability < kAlgebraTol)
        throw std::runtime_error("heralding has zero success probability for this setup");
    cond.renormalize();
    res.state = std::move(cond);
    return res;
}

PureState hologram_shift(const PureState& state, int party, int delta_l, int l_max) {
    state.check();
    if (party < 0 || party >= state.num_parties())
        throw std::invalid_argument("party index out of range");
    const int d = state.party_dims[party];
    if (l_max + 1 < d) throw std::invalid_argument("l_max smaller than the party dimension");

    // Occupied levels must stay inside 0..l_max after the shift.
    PureState out = state;
    out.party_dims[party] = l_max + 1;
    out.amplitudes = Eigen::VectorXcd::Zero(out.total_dim());
    for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i) {
        if (std::abs(state.amplitudes[i]) <= kAlgebraTol) continue;
        auto levels = state.unflatten(i);
        const int shifted = levels[party] + delta_l;
        if (shifted < 0 || shifted > l_max)
            throw std::out_of_range("hologram shift moves an occupied level out of range");
        levels[party] = shifted;
        out.amplitudes[out.flat_index(levels)] = state.amplitudes[i];
    }
    return out;
}

std::vector<SorterStage> standard_three_level_cascade() {
    return {{0, M_PI}, {0, M_PI / 2.0}};
}

std::vector<SorterPort> sorter_route(const Eigen::VectorXcd& photon,
                                     const std::vector<SorterStage>& stages, int l_max) {
    if (stages.empty()) throw std::invalid_argument("sorter cascade needs at least one stage");
    if (photon.size() == 0) throw std::invalid_argument("empty photon state");
    const double total = photon.squaredNorm();
    if (std::abs(total - 1.0) > kAlgebraTol)
        throw std::invalid_argument("photon state must be normalized");

    Eigen::VectorXcd current = Eigen::VectorXcd::Zero(l_max + 1);
    current.head(photon.size()) = photon;

    std::vector<SorterPort> ports;
    auto emit = [&](std::string name, Eigen::VectorXcd amps) {
        const double p = amps.squaredNorm();
        if (p <= kAlgebraTol) return;
        amps /= std::sqrt(p);
        ports.push_back({std::move(name), p, std::move(amps)});
    };

    for (size_t s = 0; s < stages.size(); ++s) {
        const auto& st = stages[s];
        if (st.alpha <= 0.0 || st.alpha > 2.0 * M_PI)
            throw std::invalid_argument("stage angle out of range");
        // hologram pre-shift
        if (st.delta_l != 0) {
            Eigen::VectorXcd shifted = Eigen::VectorXcd::Zero(l_max + 1);
            for (int l = 0; l <= l_max; ++l) {
                if (std::abs(current[l]) <= kAlgebraTol) continue;
                const int nl = l + st.delta_l;
                if (nl < 0 || nl > l_max)
                    throw std::out_of_range("sorter hologram shifts an occupied level out of range");
                shifted[nl] = current[l];
            }
            current = std::move(shifted);
        }
        Eigen::VectorXcd odd = Eigen::VectorXcd::Zero(l_max + 1);
        Eigen::VectorXcd even = Eigen::VectorXcd::Zero(l_max + 1);
        for (int l = 0; l <= l_max; ++l) {
            if (std::abs(current[l]) <= kAlgebraTol) continue;
            const double theta = std::fmod(l * st.alpha, 2.0 * M_PI);
            if (std::abs(theta) <= 1e-9 || std::abs(theta - 2.0 * M_PI) <= 1e-9) {
                even[l] = current[l];
            } else if (std::abs(theta - M_PI) <= 1e-9) {
                odd[l] = current[l];
            } else {
                throw std::domain_error("stage phase theta = l*alpha is neither 0 nor pi for l=" +
                                        std::to_string(l) + " (model limit)");
            }
        }
        emit("s" + std::to_string(s + 1) + ":odd", std::move(odd));
        current = std::move(even);
    }
    emit("s" + std::to_string(stages.size()) + ":even", std::move(current));
    return ports;
}

std::vector<double> fourier_three_port(const Eigen::VectorXcd& photon) {
    if (photon.size() != 3) throw std::invalid_argument("three-port analyzer takes a 3-level input");
    const Basis fb = fourier_basis(3);
    std::vector<double> probs(3);
    for (int m = 0; m < 3; ++m) probs[m] = std::norm(fb.vectors[m].dot(photon));
    return probs;
}

Basis sorter_calibrated_basis(const std::vector<SorterStage>& stages) {
    // Route each eigenstate; the cascade must send each l to its own port.
    std::vector<std::string> port_of_level(3);
    std::set<std::string> seen;
    for (int l = 0; l < 3; ++l) {
        Eigen::VectorXcd photon = Eigen::VectorXcd::Zero(3);
        photon[l] = 1.0;
        const auto ports = sorter_route(photon, stages);
        if (ports.size() != 1 || std::abs(ports[0].probability - 1.0) > kAlgebraTol)
            throw std::runtime_error("sorter cascade does not route eigenstates deterministically");
        port_of_level[l] = ports[0].port;
        if (!seen.insert(ports[0].port).second)
            throw std::runtime_error("sorter cascade does not separate all three levels");
    }
    Basis b = computational_basis(3);
    b.label = "sorter";
    return b;
}

Basis three_port_basis() {
    Basis b = fourier_basis(3);
    b.label = "three-port";
    return b;
}

}  // namespace triq
