#include "triq/qudit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace triq {
namespace {

Eigen::Index product_dim(const std::vector<int>& dims) {
    Eigen::Index n = 1;
    for (int d : dims) {
        if (d <= 0) throw std::invalid_argument("party dimension must be positive");
        n *= d;
    }
    return n;
}

std::vector<Eigen::Index> strides_of(const std::vector<int>& dims) {
    std::vector<Eigen::Index> s(dims.size(), 1);
    for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
        s[k] = s[k + 1] * dims[k + 1];
    return s;
}

// Full product-basis change matrix (small dimensions only).
Eigen::MatrixXcd joint_basis_matrix(const std::vector<Basis>& bases) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(1, 1);
    for (const Basis& b : bases) {
        Eigen::MatrixXcd bk(b.dim, b.dim);
        for (int r = 0; r < b.dim; ++r) bk.row(r) = b.vectors[r].conjugate().transpose();
        Eigen::MatrixXcd next(m.rows() * bk.rows(), m.cols() * bk.cols());
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                next.block(i * bk.rows(), j * bk.cols(), bk.rows(), bk.cols()) = m(i, j) * bk;
        m = std::move(next);
    }
    return m;
}

}  // namespace

Eigen::Index PureState::total_dim() const { return product_dim(party_dims); }
Eigen::Index MixedState::total_dim() const { return product_dim(party_dims); }

Eigen::Index PureState::flat_index(const std::vector<int>& levels) const {
    if (levels.size() != party_dims.size())
        throw std::invalid_argument("level count does not match party count");
    const auto strides = strides_of(party_dims);
    Eigen::Index idx = 0;
    for (size_t k = 0; k < levels.size(); ++k) {
        if (levels[k] < 0 || levels[k] >= party_dims[k])
            throw std::invalid_argument("level out of range");
        idx += strides[k] * levels[k];
    }
    return idx;
}

std::vector<int> PureState::unflatten(Eigen::Index index) const {
    std::vector<int> levels(party_dims.size());
    for (int k = num_parties() - 1; k >= 0; --k) {
        levels[k] = static_cast<int>(index % party_dims[k]);
        index /= party_dims[k];
    }
    return levels;
}

PureState& PureState::renormalize() {
    const double n = amplitudes.norm();
    if (n < kAlgebraTol) throw std::runtime_error("cannot renormalize a zero vector");
    amplitudes /= n;
    normalized = true;
    return *this;
}

void PureState::check() const {
    if (amplitudes.size() != total_dim())
        throw std::invalid_argument("amplitude length does not match party dimensions");
    if (normalized && std::abs(norm_squared() - 1.0) > kAlgebraTol)
        throw std::invalid_argument("state flagged normalized but |psi|^2 != 1");
}

PureState PureState::basis_ket(std::vector<int> dims, const std::vector<int>& levels) {
    PureState s;
    s.party_dims = std::move(dims);
    s.amplitudes = Eigen::VectorXcd::Zero(product_dim(s.party_dims));
    s.amplitudes[s.flat_index(levels)] = 1.0;
    s.normalized = true;
    return s;
}

MixedState MixedState::from_pure(const PureState& psi) {
    MixedState m;
    m.party_dims = psi.party_dims;
    m.matrix = psi.amplitudes * psi.amplitudes.adjoint();
    return m;
}

void MixedState::check() const {
    if (matrix.rows() != total_dim() || matrix.cols() != total_dim())
        throw std::invalid_argument("density matrix side does not match party dimensions");
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTol)
        throw std::invalid_argument("density matrix not Hermitian");
    if (std::abs(matrix.trace().real() - 1.0) > kAlgebraTol ||
        std::abs(matrix.trace().imag()) > kAlgebraTol)
        throw std::invalid_argument("density matrix trace != 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol)
        throw std::invalid_argument("density matrix not positive semidefinite");
}

void Basis::check() const {
    if (static_cast<int>(vectors.size()) != dim)
        throw std::invalid_argument("basis must contain dim vectors");
    for (int i = 0; i < dim; ++i) {
        if (vectors[i].size() != dim) throw std::invalid_argument("basis vector length mismatch");
        for (int j = 0; j <= i; ++j) {
            const cxd ov = vectors[i].dot(vectors[j]);  // conjugates vectors[i]
            const cxd expect = (i == j) ? cxd{1.0, 0.0} : cxd{0.0, 0.0};
            if (std::abs(ov - expect) > kAlgebraTol)
                throw std::invalid_argument("basis vectors not orthonormal");
        }
    }
}

void SubspaceMeasurement::check() const {
    if (vectors.empty() || static_cast<int>(vectors.size()) >= dim)
        throw std::invalid_argument("subspace must be a nonempty proper subspace");
    if (labels.size() != vectors.size())
        throw std::invalid_argument("one label per subspace vector required");
    for (size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != dim)
            throw std::invalid_argument("subspace vector length mismatch");
        for (size_t j = 0; j <= i; ++j) {
            const cxd ov = vectors[i].dot(vectors[j]);
            const cxd expect = (i == j) ? cxd{1.0, 0.0} : cxd{0.0, 0.0};
            if (std::abs(ov - expect) > kAlgebraTol)
                throw std::invalid_argument("subspace vectors not orthonormal");
        }
    }
}

Eigen::MatrixXcd SubspaceMeasurement::complement_projector() const {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto& v : vectors) p -= v * v.adjoint();
    return p;
}

PureState tensor(const std::vector<PureState>& states) {
    if (states.empty()) throw std::invalid_argument("tensor of empty sequence");
    PureState out;
    out.amplitudes = Eigen::VectorXcd::Ones(1);
    for (const PureState& s : states) {
        s.check();
        out.party_dims.insert(out.party_dims.end(), s.party_dims.begin(), s.party_dims.end());
        Eigen::VectorXcd next(out.amplitudes.size() * s.amplitudes.size());
        for (Eigen::Index i = 0; i < out.amplitudes.size(); ++i)
            next.segment(i * s.amplitudes.size(), s.amplitudes.size()) =
                out.amplitudes[i] * s.amplitudes;
        out.amplitudes = std::move(next);
    }
    out.normalized = true;
    return out;
}

namespace {

std::vector<int> validate_keep(const std::vector<int>& keep, int num_parties) {
    if (keep.empty()) throw std::invalid_argument("keep set must be nonempty");
    std::vector<int> k = keep;
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    for (int p : k)
        if (p < 0 || p >= num_parties) throw std::invalid_argument("keep references nonexistent party");
    return k;
}

}  // namespace

MixedState partial_trace(const PureState& psi, const std::vector<int>& keep) {
    psi.check();
    const std::vector<int> kept = validate_keep(keep, psi.num_parties());
    std::vector<int> traced;
    for (int p = 0; p < psi.num_parties(); ++p)
        if (!std::binary_search(kept.begin(), kept.end(), p)) traced.push_back(p);

    MixedState out;
    for (int p : kept) out.party_dims.push_back(psi.party_dims[p]);
    const Eigen::Index keep_dim = product_dim(out.party_dims);
    out.matrix = Eigen::MatrixXcd::Zero(keep_dim, keep_dim);

    const auto strides = strides_of(psi.party_dims);
    Eigen::Index traced_count = 1;
    for (int p : traced) traced_count *= psi.party_dims[p];

    std::vector<int> kdims = out.party_dims;
    for (Eigen::Index t = 0; t < traced_count; ++t) {
        // base offset for this traced assignment
        Eigen::Index base = 0, rem = t;
        for (int i = static_cast<int>(traced.size()) - 1; i >= 0; --i) {
            const int p = traced[i];
            base += strides[p] * (rem % psi.party_dims[p]);
            rem /= psi.party_dims[p];
        }
        Eigen::VectorXcd v(keep_dim);
        for (Eigen::Index r = 0; r < keep_dim; ++r) {
            Eigen::Index idx = base, rr = r;
            for (int i = static_cast<int>(kept.size()) - 1; i >= 0; --i) {
                const int p = kept[i];
                idx += strides[p] * (rr % psi.party_dims[p]);
                rr /= psi.party_dims[p];
            }
            v[r] = psi.amplitudes[idx];
        }
        out.matrix += v * v.adjoint();
    }
    return out;
}

MixedState partial_trace(const MixedState& rho, const std::vector<int>& keep) {
    const std::vector<int> kept = validate_keep(keep, rho.num_parties());
    std::vector<int> traced;
    for (int p = 0; p < rho.num_parties(); ++p)
        if (!std::binary_search(kept.begin(), kept.end(), p)) traced.push_back(p);

    MixedState out;
    for (int p : kept) out.party_dims.push_back(rho.party_dims[p]);
    const Eigen::Index keep_dim = product_dim(out.party_dims);
    out.matrix = Eigen::MatrixXcd::Zero(keep_dim, keep_dim);

    const auto strides = strides_of(rho.party_dims);
    Eigen::Index traced_count = 1;
    for (int p : traced) traced_count *= rho.party_dims[p];

    auto flat = [&](Eigen::Index keep_idx, Eigen::Index base) {
        Eigen::Index idx = base, rr = keep_idx;
        for (int i = static_cast<int>(kept.size()) - 1; i >= 0; --i) {
            const int p = kept[i];
            idx += strides[p] * (rr % rho.party_dims[p]);
            rr /= rho.party_dims[p];
        }
        return idx;
    };

    for (Eigen::Index t = 0; t < traced_count; ++t) {
        Eigen::Index base = 0, rem = t;
        for (int i = static_cast<int>(traced.size()) - 1; i >= 0; --i) {
            const int p = traced[i];
            base += strides[p] * (rem % rho.party_dims[p]);
            rem /= rho.party_dims[p];
        }
        for (Eigen::Index r = 0; r < keep_dim; ++r)
            for (Eigen::Index c = 0; c < keep_dim; ++c)
                out.matrix(r, c) += rho.matrix(flat(r, base), flat(c, base));
    }
    return out;
}

Basis computational_basis(int d) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    Basis b;
    b.label = "computational";
    b.dim = d;
    for (int k = 0; k < d; ++k) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
        v[k] = 1.0;
        b.vectors.push_back(std::move(v));
    }
    return b;
}

Basis fourier_basis(int d) {
    if (d < 2) throw std::invalid_argument("fourier basis requires d >= 2");
    Basis b;
    b.label = "fourier";
    b.dim = d;
    const double inv = 1.0 / std::sqrt(static_cast<double>(d));
    for (int m = 0; m < d; ++m) {
        Eigen::VectorXcd v(d);
        for (int k = 0; k < d; ++k) {
            const double ang = 2.0 * M_PI * m * k / d;
            v[k] = inv * cxd{std::cos(ang), std::sin(ang)};
        }
        b.vectors.push_back(std::move(v));
    }
    return b;
}

SubspaceMeasurement subspace_computational(int d, int i, int j) {
    if (i == j || i < 0 || j < 0 || i >= d || j >= d)
        throw std::invalid_argument("subspace levels must be distinct and in range");
    SubspaceMeasurement m;
    m.dim = d;
    Eigen::VectorXcd vi = Eigen::VectorXcd::Zero(d), vj = Eigen::VectorXcd::Zero(d);
    vi[i] = 1.0;
    vj[j] = 1.0;
    m.vectors = {vi, vj};
    m.labels = {std::to_string(i), std::to_string(j)};
    return m;
}

SubspaceMeasurement subspace_superposition(int d, int i, int j) {
    if (i == j || i < 0 || j < 0 || i >= d || j >= d)
        throw std::invalid_argument("subspace levels must be distinct and in range");
    SubspaceMeasurement m;
    m.dim = d;
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::VectorXcd vp = Eigen::VectorXcd::Zero(d), vm = Eigen::VectorXcd::Zero(d);
    vp[i] = s;
    vp[j] = s;
    vm[i] = s;
    vm[j] = -s;
    m.vectors = {vp, vm};
    m.labels = {"+", "-"};
    return m;
}

Eigen::VectorXcd apply_local(const PureState& psi, int party, const Eigen::MatrixXcd& op) {
    if (party < 0 || party >= psi.num_parties())
        throw std::invalid_argument("party index out of range");
    const int d = psi.party_dims[party];
    if (op.rows() != d || op.cols() != d)
        throw std::invalid_argument("operator dimension does not match party");
    const auto strides = strides_of(psi.party_dims);
    const Eigen::Index stride = strides[party];
    const Eigen::Index total = psi.amplitudes.size();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(total);
    // Iterate over blocks where the party index varies with the given stride.
    const Eigen::Index outer = total / (stride * d);
    for (Eigen::Index o = 0; o < outer; ++o) {
        for (Eigen::Index inner = 0; inner < stride; ++inner) {
            const Eigen::Index base = o * stride * d + inner;
            for (int r = 0; r < d; ++r) {
                cxd acc = 0.0;
                for (int c = 0; c < d; ++c) acc += op(r, c) * psi.amplitudes[base + c * stride];
                out[base + r * stride] = acc;
            }
        }
    }
    return out;
}

namespace {

void require_basis_match(const std::vector<int>& dims, const std::vector<Basis>& bases) {
    if (bases.size() != dims.size())
        throw std::invalid_argument("one basis per party required");
    for (size_t k = 0; k < dims.size(); ++k)
        if (bases[k].dim != dims[k])
            throw std::invalid_argument("basis dimension does not match party dimension");
}

}  // namespace

std::vector<double> born_probabilities(const PureState& psi, const std::vector<Basis>& bases) {
    psi.check();
    require_basis_match(psi.party_dims, bases);
    PureState work = psi;
    for (int k = 0; k < psi.num_parties(); ++k) {
        Eigen::MatrixXcd bm(bases[k].dim, bases[k].dim);
        for (int r = 0; r < bases[k].dim; ++r)
            bm.row(r) = bases[k].vectors[r].conjugate().transpose();
        work.amplitudes = apply_local(work, k, bm);
    }
    std::vector<double> probs(work.amplitudes.size());
    for (Eigen::Index i = 0; i < work.amplitudes.size(); ++i)
        probs[i] = std::norm(work.amplitudes[i]);
    return probs;
}

std::vector<double> born_probabilities(const MixedState& rho, const std::vector<Basis>& bases) {
    require_basis_match(rho.party_dims, bases);
    const Eigen::MatrixXcd b = joint_basis_matrix(bases);
    const Eigen::MatrixXcd transformed = b * rho.matrix * b.adjoint();
    std::vector<double> probs(transformed.rows());
    for (Eigen::Index i = 0; i < transformed.rows(); ++i)
        probs[i] = std::max(0.0, transformed(i, i).real());
    return probs;
}

MeasureResult measure(const PureState& psi, const std::vector<std::optional<Basis>>& bases,
                      Rng& rng) {
    psi.check();
    if (!psi.normalized || std::abs(psi.norm_squared() - 1.0) > kAlgebraTol)
        throw std::invalid_argument("measure requires a normalized state");
    if (bases.size() != psi.party_dims.size())
        throw std::invalid_argument("one (optional) basis per party required");

    // Rotate measured parties into their measurement bases.
    PureState work = psi;
    for (int k = 0; k < psi.num_parties(); ++k) {
        if (!bases[k]) continue;
        if (bases[k]->dim != psi.party_dims[k])
            throw std::invalid_argument("basis dimension does not match party dimension");
        Eigen::MatrixXcd bm(bases[k]->dim, bases[k]->dim);
        for (int r = 0; r < bases[k]->dim; ++r)
            bm.row(r) = bases[k]->vectors[r].conjugate().transpose();
        work.amplitudes = apply_local(work, k, bm);
    }

    // Joint distribution over the measured parties.
    std::vector<int> measured;
    Eigen::Index n_outcomes = 1;
    for (int k = 0; k < psi.num_parties(); ++k)
        if (bases[k]) {
            measured.push_back(k);
            n_outcomes *= psi.party_dims[k];
        }
    const auto strides = strides_of(psi.party_dims);
    std::vector<double> probs(n_outcomes, 0.0);
    std::vector<Eigen::Index> outcome_of_index(psi.amplitudes.size());
    for (Eigen::Index i = 0; i < work.amplitudes.size(); ++i) {
        Eigen::Index o = 0;
        for (int k : measured) o = o * psi.party_dims[k] + (i / strides[k]) % psi.party_dims[k];
        outcome_of_index[i] = o;
        probs[o] += std::norm(work.amplitudes[i]);
    }

    const int picked = sample_index(probs, rng);
    if (picked < 0 || probs[picked] <= kAlgebraTol * kAlgebraTol)
        throw std::runtime_error("zero-probability projection selected (numerical fault)");

    // Project, renormalize, rotate back.
    for (Eigen::Index i = 0; i < work.amplitudes.size(); ++i)
        if (outcome_of_index[i] != picked) work.amplitudes[i] = 0.0;
    for (int k : measured) {
        Eigen::MatrixXcd bm(bases[k]->dim, bases[k]->dim);
        for (int c = 0; c < bases[k]->dim; ++c) bm.col(c) = bases[k]->vectors[c];
        work.amplitudes = apply_local(work, k, bm);
    }
    work.renormalize();

    MeasureResult res;
    res.outcome.assign(psi.num_parties(), -1);
    Eigen::Index rem = picked;
    for (int i = static_cast<int>(measured.size()) - 1; i >= 0; --i) {
        const int k = measured[i];
        res.outcome[k] = static_cast<int>(rem % psi.party_dims[k]);
        rem /= psi.party_dims[k];
    }
    res.post = std::move(work);
    return res;
}

std::vector<double> subspace_probabilities(const PureState& psi, int party,
                                           const SubspaceMeasurement& meas) {
    if (meas.dim != psi.party_dims.at(party))
        throw std::invalid_argument("subspace dimension does not match party");
    std::vector<double> probs;
    for (const auto& v : meas.vectors) {
        const Eigen::MatrixXcd p = v * v.adjoint();
        probs.push_back(apply_local(psi, party, p).squaredNorm());
    }
    probs.push_back(apply_local(psi, party, meas.complement_projector()).squaredNorm());
    return probs;
}

std::vector<double> subspace_probabilities(const MixedState& rho, int party,
                                           const SubspaceMeasurement& meas) {
    if (meas.dim != rho.party_dims.at(party))
        throw std::invalid_argument("subspace dimension does not match party");
    // Embed the single-party projector into the joint space.
    const auto strides = strides_of(rho.party_dims);
    const Eigen::Index stride = strides[party];
    const int d = rho.party_dims[party];
    auto joint_prob = [&](const Eigen::MatrixXcd& p) {
        // tr(P rho P) with P = I (x) p (x) I, evaluated via index arithmetic.
        double acc = 0.0;
        const Eigen::Index total = rho.total_dim();
        const Eigen::Index outer = total / (stride * d);
        for (Eigen::Index o = 0; o < outer; ++o)
            for (Eigen::Index inner = 0; inner < stride; ++inner) {
                const Eigen::Index base = o * stride * d + inner;
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c)
                        acc += (p(r, c) * rho.matrix(base + c * stride, base + r * stride)).real();
            }
        return acc;
    };
    std::vector<double> probs;
    for (const auto& v : meas.vectors) probs.push_back(joint_prob(v * v.adjoint()));
    probs.push_back(std::max(0.0, joint_prob(meas.complement_projector())));
    return probs;
}

SubspacePureResult subspace_measure(const PureState& psi, int party,
                                    const SubspaceMeasurement& meas, Rng& rng) {
    meas.check();
    const auto probs = subspace_probabilities(psi, party, meas);
    const int picked = sample_index(probs, rng);
    const int n_click = static_cast<int>(meas.vectors.size());

    SubspacePureResult res;
    res.post = psi;
    Eigen::MatrixXcd proj;
    if (picked < n_click) {
        res.outcome.click = true;
        res.outcome.outcome = picked;
        res.outcome.label = meas.labels[picked];
        proj = meas.vectors[picked] * meas.vectors[picked].adjoint();
    } else {
        proj = meas.complement_projector();
    }
    res.post.amplitudes = apply_local(psi, party, proj);
    res.post.renormalize();
    return res;
}

SubspaceMixedResult subspace_measure(const MixedState& rho, int party,
                                     const SubspaceMeasurement& meas, Rng& rng) {
    meas.check();
    const auto probs = subspace_probabilities(rho, party, meas);
    const int picked = sample_index(probs, rng);
    const int n_click = static_cast<int>(meas.vectors.size());

    // Project via a pure-state trick is unavailable; apply P rho P directly.
    const auto strides = strides_of(rho.party_dims);
    const Eigen::Index stride = strides[party];
    const int d = rho.party_dims[party];
    Eigen::MatrixXcd p = (picked < n_click)
                             ? Eigen::MatrixXcd(meas.vectors[picked] * meas.vectors[picked].adjoint())
                             : meas.complement_projector();
    // Build the joint projector explicitly (joint dimensions are small here).
    const Eigen::Index total = rho.total_dim();
    Eigen::MatrixXcd joint = Eigen::MatrixXcd::Zero(total, total);
    const Eigen::Index outer = total / (stride * d);
    for (Eigen::Index o = 0; o < outer; ++o)
        for (Eigen::Index inner = 0; inner < stride; ++inner) {
            const Eigen::Index base = o * stride * d + inner;
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) joint(base + r * stride, base + c * stride) = p(r, c);
        }

    SubspaceMixedResult res;
    if (picked < n_click) {
        res.outcome.click = true;
        res.outcome.outcome = picked;
        res.outcome.label = meas.labels[picked];
    }
    res.post.party_dims = rho.party_dims;
    res.post.matrix = joint * rho.matrix * joint.adjoint();
    const double tr = res.post.matrix.trace().real();
    if (tr < kAlgebraTol) throw std::runtime_error("zero-probability projection (numerical fault)");
    res.post.matrix /= tr;
    return res;
}

bool equal_up_to_global_phase(const PureState& x, const PureState& y, double tol) {
    if (x.party_dims != y.party_dims || x.amplitudes.size() != y.amplitudes.size()) return false;
    Eigen::Index imax;
    x.amplitudes.cwiseAbs().maxCoeff(&imax);
    if (std::abs(x.amplitudes[imax]) < tol) return y.amplitudes.cwiseAbs().maxCoeff() < tol;
    const cxd phase = y.amplitudes[imax] / x.amplitudes[imax];
    if (std::abs(std::abs(phase) - 1.0) > tol) return false;
    return (y.amplitudes - phase * x.amplitudes).cwiseAbs().maxCoeff() <= tol;
}

LocalPhaseWitness equal_up_to_local_diagonal_phases(const PureState& x, const PureState& y,
                                                    double tol) {
    LocalPhaseWitness w;
    if (x.party_dims != y.party_dims) return w;
    const Eigen::Index total = x.amplitudes.size();
    if (total != y.amplitudes.size()) return w;

    // Support equations: prod_k z[k][m_k] = y[i]/x[i] for each nonzero x[i].
    struct Equation {
        Eigen::Index index;
        cxd ratio;
        double weight;
    };
    std::vector<Equation> eqs;
    for (Eigen::Index i = 0; i < total; ++i) {
        const double ax = std::abs(x.amplitudes[i]);
        const double ay = std::abs(y.amplitudes[i]);
        if (ax <= tol && ay <= tol) continue;
        if (std::abs(ax - ay) > tol) return w;  // magnitudes must already agree
        eqs.push_back({i, y.amplitudes[i] / x.amplitudes[i], ax});
    }
    std::sort(eqs.begin(), eqs.end(),
              [](const Equation& a, const Equation& b) { return a.weight > b.weight; });

    const int n = x.num_parties();
    std::vector<std::vector<cxd>> z(n);
    std::vector<std::vector<bool>> known(n);
    for (int k = 0; k < n; ++k) {
        z[k].assign(x.party_dims[k], cxd{1.0, 0.0});
        known[k].assign(x.party_dims[k], false);
    }

    auto unknowns_of = [&](const Equation& e, std::vector<std::pair<int, int>>& out) {
        out.clear();
        const auto levels = x.unflatten(e.index);
        for (int k = 0; k < n; ++k)
            if (!known[k][levels[k]]) out.emplace_back(k, levels[k]);
    };

    // Greedy propagation: solve equations with one unknown factor; when stuck,
    // spend gauge freedom by fixing all but one unknown of the tightest
    // remaining equation to 1. The global verification below catches any bad
    // gauge choice.
    std::vector<bool> done(eqs.size(), false);
    std::vector<std::pair<int, int>> unk;
    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t e = 0; e < eqs.size(); ++e) {
            if (done[e]) continue;
            unknowns_of(eqs[e], unk);
            if (unk.size() > 1) continue;
            if (unk.size() == 1) {
                cxd knownpart{1.0, 0.0};
                const auto levels = x.unflatten(eqs[e].index);
                for (int k = 0; k < n; ++k)
                    if (!(k == unk[0].first && levels[k] == unk[0].second))
                        knownpart *= z[k][levels[k]];
                cxd val = eqs[e].ratio / knownpart;
                const double mag = std::abs(val);
                if (std::abs(mag - 1.0) > 10 * tol) return w;
                z[unk[0].first][unk[0].second] = val / mag;
                known[unk[0].first][unk[0].second] = true;
            }
            done[e] = true;
            progress = true;
        }
        if (!progress) {
            // pick the unresolved equation with the fewest unknowns
            size_t best = eqs.size();
            size_t best_count = SIZE_MAX;
            for (size_t e = 0; e < eqs.size(); ++e) {
                if (done[e]) continue;
                unknowns_of(eqs[e], unk);
                if (unk.size() < best_count) {
                    best_count = unk.size();
                    best = e;
                }
            }
            if (best == eqs.size()) break;  // all done
            unknowns_of(eqs[best], unk);
            for (size_t i = 0; i + 1 < unk.size(); ++i) {
                z[unk[i].first][unk[i].second] = 1.0;
                known[unk[i].first][unk[i].second] = true;
            }
            progress = true;
        }
    }

    // Global verification over every amplitude.
    for (Eigen::Index i = 0; i < total; ++i) {
        const auto levels = x.unflatten(i);
        cxd corr = x.amplitudes[i];
        for (int k = 0; k < n; ++k) corr *= z[k][levels[k]];
        if (std::abs(corr - y.amplitudes[i]) > tol) return w;
    }

    w.equal = true;
    w.phases.resize(n);
    for (int k = 0; k < n; ++k) {
        w.phases[k] = Eigen::VectorXcd(x.party_dims[k]);
        for (int m = 0; m < x.party_dims[k]; ++m) w.phases[k][m] = z[k][m];
    }
    return w;
}

}  // namespace triq
