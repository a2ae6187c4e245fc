#pragma once

// 1D spin-chain construction: embedding of site operators into the full
// 2^N-dimensional space, the PXP parent model, supports and distances on the
// chain, and the site-anchored local interaction norms.
//
// Site ordering convention: site 1 is the MOST significant tensor factor,
// i.e. embed_site(op, 1, N) = op (x) I (x) ... (x) I. All basis-indexed tests
// depend on this convention.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "gapdyn/errors.hpp"
#include "gapdyn/linalg.hpp"

namespace gapdyn {

// Pauli matrices and friends.
inline Operator pauli_x() {
    Operator m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline Operator pauli_y() {
    Operator m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}
inline Operator pauli_z() {
    Operator m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}
inline Operator sigma_minus() {
    // |g><e| in the convention |g> = |0> (first basis vector), |e> = |1>.
    Operator m(2, 2);
    m << 0, 1, 0, 0;
    return m;
}
inline Operator identity_op(Eigen::Index dim) { return Operator::Identity(dim, dim); }

/// Set of sites on a chain of length N, sites in [1, N], kept sorted.
struct SupportSet {
    std::vector<int> sites;

    SupportSet() = default;
    SupportSet(std::initializer_list<int> s) : sites(s) { normalize(); }
    explicit SupportSet(std::vector<int> s) : sites(std::move(s)) { normalize(); }

    void normalize() {
        std::sort(sites.begin(), sites.end());
        sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
        if (sites.empty()) throw InvalidParamError("SupportSet: empty support");
    }

    int min_site() const { return sites.front(); }
    int max_site() const { return sites.back(); }
    int size() const { return static_cast<int>(sites.size()); }

    /// Diameter l_A = max - min on the 1D chain metric.
    int diameter() const { return max_site() - min_site(); }

    /// Radius r_X: smallest r such that some site is within r of every site of X.
    /// On a chain this is ceil(diameter / 2).
    int radius() const { return (diameter() + 1) / 2; }

    bool contains(int j) const { return std::binary_search(sites.begin(), sites.end(), j); }

    bool intersects(const SupportSet& other) const {
        for (int s : sites)
            if (other.contains(s)) return true;
        return false;
    }
};

/// 1D chain distance between supports, min |x - y|; 0 if they overlap.
inline int support_distance(const SupportSet& x, const SupportSet& y) {
    int best = std::numeric_limits<int>::max();
    for (int a : x.sites)
        for (int b : y.sites) best = std::min(best, std::abs(a - b));
    return best;
}

/// One local term of an interaction: a full-space matrix acting as identity
/// outside its declared support.
struct LocalTerm {
    SupportSet support;
    Operator matrix;     // on the full 2^N space
    double local_norm;   // cached op_norm of the term

    LocalTerm(SupportSet s, Operator m) : support(std::move(s)), matrix(std::move(m)) {
        local_norm = op_norm(matrix);
    }
};

/// Sum of local terms on a chain.
struct InteractionSum {
    int chain_length = 0;
    std::vector<LocalTerm> terms;

    Operator total() const {
        Eigen::Index dim = Eigen::Index(1) << chain_length;
        Operator sum = Operator::Zero(dim, dim);
        for (const auto& t : terms) sum += t.matrix;
        return sum;
    }
};

/// I (x) ... (x) op (x) ... (x) I with op at position j (1-based), dim 2^N.
inline Operator embed_site(const Operator& op, int j, int n) {
    if (op.rows() != 2 || op.cols() != 2)
        throw InvalidParamError("embed_site: op must be 2x2");
    if (j < 1 || j > n) throw IndexOutOfRangeError("embed_site: site index out of range");
    Eigen::Index dim = Eigen::Index(1) << n;
    Operator out = Operator::Zero(dim, dim);
    // Site 1 is the most significant bit of the basis index.
    Eigen::Index left = Eigen::Index(1) << (j - 1);        // block count
    Eigen::Index right = Eigen::Index(1) << (n - j);       // block size per op entry
    for (Eigen::Index blk = 0; blk < left; ++blk)
        for (Eigen::Index r = 0; r < 2; ++r)
            for (Eigen::Index c = 0; c < 2; ++c) {
                if (op(r, c) == Complex(0, 0)) continue;
                Eigen::Index row0 = (blk * 2 + r) * right;
                Eigen::Index col0 = (blk * 2 + c) * right;
                for (Eigen::Index k = 0; k < right; ++k) out(row0 + k, col0 + k) += op(r, c);
            }
    return out;
}

/// Parent Hamiltonian of the PXP model on an open chain:
///   H0 = (Delta0/4) sum_{j<N} (sz_j + 1)(sz_{j+1} + 1),  V = (Omega/2) sum_j sx_j.
inline std::pair<InteractionSum, InteractionSum> build_pxp(int n, double delta0, double omega) {
    if (n < 2) throw InvalidParamError("build_pxp: chain length must be >= 2");
    if (delta0 <= 0) throw InvalidParamError("build_pxp: delta0 must be positive");
    Eigen::Index dim = Eigen::Index(1) << n;
    Operator id = identity_op(dim);
    InteractionSum h0{n, {}};
    for (int j = 1; j < n; ++j) {
        Operator zj = embed_site(pauli_z(), j, n);
        Operator zj1 = embed_site(pauli_z(), j + 1, n);
        Operator term = (delta0 / 4.0) * (zj + id) * (zj1 + id);
        h0.terms.emplace_back(SupportSet{j, j + 1}, std::move(term));
    }
    InteractionSum v{n, {}};
    for (int j = 1; j <= n; ++j)
        v.terms.emplace_back(SupportSet{j}, (omega / 2.0) * embed_site(pauli_x(), j, n));
    return {std::move(h0), std::move(v)};
}

/// Projector onto configurations without adjacent excitations:
///   P = prod_{j<N} [1 - (1+sz_j)(1+sz_{j+1})/4].
/// Diagonal 0/1 matrix of rank Fibonacci(N+2).
inline Operator pxp_projector(int n) {
    if (n < 2) throw InvalidParamError("pxp_projector: chain length must be >= 2");
    Eigen::Index dim = Eigen::Index(1) << n;
    Operator p = Operator::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        // Bit n-1 (MSB) of the basis label is site 1. Local state |0> has
        // sz = +1, so an excitation is a 0-bit; forbid adjacent 0-bits.
        bool allowed = true;
        for (int j = 0; j + 1 < n; ++j) {
            bool up_j = ((s >> (n - 1 - j)) & 1) == 0;
            bool up_j1 = ((s >> (n - 2 - j)) & 1) == 0;
            if (up_j && up_j1) {
                allowed = false;
                break;
            }
        }
        if (allowed) p(s, s) = 1.0;
    }
    return p;
}

/// Site-anchored quasi-local norm: max_j sum_{A ni j} ||W_A|| e^{mu l_A}.
/// mu = 0 gives the star norm ||W||_*.
inline double interaction_norm(const InteractionSum& w, double mu = 0.0) {
    if (mu < 0) throw InvalidParamError("interaction_norm: mu must be >= 0");
    double best = 0.0;
    for (int j = 1; j <= w.chain_length; ++j) {
        double anchored = 0.0;
        for (const auto& t : w.terms)
            if (t.support.contains(j)) anchored += t.local_norm * std::exp(mu * t.support.diameter());
        best = std::max(best, anchored);
    }
    return best;
}

/// w = max_j |union of supports R_j' containing j|.
inline int w_constant(const InteractionSum& h0) {
    int best = 0;
    for (int j = 1; j <= h0.chain_length; ++j) {
        std::set<int> covered;
        for (const auto& t : h0.terms)
            if (t.support.contains(j)) covered.insert(t.support.sites.begin(), t.support.sites.end());
        best = std::max(best, static_cast<int>(covered.size()));
    }
    return best;
}

/// Volume of a radius-r ball on a 1D chain: b(r) = 2r + 1.
inline double ball_volume_1d(double r) {
    if (r < 0) throw NegativeInputError("ball_volume_1d: radius must be >= 0");
    return 2.0 * r + 1.0;
}

/// Largest diameter of a local term (the l0 constant of a commuting Hamiltonian).
inline int max_term_diameter(const InteractionSum& w) {
    int l0 = 0;
    for (const auto& t : w.terms) l0 = std::max(l0, t.support.diameter());
    return l0;
}

/// Projector onto the kernel of a positive-semidefinite local term, resolved
/// at tolerance 1e-10 * ||term||.
inline Operator kernel_projector(const Operator& term) {
    HermitianEigen e = eig_hermitian(term);
    double tol = 1e-10 * std::max(1.0, e.eigenvalues.cwiseAbs().maxCoeff());
    return e.apply([tol](double x) { return std::abs(x) <= tol ? 1.0 : 0.0; });
}

/// Locally block-diagonalized Hamiltonian H1 = H0 + sum_A [P_A V_A P_A + Q_A V_A Q_A],
/// where P_A is the product of kernel projectors of the H0 terms whose support
/// intersects the support of V_A.
inline Operator local_block_diagonal_h1(const InteractionSum& h0, const InteractionSum& v) {
    Eigen::Index dim = Eigen::Index(1) << h0.chain_length;
    std::vector<Operator> kernels;
    kernels.reserve(h0.terms.size());
    for (const auto& t : h0.terms) kernels.push_back(kernel_projector(t.matrix));
    Operator h1 = h0.total();
    Operator id = identity_op(dim);
    for (const auto& va : v.terms) {
        Operator pa = id;
        for (std::size_t k = 0; k < h0.terms.size(); ++k)
            if (h0.terms[k].support.intersects(va.support)) pa = pa * kernels[k];
        Operator qa = id - pa;
        h1 += pa * va.matrix * pa + qa * va.matrix * qa;
    }
    return h1;
}

}  // namespace gapdyn
