#pragma once

// Schrieffer-Wolff constructions and closed-form error-bound evaluators.
//
// Three generator variants are supported:
//   ClosedH0      anti-Hermitian T with [H0, T] = V_off
//   ClosedH1      anti-Hermitian T with [T, H1] = -V_off
//   OpenHermitian Hermitian T with [T, H0] = i V_off (non-unitary S = e^T)
// In every case the PQ block of T comes from a Sylvester equation solved in
// the eigenbases of the reference Hamiltonian's diagonal blocks.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <utility>

#include "gapdyn/errors.hpp"
#include "gapdyn/linalg.hpp"

namespace gapdyn {

/// Spectral split of a Hermitian H0 into an isolated band (projector P) and
/// its complement (Q = 1 - P), with the measured gap.
struct BandSplit {
    Operator P;
    Operator Q;
    double gap = 0.0;
    std::pair<double, double> band_window;
    // Orthonormal bases of the two blocks, kept for block restrictions.
    Operator basis_in;    // dim x rank(P)
    Operator basis_out;   // dim x rank(Q)
    RealVector evals_in;  // H0 eigenvalues inside the window
    RealVector evals_out;

    Eigen::Index dim() const { return P.rows(); }
    Eigen::Index band_rank() const { return basis_in.cols(); }
};

/// Splits H0's spectrum at the given eigenvalue window [lo, hi].
inline BandSplit band_split(const Operator& h0, double window_lo, double window_hi) {
    HermitianEigen e = eig_hermitian(h0);
    const Eigen::Index n = e.dim();
    std::vector<Eigen::Index> inside, outside;
    for (Eigen::Index k = 0; k < n; ++k) {
        double lam = e.eigenvalues(k);
        (lam >= window_lo && lam <= window_hi ? inside : outside).push_back(k);
    }
    if (inside.empty()) throw EmptyBandError("band_split: no eigenvalue inside the window");
    if (outside.empty()) throw NoComplementError("band_split: no eigenvalue outside the window");
    BandSplit s;
    s.band_window = {window_lo, window_hi};
    s.basis_in.resize(n, static_cast<Eigen::Index>(inside.size()));
    s.evals_in.resize(static_cast<Eigen::Index>(inside.size()));
    for (std::size_t k = 0; k < inside.size(); ++k) {
        s.basis_in.col(static_cast<Eigen::Index>(k)) = e.basis.col(inside[k]);
        s.evals_in(static_cast<Eigen::Index>(k)) = e.eigenvalues(inside[k]);
    }
    s.basis_out.resize(n, static_cast<Eigen::Index>(outside.size()));
    s.evals_out.resize(static_cast<Eigen::Index>(outside.size()));
    for (std::size_t k = 0; k < outside.size(); ++k) {
        s.basis_out.col(static_cast<Eigen::Index>(k)) = e.basis.col(outside[k]);
        s.evals_out(static_cast<Eigen::Index>(k)) = e.eigenvalues(outside[k]);
    }
    s.gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < s.evals_in.size(); ++i)
        for (Eigen::Index j = 0; j < s.evals_out.size(); ++j)
            s.gap = std::min(s.gap, std::abs(s.evals_in(i) - s.evals_out(j)));
    double scale = e.eigenvalues.cwiseAbs().maxCoeff();
    if (s.gap < 1e-12 * std::max(1.0, scale))
        throw GapZeroError("band_split: gap between band and complement vanishes");
    s.P = s.basis_in * s.basis_in.adjoint();
    s.Q = Operator::Identity(n, n) - s.P;
    return s;
}

/// V = V_diag + V_off with V_diag = PVP + QVQ and V_off = PVQ + QVP.
inline std::pair<Operator, Operator> block_split(const Operator& v, const BandSplit& split) {
    Operator pvq = split.P * v * split.Q;
    Operator v_off = pvq + split.Q * v * split.P;
    return {v - v_off, v_off};
}

enum class SwtVariant { ClosedH0, ClosedH1, OpenHermitian };

/// Result of a Schrieffer-Wolff construction. T and S are filled by
/// swt_generator; H1, V_prime and the truncation certificate by v_prime.
struct SwtResult {
    SwtVariant variant = SwtVariant::ClosedH0;
    Operator T;
    Operator S;
    Operator H1;       // H0 + V_diag
    Operator V_prime;  // residual interaction after the transform
    int truncation_order = 0;
    double tail_estimate = 0.0;
    double gap_ref = 0.0;  // gap of the reference Hamiltonian used for T
};

namespace detail {

/// Block-restricted Hermitian eigendata of an operator that is block diagonal
/// with respect to the split (H0, or H1 = H0 + V_diag).
inline std::pair<HermitianEigen, HermitianEigen> restrict_blocks(const Operator& h_ref,
                                                                 const BandSplit& split) {
    Operator hp = split.basis_in.adjoint() * h_ref * split.basis_in;
    Operator hq = split.basis_out.adjoint() * h_ref * split.basis_out;
    HermitianEigen ep, eq;
    {
        Eigen::SelfAdjointEigenSolver<Operator> es(hp);
        ep.eigenvalues = es.eigenvalues();
        ep.basis = es.eigenvectors();
    }
    {
        Eigen::SelfAdjointEigenSolver<Operator> es(hq);
        eq.eigenvalues = es.eigenvalues();
        eq.basis = es.eigenvectors();
    }
    return {std::move(ep), std::move(eq)};
}

}  // namespace detail

/// Builds the generator T and the transform S = e^T for the requested variant.
/// h_ref is the block-diagonal reference Hamiltonian the Sylvester equation is
/// solved against: H0 for ClosedH0 and OpenHermitian, H1 = H0 + V_diag for
/// ClosedH1. The returned SwtResult carries T, S, H1 and gap_ref only.
inline SwtResult swt_generator(const Operator& h_ref, const Operator& v, const BandSplit& split,
                               SwtVariant variant) {
    if (h_ref.rows() != v.rows() || h_ref.rows() != split.dim())
        throw DimensionMismatchError("swt_generator: dimension mismatch");
    if (!is_hermitian(h_ref)) throw NotHermitianError("swt_generator: H_ref must be Hermitian");
    if (!is_hermitian(v)) throw NotHermitianError("swt_generator: V must be Hermitian");

    auto [v_diag, v_off] = block_split(v, split);
    SwtResult res;
    res.variant = variant;
    res.H1 = (variant == SwtVariant::ClosedH1) ? h_ref : Operator(h_ref + v_diag);

    if (variant == SwtVariant::ClosedH1) {
        double v_norm = op_norm(v);
        if (2.0 * v_norm >= split.gap)
            throw GapTooSmallError("swt_generator: ClosedH1 requires ||V|| < gap/2");
    }
    auto [ep, eq] = detail::restrict_blocks(h_ref, split);
    res.gap_ref = spectral_distance(ep, eq);

    Operator v_pq = split.basis_in.adjoint() * v * split.basis_out;
    Operator rhs = (variant == SwtVariant::OpenHermitian) ? Operator(Complex(0, -1) * v_pq) : v_pq;
    // H_refP X - X H_refQ = rhs in the restricted blocks.
    Operator x = solve_sylvester(ep, eq, rhs);
    Operator t_pq = split.basis_in * x * split.basis_out.adjoint();
    if (variant == SwtVariant::OpenHermitian)
        res.T = t_pq + t_pq.adjoint();  // Hermitian off-block
    else
        res.T = t_pq - t_pq.adjoint();  // anti-Hermitian off-block
    res.S = exp_normal(res.T);
    return res;
}

/// Completes an SwtResult with the residual interaction V' summed from the
/// adjoint series of the variant, truncating when the term norm drops below
/// tol (absolute) or at order 40. tail_estimate is the geometric tail with
/// ratio 2||T||.
inline SwtResult v_prime(SwtResult res, const Operator& v, const BandSplit& split,
                         double tol = -1.0) {
    auto [v_diag, v_off] = block_split(v, split);
    double v_norm = op_norm(v);
    if (tol < 0) tol = 1e-12 * std::max(v_norm, 1e-300);

    const bool open = res.variant == SwtVariant::OpenHermitian;
    const Complex unit = open ? Complex(0, 1) : Complex(1, 0);
    // Seeds of the series: term_n = (1/n!) ad_T^n(base_n) with
    //   ClosedH0 / OpenHermitian: base_n = unit * (V - V_off/(n+1))
    //   ClosedH1:                 base_n = n/(n+1) * V_off.
    Operator vp = Operator::Zero(v.rows(), v.cols());
    // Maintain ad_T^n(V) and ad_T^n(V_off) incrementally.
    Operator ad_v = v;
    Operator ad_voff = v_off;
    double prev_norm = std::numeric_limits<double>::infinity();
    int grow_streak = 0;
    double factorial = 1.0;
    double t_norm = op_norm(res.T);
    int n = 0;
    for (n = 1; n <= 40; ++n) {
        ad_v = res.T * ad_v - ad_v * res.T;
        ad_voff = res.T * ad_voff - ad_voff * res.T;
        factorial *= n;
        Operator term;
        if (res.variant == SwtVariant::ClosedH1)
            term = (static_cast<double>(n) / ((n + 1.0) * factorial)) * ad_voff;
        else
            term = (unit / factorial) * (ad_v - ad_voff / (n + 1.0));
        double tn = term.norm();  // Frobenius, cheap upper-bound proxy for the cutoff
        vp += term;
        if (tn > prev_norm) {
            if (++grow_streak >= 5)
                throw SeriesDivergingError("v_prime: series term norms grew 5 times in a row");
        } else {
            grow_streak = 0;
        }
        prev_norm = tn;
        if (tn < tol) break;
    }
    res.truncation_order = std::min(n, 40);
    // Geometric tail with ratio 2||T||: ||term_k|| <= (2||T||)^k * 2||V||.
    double r = 2.0 * t_norm;
    double head = 2.0 * v_norm * std::pow(r, res.truncation_order + 1);
    res.tail_estimate = (r < 1.0) ? head / (1.0 - r)
                                  : std::numeric_limits<double>::infinity();
    res.V_prime = std::move(vp);
    return res;
}

/// Slope function of the second universal bound: f(x) = ((x-1)e^x + 1)/x,
/// with f(0) = 0 (removable singularity, series x/2 + x^2/3 + ...).
inline double f_slope(double x) {
    if (x < 0) throw NegativeInputError("f_slope: negative input");
    if (x < 1e-5) return x / 2.0 + x * x / 3.0;
    return ((x - 1.0) * std::exp(x) + 1.0) / x;
}

/// Scalar inputs of the closed-form bound evaluators.
struct BoundParams {
    double v_norm = 0.0;  // ||V|| (or ||V||_* for the many-body bound)
    double gap = 0.0;     // Delta0
    double c = 0.0;       // sum_j ||J_j||^2 / Delta0 (open systems)
    bool multiband = false;
};

inline double multiband_factor(bool on) { return on ? M_PI / 2.0 : 1.0; }

/// First universal bound: 4||V||/Delta0 + 2(e^{2||V||/Delta0} - 1)||V|| t.
inline double bound_b1(const BoundParams& p, double t) {
    if (p.gap <= 0) throw InvalidParamError("bound_b1: gap must be positive");
    if (t < 0) throw NegativeInputError("bound_b1: negative time");
    double x = multiband_factor(p.multiband) * p.v_norm / p.gap;
    return 4.0 * x + 2.0 * std::expm1(2.0 * x) * p.v_norm * t;
}

/// Second universal bound, valid for ||V|| < Delta0/2:
/// 4||V||/(Delta0-2||V||) + 2 f(2||V||/(Delta0-2||V||)) ||V|| t.
inline double bound_b2(const BoundParams& p, double t) {
    if (t < 0) throw NegativeInputError("bound_b2: negative time");
    if (2.0 * p.v_norm >= p.gap)
        throw GapTooSmallError("bound_b2: requires ||V|| < gap/2");
    double y = multiband_factor(p.multiband) * p.v_norm / (p.gap - 2.0 * p.v_norm);
    return 4.0 * y + 2.0 * f_slope(2.0 * y) * p.v_norm * t;
}

/// Large-gap asymptotic form (non-rigorous, "up to O(||V||^2/Delta0^2)"):
/// 4||V||/Delta0 + 2(||V||^2/Delta0) t.
inline double bound_asymptotic(const BoundParams& p, double t) {
    if (p.gap <= 0) throw InvalidParamError("bound_asymptotic: gap must be positive");
    if (t < 0) throw NegativeInputError("bound_asymptotic: negative time");
    return 4.0 * p.v_norm / p.gap + 2.0 * p.v_norm * p.v_norm / p.gap * t;
}

/// Slope of bound_b1 per unit ||V||^2/Delta0... in reduced form: as a function
/// of x = ||V||/Delta0 the two time slopes are 2(e^{2x}-1)||V|| and
/// 2 f(2x/(1-2x))||V||.
inline double slope_b1_reduced(double x) { return 2.0 * std::expm1(2.0 * x); }
inline double slope_b2_reduced(double x) {
    if (x >= 0.5) return std::numeric_limits<double>::infinity();
    return 2.0 * f_slope(2.0 * x / (1.0 - 2.0 * x));
}

/// Ratio x* = ||V||/Delta0 at which the time slopes of the two universal
/// bounds coincide (about 0.1887); below it the second bound grows slower.
inline double slope_crossover() {
    auto diff = [](double x) { return slope_b2_reduced(x) - slope_b1_reduced(x); };
    double lo = 1e-6, hi = 0.5 - 1e-9;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (diff(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Constant bound for a single isolated nondegenerate state:
/// 8||V||/(Delta0 - 2||V||), time-independent.
inline double bound_single_state(const BoundParams& p) {
    if (2.0 * p.v_norm >= p.gap)
        throw GapTooSmallError("bound_single_state: requires ||V|| < gap/2");
    return 8.0 * p.v_norm / (p.gap - 2.0 * p.v_norm);
}

/// Inputs of the many-body (local SWT + light cone) bound evaluator.
struct ManyBodyParams {
    double v_star = 0.0;    // ||V||_*
    double gap = 0.0;       // Delta0
    int w = 0;              // support-union constant of H0
    int u = 0;              // degree of locality of T
    int d = 1;              // spatial dimension (only d = 1 evaluates)
    double velocity = 0.0;  // Lieb-Robinson velocity v
    double kappa = 0.0;     // decay rate of the light-cone tail
    int x_size = 1;         // |X|
    double r_x = 0.0;       // radius of X
    double l0 = 0.0;        // largest diameter of a local term in H0
};

namespace detail {

/// p_kappa(r) for the 1D ball b(r) = 2r + 1, evaluated through the formal
/// derivative rule p(r) = 2(e^k - 1) * b(r - d/dk) applied to (e^k - 1)^{-1}:
/// the linear term picks up -2 g'(k) with g(k) = (e^k - 1)^{-1}.
inline double p_kappa_1d(double r, double kappa) {
    double g = 1.0 / std::expm1(kappa);
    double gp = -std::exp(kappa) * g * g;
    return 2.0 * std::expm1(kappa) * ((2.0 * r + 1.0) * g - 2.0 * gp);
}

}  // namespace detail

/// Many-body error bound:
/// (||V||_*/Delta0) w [ 2|X| + p~(vt) + 4 u v^{-1} ||V||_* P~(vt) ],
/// p~(r) = p_kappa(r + r_X + l0 + ln|X|/kappa), P~(r) = int_0^r p~.
inline double bound_many_body(const ManyBodyParams& p, double t) {
    if (p.d != 1) throw InvalidParamError("bound_many_body: only d = 1 is supported");
    if (p.kappa <= 0 || p.velocity <= 0 || p.gap <= 0 || p.v_star < 0 || p.w <= 0 ||
        p.u <= 1 || p.x_size < 1 || p.r_x < 0 || p.l0 < 0 || t < 0)
        throw InvalidParamError("bound_many_body: invalid parameter");
    double shift = p.r_x + p.l0 + std::log(static_cast<double>(p.x_size)) / p.kappa;
    // p~(r) = 4(r + shift) + c0 is linear in 1D; integrate analytically.
    double c0 = detail::p_kappa_1d(0.0, p.kappa);  // p_kappa at argument 0
    auto p_tilde = [&](double r) { return detail::p_kappa_1d(r + shift, p.kappa); };
    double vt = p.velocity * t;
    double slope = 4.0;  // dp_kappa/dr for b(r) = 2r + 1
    double intercept = c0 + slope * shift;
    double big_p = 0.5 * slope * vt * vt + intercept * vt;
    return (p.v_star / p.gap) * p.w *
           (2.0 * p.x_size + p_tilde(vt) + 4.0 * p.u / p.velocity * p.v_star * big_p);
}

/// Quasi-local norm bound on the residual V' of the local SWT:
/// w ||V||_* e^{mu(u-1)} { [1 - 2(u-1) e^{mu(u-1)} ||T||_*]^{-2u/(u-1)} - 1 }
/// with ||T||_* <= w ||V||_* / Delta0.
inline double bound_vprime_local(double v_star, double gap, int w, int u, double mu) {
    if (w <= 0 || u <= 1 || mu < 0 || gap <= 0 || v_star < 0)
        throw InvalidParamError("bound_vprime_local: invalid parameter");
    double t_star = w * v_star / gap;
    double q = 2.0 * (u - 1.0) * std::exp(mu * (u - 1.0)) * t_star;
    if (q >= 1.0)
        throw ConvergenceViolatedError(
            "bound_vprime_local: convergence condition 2(u-1)e^{mu(u-1)}||T||_* < 1 violated");
    double alpha = 2.0 * u / (u - 1.0);
    return w * v_star * std::exp(mu * (u - 1.0)) * (std::pow(1.0 - q, -alpha) - 1.0);
}

/// Exact open-system bound:
/// (e^{2x}-1) { 1 + e^{2x} + e^{4x} [ 2||V|| + (e^{2x}-1) sum_j ||J_j||^2 ] t },
/// x = ||V||/Delta0, sum_j ||J_j||^2 = c Delta0.
inline double bound_open(const BoundParams& p, double t) {
    if (p.gap <= 0) throw InvalidParamError("bound_open: gap must be positive");
    if (t < 0) throw NegativeInputError("bound_open: negative time");
    double x = p.v_norm / p.gap;
    double e2 = std::exp(2.0 * x);
    double jj = p.c * p.gap;
    return std::expm1(2.0 * x) *
           (1.0 + e2 + e2 * e2 * (2.0 * p.v_norm + std::expm1(2.0 * x) * jj) * t);
}

/// Strong-dissipation asymptotic form: (4||V||/Delta0)[1 + (1+c)||V|| t].
inline double bound_open_asymptotic(const BoundParams& p, double t) {
    if (p.gap <= 0) throw InvalidParamError("bound_open_asymptotic: gap must be positive");
    if (t < 0) throw NegativeInputError("bound_open_asymptotic: negative time");
    return 4.0 * p.v_norm / p.gap * (1.0 + (1.0 + p.c) * p.v_norm * t);
}

}  // namespace gapdyn
