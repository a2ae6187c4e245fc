#pragma once

// Markovian open-system dynamics in the Heisenberg picture: adjoint Lindblad
// evolution of observables (fixed-step RK4), decoherence-free-subspace
// detection, the Zeno error trace with its bound columns, modified jump
// operators and the two driven-dissipative reference models.

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "gapdyn/closed.hpp"
#include "gapdyn/errors.hpp"
#include "gapdyn/lattice.hpp"
#include "gapdyn/linalg.hpp"
#include "gapdyn/swt.hpp"

namespace gapdyn {

/// Driven-dissipative model: Hermitian drive V and jump operators J_j.
/// The reference Hamiltonian H0 = (1/2) sum_j J_j^dag J_j is derived, not
/// stored; so is the gap Delta0 (smallest nonzero eigenvalue of H0).
struct LindbladModel {
    Operator V;
    std::vector<Operator> jumps;

    LindbladModel(Operator v, std::vector<Operator> js) : V(std::move(v)), jumps(std::move(js)) {
        if (!is_hermitian(V)) throw NotHermitianError("LindbladModel: V must be Hermitian");
        for (const auto& j : jumps)
            if (j.rows() != V.rows() || j.cols() != V.cols())
                throw DimensionMismatchError("LindbladModel: jump dimension mismatch");
    }

    Eigen::Index dim() const { return V.rows(); }

    Operator h0() const {
        Operator h = Operator::Zero(dim(), dim());
        for (const auto& j : jumps) h += 0.5 * j.adjoint() * j;
        return h;
    }

    double jump_norm_sq_sum() const {
        double s = 0.0;
        for (const auto& j : jumps) {
            double n = op_norm(j);
            s += n * n;
        }
        return s;
    }
};

/// Adjoint Lindblad generator:
/// L^dag[O] = i[V, O] + sum_j (J_j^dag O J_j - (1/2){J_j^dag J_j, O}).
inline Operator lindblad_adjoint_rhs(const LindbladModel& m, const Operator& o) {
    if (o.rows() != m.dim() || o.cols() != m.dim())
        throw DimensionMismatchError("lindblad_adjoint_rhs: observable dimension mismatch");
    Operator out = Complex(0, 1) * (m.V * o - o * m.V);
    for (const auto& j : m.jumps) {
        Operator jdj = j.adjoint() * j;
        out += j.adjoint() * o * j - 0.5 * (jdj * o + o * jdj);
    }
    return out;
}

/// Observable trajectory from the RK4 integration, plus the norm-drift
/// certificate of the contraction property (the adjoint map never increases
/// the operator norm; any excess is integrator error).
struct OpenTrajectory {
    std::vector<Operator> observables;  // one per requested time
    double max_norm_drift = 0.0;        // max over samples of ||O_t|| - ||O_0||
    bool step_warning = false;          // drift exceeded 1e-4
};

/// Integrates the adjoint Lindblad equation with fixed-step classical RK4 and
/// returns O at each requested (ascending, nonnegative) time. The step is
/// clamped to the stability heuristic 0.05/(||V|| + sum_j ||J_j||^2) and
/// subdivides each inter-sample interval evenly.
inline OpenTrajectory evolve_open(const LindbladModel& m, const Operator& o,
                                  const std::vector<double>& times, double step = 0.0) {
    double scale = op_norm(m.V) + m.jump_norm_sq_sum();
    double max_step = (scale > 0) ? 0.05 / scale : 1.0;
    if (step <= 0 || step > max_step) step = max_step;
    double o_norm0 = op_norm(o);

    OpenTrajectory traj;
    Operator cur = o;
    double t_cur = 0.0;
    for (double t : times) {
        if (t < t_cur) throw InvalidParamError("evolve_open: times must be ascending from 0");
        double span = t - t_cur;
        if (span > 0) {
            int n_steps = std::max(1, static_cast<int>(std::ceil(span / step)));
            double h = span / n_steps;
            for (int k = 0; k < n_steps; ++k) {
                Operator k1 = lindblad_adjoint_rhs(m, cur);
                Operator k2 = lindblad_adjoint_rhs(m, cur + 0.5 * h * k1);
                Operator k3 = lindblad_adjoint_rhs(m, cur + 0.5 * h * k2);
                Operator k4 = lindblad_adjoint_rhs(m, cur + h * k3);
                cur += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            t_cur = t;
        }
        traj.observables.push_back(cur);
        traj.max_norm_drift = std::max(traj.max_norm_drift, op_norm(cur) - o_norm0);
    }
    if (traj.max_norm_drift > 1e-4) traj.step_warning = true;
    return traj;
}

/// Projector onto the decoherence-free subspace, as the zero-energy band of
/// H0 = (1/2) sum_j J_j^dag J_j. Verifies J_j P = 0 for every jump.
inline BandSplit dfs_projector(const LindbladModel& m) {
    Operator h0 = m.h0();
    double h0_norm = op_norm(h0);
    double tol = 1e-10 * std::max(1.0, h0_norm);
    HermitianEigen e = eig_hermitian(h0);
    bool has_kernel = e.eigenvalues.minCoeff() <= tol;
    if (!has_kernel) throw NoDfsError("dfs_projector: H0 has no zero eigenvalue");
    if (e.eigenvalues.maxCoeff() <= tol)
        throw NoComplementError("dfs_projector: every jump vanishes, H0 = 0");
    BandSplit split = band_split(h0, -tol, tol);
    for (const auto& j : m.jumps) {
        double jn = op_norm(j);
        if (op_norm(j * split.P) > 1e-10 * std::max(jn, 1e-300))
            throw DfsViolationError("dfs_projector: a jump does not annihilate the DFS");
    }
    return split;
}

/// Zeno error trace: epsilon(t) = ||P e^{tL^dag}[O] P - P e^{iV_P t} O e^{-iV_P t} P||
/// with V_P = P V P, plus the exact and asymptotic bound columns evaluated at
/// c = sum_j ||J_j||^2 / Delta0.
inline ErrorTrace epsilon_open(const LindbladModel& m, const Operator& o,
                               const std::vector<double>& times, double step = 0.0) {
    BandSplit split = dfs_projector(m);
    double o_scale = op_norm(o);
    Operator o_n = (o_scale > 0) ? Operator(o / o_scale) : o;
    OpenTrajectory traj = evolve_open(m, o_n, times, step);
    HermitianEigen evp = eig_hermitian(split.P * m.V * split.P);

    BoundParams bp;
    bp.v_norm = op_norm(m.V);
    bp.gap = split.gap;
    bp.c = m.jump_norm_sq_sum() / split.gap;

    ErrorTrace trace;
    trace.metadata["observable_scale"] = std::to_string(o_scale);
    trace.metadata["step_warning"] = traj.step_warning ? "1" : "0";
    for (std::size_t k = 0; k < times.size(); ++k) {
        double t = times[k];
        Operator constrained = evolve_conjugate(evp, o_n, t);
        trace.times.push_back(t);
        trace.epsilon.push_back(
            op_norm(split.P * (traj.observables[k] - constrained) * split.P));
        trace.bounds["exact"].push_back(bound_open(bp, t));
        trace.bounds["asymptotic"].push_back(bound_open_asymptotic(bp, t));
    }
    return trace;
}

/// Resonantly driven two-level atom with decay:
/// J = sqrt(2 Delta0)|g><e|, V = (Omega/2) sigma^x, observable sigma^y.
inline std::pair<LindbladModel, Operator> build_example1(double delta0, double omega) {
    if (delta0 <= 0 || omega <= 0) throw InvalidParamError("build_example1: parameters > 0");
    Operator j = std::sqrt(2.0 * delta0) * sigma_minus();
    Operator v = (omega / 2.0) * pauli_x();
    return {LindbladModel(v, {j}), pauli_y()};
}

/// Two dissipatively coupled two-level systems:
/// J = sqrt(2 Delta0) sigma_1^- sigma_2^-, V = (Omega/2) sigma_1^x,
/// observable (sigma_1^x sigma_2^x + sigma_1^y sigma_2^y)/2.
inline std::pair<LindbladModel, Operator> build_example2(double delta0, double omega) {
    if (delta0 <= 0 || omega <= 0) throw InvalidParamError("build_example2: parameters > 0");
    Operator j = std::sqrt(2.0 * delta0) * embed_site(sigma_minus(), 1, 2) *
                 embed_site(sigma_minus(), 2, 2);
    Operator v = (omega / 2.0) * embed_site(pauli_x(), 1, 2);
    Operator o = 0.5 * (embed_site(pauli_x(), 1, 2) * embed_site(pauli_x(), 2, 2) +
                        embed_site(pauli_y(), 1, 2) * embed_site(pauli_y(), 2, 2));
    return {LindbladModel(v, {j}), o};
}

/// Jump operator as seen after the similarity transform: J~ = S^{-1} J S - J.
inline Operator modified_jump(const Operator& s, const Operator& j) {
    if (s.rows() != j.rows()) throw DimensionMismatchError("modified_jump: dimension mismatch");
    Eigen::PartialPivLU<Operator> lu(s);
    double det = std::abs(lu.determinant());
    if (!(det > 1e-12)) throw SingularSError("modified_jump: S is not invertible");
    Operator jt = lu.solve(j * s) - j;
    return jt;
}

/// Least-squares slope of epsilon over the time window [t_lo, t_hi].
inline double slope_fit(const ErrorTrace& trace, double t_lo, double t_hi) {
    double st = 0, se = 0, stt = 0, ste = 0;
    int m = 0;
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        double t = trace.times[k];
        if (t < t_lo || t > t_hi) continue;
        st += t;
        se += trace.epsilon[k];
        stt += t * t;
        ste += t * trace.epsilon[k];
        ++m;
    }
    if (m < 2) throw InvalidParamError("slope_fit: window contains fewer than 2 samples");
    double denom = m * stt - st * st;
    if (std::abs(denom) < 1e-300) throw InvalidParamError("slope_fit: degenerate window");
    return (m * ste - st * se) / denom;
}

/// Saturation plateau of epsilon: mean of the final 10% of samples. Requires
/// the trace to actually be saturated, i.e. the relative spread of epsilon
/// over that final stretch must be below 1%.
inline double saturation_value(const ErrorTrace& trace) {
    std::size_t n = trace.epsilon.size();
    if (n < 10) throw InvalidParamError("saturation_value: trace too short");
    std::size_t start = n - std::max<std::size_t>(1, n / 10);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
    for (std::size_t k = start; k < n; ++k) {
        lo = std::min(lo, trace.epsilon[k]);
        hi = std::max(hi, trace.epsilon[k]);
        sum += trace.epsilon[k];
    }
    double mean = sum / static_cast<double>(n - start);
    if (mean <= 0 || (hi - lo) / mean >= 0.01)
        throw NotSaturatedError("saturation_value: tail still varies by 1% or more");
    return mean;
}

}  // namespace gapdyn
