#pragma once

// Dense complex linear-algebra kernel: Hermitian eigendecompositions, operator
// and trace norms, normal-matrix exponentials and the Sylvester solver that
// every Schrieffer-Wolff construction in this library is built on.
//
// All matrices are dense Eigen::MatrixXcd; every exponential in scope has a
// normal (in practice Hermitian or anti-Hermitian) exponent, so everything
// routes through eigendecomposition of a Hermitian representative.

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "gapdyn/errors.hpp"

namespace gapdyn {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermTol = 1e-10;  // relative Hermiticity tolerance

/// Eigendecomposition of a Hermitian matrix: H = basis * diag(eigenvalues) * basis^dag,
/// eigenvalues ascending, basis unitary.
struct HermitianEigen {
    RealVector eigenvalues;
    Operator basis;

    Eigen::Index dim() const { return eigenvalues.size(); }

    /// Reassembles basis * diag(f(lambda)) * basis^dag.
    template <typename F>
    Operator apply(F&& f) const {
        Eigen::VectorXcd d(eigenvalues.size());
        for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) d(i) = f(eigenvalues(i));
        return basis * d.asDiagonal() * basis.adjoint();
    }
};

/// Squared singular values of M, i.e. eigenvalues of M^dag M clamped to >= 0.
inline RealVector singular_values_squared(const Operator& m) {
    Operator gram = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<Operator> es(gram, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseMax(0.0);
}

/// Largest singular value. Equals max |eigenvalue| for Hermitian input.
inline double op_norm(const Operator& m) {
    if (m.size() == 0) return 0.0;
    return std::sqrt(singular_values_squared(m).maxCoeff());
}

/// Schatten-1 norm: sum of singular values.
inline double trace_norm(const Operator& m) {
    if (m.size() == 0) return 0.0;
    return singular_values_squared(m).cwiseSqrt().sum();
}

inline bool is_hermitian(const Operator& m, double rel_tol = kHermTol) {
    double scale = m.norm();
    return (m - m.adjoint()).norm() <= rel_tol * (scale > 0 ? scale : 1.0);
}

/// Eigendecomposition of a Hermitian matrix. Real-valued input takes the real
/// symmetric path, which is markedly faster at large dimension.
inline HermitianEigen eig_hermitian(const Operator& h) {
    if (!is_hermitian(h))
        throw NotHermitianError("eig_hermitian: matrix is not Hermitian within tolerance");
    HermitianEigen out;
    if (h.imag().cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, h.norm())) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
        if (es.info() != Eigen::Success) throw Error("eig_hermitian: solver failed");
        out.eigenvalues = es.eigenvalues();
        out.basis = es.eigenvectors().cast<Complex>();
    } else {
        Eigen::SelfAdjointEigenSolver<Operator> es(h);
        if (es.info() != Eigen::Success) throw Error("eig_hermitian: solver failed");
        out.eigenvalues = es.eigenvalues();
        out.basis = es.eigenvectors();
    }
    return out;
}

/// e^{iHt} O e^{-iHt} for Hermitian H, via eigendecomposition.
inline Operator evolve_conjugate(const HermitianEigen& h, const Operator& o, double t) {
    Eigen::VectorXcd phases(h.eigenvalues.size());
    for (Eigen::Index k = 0; k < h.eigenvalues.size(); ++k)
        phases(k) = std::exp(Complex(0.0, h.eigenvalues(k) * t));
    Operator o_tilde = h.basis.adjoint() * o * h.basis;
    o_tilde = phases.asDiagonal() * o_tilde * phases.conjugate().asDiagonal();
    return h.basis * o_tilde * h.basis.adjoint();
}

inline Operator evolve_conjugate(const Operator& h, const Operator& o, double t) {
    if (h.rows() != o.rows())
        throw DimensionMismatchError("evolve_conjugate: H and O dimensions differ");
    return evolve_conjugate(eig_hermitian(h), o, t);
}

inline bool is_normal(const Operator& a, double rel_tol = kHermTol) {
    double scale = a.norm();
    return (a * a.adjoint() - a.adjoint() * a).norm() <= rel_tol * std::max(1.0, scale * scale);
}

/// e^A for normal A. The exponent is reduced to a Hermitian representative:
/// A = H for Hermitian A, A = iH for anti-Hermitian A; the general normal case
/// splits A into commuting Hermitian and anti-Hermitian parts.
inline Operator exp_normal(const Operator& a) {
    if (!is_normal(a)) throw NotNormalError("exp_normal: matrix is not normal within tolerance");
    double scale = std::max(1.0, a.norm());
    Operator herm = (a + a.adjoint()) / 2.0;
    Operator anti = (a - a.adjoint()) / 2.0;
    if (anti.norm() <= kHermTol * scale) {
        return eig_hermitian(herm).apply([](double x) { return std::exp(x); });
    }
    if (herm.norm() <= kHermTol * scale) {
        // A anti-Hermitian: A = i(-iA) with -iA Hermitian; result is unitary.
        HermitianEigen e = eig_hermitian(Complex(0, -1) * anti);
        return e.apply([](double x) { return std::exp(Complex(0.0, x)); });
    }
    // Normal A: herm and anti commute, exponentiate separately.
    HermitianEigen eh = eig_hermitian(herm);
    HermitianEigen ea = eig_hermitian(Complex(0, -1) * anti);
    return eh.apply([](double x) { return std::exp(x); }) *
           ea.apply([](double x) { return std::exp(Complex(0.0, x)); });
}

/// Solves A X - X B = Y in the eigenbases of A and B: X~_ij = Y~_ij / (a_i - b_j).
/// Requires the spectra of A and B to be disjoint.
inline Operator solve_sylvester(const HermitianEigen& a, const HermitianEigen& b,
                                const Operator& y) {
    if (y.rows() != a.dim() || y.cols() != b.dim())
        throw DimensionMismatchError("solve_sylvester: Y shape does not match A, B");
    double scale = 0.0;
    if (a.dim() > 0) scale += a.eigenvalues.cwiseAbs().maxCoeff();
    if (b.dim() > 0) scale += b.eigenvalues.cwiseAbs().maxCoeff();
    double min_sep = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.dim(); ++i)
        for (Eigen::Index j = 0; j < b.dim(); ++j)
            min_sep = std::min(min_sep, std::abs(a.eigenvalues(i) - b.eigenvalues(j)));
    if (min_sep < 1e-12 * scale)
        throw SpectraOverlapError("solve_sylvester: spectra of A and B overlap");
    Operator y_tilde = a.basis.adjoint() * y * b.basis;
    for (Eigen::Index i = 0; i < a.dim(); ++i)
        for (Eigen::Index j = 0; j < b.dim(); ++j)
            y_tilde(i, j) /= a.eigenvalues(i) - b.eigenvalues(j);
    return a.basis * y_tilde * b.basis.adjoint();
}

/// Minimal distance between the spectra of two Hermitian operators.
inline double spectral_distance(const HermitianEigen& a, const HermitianEigen& b) {
    double min_sep = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.dim(); ++i)
        for (Eigen::Index j = 0; j < b.dim(); ++j)
            min_sep = std::min(min_sep, std::abs(a.eigenvalues(i) - b.eigenvalues(j)));
    return min_sep;
}

}  // namespace gapdyn
