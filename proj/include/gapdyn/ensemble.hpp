#pragma once

// Seeded random model ensembles used by the property suites and the CLI
// scenarios: gapped closed-system instances with a prescribed band rank and
// coupling ratio, and 2-qubit one-jump open models with a guaranteed
// decoherence-free subspace.

#include <Eigen/Dense>
#include <cmath>

#include "gapdyn/errors.hpp"
#include "gapdyn/linalg.hpp"
#include "gapdyn/open.hpp"
#include "gapdyn/rng.hpp"
#include "gapdyn/swt.hpp"

namespace gapdyn {

/// Random gapped closed-system instance. ratio = ||V|| / gap holds exactly
/// for the recomputed gap of the split.
struct RandomInstance {
    Operator h0;
    Operator v;
    BandSplit split;
    double ratio = 0.0;
};

/// Draws H0 with band_rank eigenvalues in a low window, the rest separated by
/// at least the target gap, conjugated by a Haar-like random unitary; V is a
/// dense random Hermitian rescaled so that ||V|| = ratio * gap.
inline RandomInstance random_gapped_instance(SplitMix64& rng, int dim, int band_rank,
                                             double ratio, double gap_target = 1.0) {
    if (dim < 2 || band_rank < 1 || band_rank >= dim)
        throw InvalidParamError("random_gapped_instance: invalid dimensions");
    if (ratio <= 0 || gap_target <= 0)
        throw InvalidParamError("random_gapped_instance: invalid scales");
    double spread = 0.2 * gap_target;
    RealVector evals(dim);
    for (int k = 0; k < band_rank; ++k) evals(k) = rng.uniform(-spread, spread);
    for (int k = band_rank; k < dim; ++k)
        evals(k) = rng.uniform(spread + gap_target, spread + 2.0 * gap_target);
    Operator u = random_unitary(rng, dim);
    RandomInstance inst;
    inst.h0 = u * evals.cast<Complex>().asDiagonal() * u.adjoint();
    inst.h0 = (inst.h0 + inst.h0.adjoint()) / 2.0;  // scrub rounding noise
    inst.split = band_split(inst.h0, -spread * 1.001, spread * 1.001);
    Operator v = random_hermitian(rng, dim);
    inst.v = v * (ratio * inst.split.gap / op_norm(v));
    inst.ratio = ratio;
    return inst;
}

/// Random 2-qubit model with a single rank-deficient jump (rank 1 or 2), so
/// the kernel of J is a nontrivial decoherence-free subspace, and a drive
/// with ||V|| = v_ratio * Delta0 for the derived gap Delta0.
inline LindbladModel random_open_model(SplitMix64& rng, int jump_rank, double v_ratio) {
    if (jump_rank < 1 || jump_rank > 2)
        throw InvalidParamError("random_open_model: jump rank must be 1 or 2");
    if (v_ratio <= 0) throw InvalidParamError("random_open_model: v_ratio must be positive");
    Operator j = Operator::Zero(4, 4);
    for (int r = 0; r < jump_rank; ++r) {
        Eigen::VectorXcd a(4), b(4);
        for (int k = 0; k < 4; ++k) {
            a(k) = Complex(rng.normal(), rng.normal());
            b(k) = Complex(rng.normal(), rng.normal());
        }
        j += a * b.adjoint();
    }
    LindbladModel probe(Operator::Zero(4, 4), {j});
    HermitianEigen e = eig_hermitian(probe.h0());
    double delta0 = std::numeric_limits<double>::infinity();
    double tol = 1e-10 * std::max(1.0, e.eigenvalues.maxCoeff());
    for (Eigen::Index k = 0; k < 4; ++k)
        if (e.eigenvalues(k) > tol) delta0 = std::min(delta0, e.eigenvalues(k));
    Operator v = random_hermitian(rng, 4);
    v *= v_ratio * delta0 / op_norm(v);
    return LindbladModel(std::move(v), {std::move(j)});
}

}  // namespace gapdyn
