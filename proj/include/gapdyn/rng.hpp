#pragma once

// Seeded 64-bit PRNG with a splitmix-style state advance, so property-test
// ensembles are reproducible from the seed alone across platforms and
// reimplementations. See README for the exact recurrence.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "gapdyn/linalg.hpp"

namespace gapdyn {

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (no cached spare, to keep the state
    /// advance a pure function of the draw count).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

  private:
    std::uint64_t state_;
};

/// Random complex matrix with i.i.d. standard normal real and imaginary parts,
/// filled column-major.
inline Operator random_complex_matrix(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols) {
    Operator m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            double re = rng.normal();
            double im = rng.normal();
            m(i, j) = Complex(re, im);
        }
    return m;
}

/// Random Hermitian matrix, (G + G^dag)/2 from a Gaussian G.
inline Operator random_hermitian(SplitMix64& rng, Eigen::Index dim) {
    Operator g = random_complex_matrix(rng, dim, dim);
    return (g + g.adjoint()) / 2.0;
}

/// Haar-like random unitary from the QR decomposition of a Gaussian matrix.
inline Operator random_unitary(SplitMix64& rng, Eigen::Index dim) {
    Operator g = random_complex_matrix(rng, dim, dim);
    Eigen::HouseholderQR<Operator> qr(g);
    Operator q = qr.householderQ();
    // Fix the phase convention from the R diagonal.
    Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < dim; ++k) {
        Complex d = r(k, k);
        if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
    }
    return q;
}

}  // namespace gapdyn
