#pragma once

#include <optional>
#include <vector>

#include "tenfact/tensor.hpp"

namespace tenfact {

/// Default relative singular-value cutoff for rank decisions.
inline constexpr double kDefaultRankTol = 1e-10;

/// Count of singular values above tol * sigma_1. The zero matrix has rank 0.
Index numerical_rank(const Matrix& m, double tol = kDefaultRankTol);

/// Rank of the mode-n unfolding.
Index mode_n_rank(const DenseTensor& t, Index mode, double tol = kDefaultRankTol);

/// Truncated mode-1 factorization t = right x_1 left, with `left` carrying
/// orthonormal columns and `right` carrying the singular values.
struct Mode1Factorization {
    Matrix left;              // first-mode dim x rank, orthonormal columns
    DenseTensor right;        // rank x (remaining dims of t)
    Index rank = 0;           // kept components, min(numerical_rank, budget)
    Index numerical_rank = 0; // before applying the budget
};

/// SVD of the mode-1 unfolding truncated to min(numerical rank, rank_budget)
/// components. Reconstruction is exact (up to roundoff) whenever the numerical
/// rank fits the budget. Returns nullopt for the zero tensor.
///
/// Determinism: each left singular vector is sign-fixed so its largest-
/// magnitude entry is positive (ties broken by lowest index); the right factor
/// absorbs the flip. Repeated singular values keep whatever orthonormal basis
/// the SVD produced, so only the spanned subspace is reproducible there.
std::optional<Mode1Factorization> mode1_factorize(const DenseTensor& t, Index rank_budget,
                                                  double tol = kDefaultRankTol);

/// Full multilinear SVD: t = core x_1 U(1) ... x_N U(N) with square orthogonal
/// factors, an all-orthogonal core, and per-mode non-increasing singular
/// values (the Frobenius norms of the core's mode-n subtensors).
struct MlsvdResult {
    DenseTensor core;
    std::vector<Matrix> factors;
    std::vector<std::vector<double>> mode_singular_values;
};

MlsvdResult mlsvd(const DenseTensor& t, double tol = kDefaultRankTol);

}  // namespace tenfact
