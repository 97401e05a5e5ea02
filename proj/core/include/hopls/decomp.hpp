#pragma once

#include "hopls/tensor.hpp"

#include <cstddef>
#include <vector>

namespace hopls {

/// Thin truncated SVD m ~ u * diag(s) * v^T.
struct SvdResult {
    Matrix u;  ///< rows x k, column-orthonormal
    Vector s;  ///< k non-negative values, non-increasing
    Matrix v;  ///< cols x k, column-orthonormal
};

/// Leading k singular triplets of m.
///
/// Householder QR reduces m to a square triangular factor, whose SVD is
/// computed by one-sided (Hestenes) Jacobi rotations. Sign rule: in every
/// left singular vector the entry of largest magnitude is positive (ties go
/// to the lowest index); the right vector is flipped with it. Equal singular
/// values keep the order in which Jacobi left them, so only the spanned
/// subspace is meaningful in that case.
///
/// Throws DimensionError if k is not in [1, min(rows, cols)] and
/// ConvergenceError if the Jacobi sweeps do not settle.
SvdResult truncated_svd(const Matrix& m, std::size_t k);

/// truncated_svd(m, k).u without forming the right vectors. k may exceed the
/// column count (up to the row count); the surplus columns complete an
/// orthonormal basis in standard-basis order.
Matrix leading_left_singular_vectors(const Matrix& m, std::size_t k);

/// First column of truncated_svd(m, 1).u. Throws NumericalError for a zero matrix.
Vector leading_left_singular_vector(const Matrix& m);

/// Moore-Penrose pseudoinverse; singular values below rel_cutoff * s_max count as zero.
Matrix pseudo_inverse(const Matrix& m, double rel_cutoff = 1e-12);

/// Multilinear rank (R_1, ..., R_N).
struct MlRank {
    std::vector<std::size_t> ranks;

    /// Throws DimensionError unless ranks has one entry per mode with 1 <= R_n <= I_n.
    void validate(const Shape& shape) const;
};

struct TuckerFactors {
    DenseTensor core;             ///< R_1 x ... x R_N
    std::vector<Matrix> factors;  ///< factor n is I_n x R_n, column-orthonormal
};

struct HooiSettings {
    int max_iters = 50;
    double rel_tol = 1e-8;  ///< stop once the relative change of ||core||^2 drops below this
};

struct HooiResult {
    TuckerFactors tucker;
    int sweeps = 0;
    bool converged = false;
    /// ||core||_F^2 after initialization, then after each sweep.
    std::vector<double> objective;
};

/// Truncated HOSVD: factor n holds the leading R_n left singular vectors of
/// the mode-n unfolding and the core is t projected on every factor.
TuckerFactors hosvd(const DenseTensor& t, const MlRank& rank);

/// Higher-order orthogonal iteration, initialised from hosvd and sweeping
/// modes in ascending order. Non-convergence is reported in the result.
HooiResult hooi(const DenseTensor& t, const MlRank& rank, const HooiSettings& settings = {});

/// HOOI of the cross-covariance C = cross_cov_mode1(x, y), whose modes are
/// the trailing modes of x followed by those of y. Equivalent to
/// hooi(cross_cov_mode1(x, y), rank, settings), but each sweep contracts the
/// projected x and y over the sample mode instead of projecting C itself.
HooiResult hooi_cross_covariance(const DenseTensor& x, const DenseTensor& y, const MlRank& rank,
                                 const HooiSettings& settings = {});

/// [[core; factors...]]
DenseTensor tucker_reconstruct(const TuckerFactors& tucker);

}  // namespace hopls
