#include "hopls/decomp.hpp"

#include "hopls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hopls {

namespace {

constexpr int kMaxJacobiSweeps = 80;

// Orthogonalizes the columns of b by plane rotations, accumulating them in w
// so that b_in * w = b_out. Returns false if the sweep cap was hit.
bool one_sided_jacobi(Matrix& b, Matrix& w) {
    const Eigen::Index n = b.cols();
    const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<Eigen::Index>(n, 1));
    // Columns at rounding level of the whole factor count as zero.
    const double negligible = std::pow(std::numeric_limits<double>::epsilon() * b.norm(), 2);
    w = Matrix::Identity(n, n);
    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        bool rotated = false;
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double alpha = b.col(i).squaredNorm();
                const double beta = b.col(j).squaredNorm();
                const double gamma = b.col(i).dot(b.col(j));
                if (alpha <= negligible || beta <= negligible) continue;
                if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Eigen::Index r = 0; r < b.rows(); ++r) {
                    const double bi = b(r, i);
                    const double bj = b(r, j);
                    b(r, i) = c * bi - s * bj;
                    b(r, j) = s * bi + c * bj;
                }
                for (Eigen::Index r = 0; r < n; ++r) {
                    const double wi = w(r, i);
                    const double wj = w(r, j);
                    w(r, i) = c * wi - s * wj;
                    w(r, j) = s * wi + c * wj;
                }
            }
        }
        if (!rotated) return true;
    }
    return false;
}

// Replaces the columns flagged in `missing` by unit vectors orthogonal to all
// other columns, drawn from the standard basis in index order.
void complete_orthonormal(Matrix& q, const std::vector<bool>& missing) {
    Eigen::Index candidate = 0;
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
        if (!missing[static_cast<std::size_t>(c)]) continue;
        while (true) {
            if (candidate >= q.rows()) throw NumericalError("cannot complete orthonormal basis");
            Vector e = Vector::Unit(q.rows(), candidate++);
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index o = 0; o < q.cols(); ++o) {
                    if (o == c || (missing[static_cast<std::size_t>(o)] && o > c)) continue;
                    e -= q.col(o).dot(e) * q.col(o);
                }
            }
            const double norm = e.norm();
            if (norm > 0.5) {
                q.col(c) = e / norm;
                break;
            }
        }
    }
}

SvdResult svd_impl(const Matrix& m, std::size_t k, bool want_v) {
    const Eigen::Index rows = m.rows();
    const Eigen::Index cols = m.cols();
    const Eigen::Index p = std::min(rows, cols);
    if (p == 0 || k < 1 || static_cast<Eigen::Index>(k) > p) {
        throw DimensionError("truncated_svd: k=" + std::to_string(k) + " out of range for " +
                             std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    }
    if (!m.allFinite()) throw NumericalError("truncated_svd: matrix has non-finite entries");

    const bool tall = rows >= cols;
    // tall: m = Q R, wide: m^T = Q R. Jacobi on b gives b * w = z with
    // orthogonal columns, and the square factor's SVD is w * diag|z| * z_hat^T.
    Eigen::HouseholderQR<Matrix> qr(tall ? Matrix(m) : Matrix(m.transpose()));
    const Eigen::Index big = tall ? rows : cols;
    Matrix q;
    if (tall || want_v) q = qr.householderQ() * Matrix::Identity(big, p);
    Matrix r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    Matrix b = tall ? Matrix(r.transpose()) : r;

    Matrix w;
    if (!one_sided_jacobi(b, w)) {
        throw ConvergenceError("truncated_svd: Jacobi sweeps did not converge");
    }

    Vector sigma(p);
    for (Eigen::Index c = 0; c < p; ++c) sigma(c) = b.col(c).norm();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index c) { return sigma(a) > sigma(c); });

    const auto kk = static_cast<Eigen::Index>(k);
    const double smax = sigma(order[0]);
    const double tiny = smax * std::numeric_limits<double>::epsilon() * static_cast<double>(p);

    SvdResult out;
    out.s.resize(kk);
    Matrix left(p, kk);   // left vectors of the square factor
    Matrix right(p, kk);  // right vectors of the square factor
    std::vector<bool> missing(static_cast<std::size_t>(kk), false);
    for (Eigen::Index j = 0; j < kk; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        out.s(j) = sigma(src);
        left.col(j) = w.col(src);
        if (!want_v) continue;
        if (sigma(src) > tiny && sigma(src) > 0.0) {
            right.col(j) = b.col(src) / sigma(src);
        } else {
            right.col(j).setZero();
            missing[static_cast<std::size_t>(j)] = true;
        }
    }
    if (std::find(missing.begin(), missing.end(), true) != missing.end()) {
        complete_orthonormal(right, missing);
    }

    if (tall) {
        out.u = q * left;
        if (want_v) out.v = right;
    } else {
        out.u = left;
        if (want_v) out.v = q * right;
    }

    for (Eigen::Index j = 0; j < kk; ++j) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < out.u.rows(); ++i) {
            const double a = std::abs(out.u(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (out.u(arg, j) < 0.0) {
            out.u.col(j) = -out.u.col(j);
            if (want_v) out.v.col(j) = -out.v.col(j);
        }
    }
    return out;
}

}  // namespace

SvdResult truncated_svd(const Matrix& m, std::size_t k) { return svd_impl(m, k, true); }

Matrix leading_left_singular_vectors(const Matrix& m, std::size_t k) {
    const auto rows = static_cast<std::size_t>(m.rows());
    const auto p = std::min(rows, static_cast<std::size_t>(m.cols()));
    if (k <= p || k > rows) return svd_impl(m, k, false).u;
    // More vectors than columns: the extra ones span the null space of m^T.
    Matrix u(m.rows(), static_cast<Eigen::Index>(k));
    u.leftCols(static_cast<Eigen::Index>(p)) = svd_impl(m, p, false).u;
    u.rightCols(static_cast<Eigen::Index>(k - p)).setZero();
    std::vector<bool> missing(k, false);
    std::fill(missing.begin() + static_cast<std::ptrdiff_t>(p), missing.end(), true);
    complete_orthonormal(u, missing);
    return u;
}

Vector leading_left_singular_vector(const Matrix& m) {
    if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) {
        throw NumericalError("leading singular vector of a zero matrix is undefined");
    }
    return leading_left_singular_vectors(m, 1).col(0);
}

Matrix pseudo_inverse(const Matrix& m, double rel_cutoff) {
    const auto p = static_cast<std::size_t>(std::min(m.rows(), m.cols()));
    if (p == 0) throw DimensionError("pseudo_inverse of an empty matrix");
    const SvdResult svd = truncated_svd(m, p);
    const double cut = rel_cutoff * svd.s(0);
    Matrix out = Matrix::Zero(m.cols(), m.rows());
    for (Eigen::Index j = 0; j < svd.s.size(); ++j) {
        if (svd.s(j) <= cut || svd.s(j) == 0.0) continue;
        out.noalias() += (svd.v.col(j) / svd.s(j)) * svd.u.col(j).transpose();
    }
    return out;
}

}  // namespace hopls
