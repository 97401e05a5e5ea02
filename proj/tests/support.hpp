#pragma once

#include "hopls/decomp.hpp"
#include "hopls/regression.hpp"
#include "hopls/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace hopls::testing {

using Rng = std::mt19937_64;

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    std::normal_distribution<double> nd;
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = nd(rng);
    return m;
}

inline DenseTensor random_tensor(const Shape& shape, Rng& rng) {
    std::normal_distribution<double> nd;
    std::vector<double> v(shape.numel());
    for (double& e : v) e = nd(rng);
    return DenseTensor(shape, std::move(v));
}

/// Column-orthonormal rows x cols matrix (Q factor of a gaussian matrix).
inline Matrix random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(rows, rows, rng));
    return qr.householderQ() * Matrix::Identity(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

inline std::vector<std::size_t> unravel(std::size_t flat, std::span<const std::size_t> dims) {
    std::vector<std::size_t> idx(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        idx[k] = flat % dims[k];
        flat /= dims[k];
    }
    return idx;
}

inline double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline double orthonormality_error(const Matrix& f) {
    return max_abs_diff(f.transpose() * f, Matrix::Identity(f.cols(), f.cols()));
}

// Loop oracles written directly from the index definitions.

inline DenseTensor naive_mode_n_product(const DenseTensor& t, const Matrix& a, std::size_t mode) {
    std::vector<std::size_t> dims(t.shape().dims().begin(), t.shape().dims().end());
    dims[mode] = static_cast<std::size_t>(a.rows());
    DenseTensor out{Shape(dims)};
    for (std::size_t f = 0; f < out.numel(); ++f) {
        auto idx = unravel(f, dims);
        const std::size_t row = idx[mode];
        double s = 0.0;
        for (std::size_t i = 0; i < t.shape()[mode]; ++i) {
            idx[mode] = i;
            s += t.at(idx) * a(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(i));
        }
        out[f] = s;
    }
    return out;
}

inline DenseTensor naive_cross_cov(const DenseTensor& x, const DenseTensor& y) {
    const auto xt = x.shape().trailing();
    const auto yt = y.shape().trailing();
    std::vector<std::size_t> dims = xt;
    dims.insert(dims.end(), yt.begin(), yt.end());
    DenseTensor out{Shape(dims)};
    for (std::size_t f = 0; f < out.numel(); ++f) {
        const auto idx = unravel(f, dims);
        std::vector<std::size_t> ix{0}, iy{0};
        ix.insert(ix.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(xt.size()));
        iy.insert(iy.end(), idx.begin() + static_cast<std::ptrdiff_t>(xt.size()), idx.end());
        double s = 0.0;
        for (std::size_t i = 0; i < x.shape()[0]; ++i) {
            ix[0] = iy[0] = i;
            s += x.at(ix) * y.at(iy);
        }
        out[f] = s;
    }
    return out;
}

/// sum over core entries of g[r] * prod_n A_n(i_n, r_n), one output entry at a time.
inline DenseTensor naive_tucker(const TuckerFactors& tk) {
    std::vector<std::size_t> dims;
    for (const Matrix& f : tk.factors) dims.push_back(static_cast<std::size_t>(f.rows()));
    DenseTensor out{Shape(dims)};
    const auto cdims = tk.core.shape().dims();
    for (std::size_t f = 0; f < out.numel(); ++f) {
        const auto idx = unravel(f, dims);
        double s = 0.0;
        for (std::size_t c = 0; c < tk.core.numel(); ++c) {
            const auto r = unravel(c, cdims);
            double p = tk.core[c];
            for (std::size_t n = 0; n < dims.size(); ++n)
                p *= tk.factors[n](static_cast<Eigen::Index>(idx[n]), static_cast<Eigen::Index>(r[n]));
            s += p;
        }
        out[f] = s;
    }
    return out;
}

/// True when both residual-norm sequences never grow by more than `slack`.
inline bool deflation_monotone(const std::vector<double>& x, const std::vector<double>& y, double slack = 1e-12) {
    for (std::size_t i = 1; i < x.size(); ++i)
        if (x[i] > x[i - 1] + slack) return false;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (y[i] > y[i - 1] + slack) return false;
    return true;
}

inline bool deflation_monotone(const AnyModel& m) {
    return std::visit(
        [](const auto& v) {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, UnfoldedPlsModel>)
                return deflation_monotone(v.pls.x_residual_norms, v.pls.y_residual_norms);
            else
                return deflation_monotone(v.x_residual_norms, v.y_residual_norms);
        },
        m);
}

/// Noiseless data drawn from the HOPLS model: a sum of R rank-(1, lambda, ..)
/// blocks with orthonormal latent vectors, column-orthonormal loadings that
/// are mutually orthogonal across blocks, and all-orthogonal gaussian cores.
/// Calibration and validation share loadings and cores.
struct BlockModelData {
    DenseTensor x, y, xv, yv;
};

inline BlockModelData hopls_block_data(std::uint64_t seed, std::size_t r, std::size_t lambda, const Shape& x_shape,
                                       const Shape& y_shape) {
    Rng rng(seed);
    const auto xt = x_shape.trailing();
    const auto yt = y_shape.trailing();
    std::vector<Matrix> bp, bq;
    for (std::size_t d : xt) bp.push_back(random_orthonormal(d, r * lambda, rng));
    for (std::size_t d : yt) bq.push_back(random_orthonormal(d, r * lambda, rng));

    auto core = [&](std::size_t modes) {
        std::vector<std::size_t> dims{1};
        dims.insert(dims.end(), modes, lambda);
        MlRank rank{dims};
        return hosvd(random_tensor(Shape(dims), rng), rank).core;
    };
    std::vector<DenseTensor> g, d;
    for (std::size_t k = 0; k < r; ++k) {
        g.push_back(core(xt.size()));
        d.push_back(core(yt.size()));
    }
    auto draw = [&](DenseTensor& x, DenseTensor& y) {
        const Matrix t = random_orthonormal(x_shape[0], r, rng);
        x = DenseTensor(x_shape);
        y = DenseTensor(y_shape);
        for (std::size_t k = 0; k < r; ++k) {
            const auto cols = static_cast<Eigen::Index>(k * lambda);
            const auto width = static_cast<Eigen::Index>(lambda);
            std::vector<Matrix> fx{t.col(static_cast<Eigen::Index>(k))}, fy{t.col(static_cast<Eigen::Index>(k))};
            for (const Matrix& p : bp) fx.push_back(p.middleCols(cols, width));
            for (const Matrix& q : bq) fy.push_back(q.middleCols(cols, width));
            x += multilinear_product(g[k], fx);
            y += multilinear_product(d[k], fy);
        }
    };
    BlockModelData out;
    draw(out.x, out.y);
    draw(out.xv, out.yv);
    return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("hopls_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace hopls::testing
