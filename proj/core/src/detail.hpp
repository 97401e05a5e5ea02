#pragma once

#include "hopls/tensor.hpp"

#include <span>
#include <vector>

namespace hopls::detail {

// Sequential deflation E_{r+1} = E_r - t_r p_r^T with t_r = E_r w_r is the
// same as t_r = X w*_r with w*_r = w_r - sum_{s<r} w*_s (p_s^T w_r).
inline Matrix deflation_corrected_weights(const Matrix& w, const Matrix& loadings) {
    Matrix out(w.rows(), w.cols());
    for (Eigen::Index r = 0; r < w.cols(); ++r) {
        Vector col = w.col(r);
        for (Eigen::Index s = 0; s < r; ++s) col -= out.col(s) * loadings.col(s).dot(w.col(r));
        out.col(r) = col;
    }
    return out;
}

// mats for multilinear_product with the first mode skipped.
inline std::vector<Matrix> with_leading(const Matrix& first, std::span<const Matrix> rest) {
    std::vector<Matrix> mats;
    mats.reserve(rest.size() + 1);
    mats.push_back(first);
    mats.insert(mats.end(), rest.begin(), rest.end());
    return mats;
}

}  // namespace hopls::detail
