#include "hopls/metrics.hpp"

#include "hopls/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hopls {

namespace {

void check_same_shape(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape()) {
        throw DimensionError("metric inputs differ in shape: " + a.shape().to_string() + " vs " +
                             b.shape().to_string());
    }
}

double squared_error(const DenseTensor& a, const DenseTensor& b) {
    const auto x = a.data();
    const auto y = b.data();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = x[i] - y[i];
        sum += e * e;
    }
    return sum;
}

}  // namespace

double q_squared(const DenseTensor& y_true, const DenseTensor& y_pred) {
    check_same_shape(y_true, y_pred);
    const double total = y_true.squared_norm();
    if (total == 0.0) throw NumericalError("Q^2 undefined for an all-zero reference");
    return 1.0 - squared_error(y_true, y_pred) / total;
}

double rmsep(const DenseTensor& y_true, const DenseTensor& y_pred) {
    check_same_shape(y_true, y_pred);
    return std::sqrt(squared_error(y_true, y_pred) / static_cast<double>(y_true.numel()));
}

std::vector<double> column_correlations(const DenseTensor& y_true, const DenseTensor& y_pred) {
    check_same_shape(y_true, y_pred);
    const Matrix a = matricize(y_true, 0);
    const Matrix b = matricize(y_pred, 0);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(a.cols()));
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const Vector x = a.col(c).array() - a.col(c).mean();
        const Vector y = b.col(c).array() - b.col(c).mean();
        const double denom = x.norm() * y.norm();
        out.push_back(denom > 0.0 ? std::clamp(x.dot(y) / denom, -1.0, 1.0) : 0.0);
    }
    return out;
}

Metrics evaluate(const DenseTensor& y_true, const DenseTensor& y_pred) {
    Metrics m;
    m.q2 = q_squared(y_true, y_pred);
    m.rmsep = rmsep(y_true, y_pred);
    m.corr_per_column = column_correlations(y_true, y_pred);
    const Matrix a = matricize(y_true, 0);
    const Matrix b = matricize(y_pred, 0);
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const double total = a.col(c).squaredNorm();
        m.q2_per_column.push_back(total > 0.0 ? 1.0 - (a.col(c) - b.col(c)).squaredNorm() / total : 0.0);
    }
    return m;
}

}  // namespace hopls
