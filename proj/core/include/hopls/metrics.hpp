#pragma once

#include "hopls/tensor.hpp"

#include <vector>

namespace hopls {

struct Metrics {
    double q2 = 0.0;
    double rmsep = 0.0;
    /// Pearson correlation per column of the mode-1 unfolding.
    std::vector<double> corr_per_column;
    /// Q^2 per column of the mode-1 unfolding.
    std::vector<double> q2_per_column;
};

/// 1 - ||y_true - y_pred||^2 / ||y_true||^2 on the tensors as given (no
/// centering). Throws NumericalError when y_true is zero.
double q_squared(const DenseTensor& y_true, const DenseTensor& y_pred);

/// sqrt(mean squared elementwise error).
double rmsep(const DenseTensor& y_true, const DenseTensor& y_pred);

/// Pearson correlation of matching columns of the two mode-1 unfoldings.
/// A column with zero variance in either argument yields 0.
std::vector<double> column_correlations(const DenseTensor& y_true, const DenseTensor& y_pred);

Metrics evaluate(const DenseTensor& y_true, const DenseTensor& y_pred);

}  // namespace hopls
