#pragma once

#include "hopls/regression.hpp"
#include "hopls/synth.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace hopls {

/// One evaluated (R, lambda) cell.
struct CvCell {
    std::size_t components = 0;
    std::size_t lambda = 0;  ///< 1 for npls, 0 for pls (no loading count)
    double mean_q2 = 0.0;
    std::vector<double> fold_q2;
};

struct CvReport {
    Algorithm algo = Algorithm::hopls;
    std::size_t folds = 0;
    std::vector<CvCell> grid;  ///< sorted by (components, lambda)
    std::size_t best_index = 0;

    const CvCell& best() const { return grid.at(best_index); }
};

/// Contiguous [begin, end) blocks along mode 1; sizes differ by at most one.
std::vector<std::pair<std::size_t, std::size_t>> fold_ranges(std::size_t samples, std::size_t folds);

/// K-fold cross-validation of explicit candidate configurations.
///
/// Folds are contiguous blocks along mode 1. Each candidate is scored by its
/// mean validation Q^2 over the folds; the best cell has the highest mean,
/// ties going to the smaller (R, lambda). For npls the candidate's loading
/// counts are ignored (forced to 1); pls uses only `components`.
CvReport kfold_cv(const DenseTensor& x, const DenseTensor& y, std::size_t folds,
                  std::span<const FitConfig> candidates, Algorithm algo);

struct GridSearch {
    std::size_t folds = 5;
    std::size_t r_max = 10;
    std::size_t lambda_max = 10;
    bool center = true;
};

/// Grid search over R = 1..r_max and lambda = 1..lambda_max. For each R the
/// lambda scan stops right after the first decrease of the mean Q^2. One fit
/// with r_max components per (fold, lambda) serves every R, since components
/// are extracted sequentially.
CvReport cv_grid_search(const DenseTensor& x, const DenseTensor& y, Algorithm algo,
                        const GridSearch& settings = {});

// ---------------------------------------------------------------------------
// Benchmark protocol

struct BenchRow {
    double snr_db = 0.0;
    std::size_t repeat = 0;
    Algorithm method = Algorithm::hopls;
    std::size_t components = 0;
    std::size_t lambda = 0;
    double q2 = 0.0;
    double rmsep = 0.0;
};

struct BenchSettings {
    std::size_t repeats = 50;
    std::vector<double> snrs{10.0, 5.0, 0.0, -5.0};
    std::uint64_t seed = 0;
    GridSearch search;
    /// Empty means hopls (hopls2 for a matrix response), npls, pls.
    std::vector<Algorithm> methods;
};

/// Repeat seed: a fixed mix of the base seed and the repeat index, shared by all SNR levels.
std::uint64_t repeat_seed(std::uint64_t base, std::size_t repeat);

/// For every repeat: generate calibration and validation data from `spec`,
/// select hyperparameters of each method by cross-validation on the
/// calibration set, refit on the whole calibration set and score the
/// validation set. Uses spec.snr_db; rows ordered by (repeat, method).
std::vector<BenchRow> benchmark_case(const SynthSpec& spec, std::size_t repeats, const BenchSettings& settings);

/// benchmark_case over settings.snrs; rows ordered by (snr, repeat, method).
std::vector<BenchRow> benchmark_sweep(const SynthSpec& spec, const BenchSettings& settings);

struct Quantiles {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

/// Linear-interpolation quantiles of a non-empty sample.
Quantiles quantiles(std::vector<double> values);
double median(std::vector<double> values);

}  // namespace hopls
