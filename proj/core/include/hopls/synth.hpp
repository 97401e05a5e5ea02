#pragma once

#include "hopls/tensor.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace hopls {

enum class SynthKind { matrix_structured, tucker_structured, matrix_response };
enum class LoadingDist { gaussian, uniform01 };

std::string_view to_string(SynthKind kind);
std::string_view to_string(LoadingDist dist);

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

/// Recipe for one synthetic calibration/validation pair.
struct SynthSpec {
    SynthKind kind = SynthKind::matrix_structured;
    Shape x_shape{20, 10, 10};
    Shape y_shape{20, 10, 10};
    std::size_t latent = 5;      ///< columns of T
    std::size_t core_rank = 5;   ///< trailing Tucker ranks of the generating cores
    LoadingDist loadings = LoadingDist::gaussian;
    double snr_db = kNoiseless;  ///< +inf generates noiseless data
    std::uint64_t seed = 0;      ///< loadings, cores and latent vectors
    /// Noise draws; defaults to `seed`. Changing only this keeps the clean parts.
    std::optional<std::uint64_t> noise_seed;
    /// Validation sample count; 0 means the calibration count.
    std::size_t validation_samples = 0;

    /// Preset for a case tag: 1m, 2m, 3m (matrix-structured), 1t, 2t
    /// (Tucker-structured), mr (matrix response). Throws std::invalid_argument.
    static SynthSpec for_case(std::string_view tag, double snr_db, std::uint64_t seed);

    /// Throws DimensionError when shapes do not fit the kind.
    void validate() const;
};

struct SynthSample {
    DenseTensor x;
    DenseTensor y;
    DenseTensor clean_x;
    DenseTensor clean_y;
    double snr_x_db = kNoiseless;  ///< realized SNR of x against clean_x
    double snr_y_db = kNoiseless;
};

struct SynthDataset {
    SynthSpec spec;
    SynthSample calibration;
    SynthSample validation;  ///< same loadings/cores, fresh latent vectors and noise
    /// Loadings shared by both samples: P (and Q) for matrix-structured data,
    /// P^(n) then Q^(m) for Tucker data, W for the matrix-response case.
    std::vector<Matrix> x_loadings;
    std::vector<Matrix> y_loadings;
    std::optional<DenseTensor> x_core;
    std::optional<DenseTensor> y_core;
};

/// X = T P^T + xi E and Y = T Q^T + xi F, refolded along mode 1.
SynthDataset gen_matrix_structured(const SynthSpec& spec);
/// X = [[G; T, P^(1), ...]] + noise and Y = [[D; T, Q^(1), ...]] + noise.
SynthDataset gen_tucker_structured(const SynthSpec& spec);
/// X ~ N(0,1) of order >= 3 and Y = X_(1) W with W ~ N(0,1).
SynthDataset gen_matrix_response(const SynthSpec& spec);
/// Dispatches on spec.kind.
SynthDataset generate(const SynthSpec& spec);

/// 10 log10(||clean||^2 / ||noisy - clean||^2); +inf when they are equal.
double measured_snr_db(const DenseTensor& clean, const DenseTensor& noisy);

}  // namespace hopls
