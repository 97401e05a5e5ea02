#include "hopls/synth.hpp"

#include "hopls/errors.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace hopls {

namespace {

enum Stream : std::uint32_t {
    kLoadings = 1,
    kCalibrationLatent = 2,
    kValidationLatent = 3,
    kCalibrationNoise = 4,
    kValidationNoise = 5,
};

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x9e3779b9u};
    return std::mt19937_64(seq);
}

Matrix draw(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, LoadingDist dist) {
    Matrix m(rows, cols);
    if (dist == LoadingDist::uniform01) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
    } else {
        std::normal_distribution<double> n(0.0, 1.0);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
    }
    return m;
}

DenseTensor draw_tensor(std::mt19937_64& rng, const Shape& shape) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> data(shape.numel());
    for (double& v : data) v = n(rng);
    return DenseTensor(shape, std::move(data));
}

// Adds Gaussian noise scaled to hit snr_db exactly in Frobenius norm.
DenseTensor add_noise(const DenseTensor& clean, double snr_db, std::mt19937_64& rng) {
    if (std::isinf(snr_db) && snr_db > 0) return clean;
    DenseTensor noise = draw_tensor(rng, clean.shape());
    const double noise_norm = noise.norm();
    const double xi = clean.norm() / (noise_norm * std::pow(10.0, snr_db / 20.0));
    noise *= xi;
    return clean + noise;
}

std::size_t features(const Shape& s) { return s.numel() / s[0]; }

std::size_t validation_count(const SynthSpec& spec) {
    return spec.validation_samples == 0 ? spec.x_shape[0] : spec.validation_samples;
}

std::uint64_t noise_seed(const SynthSpec& spec) { return spec.noise_seed.value_or(spec.seed); }

SynthSample finish_sample(DenseTensor clean_x, DenseTensor clean_y, const SynthSpec& spec, Stream noise) {
    auto rng = make_rng(noise_seed(spec), noise);
    SynthSample s;
    s.x = add_noise(clean_x, spec.snr_db, rng);
    s.y = add_noise(clean_y, spec.snr_db, rng);
    s.snr_x_db = measured_snr_db(clean_x, s.x);
    s.snr_y_db = measured_snr_db(clean_y, s.y);
    s.clean_x = std::move(clean_x);
    s.clean_y = std::move(clean_y);
    return s;
}

}  // namespace

std::string_view to_string(SynthKind kind) {
    switch (kind) {
        case SynthKind::matrix_structured: return "matrix-structured";
        case SynthKind::tucker_structured: return "tucker-structured";
        case SynthKind::matrix_response: return "matrix-response";
    }
    return "unknown";
}

std::string_view to_string(LoadingDist dist) {
    return dist == LoadingDist::uniform01 ? "uniform01" : "gaussian";
}

SynthSpec SynthSpec::for_case(std::string_view tag, double snr_db, std::uint64_t seed) {
    SynthSpec s;
    s.snr_db = snr_db;
    s.seed = seed;
    if (tag == "1m" || tag == "1t") {
        s.x_shape = s.y_shape = Shape{20, 10, 10};
    } else if (tag == "2m" || tag == "3m" || tag == "2t") {
        s.x_shape = s.y_shape = Shape{10, 10, 10};
    } else if (tag == "mr") {
        s.kind = SynthKind::matrix_response;
        s.x_shape = Shape{5, 5, 5, 5};
        s.y_shape = Shape{5, 2};
        return s;
    } else {
        throw std::invalid_argument("unknown case tag '" + std::string(tag) + "'");
    }
    s.kind = tag.back() == 't' ? SynthKind::tucker_structured : SynthKind::matrix_structured;
    if (tag == "3m") s.loadings = LoadingDist::uniform01;
    return s;
}

void SynthSpec::validate() const {
    if (x_shape[0] != y_shape[0]) throw DimensionError("X and Y must share the sample count");
    if (latent < 1) throw DimensionError("latent count must be >= 1");
    if (std::isnan(snr_db) || snr_db == -kNoiseless) throw DimensionError("SNR must be a number or +inf");
    switch (kind) {
        case SynthKind::matrix_structured:
            if (x_shape.order() < 2 || y_shape.order() < 2) throw DimensionError("shapes need order >= 2");
            break;
        case SynthKind::tucker_structured:
            if (x_shape.order() < 2 || y_shape.order() < 2) throw DimensionError("shapes need order >= 2");
            if (core_rank < 1) throw DimensionError("core rank must be >= 1");
            break;
        case SynthKind::matrix_response:
            if (x_shape.order() < 3) throw DimensionError("matrix-response X needs order >= 3");
            if (y_shape.order() != 2) throw DimensionError("matrix-response Y must be a matrix");
            break;
    }
}

double measured_snr_db(const DenseTensor& clean, const DenseTensor& noisy) {
    const double noise = (noisy - clean).squared_norm();
    if (noise == 0.0) return kNoiseless;
    return 10.0 * std::log10(clean.squared_norm() / noise);
}

SynthDataset gen_matrix_structured(const SynthSpec& spec) {
    spec.validate();
    if (spec.kind != SynthKind::matrix_structured) throw DimensionError("spec kind is not matrix-structured");
    SynthDataset out;
    out.spec = spec;
    const auto latent = static_cast<Eigen::Index>(spec.latent);

    auto rng = make_rng(spec.seed, kLoadings);
    const Matrix p = draw(rng, static_cast<Eigen::Index>(features(spec.x_shape)), latent, spec.loadings);
    const Matrix q = draw(rng, static_cast<Eigen::Index>(features(spec.y_shape)), latent, spec.loadings);
    out.x_loadings = {p};
    out.y_loadings = {q};

    auto sample = [&](std::size_t n, Stream latent_stream, Stream noise_stream) {
        auto lr = make_rng(spec.seed, latent_stream);
        const Matrix t = draw(lr, static_cast<Eigen::Index>(n), latent, LoadingDist::gaussian);
        DenseTensor cx = fold(t * p.transpose(), 0, spec.x_shape.with_dim(0, n));
        DenseTensor cy = fold(t * q.transpose(), 0, spec.y_shape.with_dim(0, n));
        return finish_sample(std::move(cx), std::move(cy), spec, noise_stream);
    };
    out.calibration = sample(spec.x_shape[0], kCalibrationLatent, kCalibrationNoise);
    out.validation = sample(validation_count(spec), kValidationLatent, kValidationNoise);
    return out;
}

SynthDataset gen_tucker_structured(const SynthSpec& spec) {
    spec.validate();
    if (spec.kind != SynthKind::tucker_structured) throw DimensionError("spec kind is not tucker-structured");
    SynthDataset out;
    out.spec = spec;

    auto rng = make_rng(spec.seed, kLoadings);
    auto make_side = [&](const Shape& shape, std::vector<Matrix>& loadings) {
        std::vector<std::size_t> core_dims{spec.latent};
        for (std::size_t n = 1; n < shape.order(); ++n) {
            const std::size_t rank = std::min(spec.core_rank, shape[n]);
            core_dims.push_back(rank);
            loadings.push_back(draw(rng, static_cast<Eigen::Index>(shape[n]),
                                    static_cast<Eigen::Index>(rank), spec.loadings));
        }
        return draw_tensor(rng, Shape(core_dims));
    };
    out.x_core = make_side(spec.x_shape, out.x_loadings);
    out.y_core = make_side(spec.y_shape, out.y_loadings);

    auto sample = [&](std::size_t n, Stream latent_stream, Stream noise_stream) {
        auto lr = make_rng(spec.seed, latent_stream);
        const Matrix t = draw(lr, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.latent),
                              LoadingDist::gaussian);
        std::vector<Matrix> xm{t};
        xm.insert(xm.end(), out.x_loadings.begin(), out.x_loadings.end());
        std::vector<Matrix> ym{t};
        ym.insert(ym.end(), out.y_loadings.begin(), out.y_loadings.end());
        return finish_sample(multilinear_product(*out.x_core, xm), multilinear_product(*out.y_core, ym),
                             spec, noise_stream);
    };
    out.calibration = sample(spec.x_shape[0], kCalibrationLatent, kCalibrationNoise);
    out.validation = sample(validation_count(spec), kValidationLatent, kValidationNoise);
    return out;
}

SynthDataset gen_matrix_response(const SynthSpec& spec) {
    spec.validate();
    if (spec.kind != SynthKind::matrix_response) throw DimensionError("spec kind is not matrix-response");
    SynthDataset out;
    out.spec = spec;

    auto rng = make_rng(spec.seed, kLoadings);
    const Matrix w = draw(rng, static_cast<Eigen::Index>(features(spec.x_shape)),
                          static_cast<Eigen::Index>(spec.y_shape[1]), LoadingDist::gaussian);
    out.y_loadings = {w};

    auto sample = [&](std::size_t n, Stream latent_stream, Stream noise_stream) {
        auto lr = make_rng(spec.seed, latent_stream);
        DenseTensor x = draw_tensor(lr, spec.x_shape.with_dim(0, n));
        DenseTensor y = DenseTensor::from_matrix(matricize(x, 0) * w);
        return finish_sample(std::move(x), std::move(y), spec, noise_stream);
    };
    out.calibration = sample(spec.x_shape[0], kCalibrationLatent, kCalibrationNoise);
    out.validation = sample(validation_count(spec), kValidationLatent, kValidationNoise);
    return out;
}

SynthDataset generate(const SynthSpec& spec) {
    switch (spec.kind) {
        case SynthKind::matrix_structured: return gen_matrix_structured(spec);
        case SynthKind::tucker_structured: return gen_tucker_structured(spec);
        case SynthKind::matrix_response: return gen_matrix_response(spec);
    }
    throw DimensionError("unknown synthetic kind");
}

}  // namespace hopls
