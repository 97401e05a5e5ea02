#include "hopls/cv.hpp"

#include "hopls/errors.hpp"
#include "hopls/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace hopls {

std::uint64_t repeat_seed(std::uint64_t base, std::size_t repeat) {
    // splitmix64 finalizer
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(repeat) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<BenchRow> benchmark_case(const SynthSpec& spec, std::size_t repeats, const BenchSettings& settings) {
    if (repeats < 1) throw DimensionError("benchmark needs at least one repeat");
    std::vector<Algorithm> methods = settings.methods;
    if (methods.empty()) {
        methods = {spec.kind == SynthKind::matrix_response ? Algorithm::hopls2 : Algorithm::hopls,
                   Algorithm::npls, Algorithm::pls};
    }

    std::vector<BenchRow> rows;
    for (std::size_t rep = 0; rep < repeats; ++rep) {
        SynthSpec s = spec;
        s.seed = repeat_seed(settings.seed, rep);
        s.noise_seed.reset();
        const SynthDataset data = generate(s);
        for (Algorithm method : methods) {
            const CvReport cv = cv_grid_search(data.calibration.x, data.calibration.y, method, settings.search);
            const CvCell& best = cv.best();
            const AnyModel model = fit_model(method, data.calibration.x, data.calibration.y, best.components,
                                             std::max<std::size_t>(1, best.lambda), settings.search.center);
            const DenseTensor pred = predict(model, data.validation.x);
            BenchRow row;
            row.snr_db = spec.snr_db;
            row.repeat = rep;
            row.method = method;
            row.components = best.components;
            row.lambda = best.lambda;
            row.q2 = q_squared(data.validation.y, pred);
            row.rmsep = rmsep(data.validation.y, pred);
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<BenchRow> benchmark_sweep(const SynthSpec& spec, const BenchSettings& settings) {
    std::vector<BenchRow> rows;
    for (double snr : settings.snrs) {
        SynthSpec s = spec;
        s.snr_db = snr;
        auto part = benchmark_case(s, settings.repeats, settings);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

Quantiles quantiles(std::vector<double> values) {
    if (values.empty()) throw DimensionError("quantiles of an empty sample");
    std::sort(values.begin(), values.end());
    auto at = [&](double p) {
        const double pos = p * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] + frac * (values[hi] - values[lo]);
    };
    return {values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

double median(std::vector<double> values) { return quantiles(std::move(values)).median; }

}  // namespace hopls
