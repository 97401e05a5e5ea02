#include "hopls/cv.hpp"

#include "hopls/errors.hpp"
#include "hopls/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace hopls {

namespace {

struct Split {
    DenseTensor x_train, y_train, x_valid, y_valid;
};

Split split(const DenseTensor& x, const DenseTensor& y, std::pair<std::size_t, std::size_t> range) {
    std::vector<std::size_t> train, valid;
    for (std::size_t i = 0; i < x.shape()[0]; ++i) {
        (i >= range.first && i < range.second ? valid : train).push_back(i);
    }
    return {select_mode1(x, train), select_mode1(y, train), select_mode1(x, valid), select_mode1(y, valid)};
}

void check_folds(const DenseTensor& x, const DenseTensor& y, std::size_t folds) {
    if (x.shape()[0] != y.shape()[0]) {
        throw DimensionError("X and Y differ in sample count: " + x.shape().to_string() + " vs " +
                             y.shape().to_string());
    }
    if (folds < 2) throw DimensionError("cross-validation needs at least 2 folds");
    if (x.shape()[0] < folds) {
        throw DimensionError("too few samples (" + std::to_string(x.shape()[0]) + ") for " +
                             std::to_string(folds) + " folds");
    }
}

std::size_t uniform_lambda(const FitConfig& cfg) {
    if (cfg.x_ranks.empty()) return 0;
    const std::size_t first = cfg.x_ranks.front();
    const bool uniform = std::all_of(cfg.x_ranks.begin(), cfg.x_ranks.end(), [&](auto v) { return v == first; }) &&
                         std::all_of(cfg.y_ranks.begin(), cfg.y_ranks.end(), [&](auto v) { return v == first; });
    return uniform ? first : 0;
}

AnyModel fit_with_config(Algorithm algo, const DenseTensor& x, const DenseTensor& y, FitConfig cfg) {
    if (algo == Algorithm::pls) return fit_model(Algorithm::pls, x, y, cfg.components, 1, cfg.center);
    if (algo == Algorithm::npls) {
        std::fill(cfg.x_ranks.begin(), cfg.x_ranks.end(), std::size_t{1});
        std::fill(cfg.y_ranks.begin(), cfg.y_ranks.end(), std::size_t{1});
    }
    if (y.order() == 2) return fit_hopls2(x, y.to_matrix(), cfg);
    return fit_hopls(x, y, cfg);
}

std::size_t pick_best(const std::vector<CvCell>& grid) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (grid[i].mean_q2 > grid[best].mean_q2) best = i;
    }
    return best;
}

void sort_grid(std::vector<CvCell>& grid) {
    std::stable_sort(grid.begin(), grid.end(), [](const CvCell& a, const CvCell& b) {
        return std::tie(a.components, a.lambda) < std::tie(b.components, b.lambda);
    });
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> fold_ranges(std::size_t samples, std::size_t folds) {
    if (folds < 1 || samples < folds) throw DimensionError("too few samples for the requested folds");
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t f = 0; f < folds; ++f) out.emplace_back(f * samples / folds, (f + 1) * samples / folds);
    return out;
}

CvReport kfold_cv(const DenseTensor& x, const DenseTensor& y, std::size_t folds,
                  std::span<const FitConfig> candidates, Algorithm algo) {
    check_folds(x, y, folds);
    if (candidates.empty()) throw DimensionError("cross-validation needs at least one candidate");
    CvReport report;
    report.algo = algo;
    report.folds = folds;
    const auto ranges = fold_ranges(x.shape()[0], folds);
    for (const FitConfig& cfg : candidates) {
        CvCell cell;
        cell.components = cfg.components;
        cell.lambda = algo == Algorithm::pls ? 0 : algo == Algorithm::npls ? 1 : uniform_lambda(cfg);
        for (const auto& range : ranges) {
            const Split s = split(x, y, range);
            const AnyModel model = fit_with_config(algo, s.x_train, s.y_train, cfg);
            cell.fold_q2.push_back(q_squared(s.y_valid, predict(model, s.x_valid)));
        }
        cell.mean_q2 = mean_of(cell.fold_q2);
        report.grid.push_back(std::move(cell));
    }
    sort_grid(report.grid);
    report.best_index = pick_best(report.grid);
    return report;
}

CvReport cv_grid_search(const DenseTensor& x, const DenseTensor& y, Algorithm algo, const GridSearch& settings) {
    check_folds(x, y, settings.folds);
    if (settings.r_max < 1 || settings.lambda_max < 1) throw DimensionError("grid bounds must be >= 1");
    if (algo == Algorithm::hopls && y.order() == 2) algo = Algorithm::hopls2;

    const auto ranges = fold_ranges(x.shape()[0], settings.folds);
    std::size_t smallest_train = x.shape()[0];
    for (const auto& [b, e] : ranges) smallest_train = std::min(smallest_train, x.shape()[0] - (e - b));

    std::size_t r_max = settings.r_max;
    std::size_t lambda_max = settings.lambda_max;
    if (algo == Algorithm::pls) {
        r_max = std::min(r_max, std::min(smallest_train, x.numel() / x.shape()[0]));
        lambda_max = 1;
    } else if (algo == Algorithm::npls) {
        lambda_max = 1;
    } else {
        for (std::size_t n = 1; n < x.order(); ++n) lambda_max = std::min(lambda_max, x.shape()[n]);
        if (y.order() > 2) {
            for (std::size_t m = 1; m < y.order(); ++m) lambda_max = std::min(lambda_max, y.shape()[m]);
        }
    }

    std::vector<Split> splits;
    for (const auto& range : ranges) splits.push_back(split(x, y, range));

    CvReport report;
    report.algo = algo;
    report.folds = settings.folds;
    std::map<std::size_t, double> previous;  // R -> mean Q^2 at the previous lambda
    std::vector<bool> active(r_max + 1, true);
    for (std::size_t lambda = 1; lambda <= lambda_max; ++lambda) {
        if (std::none_of(active.begin() + 1, active.end(), [](bool a) { return a; })) break;
        std::vector<std::vector<double>> fold_q2(r_max + 1);
        for (const Split& s : splits) {
            const AnyModel model = fit_model(algo, s.x_train, s.y_train, r_max, lambda, settings.center);
            for (std::size_t r = 1; r <= r_max; ++r) {
                if (!active[r]) continue;
                fold_q2[r].push_back(q_squared(s.y_valid, predict(truncated(model, r), s.x_valid)));
            }
        }
        for (std::size_t r = 1; r <= r_max; ++r) {
            if (!active[r]) continue;
            CvCell cell;
            cell.components = r;
            cell.lambda = algo == Algorithm::pls ? 0 : lambda;
            cell.fold_q2 = std::move(fold_q2[r]);
            cell.mean_q2 = mean_of(cell.fold_q2);
            if (lambda > 1 && cell.mean_q2 < previous[r]) active[r] = false;
            previous[r] = cell.mean_q2;
            report.grid.push_back(std::move(cell));
        }
    }
    sort_grid(report.grid);
    report.best_index = pick_best(report.grid);
    return report;
}

}  // namespace hopls
