#include "hopls/decomp.hpp"

#include "hopls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>

namespace hopls {

void MlRank::validate(const Shape& shape) const {
    if (ranks.size() != shape.order()) {
        throw DimensionError("multilinear rank has " + std::to_string(ranks.size()) +
                             " entries for a tensor of order " + std::to_string(shape.order()));
    }
    for (std::size_t n = 0; n < ranks.size(); ++n) {
        if (ranks[n] < 1 || ranks[n] > shape[n]) {
            throw DimensionError("rank " + std::to_string(ranks[n]) + " out of range for mode " +
                                 std::to_string(n) + " of size " + std::to_string(shape[n]));
        }
    }
}

TuckerFactors hosvd(const DenseTensor& t, const MlRank& rank) {
    rank.validate(t.shape());
    TuckerFactors out;
    out.factors.reserve(t.order());
    for (std::size_t n = 0; n < t.order(); ++n) {
        out.factors.push_back(leading_left_singular_vectors(matricize(t, n), rank.ranks[n]));
    }
    out.core = multilinear_product(t, out.factors, Transpose::yes);
    return out;
}

namespace {

void check_settings(const HooiSettings& settings) {
    if (settings.max_iters < 1 || !(settings.rel_tol > 0.0)) {
        throw DimensionError("HOOI settings need max_iters >= 1 and rel_tol > 0");
    }
}

bool settled(double previous, double current, const HooiSettings& settings) {
    return std::abs(current - previous) <= settings.rel_tol * std::max(previous, std::abs(current)) ||
           current == 0.0;
}

// t x_{k+1} factors[k]^T for every trailing mode k+1 except `skip`.
DenseTensor project_trailing(const DenseTensor& t, std::span<const Matrix> factors,
                             std::optional<std::size_t> skip) {
    DenseTensor out = t;
    for (std::size_t k = 0; k < factors.size(); ++k) {
        if (skip && *skip == k) continue;
        out = mode_n_product(out, factors[k].transpose(), k + 1);
    }
    return out;
}

}  // namespace

HooiResult hooi(const DenseTensor& t, const MlRank& rank, const HooiSettings& settings) {
    check_settings(settings);
    HooiResult result;
    result.tucker = hosvd(t, rank);
    double previous = result.tucker.core.squared_norm();
    result.objective.push_back(previous);

    auto& factors = result.tucker.factors;
    for (int sweep = 1; sweep <= settings.max_iters; ++sweep) {
        for (std::size_t n = 0; n < t.order(); ++n) {
            const DenseTensor partial = multilinear_product(t, factors, Transpose::yes, n);
            factors[n] = leading_left_singular_vectors(matricize(partial, n), rank.ranks[n]);
        }
        result.tucker.core = multilinear_product(t, factors, Transpose::yes);
        const double current = result.tucker.core.squared_norm();
        result.objective.push_back(current);
        result.sweeps = sweep;
        if (settled(previous, current, settings)) {
            result.converged = true;
            break;
        }
        previous = current;
    }
    return result;
}

HooiResult hooi_cross_covariance(const DenseTensor& x, const DenseTensor& y, const MlRank& rank,
                                 const HooiSettings& settings) {
    check_settings(settings);
    const std::size_t nx = x.order() - 1;
    HooiResult result;
    result.tucker = hosvd(cross_cov_mode1(x, y), rank);
    double previous = result.tucker.core.squared_norm();
    result.objective.push_back(previous);

    auto& factors = result.tucker.factors;
    const std::span<const Matrix> fx(factors.data(), nx);
    const std::span<const Matrix> fy(factors.data() + nx, factors.size() - nx);
    for (int sweep = 1; sweep <= settings.max_iters; ++sweep) {
        for (std::size_t n = 0; n < factors.size(); ++n) {
            const bool in_x = n < nx;
            const DenseTensor px = project_trailing(x, fx, in_x ? std::optional(n) : std::nullopt);
            const DenseTensor py = project_trailing(y, fy, in_x ? std::nullopt : std::optional(n - nx));
            factors[n] = leading_left_singular_vectors(matricize(cross_cov_mode1(px, py), n), rank.ranks[n]);
        }
        result.tucker.core = cross_cov_mode1(project_trailing(x, fx, std::nullopt), project_trailing(y, fy, std::nullopt));
        const double current = result.tucker.core.squared_norm();
        result.objective.push_back(current);
        result.sweeps = sweep;
        if (settled(previous, current, settings)) {
            result.converged = true;
            break;
        }
        previous = current;
    }
    return result;
}

DenseTensor tucker_reconstruct(const TuckerFactors& tucker) {
    return multilinear_product(tucker.core, tucker.factors, Transpose::no);
}

}  // namespace hopls
