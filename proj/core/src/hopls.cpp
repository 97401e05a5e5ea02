#include "hopls/regression.hpp"

#include "detail.hpp"
#include "hopls/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hopls {

// ---------------------------------------------------------------------------
// Configuration

FitConfig FitConfig::with_lambda(std::size_t components, std::size_t lambda, const Shape& x_shape,
                                 const Shape& y_shape) {
    FitConfig cfg;
    cfg.components = components;
    cfg.x_ranks.assign(x_shape.order() - 1, lambda);
    if (y_shape.order() > 2) cfg.y_ranks.assign(y_shape.order() - 1, lambda);
    return cfg;
}

namespace {

std::size_t numerical_rank(const Matrix& m) {
    const auto k = static_cast<std::size_t>(std::min(m.rows(), m.cols()));
    const SvdResult svd = truncated_svd(m, k);
    if (svd.s(0) == 0.0) return 0;
    const double cut = 1e-12 * svd.s(0);
    return static_cast<std::size_t>((svd.s.array() > cut).count());
}

std::vector<std::size_t> eta_ranks(const DenseTensor& t, double eta) {
    std::vector<std::size_t> out;
    for (std::size_t n = 1; n < t.order(); ++n) {
        const std::size_t full = std::max<std::size_t>(1, numerical_rank(matricize(t, n)));
        out.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(eta * static_cast<double>(full) - 1e-12))));
    }
    return out;
}

}  // namespace

FitConfig FitConfig::with_eta(std::size_t components, double eta, const DenseTensor& x,
                              const DenseTensor& y) {
    if (!(eta > 0.0 && eta <= 1.0)) throw DimensionError("eta must lie in (0, 1]");
    FitConfig cfg;
    cfg.components = components;
    cfg.x_ranks = eta_ranks(x, eta);
    if (y.order() > 2) cfg.y_ranks = eta_ranks(y, eta);
    return cfg;
}

void FitConfig::validate(const Shape& x_shape, const Shape& y_shape) const {
    if (components < 1) throw DimensionError("number of components must be >= 1");
    if (epsilon && !(*epsilon >= 0.0)) throw DimensionError("epsilon must be >= 0");
    auto check = [](const std::vector<std::size_t>& ranks, const Shape& shape, const char* what) {
        if (ranks.size() + 1 != shape.order()) {
            throw DimensionError(std::string(what) + " ranks need " + std::to_string(shape.order() - 1) +
                                 " entries, got " + std::to_string(ranks.size()));
        }
        for (std::size_t n = 0; n < ranks.size(); ++n) {
            if (ranks[n] < 1 || ranks[n] > shape[n + 1]) {
                throw DimensionError(std::string(what) + " rank " + std::to_string(ranks[n]) +
                                     " out of range for mode of size " + std::to_string(shape[n + 1]));
            }
        }
    };
    check(x_ranks, x_shape, "X");
    if (y_shape.order() > 2) check(y_ranks, y_shape, "Y");
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
        case StopReason::completed: return "completed";
        case StopReason::residual_threshold: return "residual_threshold";
        case StopReason::zero_cross_covariance: return "zero_cross_covariance";
        case StopReason::degenerate_core: return "degenerate_core";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Centering

CenteredTensor center_mode1(const DenseTensor& t) {
    const std::size_t rows = t.shape()[0];
    const std::size_t stride = t.numel() / rows;
    DenseTensor mean(t.shape().with_dim(0, 1));
    const auto src = t.data();
    auto m = mean.data();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < stride; ++j) m[j] += src[i * stride + j];
    }
    for (double& v : m) v /= static_cast<double>(rows);
    DenseTensor centered = t;
    auto c = centered.data();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < stride; ++j) c[i * stride + j] -= m[j];
    }
    return {std::move(centered), std::move(mean)};
}

DenseTensor add_mode1_mean(const DenseTensor& t, const DenseTensor& mean) {
    if (mean.shape() != t.shape().with_dim(0, 1)) {
        throw DimensionError("mean field " + mean.shape().to_string() + " does not fit tensor " +
                             t.shape().to_string());
    }
    const std::size_t stride = mean.numel();
    DenseTensor out = t;
    auto dst = out.data();
    const auto m = mean.data();
    for (std::size_t i = 0; i < t.shape()[0]; ++i) {
        for (std::size_t j = 0; j < stride; ++j) dst[i * stride + j] += m[j];
    }
    return out;
}

// ---------------------------------------------------------------------------
// HOPLS, tensor -> tensor

HoplsModel fit_hopls(const DenseTensor& x, const DenseTensor& y, const FitConfig& cfg) {
    if (x.order() < 3 || y.order() < 3) {
        throw DimensionError("HOPLS needs X and Y of order >= 3, got " + x.shape().to_string() +
                             " and " + y.shape().to_string());
    }
    if (x.shape()[0] != y.shape()[0]) {
        throw DimensionError("X and Y differ in sample count: " + x.shape().to_string() + " vs " +
                             y.shape().to_string());
    }
    cfg.validate(x.shape(), y.shape());

    HoplsModel model;
    model.config = cfg;
    model.x_shape = x.shape();
    model.y_shape = y.shape();

    DenseTensor e = x;
    DenseTensor f = y;
    if (cfg.center) {
        auto cx = center_mode1(x);
        auto cy = center_mode1(y);
        e = std::move(cx.centered);
        f = std::move(cy.centered);
        model.x_mean = std::move(cx.mean);
        model.y_mean = std::move(cy.mean);
    }
    const double eps_x = cfg.epsilon.value_or(1e-8 * e.norm());
    const double eps_y = cfg.epsilon.value_or(1e-8 * f.norm());

    const std::size_t nx = x.order() - 1;
    MlRank c_rank;
    c_rank.ranks = cfg.x_ranks;
    c_rank.ranks.insert(c_rank.ranks.end(), cfg.y_ranks.begin(), cfg.y_ranks.end());

    for (std::size_t r = 0; r < cfg.components; ++r) {
        const double norm_e = e.norm();
        const double norm_f = f.norm();
        model.x_residual_norms.push_back(norm_e);
        model.y_residual_norms.push_back(norm_f);
        if (norm_e == 0.0 || norm_f == 0.0) {
            model.stop = StopReason::zero_cross_covariance;
            break;
        }
        if (norm_e <= eps_x || norm_f <= eps_y) {
            model.stop = StopReason::residual_threshold;
            break;
        }
        const DenseTensor c = cross_cov_mode1(e, f);
        if (c.norm() <= 1e-14 * norm_e * norm_f) {
            model.stop = StopReason::zero_cross_covariance;
            break;
        }

        HooiResult tucker = hooi_cross_covariance(e, f, c_rank, cfg.hooi);
        HoplsComponent comp;
        comp.p.assign(tucker.tucker.factors.begin(), tucker.tucker.factors.begin() + static_cast<std::ptrdiff_t>(nx));
        comp.q.assign(tucker.tucker.factors.begin() + static_cast<std::ptrdiff_t>(nx), tucker.tucker.factors.end());

        const DenseTensor z = multilinear_product(e, detail::with_leading(Matrix(), comp.p), Transpose::yes, 0);
        const Matrix z1 = matricize(z, 0);
        if (z1.cwiseAbs().maxCoeff() == 0.0) {
            model.stop = StopReason::degenerate_core;
            break;
        }
        comp.t = leading_left_singular_vector(z1);
        comp.g = mode_n_product(z, comp.t.transpose(), 0);
        comp.d = multilinear_product(f, detail::with_leading(comp.t, comp.q), Transpose::yes);
        comp.x_weight = pseudo_inverse(matricize(comp.g, 0)).col(0);

        e -= multilinear_product(comp.g, detail::with_leading(comp.t, comp.p));
        f -= multilinear_product(comp.d, detail::with_leading(comp.t, comp.q));
        model.components.push_back(std::move(comp));
    }
    if (model.components.size() == cfg.components) {
        model.x_residual_norms.push_back(e.norm());
        model.y_residual_norms.push_back(f.norm());
    }
    return model;
}

HoplsModel HoplsModel::truncated(std::size_t r) const {
    HoplsModel out = *this;
    if (r < out.components.size()) {
        out.components.resize(r);
        out.x_residual_norms.resize(r + 1);
        out.y_residual_norms.resize(r + 1);
        out.stop = StopReason::completed;
        out.config.components = r;
    }
    return out;
}

Matrix HoplsModel::projection_weights() const {
    const auto features = static_cast<Eigen::Index>(x_shape.numel() / x_shape[0]);
    const auto rank_r = static_cast<Eigen::Index>(components.size());
    Matrix w(features, rank_r);
    Matrix loadings(features, rank_r);
    for (Eigen::Index r = 0; r < rank_r; ++r) {
        const auto& comp = components[static_cast<std::size_t>(r)];
        const Matrix k = kron_reversed(comp.p);
        w.col(r) = k * comp.x_weight;
        loadings.col(r) = k * matricize(comp.g, 0).transpose();
    }
    return detail::deflation_corrected_weights(w, loadings);
}

Matrix HoplsModel::response_loadings() const {
    const auto outputs = static_cast<Eigen::Index>(y_shape.numel() / y_shape[0]);
    Matrix q(outputs, static_cast<Eigen::Index>(components.size()));
    for (std::size_t r = 0; r < components.size(); ++r) {
        const auto& comp = components[r];
        q.col(static_cast<Eigen::Index>(r)) = kron_reversed(comp.q) * matricize(comp.d, 0).transpose();
    }
    return q;
}

DenseTensor predict_hopls(const HoplsModel& model, const DenseTensor& x_new) {
    if (x_new.order() != model.x_shape.order() ||
        x_new.shape().with_dim(0, 1) != model.x_shape.with_dim(0, 1)) {
        throw DimensionError("X of shape " + x_new.shape().to_string() +
                             " does not match the training shape " + model.x_shape.to_string());
    }
    DenseTensor xc = x_new;
    if (model.x_mean) {
        DenseTensor neg = *model.x_mean;
        neg *= -1.0;
        xc = add_mode1_mean(x_new, neg);
    }
    const Shape out_shape = model.y_shape.with_dim(0, x_new.shape()[0]);
    DenseTensor y(out_shape);
    if (!model.components.empty()) {
        const Matrix scores = matricize(xc, 0) * model.projection_weights();
        const Matrix y1 = scores * model.response_loadings().transpose();
        y = fold(y1, 0, out_shape);
    }
    if (model.y_mean) y = add_mode1_mean(y, *model.y_mean);
    return y;
}

}  // namespace hopls
