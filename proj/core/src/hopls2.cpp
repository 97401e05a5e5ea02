#include "hopls/regression.hpp"

#include "detail.hpp"
#include "hopls/errors.hpp"

#include <cmath>

namespace hopls {

Hopls2Model fit_hopls2(const DenseTensor& x, const Matrix& y, const FitConfig& cfg) {
    if (x.order() < 3) throw DimensionError("HOPLS2 needs X of order >= 3, got " + x.shape().to_string());
    if (static_cast<std::size_t>(y.rows()) != x.shape()[0] || y.cols() < 1) {
        throw DimensionError("Y has " + std::to_string(y.rows()) + " rows, X has " +
                             std::to_string(x.shape()[0]) + " samples");
    }
    const Shape y_shape{static_cast<std::size_t>(y.rows()), static_cast<std::size_t>(y.cols())};
    cfg.validate(x.shape(), y_shape);
    if (!y.allFinite()) throw NumericalError("Y contains NaN or Inf");

    Hopls2Model model;
    model.config = cfg;
    model.config.y_ranks.clear();
    model.x_shape = x.shape();
    model.responses = static_cast<std::size_t>(y.cols());

    DenseTensor e = x;
    Matrix f = y;
    if (cfg.center) {
        auto cx = center_mode1(x);
        e = std::move(cx.centered);
        model.x_mean = std::move(cx.mean);
        Vector mean = y.colwise().mean().transpose();
        f.rowwise() -= mean.transpose();
        model.y_mean = std::move(mean);
    }
    const double eps_x = cfg.epsilon.value_or(1e-8 * e.norm());
    const double eps_y = cfg.epsilon.value_or(1e-8 * f.norm());

    MlRank c_rank;
    c_rank.ranks.push_back(1);
    c_rank.ranks.insert(c_rank.ranks.end(), cfg.x_ranks.begin(), cfg.x_ranks.end());

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
        const DenseTensor f_tensor = DenseTensor::from_matrix(f);
        const DenseTensor c = cross_cov_mode1(f_tensor, e);
        if (c.norm() <= 1e-14 * norm_e * norm_f) {
            model.stop = StopReason::zero_cross_covariance;
            break;
        }

        const HooiResult tucker = hooi_cross_covariance(f_tensor, e, c_rank, cfg.hooi);
        Hopls2Component comp;
        comp.q = tucker.tucker.factors.front().col(0);
        comp.p.assign(tucker.tucker.factors.begin() + 1, tucker.tucker.factors.end());

        const DenseTensor z = multilinear_product(e, detail::with_leading(Matrix(), comp.p), Transpose::yes, 0);
        const Matrix core_pinv = pseudo_inverse(matricize(tucker.tucker.core, 0));
        const Vector t_raw = matricize(z, 0) * core_pinv.col(0);
        const double t_norm = t_raw.norm();
        if (t_norm == 0.0 || !std::isfinite(t_norm)) {
            model.stop = StopReason::degenerate_core;
            break;
        }
        comp.t = t_raw / t_norm;
        comp.x_weight = core_pinv.col(0) / t_norm;
        comp.g = mode_n_product(z, comp.t.transpose(), 0);
        comp.u = f * comp.q;
        comp.d = comp.u.dot(comp.t);

        e -= multilinear_product(comp.g, detail::with_leading(comp.t, comp.p));
        f -= comp.d * comp.t * comp.q.transpose();
        model.components.push_back(std::move(comp));
    }
    if (model.components.size() == cfg.components) {
        model.x_residual_norms.push_back(e.norm());
        model.y_residual_norms.push_back(f.norm());
    }
    return model;
}

Hopls2Model Hopls2Model::truncated(std::size_t r) const {
    Hopls2Model out = *this;
    if (r < out.components.size()) {
        out.components.resize(r);
        out.x_residual_norms.resize(r + 1);
        out.y_residual_norms.resize(r + 1);
        out.stop = StopReason::completed;
        out.config.components = r;
    }
    return out;
}

Matrix Hopls2Model::projection_weights() const {
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

Matrix predict_hopls2(const Hopls2Model& model, const DenseTensor& x_new) {
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
    const auto rows = static_cast<Eigen::Index>(x_new.shape()[0]);
    Matrix y = Matrix::Zero(rows, static_cast<Eigen::Index>(model.responses));
    if (!model.components.empty()) {
        const Matrix scores = matricize(xc, 0) * model.projection_weights();
        for (std::size_t r = 0; r < model.components.size(); ++r) {
            const auto& comp = model.components[r];
            y.noalias() += comp.d * scores.col(static_cast<Eigen::Index>(r)) * comp.q.transpose();
        }
    }
    if (model.y_mean) y.rowwise() += model.y_mean->transpose();
    return y;
}

}  // namespace hopls
