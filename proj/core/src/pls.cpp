#include "hopls/regression.hpp"

#include "detail.hpp"
#include "hopls/errors.hpp"

#include <algorithm>

namespace hopls {

PlsModel fit_pls_nipals(const Matrix& x, const Matrix& y, std::size_t components, bool center,
                        const NipalsSettings& settings) {
    if (x.rows() != y.rows() || x.rows() == 0 || x.cols() == 0 || y.cols() == 0) {
        throw DimensionError("PLS needs X and Y with the same, non-zero number of rows");
    }
    const auto max_rank = static_cast<std::size_t>(std::min(x.rows(), x.cols()));
    if (components < 1 || components > max_rank) {
        throw DimensionError("PLS component count " + std::to_string(components) +
                             " out of range [1, " + std::to_string(max_rank) + "]");
    }
    if (!x.allFinite() || !y.allFinite()) throw NumericalError("PLS input contains NaN or Inf");
    if (y.cwiseAbs().maxCoeff() == 0.0) throw NumericalError("PLS response is all zero");

    PlsModel model;
    model.center = center;
    Matrix e = x;
    Matrix f = y;
    if (center) {
        model.x_mean = x.colwise().mean().transpose();
        model.y_mean = y.colwise().mean().transpose();
        e.rowwise() -= model.x_mean.transpose();
        f.rowwise() -= model.y_mean.transpose();
    } else {
        model.x_mean = Vector::Zero(x.cols());
        model.y_mean = Vector::Zero(y.cols());
    }

    const Eigen::Index n = x.rows();
    const double floor_e = 1e-12 * e.norm();
    const double floor_f = 1e-12 * f.norm();
    std::vector<Vector> ws, ts, ps, qs, us;
    std::vector<double> ds;

    for (std::size_t r = 0; r < components; ++r) {
        const double norm_e = e.norm();
        const double norm_f = f.norm();
        model.x_residual_norms.push_back(norm_e);
        model.y_residual_norms.push_back(norm_f);
        if (norm_e <= floor_e || norm_f <= floor_f) break;

        Eigen::Index start = 0;
        f.colwise().squaredNorm().maxCoeff(&start);
        Vector u = f.col(start);
        Vector w, t, q;
        Vector t_old = Vector::Zero(n);
        int iter = 0;
        bool degenerate = false;
        for (; iter < settings.max_iters; ++iter) {
            w = e.transpose() * u;
            const double wn = w.norm();
            if (wn == 0.0) {
                degenerate = true;
                break;
            }
            w /= wn;
            t = e * w;
            q = f.transpose() * t;
            const double qn = q.norm();
            if (qn == 0.0) {
                degenerate = true;
                break;
            }
            q /= qn;
            u = f * q;
            if ((t - t_old).norm() <= settings.tol * t.norm()) {
                ++iter;
                break;
            }
            t_old = t;
        }
        if (degenerate) break;

        const double tt = t.squaredNorm();
        const double d = u.dot(t) / tt;
        Vector p = e.transpose() * t / tt;
        e.noalias() -= t * p.transpose();
        f.noalias() -= d * t * q.transpose();

        ws.push_back(std::move(w));
        ts.push_back(std::move(t));
        ps.push_back(std::move(p));
        qs.push_back(std::move(q));
        us.push_back(std::move(u));
        ds.push_back(d);
        model.inner_iterations.push_back(iter);
    }
    if (ds.size() == components) {
        model.x_residual_norms.push_back(e.norm());
        model.y_residual_norms.push_back(f.norm());
    }

    const auto rank_r = static_cast<Eigen::Index>(ds.size());
    model.w.resize(x.cols(), rank_r);
    model.t.resize(n, rank_r);
    model.p.resize(x.cols(), rank_r);
    model.q.resize(y.cols(), rank_r);
    model.u.resize(n, rank_r);
    model.d.resize(rank_r);
    for (Eigen::Index r = 0; r < rank_r; ++r) {
        const auto k = static_cast<std::size_t>(r);
        model.w.col(r) = ws[k];
        model.t.col(r) = ts[k];
        model.p.col(r) = ps[k];
        model.q.col(r) = qs[k];
        model.u.col(r) = us[k];
        model.d(r) = ds[k];
    }
    return model;
}

PlsModel PlsModel::truncated(std::size_t r) const {
    PlsModel out = *this;
    const auto rr = static_cast<Eigen::Index>(std::min(r, rank()));
    if (rr < d.size()) {
        out.w = w.leftCols(rr);
        out.t = t.leftCols(rr);
        out.p = p.leftCols(rr);
        out.q = q.leftCols(rr);
        out.u = u.leftCols(rr);
        out.d = d.head(rr);
        out.x_residual_norms.resize(static_cast<std::size_t>(rr) + 1);
        out.y_residual_norms.resize(static_cast<std::size_t>(rr) + 1);
        out.inner_iterations.resize(static_cast<std::size_t>(rr));
    }
    return out;
}

Matrix PlsModel::projection_weights() const { return detail::deflation_corrected_weights(w, p); }

Matrix predict_pls(const PlsModel& model, const Matrix& x_new) {
    if (x_new.cols() != model.x_mean.size()) {
        throw DimensionError("PLS prediction expects " + std::to_string(model.x_mean.size()) +
                             " predictors, got " + std::to_string(x_new.cols()));
    }
    Matrix xc = x_new;
    xc.rowwise() -= model.x_mean.transpose();
    Matrix y = Matrix::Zero(x_new.rows(), model.y_mean.size());
    if (model.rank() > 0) {
        const Matrix scores = xc * model.projection_weights();
        y.noalias() = scores * model.d.asDiagonal() * model.q.transpose();
    }
    y.rowwise() += model.y_mean.transpose();
    return y;
}

}  // namespace hopls
