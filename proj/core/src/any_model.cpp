#include "hopls/errors.hpp"
#include "hopls/regression.hpp"

#include <stdexcept>
#include <string>

namespace hopls {

std::string_view to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::hopls: return "hopls";
        case Algorithm::hopls2: return "hopls2";
        case Algorithm::npls: return "npls";
        case Algorithm::pls: return "pls";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "hopls") return Algorithm::hopls;
    if (name == "hopls2") return Algorithm::hopls2;
    if (name == "npls") return Algorithm::npls;
    if (name == "pls") return Algorithm::pls;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

AnyModel fit_model(Algorithm algo, const DenseTensor& x, const DenseTensor& y, std::size_t components,
                   std::size_t lambda, bool center) {
    if (x.shape()[0] != y.shape()[0]) {
        throw DimensionError("X and Y differ in sample count: " + x.shape().to_string() + " vs " +
                             y.shape().to_string());
    }
    if (algo == Algorithm::npls) {
        lambda = 1;
        algo = y.order() == 2 ? Algorithm::hopls2 : Algorithm::hopls;
    }
    switch (algo) {
        case Algorithm::hopls: {
            FitConfig cfg = FitConfig::with_lambda(components, lambda, x.shape(), y.shape());
            cfg.center = center;
            return fit_hopls(x, y, cfg);
        }
        case Algorithm::hopls2: {
            if (y.order() != 2) {
                throw DimensionError("hopls2 needs a matrix response, got " + y.shape().to_string());
            }
            FitConfig cfg = FitConfig::with_lambda(components, lambda, x.shape(), y.shape());
            cfg.center = center;
            return fit_hopls2(x, y.to_matrix(), cfg);
        }
        case Algorithm::pls:
        case Algorithm::npls:
            break;
    }
    return UnfoldedPlsModel{fit_pls_nipals(matricize(x, 0), matricize(y, 0), components, center),
                            x.shape(), y.shape()};
}

DenseTensor predict(const AnyModel& model, const DenseTensor& x_new) {
    if (const auto* m = std::get_if<HoplsModel>(&model)) return predict_hopls(*m, x_new);
    if (const auto* m = std::get_if<Hopls2Model>(&model)) {
        return DenseTensor::from_matrix(predict_hopls2(*m, x_new));
    }
    const auto& m = std::get<UnfoldedPlsModel>(model);
    if (x_new.order() != m.x_shape.order() || x_new.shape().with_dim(0, 1) != m.x_shape.with_dim(0, 1)) {
        throw DimensionError("X of shape " + x_new.shape().to_string() +
                             " does not match the training shape " + m.x_shape.to_string());
    }
    const Matrix y1 = predict_pls(m.pls, matricize(x_new, 0));
    return fold(y1, 0, m.y_shape.with_dim(0, x_new.shape()[0]));
}

AnyModel truncated(const AnyModel& model, std::size_t r) {
    return std::visit(
        [r](const auto& m) -> AnyModel {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UnfoldedPlsModel>) {
                return UnfoldedPlsModel{m.pls.truncated(r), m.x_shape, m.y_shape};
            } else {
                return m.truncated(r);
            }
        },
        model);
}

std::size_t model_rank(const AnyModel& model) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UnfoldedPlsModel>) {
                return m.pls.rank();
            } else {
                return m.rank();
            }
        },
        model);
}

}  // namespace hopls
