#pragma once

#include "hopls/decomp.hpp"
#include "hopls/tensor.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace hopls {

/// Hyperparameters of one HOPLS fit.
struct FitConfig {
    std::size_t components = 1;         ///< R, number of latent vectors
    std::vector<std::size_t> x_ranks;   ///< L_2 .. L_N
    std::vector<std::size_t> y_ranks;   ///< K_2 .. K_M; unused for a matrix response
    /// Residual-norm threshold. Unset means 1e-8 times the norm of the
    /// (centered) input, applied to X and Y separately.
    std::optional<double> epsilon;
    bool center = true;                 ///< remove the mode-1 mean of X and Y
    HooiSettings hooi;

    /// L_n = K_m = lambda for every trailing mode. Pass a y shape of order 2
    /// for a matrix response (y_ranks left empty).
    static FitConfig with_lambda(std::size_t components, std::size_t lambda, const Shape& x_shape,
                                 const Shape& y_shape);

    /// L_n = ceil(eta * R_n) where R_n is the numerical rank of the mode-n
    /// unfolding of the data (same for Y); 0 < eta <= 1.
    static FitConfig with_eta(std::size_t components, double eta, const DenseTensor& x,
                              const DenseTensor& y);

    /// Throws DimensionError for ranks that do not fit the given shapes.
    void validate(const Shape& x_shape, const Shape& y_shape) const;
};

enum class StopReason {
    completed,              ///< all requested components extracted
    residual_threshold,     ///< ||E_r|| or ||F_r|| fell to epsilon
    zero_cross_covariance,  ///< X and Y residuals share no variance
    degenerate_core,        ///< zero core/latent vector (nothing left to explain)
};

std::string_view to_string(StopReason reason);

struct CenteredTensor {
    DenseTensor centered;
    DenseTensor mean;  ///< first dim 1, the mode-1 mean
};

/// Removes the mean along mode 1.
CenteredTensor center_mode1(const DenseTensor& t);

/// Adds a (1 x ...) mean field back to every mode-1 slice of t.
DenseTensor add_mode1_mean(const DenseTensor& t, const DenseTensor& mean);

// ---------------------------------------------------------------------------
// Tensor X, tensor Y

struct HoplsComponent {
    Vector t;                ///< unit latent vector, length I_1
    std::vector<Matrix> p;   ///< P^(1..N-1), I_{n+1} x L_{n+1}
    std::vector<Matrix> q;   ///< Q^(1..M-1), J_{m+1} x K_{m+1}
    DenseTensor g;           ///< 1 x L_2 x ... x L_N
    DenseTensor d;           ///< 1 x K_2 x ... x K_M
    /// Core-space weight v with t = E_r,(1) (P^(N-1) (x) ... (x) P^(1)) v,
    /// where E_r is the deflated X this component was extracted from.
    Vector x_weight;
};

struct HoplsModel {
    FitConfig config;
    Shape x_shape;
    Shape y_shape;
    std::optional<DenseTensor> x_mean;
    std::optional<DenseTensor> y_mean;
    std::vector<HoplsComponent> components;
    /// ||E_r||_F and ||F_r||_F for r = 1..R+1 (the last entry is the final residual).
    std::vector<double> x_residual_norms;
    std::vector<double> y_residual_norms;
    StopReason stop = StopReason::completed;

    std::size_t rank() const noexcept { return components.size(); }
    /// The model restricted to its first r components.
    HoplsModel truncated(std::size_t r) const;
    /// X-weights W* with T = X_(1) W* on centered data (prod I_n x R).
    Matrix projection_weights() const;
    /// Q* with Y_(1) ~ T Q*^T (prod J_m x R).
    Matrix response_loadings() const;
};

HoplsModel fit_hopls(const DenseTensor& x, const DenseTensor& y, const FitConfig& cfg);
DenseTensor predict_hopls(const HoplsModel& model, const DenseTensor& x_new);

// ---------------------------------------------------------------------------
// Tensor X, matrix Y

struct Hopls2Component {
    Vector t;               ///< unit latent vector
    std::vector<Matrix> p;  ///< P^(1..N-1)
    DenseTensor g;          ///< 1 x L_2 x ... x L_N
    Vector q;               ///< unit Y-loading, length M
    double d = 0.0;         ///< inner regression scalar
    Vector u;               ///< Y latent vector F_r q
    Vector x_weight;        ///< see HoplsComponent::x_weight
};

struct Hopls2Model {
    FitConfig config;
    Shape x_shape;
    std::size_t responses = 0;
    std::optional<DenseTensor> x_mean;
    std::optional<Vector> y_mean;
    std::vector<Hopls2Component> components;
    std::vector<double> x_residual_norms;
    std::vector<double> y_residual_norms;
    StopReason stop = StopReason::completed;

    std::size_t rank() const noexcept { return components.size(); }
    Hopls2Model truncated(std::size_t r) const;
    Matrix projection_weights() const;
};

Hopls2Model fit_hopls2(const DenseTensor& x, const Matrix& y, const FitConfig& cfg);
Matrix predict_hopls2(const Hopls2Model& model, const DenseTensor& x_new);

// ---------------------------------------------------------------------------
// Two-way NIPALS PLS

struct PlsModel {
    Matrix w;  ///< unit X-weights, p x R
    Matrix t;  ///< latent vectors (training scores), n x R
    Matrix p;  ///< X-loadings, p x R
    Matrix q;  ///< unit Y-loadings, m x R
    Matrix u;  ///< Y latent vectors, n x R
    Vector d;  ///< inner regression scalars
    bool center = true;
    Vector x_mean;
    Vector y_mean;
    std::vector<double> x_residual_norms;
    std::vector<double> y_residual_norms;
    std::vector<int> inner_iterations;

    std::size_t rank() const noexcept { return static_cast<std::size_t>(d.size()); }
    PlsModel truncated(std::size_t r) const;
    Matrix projection_weights() const;
};

struct NipalsSettings {
    double tol = 1e-10;
    int max_iters = 500;
};

PlsModel fit_pls_nipals(const Matrix& x, const Matrix& y, std::size_t components, bool center = true,
                        const NipalsSettings& settings = {});
Matrix predict_pls(const PlsModel& model, const Matrix& x_new);

// ---------------------------------------------------------------------------
// Uniform access used by cross-validation, benchmarks and the CLI.

enum class Algorithm { hopls, hopls2, npls, pls };

std::string_view to_string(Algorithm algo);
/// Throws std::invalid_argument for an unknown name.
Algorithm parse_algorithm(std::string_view name);

/// A PLS model fitted on mode-1 unfoldings, remembering the response shape.
struct UnfoldedPlsModel {
    PlsModel pls;
    Shape x_shape;
    Shape y_shape;
};

using AnyModel = std::variant<HoplsModel, Hopls2Model, UnfoldedPlsModel>;

/// Fits `algo` with R components and L_n = K_m = lambda.
///
/// npls is HOPLS with lambda forced to 1 (hopls2 for an order-2 response);
/// pls runs NIPALS on the mode-1 unfoldings and ignores lambda.
AnyModel fit_model(Algorithm algo, const DenseTensor& x, const DenseTensor& y, std::size_t components,
                   std::size_t lambda, bool center = true);
DenseTensor predict(const AnyModel& model, const DenseTensor& x_new);
AnyModel truncated(const AnyModel& model, std::size_t r);
std::size_t model_rank(const AnyModel& model);

}  // namespace hopls
