#include "support.hpp"

#include "hopls/errors.hpp"
#include "hopls/metrics.hpp"
#include "hopls/regression.hpp"
#include "hopls/synth.hpp"

#include <gtest/gtest.h>

using namespace hopls;
using namespace hopls::testing;

namespace {

FitConfig lambda_config(std::size_t r, std::size_t lambda, const DenseTensor& x, const DenseTensor& y, bool center) {
    FitConfig cfg = FitConfig::with_lambda(r, lambda, x.shape(), y.shape());
    cfg.center = center;
    return cfg;
}

HoplsModel fit_checked(const DenseTensor& x, const DenseTensor& y, const FitConfig& cfg) {
    HoplsModel m = fit_hopls(x, y, cfg);
    EXPECT_TRUE(deflation_monotone(m.x_residual_norms, m.y_residual_norms));
    return m;
}

Hopls2Model fit2_checked(const DenseTensor& x, const Matrix& y, const FitConfig& cfg) {
    Hopls2Model m = fit_hopls2(x, y, cfg);
    EXPECT_TRUE(deflation_monotone(m.x_residual_norms, m.y_residual_norms));
    return m;
}

DenseTensor x_block(const HoplsComponent& c) {
    std::vector<Matrix> f{c.t};
    f.insert(f.end(), c.p.begin(), c.p.end());
    return multilinear_product(c.g, f);
}

DenseTensor y_block(const HoplsComponent& c) {
    std::vector<Matrix> f{c.t};
    f.insert(f.end(), c.q.begin(), c.q.end());
    return multilinear_product(c.d, f);
}

}  // namespace

TEST(FitConfig, LambdaAndValidation) {
    const FitConfig cfg = FitConfig::with_lambda(3, 2, Shape{5, 4, 3}, Shape{5, 6, 2});
    EXPECT_EQ(cfg.x_ranks, (std::vector<std::size_t>{2, 2}));
    EXPECT_EQ(cfg.y_ranks, (std::vector<std::size_t>{2, 2}));
    EXPECT_THROW(FitConfig::with_lambda(3, 4, Shape{5, 4, 3}, Shape{5, 6, 4}).validate(Shape{5, 4, 3}, Shape{5, 6, 4}),
                 DimensionError);
    FitConfig zero = cfg;
    zero.components = 0;
    EXPECT_THROW(zero.validate(Shape{5, 4, 3}, Shape{5, 6, 2}), DimensionError);
    const FitConfig matrix_y = FitConfig::with_lambda(1, 2, Shape{5, 4, 3}, Shape{5, 2});
    EXPECT_TRUE(matrix_y.y_ranks.empty());
}

TEST(FitConfig, EtaRoundsUpAgainstNumericalRank) {
    Rng rng(1);
    const DenseTensor x = random_tensor(Shape{10, 6, 4}, rng), y = random_tensor(Shape{10, 5, 3}, rng);
    const FitConfig full = FitConfig::with_eta(2, 1.0, x, y);
    EXPECT_EQ(full.x_ranks, (std::vector<std::size_t>{6, 4}));
    EXPECT_EQ(full.y_ranks, (std::vector<std::size_t>{5, 3}));
    const FitConfig half = FitConfig::with_eta(2, 0.5, x, y);
    EXPECT_EQ(half.x_ranks, (std::vector<std::size_t>{3, 2}));
    EXPECT_EQ(half.y_ranks, (std::vector<std::size_t>{3, 2}));
    EXPECT_THROW(FitConfig::with_eta(2, 0.0, x, y), DimensionError);
}

TEST(CenterMode1, Examples) {
    DenseTensor constant(Shape{4, 2, 3});
    for (std::size_t i = 0; i < constant.numel(); ++i) constant[i] = static_cast<double>(i % 6) - 2.5;
    EXPECT_EQ(center_mode1(constant).centered.squared_norm(), 0.0);

    // Dyadic entries keep every subtraction and addition exact.
    Rng rng(2);
    std::uniform_int_distribution<int> di(-64, 64);
    DenseTensor dyadic(Shape{4, 3, 2});
    for (std::size_t i = 0; i < dyadic.numel(); ++i) dyadic[i] = di(rng) / 8.0;
    const CenteredTensor c = center_mode1(dyadic);
    EXPECT_EQ(add_mode1_mean(c.centered, c.mean), dyadic);

    const DenseTensor g = random_tensor(Shape{7, 3, 2}, rng);
    const CenteredTensor cg = center_mode1(g);
    EXPECT_LE(max_abs_diff(add_mode1_mean(cg.centered, cg.mean), g), 1e-15 * 8);
    const Matrix col_means = matricize(cg.centered, 0).colwise().mean();
    EXPECT_LE(col_means.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(cg.mean.shape(), (Shape{1, 3, 2}));
}

// Noiseless data from the HOPLS model with R* = 3 and L = K = (2, 2), fitted with the same
// hyperparameters. Blocks have equal scale; see the ledger for why the greedy fit need not
// recover them exactly.
TEST(Hopls, ExactModelSelfConsistency) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const BlockModelData d = hopls_block_data(seed, 3, 2, Shape{20, 10, 10}, Shape{20, 10, 10});
        const HoplsModel m = fit_checked(d.x, d.y, lambda_config(3, 2, d.x, d.y, false));
        ASSERT_EQ(m.rank(), 3u);
        EXPECT_GE(q_squared(d.y, predict_hopls(m, d.x)), 0.999) << "seed " << seed;
        EXPECT_LE(m.x_residual_norms.back() / d.x.norm(), 1e-6) << "seed " << seed;
    }
}

TEST(Hopls, SingleBlockIsRecoveredExactly) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const BlockModelData d = hopls_block_data(seed, 1, 2, Shape{12, 6, 5}, Shape{12, 4, 7});
        const HoplsModel m = fit_checked(d.x, d.y, lambda_config(1, 2, d.x, d.y, false));
        EXPECT_GE(q_squared(d.yv, predict_hopls(m, d.xv)), 1.0 - 1e-10);
        EXPECT_LE(m.x_residual_norms.back(), 1e-10 * d.x.norm());
    }
}

TEST(Hopls, ZeroResponseStopsAtFirstComponent) {
    Rng rng(3);
    const DenseTensor x = random_tensor(Shape{6, 3, 3}, rng);
    const DenseTensor y(Shape{6, 2, 2});
    const HoplsModel m = fit_checked(x, y, lambda_config(2, 1, x, y, true));
    EXPECT_EQ(m.rank(), 0u);
    EXPECT_EQ(m.stop, StopReason::zero_cross_covariance);
}

TEST(Hopls, LambdaOneGivesRankOneBlocks) {
    Rng rng(4);
    const DenseTensor x = random_tensor(Shape{15, 5, 4}, rng), y = random_tensor(Shape{15, 3, 4}, rng);
    const HoplsModel m = fit_checked(x, y, lambda_config(4, 1, x, y, true));
    ASSERT_EQ(m.rank(), 4u);
    for (const HoplsComponent& c : m.components) {
        EXPECT_EQ(c.g.numel(), 1u);
        EXPECT_EQ(c.d.numel(), 1u);
        for (const DenseTensor& block : {x_block(c), y_block(c)}) {
            const TuckerFactors r1 = hosvd(block, MlRank{std::vector<std::size_t>(block.order(), 1)});
            EXPECT_LE((block - tucker_reconstruct(r1)).norm(), 1e-10 * block.norm());
        }
    }
}

TEST(Hopls, StoredBlocksAreOrthonormal) {
    Rng rng(5);
    const DenseTensor x = random_tensor(Shape{12, 5, 4, 3}, rng), y = random_tensor(Shape{12, 4, 3}, rng);
    FitConfig cfg;
    cfg.components = 3;
    cfg.x_ranks = {3, 2, 2};
    cfg.y_ranks = {2, 3};
    const HoplsModel m = fit_checked(x, y, cfg);
    ASSERT_EQ(m.rank(), 3u);
    for (const HoplsComponent& c : m.components) {
        EXPECT_NEAR(c.t.norm(), 1.0, 1e-10);
        for (const Matrix& p : c.p) EXPECT_LE(orthonormality_error(p), 1e-10);
        for (const Matrix& q : c.q) EXPECT_LE(orthonormality_error(q), 1e-10);
        EXPECT_EQ(c.g.shape(), (Shape{1, 3, 2, 2}));
        EXPECT_EQ(c.d.shape(), (Shape{1, 2, 3}));
    }
}

TEST(Hopls, CoreNormProductIdentity) {
    Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const DenseTensor g = random_tensor(Shape{1, 3, 2}, rng), d = random_tensor(Shape{1, 2, 4}, rng);
        const double lhs = cross_cov_mode1(g, d).squared_norm();
        EXPECT_NEAR(lhs, g.squared_norm() * d.squared_norm(), 1e-8 * lhs);
    }
    const DenseTensor x = random_tensor(Shape{14, 5, 4}, rng), y = random_tensor(Shape{14, 4, 4}, rng);
    const HoplsModel m = fit_checked(x, y, lambda_config(5, 2, x, y, true));
    for (const HoplsComponent& c : m.components) {
        const double lhs = cross_cov_mode1(c.g, c.d).squared_norm();
        EXPECT_NEAR(lhs, c.g.squared_norm() * c.d.squared_norm(), 1e-8 * lhs);
    }
}

TEST(Hopls, ContractionCoreIsLeastSquaresOptimal) {
    Rng rng(7);
    const DenseTensor x = random_tensor(Shape{10, 5, 4}, rng), y = random_tensor(Shape{10, 3, 3}, rng);
    const HoplsModel m = fit_checked(x, y, lambda_config(1, 2, x, y, true));
    const HoplsComponent& c = m.components.at(0);
    const DenseTensor e = center_mode1(x).centered;
    std::vector<Matrix> f{c.t};
    f.insert(f.end(), c.p.begin(), c.p.end());
    const double base = (e - multilinear_product(c.g, f)).norm();
    for (int trial = 0; trial < 100; ++trial) {
        DenseTensor delta = random_tensor(c.g.shape(), rng);
        delta *= 1e-3 * c.g.norm() / delta.norm();
        EXPECT_GE((e - multilinear_product(c.g + delta, f)).norm(), base);
    }
}

TEST(Hopls, LatentVectorsAreNotForcedOrthogonal) {
    Rng rng(8);
    const DenseTensor x = random_tensor(Shape{12, 5, 5}, rng), y = random_tensor(Shape{12, 4, 4}, rng);
    const HoplsModel m = fit_checked(x, y, lambda_config(2, 2, x, y, true));
    ASSERT_EQ(m.rank(), 2u);
    EXPECT_GT(std::abs(m.components[0].t.dot(m.components[1].t)), 1e-3);
}

TEST(Hopls, TrainingPredictionEqualsModelSum) {
    Rng rng(9);
    const DenseTensor x = random_tensor(Shape{16, 5, 4}, rng), y = random_tensor(Shape{16, 3, 5}, rng);
    for (bool center : {false, true}) {
        const HoplsModel m = fit_checked(x, y, lambda_config(4, 2, x, y, center));
        DenseTensor sum(y.shape());
        for (const HoplsComponent& c : m.components) sum += y_block(c);
        if (center) sum = add_mode1_mean(sum, *m.y_mean);
        EXPECT_LE(max_abs_diff(predict_hopls(m, x), sum), 1e-10);
    }
}

TEST(Hopls, PredictionShapesAndMeanField) {
    Rng rng(10);
    const DenseTensor x = random_tensor(Shape{9, 4, 3}, rng), y = random_tensor(Shape{9, 2, 3}, rng);
    const HoplsModel m = fit_checked(x, y, lambda_config(2, 2, x, y, true));
    const DenseTensor at_mean = predict_hopls(m, *m.x_mean);
    EXPECT_LE(max_abs_diff(at_mean, *m.y_mean), 1e-12);
    const std::vector<std::size_t> one{3};
    EXPECT_EQ(predict_hopls(m, select_mode1(x, one)).shape(), (Shape{1, 2, 3}));
    EXPECT_THROW(predict_hopls(m, random_tensor(Shape{2, 3, 4}, rng)), DimensionError);
}

TEST(Hopls, ShapeErrors) {
    Rng rng(11);
    const DenseTensor x = random_tensor(Shape{6, 3, 3}, rng);
    EXPECT_THROW(fit_hopls(x, random_tensor(Shape{5, 2, 2}, rng), FitConfig::with_lambda(1, 1, x.shape(), Shape{5, 2, 2})),
                 DimensionError);
    EXPECT_THROW(fit_hopls(x, random_tensor(Shape{6, 2}, rng), FitConfig::with_lambda(1, 1, x.shape(), Shape{6, 2})),
                 DimensionError);
}

TEST(Hopls2, RankOneSelfConsistency) {
    Rng rng(12);
    const Vector t = random_matrix(8, 1, rng).col(0);
    const Matrix p2 = random_orthonormal(4, 1, rng), p3 = random_orthonormal(3, 1, rng);
    const DenseTensor x = tucker_reconstruct({DenseTensor(Shape{1, 1, 1}, {1.0}), {Matrix(t), p2, p3}});
    const Matrix y = 2.5 * t;
    FitConfig cfg = FitConfig::with_lambda(1, 1, x.shape(), Shape{8, 1});
    cfg.center = false;
    const Hopls2Model m = fit2_checked(x, y, cfg);
    ASSERT_EQ(m.rank(), 1u);
    const Hopls2Component& c = m.components[0];
    EXPECT_LE((c.d * c.t * c.q.transpose() - y).norm(), 1e-8 * y.norm());
    ASSERT_EQ(c.q.size(), 1);
    EXPECT_NEAR(std::abs(c.q(0)), 1.0, 1e-15);
    EXPECT_NEAR(c.t.norm(), 1.0, 1e-10);
}

TEST(Hopls2, MatrixResponseTrainingFit) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SynthDataset d = generate(SynthSpec::for_case("mr", kNoiseless, seed));
        const FitConfig cfg = FitConfig::with_lambda(5, 5, d.calibration.x.shape(), d.calibration.y.shape());
        const Hopls2Model m = fit2_checked(d.calibration.x, d.calibration.y.to_matrix(), cfg);
        const DenseTensor pred = DenseTensor::from_matrix(predict_hopls2(m, d.calibration.x));
        EXPECT_GE(q_squared(d.calibration.y, pred), 0.999) << "seed " << seed;
        for (const Hopls2Component& c : m.components) {
            EXPECT_NEAR(c.q.norm(), 1.0, 1e-10);
            EXPECT_NEAR(c.t.norm(), 1.0, 1e-10);
            for (const Matrix& p : c.p) EXPECT_LE(orthonormality_error(p), 1e-10);
        }
    }
}

TEST(Hopls2, SingleComponentMatchesLoop) {
    Rng rng(13);
    const DenseTensor x = random_tensor(Shape{7, 3, 4}, rng);
    const Matrix y = random_matrix(7, 2, rng);
    FitConfig cfg = FitConfig::with_lambda(1, 2, x.shape(), Shape{7, 2});
    cfg.center = false;
    const Hopls2Model m = fit2_checked(x, y, cfg);
    const Vector w = m.projection_weights().col(0);
    const Matrix x1 = matricize(x, 0);
    const Hopls2Component& c = m.components[0];
    Matrix expected(7, 2);
    for (Eigen::Index i = 0; i < 7; ++i) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < x1.cols(); ++k) s += x1(i, k) * w(k);
        for (Eigen::Index j = 0; j < 2; ++j) expected(i, j) = c.d * s * c.q(j);
    }
    EXPECT_LE(max_abs_diff(predict_hopls2(m, x), expected), 1e-12);
    EXPECT_LE((x1 * w - c.t).norm(), 1e-10);
}

TEST(Hopls2, ZeroRegressionScalarsPredictTheMean) {
    Rng rng(14);
    const DenseTensor x = random_tensor(Shape{9, 3, 3}, rng);
    const Matrix y = random_matrix(9, 3, rng);
    Hopls2Model m = fit2_checked(x, y, FitConfig::with_lambda(2, 2, x.shape(), Shape{9, 3}));
    for (Hopls2Component& c : m.components) c.d = 0.0;
    const Matrix pred = predict_hopls2(m, x);
    for (Eigen::Index i = 0; i < pred.rows(); ++i) EXPECT_LE((pred.row(i).transpose() - *m.y_mean).norm(), 1e-15);
}

TEST(Hopls2, TrainingPredictionEqualsModelSum) {
    Rng rng(15);
    const DenseTensor x = random_tensor(Shape{11, 4, 3}, rng);
    const Matrix y = random_matrix(11, 3, rng);
    FitConfig cfg = FitConfig::with_lambda(3, 2, x.shape(), Shape{11, 3});
    cfg.center = false;
    const Hopls2Model m = fit2_checked(x, y, cfg);
    Matrix sum = Matrix::Zero(11, 3);
    for (const Hopls2Component& c : m.components) sum += c.d * c.t * c.q.transpose();
    EXPECT_LE(max_abs_diff(predict_hopls2(m, x), sum), 1e-10);
}

TEST(Hopls2, UnitLoadingLatentVectorIsLeastSquares) {
    Rng rng(16);
    const Matrix y = random_matrix(8, 3, rng);
    const Vector q = random_matrix(3, 1, rng).col(0).normalized();
    const Vector t = y * q;
    // Least-squares oracle: minimize ||vec(Y) - (q (x) I) t|| over t.
    const Matrix design = kron(q, Matrix::Identity(8, 8));
    const Eigen::Map<const Vector> vec_y(y.data(), y.size());
    const Vector t_ls = design.colPivHouseholderQr().solve(vec_y);
    EXPECT_LE((t - t_ls).norm(), 1e-12 * t.norm());
    for (int trial = 0; trial < 20; ++trial) {
        const Vector other = t + 1e-3 * random_matrix(8, 1, rng).col(0);
        EXPECT_GE((y - other * q.transpose()).norm(), (y - t * q.transpose()).norm());
    }
}

TEST(Pls, IdentityRelation) {
    Rng rng(17);
    const Matrix x = random_matrix(6, 6, rng);
    const PlsModel m = fit_pls_nipals(x, x, 6, false);
    const DenseTensor truth = DenseTensor::from_matrix(x);
    EXPECT_GE(q_squared(truth, DenseTensor::from_matrix(predict_pls(m, x))), 0.999);
    EXPECT_TRUE(deflation_monotone(m.x_residual_norms, m.y_residual_norms));
}

TEST(Pls, SingleResponseWeightIsNormalizedCrossProduct) {
    Rng rng(18);
    const Matrix x = random_matrix(10, 4, rng);
    const Matrix y = random_matrix(10, 1, rng);
    const PlsModel m = fit_pls_nipals(x, y, 1, true);
    const Matrix xc = x.rowwise() - x.colwise().mean();
    const Matrix yc = y.rowwise() - y.colwise().mean();
    const Vector w = (xc.transpose() * yc).col(0).normalized();
    EXPECT_LE(std::min((m.w.col(0) - w).norm(), (m.w.col(0) + w).norm()), 1e-10);
}

TEST(Pls, LatentVectorsOrthogonalAndWeightsUnit) {
    Rng rng(19);
    const Matrix x = random_matrix(20, 8, rng), y = random_matrix(20, 3, rng);
    const PlsModel m = fit_pls_nipals(x, y, 5, true);
    ASSERT_EQ(m.rank(), 5u);
    const Matrix gram = m.t.transpose() * m.t;
    for (Eigen::Index i = 0; i < 5; ++i) {
        EXPECT_NEAR(m.w.col(i).norm(), 1.0, 1e-12);
        for (Eigen::Index j = 0; j < i; ++j)
            EXPECT_LE(std::abs(gram(i, j)), 1e-8 * std::sqrt(gram(i, i) * gram(j, j)));
    }
    EXPECT_TRUE(deflation_monotone(m.x_residual_norms, m.y_residual_norms));
    // Training scores are reproduced by the projection weights.
    const Matrix xc = x.rowwise() - m.x_mean.transpose();
    EXPECT_LE((xc * m.projection_weights() - m.t).norm(), 1e-9 * m.t.norm());
}

TEST(Pls, Errors) {
    Rng rng(20);
    const Matrix x = random_matrix(5, 3, rng);
    EXPECT_THROW(fit_pls_nipals(x, random_matrix(5, 2, rng), 0), DimensionError);
    EXPECT_THROW(fit_pls_nipals(x, random_matrix(5, 2, rng), 6), DimensionError);
    EXPECT_THROW(fit_pls_nipals(x, Matrix::Zero(5, 2), 1), NumericalError);
    EXPECT_THROW(fit_pls_nipals(x, random_matrix(4, 2, rng), 1), DimensionError);
}

TEST(AnyModel, NplsIsHoplsWithUnitLoadings) {
    Rng rng(21);
    const DenseTensor x = random_tensor(Shape{10, 4, 3}, rng), y = random_tensor(Shape{10, 3, 2}, rng);
    const AnyModel npls = fit_model(Algorithm::npls, x, y, 3, 7);
    const AnyModel hopls = fit_model(Algorithm::hopls, x, y, 3, 1);
    EXPECT_EQ(predict(npls, x), predict(hopls, x));
    EXPECT_TRUE(deflation_monotone(npls));
    EXPECT_EQ(model_rank(truncated(hopls, 2)), 2u);
    const AnyModel pls = fit_model(Algorithm::pls, x, y, 3, 1);
    EXPECT_EQ(predict(pls, x).shape(), y.shape());
    EXPECT_TRUE(deflation_monotone(pls));
    EXPECT_EQ(parse_algorithm("hopls2"), Algorithm::hopls2);
    EXPECT_THROW(parse_algorithm("cp"), std::invalid_argument);
}

TEST(AnyModel, TruncationMatchesShorterFit) {
    Rng rng(22);
    const DenseTensor x = random_tensor(Shape{12, 4, 4}, rng), y = random_tensor(Shape{12, 3, 3}, rng);
    for (Algorithm a : {Algorithm::hopls, Algorithm::pls}) {
        const AnyModel full = fit_model(a, x, y, 4, 2);
        const AnyModel short_fit = fit_model(a, x, y, 2, 2);
        EXPECT_EQ(predict(truncated(full, 2), x), predict(short_fit, x)) << to_string(a);
    }
}
