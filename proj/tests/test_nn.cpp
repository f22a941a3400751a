#include <gtest/gtest.h>

#include <cmath>

#include "kmixup/kmixup.hpp"
#include "oracles.hpp"

using namespace kmixup;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& gen) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = standard_normal(gen);
    return m;
}

Eigen::MatrixXd random_soft_labels(Eigen::Index classes, Eigen::Index cols, Rng& gen) {
    Eigen::MatrixXd y(classes, cols);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = uniform01(gen) + 0.01;
    for (Eigen::Index c = 0; c < cols; ++c) y.col(c) /= y.col(c).sum();
    return y;
}

MlpModel small_model(std::uint64_t seed) {
    MlpModel m = init_mlp({4, 12, 10, 3}, seed);
    Rng gen = make_stream(seed, 99);
    for (auto& b : m.biases)
        for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = 0.1 * standard_normal(gen);
    return m;
}

}  // namespace

TEST(Mlp, ShapesAndParameterCount) {
    const MlpModel m = init_mlp({2, 130, 120, 2}, 1);
    EXPECT_EQ(m.num_layers(), 3u);
    EXPECT_EQ(m.parameter_count(), 2u * 130 + 130 + 130 * 120 + 120 + 120 * 2 + 2);
    EXPECT_NO_THROW(m.validate());
    EXPECT_THROW(MlpModel::zeros({3}), ShapeError);
    EXPECT_THROW(MlpModel::zeros({3, 0, 2}), ShapeError);
}

TEST(Mlp, GlorotBounds) {
    const MlpModel m = init_mlp({5, 7, 3}, 2);
    EXPECT_LE(m.weights[0].cwiseAbs().maxCoeff(), std::sqrt(6.0 / 12.0));
    EXPECT_LE(m.weights[1].cwiseAbs().maxCoeff(), std::sqrt(6.0 / 10.0));
    EXPECT_EQ(m.biases[0].cwiseAbs().maxCoeff(), 0.0);
}

TEST(Forward, ZeroModelGivesZeroLogits) {
    const MlpModel m = MlpModel::zeros({3, 4, 2});
    EXPECT_EQ(forward(m, Eigen::Vector3d(1, -2, 3)), Eigen::Vector2d::Zero());
}

TEST(Forward, IdentityLayer) {
    MlpModel m = MlpModel::zeros({3, 3});
    m.weights[0].setIdentity();
    m.biases[0] << 1, 2, 3;
    EXPECT_EQ(forward(m, Eigen::Vector3d(-1, 0, 4)), Eigen::Vector3d(0, 2, 7));
}

TEST(Forward, MatchesReferenceImplementation) {
    Rng gen = make_stream(3);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const MlpModel m = small_model(seed);
        const Eigen::VectorXd x = random_matrix(4, 1, gen);
        const auto ref = oracle::reference_forward(m, {x.data(), x.data() + 4});
        const Eigen::VectorXd z = forward(m, x);
        for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(z(static_cast<Eigen::Index>(c)), ref[c], 1e-12);
    }
}

TEST(Forward, RejectsWrongInputWidth) {
    EXPECT_THROW(forward(init_mlp({3, 4, 2}, 1), Eigen::Vector2d(1, 1)), ShapeError);
}

TEST(Loss, UniformLogitsGiveLogTwo) {
    const MlpModel m = MlpModel::zeros({2, 2});
    const auto lg = loss_and_grads(m, Eigen::Vector2d(0.3, -0.7), Eigen::Vector2d(1, 0));
    EXPECT_NEAR(lg.loss, std::log(2.0), 1e-15);
}

TEST(Loss, OutputGradientIsSoftmaxMinusLabel) {
    MlpModel m = MlpModel::zeros({2, 3});
    m.weights[0] << 1, 2, -1, 0.5, 0, 3;
    const Eigen::Vector2d x(0.2, -0.4);
    const Eigen::Vector3d y(0.2, 0.5, 0.3);
    const auto lg = loss_and_grads(m, x, y);
    const Eigen::VectorXd p = softmax(forward(m, x));
    EXPECT_LT((lg.grads.biases[0] - (p - y)).norm(), 1e-14);

    const auto at_optimum = loss_and_grads(m, x, p);
    EXPECT_LT(at_optimum.grads.biases[0].norm(), 1e-15);
}

TEST(Loss, MatchesReferenceLoss) {
    Rng gen = make_stream(4);
    const MlpModel m = small_model(4);
    const Eigen::MatrixXd x = random_matrix(4, 6, gen);
    const Eigen::MatrixXd y = random_soft_labels(3, 6, gen);
    EXPECT_NEAR(loss_and_grads(m, x, y).loss, oracle::reference_loss(m, x, y), 1e-12);
}

TEST(Loss, ClampIsHonouredInValueAndGradient) {
    MlpModel m = MlpModel::zeros({1, 2});
    m.biases[0] << 40.0, 0.0;  // log p_1 = -40 < log 1e-12
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.0);
    const auto lg = loss_and_grads(m, x, Eigen::Vector2d(0.5, 0.5));
    // Class 0 has log p = -log1p(e^-40); class 1 is clamped at log 1e-12.
    EXPECT_NEAR(lg.loss, 0.5 * std::log1p(std::exp(-40.0)) - 0.5 * std::log(1e-12), 1e-12);
    const auto fd = oracle::finite_difference_check(m, x, Eigen::Vector2d(0.5, 0.5));
    EXPECT_EQ(fd.failures, 0u);
}

TEST(Loss, FiniteDifferenceGradients) {
    Rng gen = make_stream(5);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const MlpModel m = small_model(seed);
        ASSERT_LE(m.parameter_count(), 500u);
        const Eigen::MatrixXd x = random_matrix(4, 5, gen);
        const Eigen::MatrixXd y = random_soft_labels(3, 5, gen);
        const auto fd = oracle::finite_difference_check(m, x, y);
        EXPECT_EQ(fd.checked, m.parameter_count());
        EXPECT_EQ(fd.failures, 0u) << "worst relative error " << fd.worst_relative;
    }
}

TEST(Loss, InputGradientMatchesFiniteDifference) {
    Rng gen = make_stream(6);
    const MlpModel m = small_model(6);
    Eigen::MatrixXd x = random_matrix(4, 1, gen);
    const Eigen::MatrixXd y = random_soft_labels(3, 1, gen);
    const auto lg = loss_and_grads(m, x, y, true);
    for (Eigen::Index i = 0; i < 4; ++i) {
        const double saved = x(i);
        x(i) = saved + 1e-5;
        const double up = oracle::reference_loss(m, x, y);
        x(i) = saved - 1e-5;
        const double down = oracle::reference_loss(m, x, y);
        x(i) = saved;
        EXPECT_NEAR(lg.grads.inputs(i, 0), (up - down) / 2e-5, 1e-7 + 1e-4 * std::abs(lg.grads.inputs(i, 0)));
    }
}

TEST(Loss, LambdaOneEqualsGammaParentLoss) {
    const Dataset d = gen_one_ring(40, 0.1, 7);
    const MlpModel m = init_mlp({2, 8, 2}, 7);
    KBatch gamma = make_batch(d, std::vector<std::size_t>{0, 1, 2});
    KBatch xi = make_batch(d, std::vector<std::size_t>{3, 4, 5});
    const auto mixed = displacement_interpolate(gamma, xi, solve_assignment(cost_matrix(gamma, xi)), 1.0);
    EXPECT_EQ(loss_and_grads(m, mixed).loss, loss_and_grads(m, gamma.points).loss);
}

TEST(Evaluate, ConstantPredictorOnSingleClass) {
    MlpModel m = MlpModel::zeros({2, 3});
    m.biases[0] << 0, 0, 1;
    Dataset d;
    d.dim = 2;
    d.classes = 3;
    for (int i = 0; i < 10; ++i) d.push_back(Eigen::Vector2d(i, -i), 2);
    EXPECT_EQ(evaluate(m, d), 1.0);
}

TEST(Evaluate, ChanceLevelOnRandomLabels) {
    Rng gen = make_stream(8);
    Dataset d;
    d.dim = 3;
    d.classes = 2;
    for (int i = 0; i < 10000; ++i)
        d.push_back(Eigen::Vector3d(standard_normal(gen), standard_normal(gen), standard_normal(gen)),
                    uniform_index(gen, 2));
    EXPECT_NEAR(evaluate(init_mlp({3, 16, 2}, 8), d), 0.5, 0.02);
}

TEST(Evaluate, PerfectSeparator) {
    MlpModel m = MlpModel::zeros({1, 2});
    m.weights[0] << -1, 1;
    Dataset d;
    d.dim = 1;
    d.classes = 2;
    for (double v : {-3.0, -1.0, 0.5, 2.0}) d.push_back(Eigen::VectorXd::Constant(1, v), v > 0 ? 1 : 0);
    EXPECT_EQ(evaluate(m, d), 1.0);
    EXPECT_THROW(evaluate(m, Dataset{}), InputError);
}

TEST(Fgsm, ZeroEpsilonIsIdentity) {
    const MlpModel m = small_model(9);
    const Eigen::Vector4d x(0.1, 0.2, 0.3, 0.4);
    EXPECT_EQ(fgsm_attack(m, x, Eigen::Vector3d(1, 0, 0), 0.0), Eigen::VectorXd(x));
    const Dataset d = gen_clusters(simplex_cluster_spec(3, 4, 3.0, 1.0), 100, 9);
    EXPECT_EQ(adversarial_accuracy(m, d, 0.0), evaluate(m, d));
    EXPECT_THROW(fgsm_attack(m, x, Eigen::Vector3d(1, 0, 0), -0.1), ParameterError);
}

TEST(Fgsm, SignStructure) {
    Rng gen = make_stream(10);
    const MlpModel m = small_model(10);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::VectorXd x = random_matrix(4, 1, gen);
        const Eigen::VectorXd adv = fgsm_attack(m, x, Eigen::Vector3d(0, 1, 0), 0.05);
        for (Eigen::Index i = 0; i < 4; ++i) {
            const double d = adv(i) - x(i);
            EXPECT_TRUE(d == 0.0 || std::abs(std::abs(d) - 0.05) < 1e-15) << d;
        }
    }
}

TEST(Fgsm, IncreasesLossOnLinearModel) {
    MlpModel m = MlpModel::zeros({2, 2});
    m.weights[0] << 1, 0, 0, 1;
    const Eigen::Vector2d x(0.3, 0.1), y(1, 0);
    const Eigen::VectorXd adv = fgsm_attack(m, x, y, 0.1);
    EXPECT_LT((adv - Eigen::Vector2d(0.2, 0.2)).norm(), 1e-15);
    EXPECT_GT(loss_and_grads(m, adv, y).loss, loss_and_grads(m, x, y).loss);
}

TEST(TrainConfigTest, ScheduleAndValidation) {
    TrainConfig cfg;
    EXPECT_DOUBLE_EQ(cfg.learning_rate_at(0), 0.1);
    EXPECT_DOUBLE_EQ(cfg.learning_rate_at(100), 0.1 * 0.1);
    EXPECT_NEAR(cfg.learning_rate_at(199), 0.1 * 0.01, 1e-15);
    cfg.learning_rate = -1;
    EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(Train, TinyAlphaKOneLearnsSeparableClusters) {
    const Dataset data = gen_clusters(two_cluster_spec(2, 2.0, 1.0, 1.0), 500, 11);
    const auto [tr, te] = split_stratified(data, 0.8, 11);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.mixup = MixupConfig{1, 1e-6, 11};
    cfg.seed = 11;
    const TrainResult res = train(tr, te, cfg);
    ASSERT_EQ(res.history.size(), 50u);
    EXPECT_GE(res.history.back().test_acc, 0.99);
}

TEST(Train, DeterministicForFixedSeed) {
    const Dataset data = gen_one_ring(200, 0.1, 12);
    const auto [tr, te] = split_stratified(data, 0.8, 12);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.hidden = {16, 16};
    cfg.mixup = MixupConfig{4, 2.0, 12};
    cfg.seed = 12;
    const TrainResult a = train(tr, te, cfg);
    const TrainResult b = train(tr, te, cfg);
    for (std::size_t l = 0; l < a.model.num_layers(); ++l) {
        EXPECT_EQ(a.model.weights[l], b.model.weights[l]);
        EXPECT_EQ(a.model.biases[l], b.model.biases[l]);
    }
    for (std::size_t e = 0; e < 5; ++e) EXPECT_EQ(a.history[e].train_loss, b.history[e].train_loss);
}

TEST(Train, RejectsTooSmallDataset) {
    const Dataset data = gen_one_ring(20, 0.1, 13);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.mixup = MixupConfig{16, 1.0, 0};
    EXPECT_THROW(train(data, data, cfg), DatasetTooSmall);
}
