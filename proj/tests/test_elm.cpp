#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mhkelm/elm.hpp"

using namespace mhkelm;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

double relative_difference(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) { return (x - y).norm() / y.norm(); }

} // namespace

TEST(HiddenLayer, DeterministicPerSeed) {
    const auto a = init_hidden_layer(3, 5, 7), b = init_hidden_layer(3, 5, 7);
    EXPECT_TRUE(a.W == b.W);
    EXPECT_TRUE(a.b == b.b);
    EXPECT_FALSE(init_hidden_layer(3, 5, 8).W == a.W);
}

TEST(HiddenLayer, ShapesAndRanges) {
    const auto l = init_hidden_layer(1, 1, 0);
    ASSERT_EQ(l.W.rows(), 1);
    ASSERT_EQ(l.W.cols(), 1);
    ASSERT_EQ(l.b.size(), 1);
    EXPECT_GE(l.W(0, 0), -1.0);
    EXPECT_LE(l.W(0, 0), 1.0);
    EXPECT_GE(l.b(0), 0.0);
    EXPECT_LE(l.b(0), 1.0);

    const auto big = init_hidden_layer(4, 100, 1);
    EXPECT_NEAR(big.W.mean(), 0.0, 0.1);
    EXPECT_GE(big.W.minCoeff(), -1.0);
    EXPECT_LE(big.W.maxCoeff(), 1.0);
    EXPECT_GE(big.b.minCoeff(), 0.0);
    EXPECT_LT(big.b.maxCoeff(), 1.0);
}

TEST(HiddenLayer, RejectsEmptyShapes) {
    EXPECT_THROW(init_hidden_layer(0, 3, 1), ConfigError);
    EXPECT_THROW(init_hidden_layer(3, 0, 1), ConfigError);
}

TEST(HiddenOutput, Examples) {
    HiddenLayer zero{Eigen::MatrixXd::Zero(2, 3), Eigen::VectorXd::Zero(3)};
    Rng rng(3);
    const Eigen::MatrixXd H0 = hidden_output_matrix(zero, random_matrix(rng, 4, 2));
    EXPECT_TRUE(H0.isApprox(Eigen::MatrixXd::Constant(4, 3, 0.5), 0.0));

    HiddenLayer unit{Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1)};
    EXPECT_EQ(hidden_output_matrix(unit, Eigen::MatrixXd::Zero(1, 1))(0, 0), 0.5);

    const auto layer = init_hidden_layer(3, 5, 9);
    const Eigen::MatrixXd X = random_matrix(rng, 4, 3);
    const Eigen::MatrixXd H = hidden_output_matrix(layer, X);
    double z = layer.b(3);
    for (int d = 0; d < 3; ++d) z += layer.W(d, 3) * X(2, d);
    EXPECT_NEAR(H(2, 3), 1.0 / (1.0 + std::exp(-z)), 1e-15);

    EXPECT_THROW(hidden_output_matrix(layer, random_matrix(rng, 4, 2)), ShapeError);
}

TEST(SolveOutputWeights, ScalarCase) {
    const double h = 0.8, t = -1.0, C = 3.0;
    const auto w = solve_output_weights(Eigen::MatrixXd::Constant(1, 1, h), Eigen::MatrixXd::Constant(1, 1, t), C);
    EXPECT_NEAR(w.beta(0, 0), h * t / (1.0 / C + h * h), 1e-15);
    EXPECT_EQ(w.form, SolveForm::SampleSpace);
}

TEST(SolveOutputWeights, BothFormsAgree) {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int N = 1 + static_cast<int>(rng.below(50));
        const int L = 1 + static_cast<int>(rng.below(50));
        const int M = 1 + static_cast<int>(rng.below(4));
        const double C = std::pow(10.0, rng.uniform(-2.0, 4.0));
        const Eigen::MatrixXd H = random_matrix(rng, N, L).array() * 0.5 + 0.5;
        const Eigen::MatrixXd T = random_matrix(rng, N, M);
        const auto s = solve_output_weights(H, T, C, SolveForm::SampleSpace);
        const auto f = solve_output_weights(H, T, C, SolveForm::FeatureSpace);
        EXPECT_LE(relative_difference(s.beta, f.beta), 1e-8) << "N=" << N << " L=" << L << " C=" << C;
        EXPECT_LE(s.relative_residual, kResidualTolerance);
        EXPECT_LE(f.relative_residual, kResidualTolerance);
    }
}

TEST(SolveOutputWeights, RidgeResidualMonotoneInC) {
    Rng rng(23);
    const Eigen::MatrixXd H = random_matrix(rng, 30, 12).array() * 0.5 + 0.5;
    const Eigen::MatrixXd T = random_matrix(rng, 30, 3);
    double previous = INFINITY;
    for (double C : {1e-2, 1e0, 1e2, 1e4, 1e6}) {
        const double r = (H * solve_output_weights(H, T, C).beta - T).norm();
        EXPECT_LE(r, previous * (1.0 + 1e-12)) << "C=" << C;
        previous = r;
    }
}

TEST(SolveOutputWeights, RejectsBadInput) {
    EXPECT_THROW(solve_output_weights(Eigen::MatrixXd::Ones(3, 2), Eigen::MatrixXd::Ones(2, 1), 1.0), ShapeError);
    EXPECT_THROW(solve_output_weights(Eigen::MatrixXd::Ones(3, 2), Eigen::MatrixXd::Ones(3, 1), 0.0), ConfigError);
    EXPECT_THROW(solve_output_weights(Eigen::MatrixXd::Ones(3, 2), Eigen::MatrixXd::Ones(3, 1), -1.0), ConfigError);
}

TEST(TrainElm, SeparableToy) {
    Eigen::MatrixXd X(4, 2);
    X << 0, 0, 0, 1, 3, 0, 3, 1;
    const std::vector<int> labels{5, 5, 9, 9};
    const auto model = train_elm(X, labels, 20, 1e6, 4);
    EXPECT_EQ(model.beta.rows(), 20);
    EXPECT_EQ(model.beta.cols(), 2);
    EXPECT_LE(model.solve_residual, kResidualTolerance);
    EXPECT_EQ(predict_elm(model, X), labels);

    const auto again = train_elm(X, labels, 20, 1e6, 4);
    EXPECT_TRUE(again.beta == model.beta);
}

TEST(TrainElm, SingleClassAlwaysPredicted) {
    Eigen::MatrixXd X(3, 1);
    X << 0.0, 1.0, 2.0;
    const std::vector<int> labels{4, 4, 4};
    const auto model = train_elm(X, labels, 5, 10.0, 1);
    Eigen::MatrixXd Q(1, 1);
    Q << -7.0;
    EXPECT_EQ(predict_elm(model, Q), std::vector<int>{4});
}

TEST(TrainElm, Errors) {
    Eigen::MatrixXd X(2, 1);
    X << 0.0, 1.0;
    const std::vector<int> labels{0, 1};
    EXPECT_THROW(train_elm(X, labels, 3, 0.0, 1), ConfigError);
    EXPECT_THROW(train_elm(X, std::vector<int>{0}, 3, 1.0, 1), ShapeError);
    const auto model = train_elm(X, labels, 3, 1.0, 1);
    EXPECT_THROW(predict_elm(model, Eigen::MatrixXd::Zero(1, 2)), ShapeError);
}

TEST(Argmax, TiesGoToLowestIndex) {
    Eigen::RowVectorXd r(3);
    r << 0.2, 0.2, 0.1;
    EXPECT_EQ(argmax_lowest(r), 0);
    r << -1.0, 0.5, 0.5;
    EXPECT_EQ(argmax_lowest(r), 1);
}
