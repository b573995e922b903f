#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mhkelm/error.hpp"
#include "mhkelm/labels.hpp"
#include "mhkelm/linalg.hpp"
#include "mhkelm/normalize.hpp"
#include "mhkelm/random.hpp"

namespace mhkelm {

enum class Activation { Sigmoid };

struct HiddenLayer {
    Eigen::MatrixXd W; // D x L input weights
    Eigen::VectorXd b; // L biases
    Activation activation = Activation::Sigmoid;

    Eigen::Index input_dim() const { return W.rows(); }
    Eigen::Index width() const { return W.cols(); }
};

// W ~ U[-1, 1] drawn column by column (hidden node j, then attribute d),
// followed by b ~ U[0, 1].
inline HiddenLayer init_hidden_layer(int input_dim, int hidden, std::uint64_t seed) {
    if (input_dim < 1 || hidden < 1)
        throw ConfigError("init_hidden_layer: need D >= 1 and L >= 1, got D=" + std::to_string(input_dim) +
                          " L=" + std::to_string(hidden));
    Rng rng(seed);
    HiddenLayer layer{Eigen::MatrixXd(input_dim, hidden), Eigen::VectorXd(hidden), Activation::Sigmoid};
    for (int j = 0; j < hidden; ++j)
        for (int d = 0; d < input_dim; ++d) layer.W(d, j) = rng.uniform(-1.0, 1.0);
    for (int j = 0; j < hidden; ++j) layer.b(j) = rng.uniform(0.0, 1.0);
    return layer;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// H(i, j) = g(w_j . x_i + b_j)
inline Eigen::MatrixXd hidden_output_matrix(const HiddenLayer& layer, const Eigen::MatrixXd& X) {
    if (X.cols() != layer.input_dim())
        throw ShapeError("hidden_output_matrix: X has " + std::to_string(X.cols()) + " columns, layer expects " +
                         std::to_string(layer.input_dim()));
    Eigen::MatrixXd H = X * layer.W;
    H.rowwise() += layer.b.transpose();
    return H.unaryExpr([](double z) { return sigmoid(z); });
}

enum class SolveForm {
    Auto,         // SampleSpace when L >= N, FeatureSpace otherwise
    SampleSpace,  // beta = H^T (I/C + H H^T)^-1 T, an N x N system
    FeatureSpace, // beta = (I/C + H^T H)^-1 H^T T, an L x L system
};

struct OutputWeights {
    Eigen::MatrixXd beta;
    double relative_residual = 0.0;
    SolveForm form = SolveForm::Auto;
};

inline OutputWeights solve_output_weights(const Eigen::MatrixXd& H, const Eigen::MatrixXd& T, double C,
                                          SolveForm form = SolveForm::Auto) {
    if (H.rows() != T.rows())
        throw ShapeError("solve_output_weights: H has " + std::to_string(H.rows()) + " rows, T has " +
                         std::to_string(T.rows()));
    if (form == SolveForm::Auto) form = H.cols() >= H.rows() ? SolveForm::SampleSpace : SolveForm::FeatureSpace;
    OutputWeights out;
    out.form = form;
    if (form == SolveForm::SampleSpace) {
        const Eigen::MatrixXd HHt = H * H.transpose();
        auto s = solve_regularized(HHt, T, C, "ELM hidden layer (N-form)");
        out.beta = H.transpose() * s.solution;
        out.relative_residual = s.relative_residual;
    } else {
        const Eigen::MatrixXd HtH = H.transpose() * H;
        const Eigen::MatrixXd HtT = H.transpose() * T;
        auto s = solve_regularized(HtH, HtT, C, "ELM hidden layer (L-form)");
        out.beta = std::move(s.solution);
        out.relative_residual = s.relative_residual;
    }
    return out;
}

struct ElmModel {
    HiddenLayer layer;
    Eigen::MatrixXd beta; // L x M
    double C = 1.0;
    std::vector<int> classes;             // label value per output column
    std::vector<std::string> class_names; // optional display names, parallel to classes
    Normalizer norm;
    double solve_residual = 0.0;

    Eigen::Index num_classes() const { return beta.cols(); }
};

// Trains on class indices in [0, classes.size()).
inline ElmModel train_elm_indexed(const Eigen::MatrixXd& X, std::span<const int> class_index, std::vector<int> classes,
                                  int hidden, double C, std::uint64_t seed) {
    check_penalty(C);
    if (X.rows() < 1) throw ShapeError("train_elm: no training rows");
    if (static_cast<Eigen::Index>(class_index.size()) != X.rows())
        throw ShapeError("train_elm: " + std::to_string(class_index.size()) + " labels for " + std::to_string(X.rows()) +
                         " rows");
    if (classes.empty()) throw ConfigError("train_elm: at least one class required");
    ElmModel model;
    model.C = C;
    model.norm = Normalizer::fit(X);
    model.layer = init_hidden_layer(static_cast<int>(X.cols()), hidden, seed);
    const Eigen::MatrixXd H = hidden_output_matrix(model.layer, model.norm.apply(X));
    const Eigen::MatrixXd T = one_hot_targets(class_index, static_cast<int>(classes.size()));
    auto w = solve_output_weights(H, T, C);
    if (w.relative_residual > kResidualTolerance)
        throw NumericError("ELM solve residual " + std::to_string(w.relative_residual) + " exceeds tolerance");
    model.beta = std::move(w.beta);
    model.solve_residual = w.relative_residual;
    model.classes = std::move(classes);
    return model;
}

// Labels are arbitrary integers; output columns follow their ascending order.
inline ElmModel train_elm(const Eigen::MatrixXd& X, std::span<const int> labels, int hidden, double C, std::uint64_t seed) {
    auto enc = encode_labels(labels);
    return train_elm_indexed(X, enc.index, std::move(enc.classes), hidden, C, seed);
}

// Raw network output f(x) = h(x) beta for each row of X.
inline Eigen::MatrixXd elm_output(const ElmModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.norm.dimension())
        throw ShapeError("predict_elm: model expects " + std::to_string(model.norm.dimension()) + " attributes, got " +
                         std::to_string(X.cols()));
    return hidden_output_matrix(model.layer, model.norm.apply(X)) * model.beta;
}

inline std::vector<int> predict_elm(const ElmModel& model, const Eigen::MatrixXd& X) {
    const Eigen::MatrixXd out = elm_output(model, X);
    std::vector<int> pred(static_cast<std::size_t>(out.rows()));
    for (Eigen::Index i = 0; i < out.rows(); ++i) pred[static_cast<std::size_t>(i)] = model.classes[argmax_lowest(out.row(i))];
    return pred;
}

} // namespace mhkelm
