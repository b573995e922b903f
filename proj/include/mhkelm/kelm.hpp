#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mhkelm/error.hpp"
#include "mhkelm/kernels.hpp"
#include "mhkelm/labels.hpp"
#include "mhkelm/linalg.hpp"
#include "mhkelm/normalize.hpp"

namespace mhkelm {

// Kernel ELM: f(x) = k(x)^T A with A = (I/C + Omega)^-1 T.
struct KelmModel {
    Eigen::MatrixXd x_train; // normalized training rows
    Eigen::MatrixXd coef;    // A, N x M
    KernelSpec spec;
    double C = 1.0;
    std::vector<int> classes;             // label value per output column
    std::vector<std::string> class_names; // optional, parallel to classes
    Normalizer norm;
    double solve_residual = 0.0;

    Eigen::Index num_classes() const { return coef.cols(); }
    Eigen::Index input_dim() const { return norm.dimension(); }
};

// General form: arbitrary N x M targets. Output columns are labelled 0..M-1.
inline KelmModel fit_kelm(const Eigen::MatrixXd& X, const Eigen::MatrixXd& targets, const KernelSpec& spec, double C) {
    spec.validate();
    check_penalty(C);
    if (X.rows() < 1) throw ShapeError("train_kelm: no training rows");
    if (targets.rows() != X.rows())
        throw ShapeError("train_kelm: " + std::to_string(targets.rows()) + " target rows for " + std::to_string(X.rows()) +
                         " samples");
    KelmModel model;
    model.spec = spec;
    model.C = C;
    model.norm = Normalizer::fit(X);
    model.x_train = model.norm.apply(X);
    const GramMatrix omega = gram_matrix(spec, model.x_train);
    auto s = solve_regularized(omega.values, targets, C, "kernel " + spec.describe());
    if (s.relative_residual > kResidualTolerance)
        throw NumericError("KELM solve residual " + std::to_string(s.relative_residual) + " exceeds tolerance for kernel " +
                           spec.describe());
    model.coef = std::move(s.solution);
    model.solve_residual = s.relative_residual;
    model.classes.resize(static_cast<std::size_t>(targets.cols()));
    for (std::size_t j = 0; j < model.classes.size(); ++j) model.classes[j] = static_cast<int>(j);
    return model;
}

inline KelmModel train_kelm_indexed(const Eigen::MatrixXd& X, std::span<const int> class_index, std::vector<int> classes,
                                    const KernelSpec& spec, double C) {
    if (static_cast<Eigen::Index>(class_index.size()) != X.rows())
        throw ShapeError("train_kelm: " + std::to_string(class_index.size()) + " labels for " + std::to_string(X.rows()) +
                         " rows");
    if (classes.empty()) throw ConfigError("train_kelm: at least one class required");
    auto model = fit_kelm(X, one_hot_targets(class_index, static_cast<int>(classes.size())), spec, C);
    model.classes = std::move(classes);
    return model;
}

inline KelmModel train_kelm(const Eigen::MatrixXd& X, std::span<const int> labels, const KernelSpec& spec, double C) {
    auto enc = encode_labels(labels);
    return train_kelm_indexed(X, enc.index, std::move(enc.classes), spec, C);
}

// Single signed output column (M = 1) for the sign decision rule; signs must
// be +1 or -1.
inline KelmModel train_kelm_binary(const Eigen::MatrixXd& X, std::span<const int> signs, const KernelSpec& spec, double C) {
    Eigen::MatrixXd T(static_cast<Eigen::Index>(signs.size()), 1);
    for (std::size_t i = 0; i < signs.size(); ++i) {
        if (signs[i] != 1 && signs[i] != -1) throw ConfigError("train_kelm_binary: targets must be +1 or -1");
        T(static_cast<Eigen::Index>(i), 0) = signs[i];
    }
    auto model = fit_kelm(X, T, spec, C);
    model.classes = {1};
    return model;
}

template <typename V>
Eigen::RowVectorXd predict_raw(const KelmModel& model, const Eigen::MatrixBase<V>& x) {
    const Eigen::RowVectorXd z = model.norm.apply_row(x);
    return cross_kernel_vector(model.spec, model.x_train, z).transpose() * model.coef;
}

inline Eigen::MatrixXd predict_raw_batch(const KelmModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.input_dim())
        throw ShapeError("predict: model expects " + std::to_string(model.input_dim()) + " attributes, got " +
                         std::to_string(X.cols()));
    return cross_kernel_matrix(model.spec, model.x_train, model.norm.apply(X)) * model.coef;
}

// Zero maps to +1.
inline int sign_decision(double value) { return value >= 0.0 ? 1 : -1; }

// M = 1: sign of the single output. M = 2: sign of out[1] - out[0], so +1
// selects the second class.
template <typename V>
int classify_binary(const KelmModel& model, const Eigen::MatrixBase<V>& x) {
    if (model.num_classes() > 2)
        throw UsageError("classify_binary: model has " + std::to_string(model.num_classes()) + " outputs; use classify_multiclass");
    const Eigen::RowVectorXd out = predict_raw(model, x);
    return sign_decision(out.size() == 1 ? out(0) : out(1) - out(0));
}

inline std::vector<int> classify_multiclass(const KelmModel& model, const Eigen::MatrixXd& X) {
    const Eigen::MatrixXd out = predict_raw_batch(model, X);
    std::vector<int> pred(static_cast<std::size_t>(out.rows()));
    for (Eigen::Index i = 0; i < out.rows(); ++i) pred[static_cast<std::size_t>(i)] = model.classes[argmax_lowest(out.row(i))];
    return pred;
}

// Recomputes ||(I/C + Omega) A - T||_F / ||T||_F from the stored training rows.
inline double kelm_residual(const KelmModel& model, const Eigen::MatrixXd& targets) {
    Eigen::MatrixXd system = gram_matrix(model.spec, model.x_train).values;
    system.diagonal().array() += 1.0 / model.C;
    const double tn = targets.norm();
    const double r = (system * model.coef - targets).norm();
    return tn > 0.0 ? r / tn : r;
}

} // namespace mhkelm
