#pragma once

#include <Eigen/Dense>

#include "mhkelm/error.hpp"

namespace mhkelm {

// Per-attribute min-max scaling to [-1, 1] fitted on training rows only.
// Constant attributes map to 0; unseen values extend the affine map and are
// not clipped.
struct Normalizer {
    Eigen::VectorXd min;
    Eigen::VectorXd max;

    static Normalizer fit(const Eigen::MatrixXd& X) {
        if (X.rows() < 1) throw ShapeError("Normalizer::fit: empty training matrix");
        return {X.colwise().minCoeff().transpose(), X.colwise().maxCoeff().transpose()};
    }

    Eigen::Index dimension() const { return min.size(); }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const {
        if (X.cols() != min.size())
            throw ShapeError("Normalizer::apply: expected " + std::to_string(min.size()) + " attributes, got " +
                             std::to_string(X.cols()));
        Eigen::MatrixXd out(X.rows(), X.cols());
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const double range = max(j) - min(j);
            if (range > 0.0)
                out.col(j) = (2.0 * (X.col(j).array() - min(j)) / range - 1.0).matrix();
            else
                out.col(j).setZero();
        }
        return out;
    }

    template <typename V>
    Eigen::RowVectorXd apply_row(const Eigen::MatrixBase<V>& x) const {
        if (x.size() != min.size())
            throw ShapeError("Normalizer::apply: expected " + std::to_string(min.size()) + " attributes, got " +
                             std::to_string(x.size()));
        Eigen::RowVectorXd out(x.size());
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            const double range = max(j) - min(j);
            out(j) = range > 0.0 ? 2.0 * (x(j) - min(j)) / range - 1.0 : 0.0;
        }
        return out;
    }
};

} // namespace mhkelm
