#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "mhkelm/error.hpp"

namespace mhkelm {

inline constexpr double kResidualTolerance = 1e-6;

struct RegularizedSolve {
    Eigen::MatrixXd solution;
    double relative_residual = 0.0; // ||(I/C + K) X - T||_F / ||T||_F
};

inline void check_penalty(double C) {
    if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError("penalty factor C must be positive and finite, got " + std::to_string(C));
}

// Solves (I/C + K) X = T for symmetric K by Cholesky, followed by one step of
// iterative refinement. `what` names the operator in failure messages.
inline RegularizedSolve solve_regularized(const Eigen::MatrixXd& K, const Eigen::MatrixXd& T, double C, std::string_view what) {
    check_penalty(C);
    if (K.rows() != K.cols() || K.rows() != T.rows())
        throw ShapeError("solve_regularized: system is " + std::to_string(K.rows()) + "x" + std::to_string(K.cols()) +
                         ", targets have " + std::to_string(T.rows()) + " rows");
    Eigen::MatrixXd system = K;
    system.diagonal().array() += 1.0 / C;
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success)
        throw NumericError("Cholesky factorization of I/C + Gram failed for " + std::string(what) +
                           " (matrix is not positive definite; kernel may be inadmissible)");
    RegularizedSolve out;
    out.solution = llt.solve(T);
    Eigen::MatrixXd r = T - system * out.solution;
    out.solution += llt.solve(r);
    r.noalias() = T - system * out.solution;
    const double tnorm = T.norm();
    out.relative_residual = tnorm > 0.0 ? r.norm() / tnorm : r.norm();
    if (!std::isfinite(out.relative_residual))
        throw NumericError("non-finite solution for " + std::string(what));
    return out;
}

} // namespace mhkelm
