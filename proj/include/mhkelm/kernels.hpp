#pragma once

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "mhkelm/error.hpp"

namespace mhkelm {

enum class KernelFamily {
    Gauss,
    Poly,
    MexicanHatTI,  // translation-invariant product of wavelets of x_d - y_d
    MexicanHatDot, // dot-product form psi((x_d - c)/a) psi((y_d - c)/a)
};

inline std::string_view family_name(KernelFamily f) {
    switch (f) {
    case KernelFamily::Gauss: return "gauss";
    case KernelFamily::Poly: return "poly";
    case KernelFamily::MexicanHatTI: return "mhw";
    case KernelFamily::MexicanHatDot: return "mhw-dot";
    }
    return "?";
}

inline KernelFamily parse_family(std::string_view name) {
    if (name == "gauss") return KernelFamily::Gauss;
    if (name == "poly") return KernelFamily::Poly;
    if (name == "mhw") return KernelFamily::MexicanHatTI;
    if (name == "mhw-dot") return KernelFamily::MexicanHatDot;
    throw ConfigError("unknown kernel family '" + std::string(name) + "' (expected mhw, gauss, poly, mhw-dot)");
}

inline bool is_translation_invariant(KernelFamily f) {
    return f == KernelFamily::Gauss || f == KernelFamily::MexicanHatTI;
}

// Kernel family plus its hyperparameters. Only the fields belonging to the
// family are read.
struct KernelSpec {
    KernelFamily family = KernelFamily::MexicanHatTI;
    double a = 1.0;           // wavelet dilation
    double sigma = 1.0;       // Gauss width
    int degree = 2;           // polynomial exponent
    double c_translate = 0.0; // dot-product wavelet translation

    static KernelSpec mexican_hat(double a) { return {KernelFamily::MexicanHatTI, a, 1.0, 2, 0.0}; }
    static KernelSpec gauss(double sigma) { return {KernelFamily::Gauss, 1.0, sigma, 2, 0.0}; }
    static KernelSpec poly(int degree) { return {KernelFamily::Poly, 1.0, 1.0, degree, 0.0}; }
    static KernelSpec mexican_hat_dot(double a, double c) { return {KernelFamily::MexicanHatDot, a, 1.0, 2, c}; }

    void validate() const {
        switch (family) {
        case KernelFamily::MexicanHatTI:
        case KernelFamily::MexicanHatDot:
            if (!(a > 0.0) || !std::isfinite(a))
                throw ConfigError("wavelet dilation a must be positive, got " + std::to_string(a));
            if (!std::isfinite(c_translate))
                throw ConfigError("wavelet translation c must be finite");
            break;
        case KernelFamily::Gauss:
            if (!(sigma > 0.0) || !std::isfinite(sigma))
                throw ConfigError("Gauss width sigma must be positive, got " + std::to_string(sigma));
            break;
        case KernelFamily::Poly:
            if (degree < 1) throw ConfigError("polynomial degree must be >= 1, got " + std::to_string(degree));
            break;
        }
    }

    // Human-readable, e.g. "mhw(a=0.5)".
    std::string describe() const {
        char buf[96];
        switch (family) {
        case KernelFamily::MexicanHatTI: std::snprintf(buf, sizeof buf, "mhw(a=%g)", a); break;
        case KernelFamily::MexicanHatDot: std::snprintf(buf, sizeof buf, "mhw-dot(a=%g,c=%g)", a, c_translate); break;
        case KernelFamily::Gauss: std::snprintf(buf, sizeof buf, "gauss(sigma=%g)", sigma); break;
        case KernelFamily::Poly: std::snprintf(buf, sizeof buf, "poly(d=%d)", degree); break;
        }
        return buf;
    }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

// psi(x) = (1 - x^2) exp(-x^2 / 2)
inline double mexican_hat_mother(double x) {
    if (!std::isfinite(x)) throw DomainError("mexican_hat_mother: non-finite input");
    const double x2 = x * x;
    return (1.0 - x2) * std::exp(-0.5 * x2);
}

namespace detail {

inline double int_pow(double base, int exp) {
    double r = 1.0;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

inline double mother_unchecked(double x) {
    const double x2 = x * x;
    return (1.0 - x2) * std::exp(-0.5 * x2);
}

// No validation, no shape checks; callers have done both.
template <typename A, typename B>
double kernel_unchecked(const KernelSpec& spec, const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
    const Eigen::Index dim = x.size();
    switch (spec.family) {
    case KernelFamily::MexicanHatTI: {
        // prod_d (1 - u_d^2) * exp(-sum_d u_d^2 / 2), u_d = (x_d - y_d) / a
        double poly = 1.0;
        double s = 0.0;
        for (Eigen::Index d = 0; d < dim; ++d) {
            const double u = (x(d) - y(d)) / spec.a;
            const double u2 = u * u;
            poly *= 1.0 - u2;
            s += u2;
        }
        return poly * std::exp(-0.5 * s);
    }
    case KernelFamily::Gauss: {
        double s = 0.0;
        for (Eigen::Index d = 0; d < dim; ++d) {
            const double diff = x(d) - y(d);
            s += diff * diff;
        }
        return std::exp(-s / (2.0 * spec.sigma * spec.sigma));
    }
    case KernelFamily::Poly: {
        double dot = 0.0;
        for (Eigen::Index d = 0; d < dim; ++d) dot += x(d) * y(d);
        return int_pow(1.0 + dot, spec.degree);
    }
    case KernelFamily::MexicanHatDot: {
        double r = 1.0;
        for (Eigen::Index d = 0; d < dim; ++d) {
            r *= mother_unchecked((x(d) - spec.c_translate) / spec.a) *
                 mother_unchecked((y(d) - spec.c_translate) / spec.a);
        }
        return r;
    }
    }
    return 0.0;
}

} // namespace detail

template <typename A, typename B>
double eval_kernel(const KernelSpec& spec, const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
    spec.validate();
    if (x.size() != y.size())
        throw ShapeError("eval_kernel: dimension mismatch " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
    if (x.size() < 1) throw ShapeError("eval_kernel: empty vectors");
    if (!x.allFinite() || !y.allFinite()) throw DomainError("eval_kernel: non-finite input");
    return detail::kernel_unchecked(spec, x.derived(), y.derived());
}

struct GramMatrix {
    Eigen::MatrixXd values;
    KernelSpec spec;
};

// Omega = [K(x_i, x_j)] over the rows of X. Upper triangle is evaluated and
// mirrored, so the result is exactly symmetric.
inline GramMatrix gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X) {
    spec.validate();
    if (X.rows() < 1 || X.cols() < 1) throw ShapeError("gram_matrix: empty input");
    if (!X.allFinite()) throw DomainError("gram_matrix: non-finite input");
    const Eigen::Index n = X.rows();
    // Row-major copy keeps each sample contiguous.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = X;
    GramMatrix g{Eigen::MatrixXd(n, n), spec};
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double k = detail::kernel_unchecked(spec, rows.row(i), rows.row(j));
            g.values(i, j) = k;
            g.values(j, i) = k;
        }
    }
    return g;
}

// [K(x, x_1) ... K(x, x_N)]
template <typename V>
Eigen::VectorXd cross_kernel_vector(const KernelSpec& spec, const Eigen::MatrixXd& X, const Eigen::MatrixBase<V>& x) {
    spec.validate();
    if (x.size() != X.cols())
        throw ShapeError("cross_kernel_vector: query has dimension " + std::to_string(x.size()) + ", training rows have " +
                         std::to_string(X.cols()));
    if (!x.allFinite()) throw DomainError("cross_kernel_vector: non-finite query");
    Eigen::VectorXd k(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) k(i) = detail::kernel_unchecked(spec, x.derived(), X.row(i));
    return k;
}

// Q x N matrix of K(q_i, x_j) for batch prediction.
inline Eigen::MatrixXd cross_kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Q) {
    spec.validate();
    if (Q.cols() != X.cols())
        throw ShapeError("cross_kernel_matrix: query dimension " + std::to_string(Q.cols()) + " vs " +
                         std::to_string(X.cols()));
    if (!Q.allFinite()) throw DomainError("cross_kernel_matrix: non-finite query");
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> xr = X, qr = Q;
    Eigen::MatrixXd K(Q.rows(), X.rows());
    for (Eigen::Index j = 0; j < X.rows(); ++j)
        for (Eigen::Index i = 0; i < Q.rows(); ++i) K(i, j) = detail::kernel_unchecked(spec, qr.row(i), xr.row(j));
    return K;
}

} // namespace mhkelm
