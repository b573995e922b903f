#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mhkelm/error.hpp"
#include "mhkelm/kernels.hpp"
#include "mhkelm/random.hpp"

namespace mhkelm {

using Profile = std::function<double(double)>;

// psi(x / a): one coordinate of the translation-invariant wavelet kernel.
inline Profile mexican_hat_profile(double a) {
    if (!(a > 0.0)) throw ConfigError("mexican_hat_profile: a must be positive");
    return [a](double x) { return detail::mother_unchecked(x / a); };
}

inline Profile gauss_profile(double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("gauss_profile: sigma must be positive");
    return [sigma](double x) { return std::exp(-x * x / (2.0 * sigma * sigma)); };
}

// 1-D profile of a translation-invariant family and its length scale.
inline std::pair<Profile, double> profile_for(const KernelSpec& spec) {
    spec.validate();
    switch (spec.family) {
    case KernelFamily::MexicanHatTI: return {mexican_hat_profile(spec.a), spec.a};
    case KernelFamily::Gauss: return {gauss_profile(spec.sigma), spec.sigma};
    default: break;
    }
    throw UsageError("kernel " + spec.describe() + " is not translation-invariant; Fourier admissibility does not apply");
}

// Profile sampled once on a symmetric Simpson grid, reusable across omegas.
class FourierSampler {
public:
    FourierSampler(const Profile& profile, double half_width, int n_points) {
        if (n_points < 1001 || n_points % 2 == 0)
            throw ConfigError("numeric_fourier_1d: n_points must be odd and >= 1001, got " + std::to_string(n_points));
        if (!(half_width > 0.0) || !std::isfinite(half_width))
            throw ConfigError("numeric_fourier_1d: half_width must be positive");
        const int n = n_points;
        step_ = 2.0 * half_width / (n - 1);
        x_.resize(static_cast<std::size_t>(n));
        w_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double x = -half_width + i * step_;
            const double kx = profile(x);
            if (i % 10 == 0) {
                const double kmx = profile(-x);
                if (std::abs(kx - kmx) > 1e-12)
                    throw UsageError("numeric_fourier_1d: profile is not even (K(" + std::to_string(x) +
                                     ") != K(-x))");
            }
            const double simpson = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            x_[static_cast<std::size_t>(i)] = x;
            w_[static_cast<std::size_t>(i)] = simpson * kx;
        }
    }

    // (2 pi)^(-1/2) * integral cos(omega x) K(x) dx
    double transform(double omega) const {
        double s = 0.0;
        for (std::size_t i = 0; i < x_.size(); ++i) s += w_[i] * std::cos(omega * x_[i]);
        return s * step_ / 3.0 / std::sqrt(2.0 * std::numbers::pi);
    }

private:
    double step_ = 0.0;
    std::vector<double> x_;
    std::vector<double> w_;
};

inline double numeric_fourier_1d(const Profile& profile, double omega, double half_width, int n_points) {
    return FourierSampler(profile, half_width, n_points).transform(omega);
}

// F(omega) = (2 pi)^D a^(3D) exp(-(a^2 / 2) sum omega_d^2) prod omega_d^2, the
// wavelet-kernel transform written with a (2 pi)^D prefactor. The 1-D numeric
// transform is F / (2 pi); see FourierCheckReport::proportionality_ratio.
inline double closed_form_ft(double a, std::span<const double> omega) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("closed_form_ft: a must be positive, got " + std::to_string(a));
    const double dim = static_cast<double>(omega.size());
    double sum_sq = 0.0;
    double prod_sq = 1.0;
    for (double w : omega) {
        sum_sq += w * w;
        prod_sq *= w * w;
    }
    return std::pow(2.0 * std::numbers::pi, dim) * std::pow(a, 3.0 * dim) * std::exp(-0.5 * a * a * sum_sq) * prod_sq;
}

inline double closed_form_ft(double a, double omega) { return closed_form_ft(a, std::span<const double>(&omega, 1)); }

enum class Verdict { Admissible, NotAdmissible, Inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Admissible: return "Admissible";
    case Verdict::NotAdmissible: return "NotAdmissible";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct FourierCheckReport {
    KernelSpec spec;
    double a = 0.0; // length scale: dilation for the wavelet, sigma for Gauss
    std::vector<double> omega_grid;
    std::vector<double> numeric_ft;
    std::vector<double> closed_form; // empty for Gauss
    double min_numeric_ft = 0.0;
    double max_numeric_ft = 0.0;
    // Median of numeric / closed_form where closed_form > 1e-12; NaN without a
    // closed form.
    double proportionality_ratio = std::numeric_limits<double>::quiet_NaN();
    Verdict verdict = Verdict::Inconclusive;
};

inline constexpr double kFourierRelativeTolerance = 1e-8;

inline Verdict fourier_verdict(double min_ft, double max_ft) {
    if (!(max_ft > 0.0)) return Verdict::Inconclusive;
    return min_ft >= -kFourierRelativeTolerance * max_ft ? Verdict::Admissible : Verdict::NotAdmissible;
}

// n_points evenly spaced omegas, both ends of [0, omega_max] included.
inline std::vector<double> omega_grid(double omega_max, int n_points) {
    if (n_points < 2 || !(omega_max > 0.0)) throw ConfigError("omega_grid: need >= 2 points and omega_max > 0");
    std::vector<double> g(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) g[static_cast<std::size_t>(i)] = omega_max * i / (n_points - 1);
    return g;
}

inline FourierCheckReport verify_admissibility(const KernelSpec& spec, std::span<const double> omegas,
                                               int n_points = 2001) {
    auto [profile, scale] = profile_for(spec);
    if (omegas.empty()) throw UsageError("verify_admissibility: empty omega grid");
    for (std::size_t i = 1; i < omegas.size(); ++i)
        if (!(omegas[i] > omegas[i - 1])) throw UsageError("verify_admissibility: omega grid must be strictly increasing");

    FourierCheckReport rep;
    rep.spec = spec;
    rep.a = scale;
    rep.omega_grid.assign(omegas.begin(), omegas.end());
    const FourierSampler sampler(profile, 10.0 * scale, n_points);
    rep.numeric_ft.reserve(omegas.size());
    for (double w : omegas) rep.numeric_ft.push_back(sampler.transform(w));
    rep.min_numeric_ft = *std::min_element(rep.numeric_ft.begin(), rep.numeric_ft.end());
    rep.max_numeric_ft = *std::max_element(rep.numeric_ft.begin(), rep.numeric_ft.end());

    if (spec.family == KernelFamily::MexicanHatTI) {
        std::vector<double> ratios;
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            const double cf = closed_form_ft(spec.a, omegas[i]);
            rep.closed_form.push_back(cf);
            if (cf > 1e-12) ratios.push_back(rep.numeric_ft[i] / cf);
        }
        if (!ratios.empty()) {
            std::sort(ratios.begin(), ratios.end());
            const std::size_t m = ratios.size() / 2;
            rep.proportionality_ratio = ratios.size() % 2 ? ratios[m] : 0.5 * (ratios[m - 1] + ratios[m]);
        }
    }
    rep.verdict = fourier_verdict(rep.min_numeric_ft, rep.max_numeric_ft);
    return rep;
}

// Largest relative deviation, from their median, of numeric_ft / (omega^2
// exp(-a^2 omega^2 / 2)) over the given omegas (all nonzero).
inline double wavelet_shape_deviation(double a, std::span<const double> omegas, int n_points = 2001) {
    const FourierSampler sampler(mexican_hat_profile(a), 10.0 * a, n_points);
    std::vector<double> ratios;
    for (double w : omegas) {
        if (w == 0.0) throw UsageError("wavelet_shape_deviation: omega must be nonzero");
        ratios.push_back(sampler.transform(w) / (w * w * std::exp(-0.5 * a * a * w * w)));
    }
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    double worst = 0.0;
    for (double r : ratios) worst = std::max(worst, std::abs(r - median) / std::abs(median));
    return worst;
}

struct PsdAuditSummary {
    double min_eigenvalue = std::numeric_limits<double>::infinity();
    double max_eigenvalue = -std::numeric_limits<double>::infinity();
    double worst_relative = std::numeric_limits<double>::infinity(); // min over seeds of lambda_min / lambda_max
    std::vector<double> per_seed_min;

    bool passes(double rel_tol = 1e-8) const { return worst_relative >= -rel_tol; }
};

// Smallest Gram eigenvalues over n_seeds random point clouds in [-1, 1]^D.
inline PsdAuditSummary psd_audit(const KernelSpec& spec, int n_points, int dim, int n_seeds, std::uint64_t base_seed = 0) {
    spec.validate();
    if (n_points < 1 || n_points > 200) throw ConfigError("psd_audit: n_points must be in [1, 200]");
    if (dim < 1 || n_seeds < 1) throw ConfigError("psd_audit: need D >= 1 and n_seeds >= 1");
    PsdAuditSummary s;
    for (int k = 0; k < n_seeds; ++k) {
        Rng rng(base_seed + static_cast<std::uint64_t>(k));
        Eigen::MatrixXd X(n_points, dim);
        for (int i = 0; i < n_points; ++i)
            for (int d = 0; d < dim; ++d) X(i, d) = rng.uniform(-1.0, 1.0);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_matrix(spec, X).values, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        s.per_seed_min.push_back(lo);
        s.min_eigenvalue = std::min(s.min_eigenvalue, lo);
        s.max_eigenvalue = std::max(s.max_eigenvalue, hi);
        s.worst_relative = std::min(s.worst_relative, hi > 0.0 ? lo / hi : lo);
    }
    return s;
}

} // namespace mhkelm
