#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "dlcz/errors.hpp"
#include "dlcz/memory_model.hpp"

// Weighted least-squares fits for the three published curve shapes.
namespace dlcz::fit {

struct DataPoint {
    double x;
    double y;
    double sigma; // one standard deviation on y, must be positive
};

namespace detail {

inline void check_points(std::span<const DataPoint> pts) {
    for (const auto& p : pts)
        if (!(p.sigma > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.y) ||
            !std::isfinite(p.sigma))
            throw DomainError(
                "every data point needs finite values and a positive sigma");
}

struct ScalarMin {
    double x;
    int iterations;
    bool converged;
};

// Golden-section minimization on [lo, hi].  On ties the left edge advances,
// so plateaus at the boundary of the bracket are escaped.
template <class F>
ScalarMin golden_min(F f, double lo, double hi, double tol, int max_iter) {
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    int iters = 0;
    while (b - a > tol && iters < max_iter) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        ++iters;
    }
    return {0.5 * (a + b), iters, b - a <= tol};
}

} // namespace detail

// ── storage decay R(t) = R0 (exp(-(t/tau)^2) + exp(-t/tau)) / 2 ─────────

inline double decay_model(double t, double r0, double tau) {
    const double u = t / tau;
    return r0 * 0.5 * (std::exp(-u * u) + std::exp(-u));
}

inline double decay_d_r0(double t, double /*r0*/, double tau) {
    const double u = t / tau;
    return 0.5 * (std::exp(-u * u) + std::exp(-u));
}

inline double decay_d_tau(double t, double r0, double tau) {
    const double u = t / tau;
    return r0 * 0.5 * (std::exp(-u * u) * 2.0 * u * u + std::exp(-u) * u) /
           tau;
}

struct DecayFit {
    double r0;
    double tau0_us;
    double r0_sigma;
    double tau0_sigma;
    double residual_norm; // sqrt of the weighted sum of squared residuals
    int iterations;
    bool converged;
};

// The amplitude is linear in the model, so it is profiled out exactly and
// only the time constant is searched, on a log grid over [1, 1e6] us.
inline DecayFit fit_decay(std::span<const DataPoint> pts) {
    if (pts.size() < 2)
        throw DegenerateData("decay fit needs at least two points");
    detail::check_points(pts);

    auto amplitude_for = [&](double tau) {
        double syf = 0.0, sff = 0.0;
        for (const auto& p : pts) {
            const double w = 1.0 / (p.sigma * p.sigma);
            const double f = decay_d_r0(p.x, 1.0, tau);
            syf += w * p.y * f;
            sff += w * f * f;
        }
        return sff > 0.0 ? syf / sff : 0.0;
    };
    auto chi2_at = [&](double tau) {
        const double r0 = amplitude_for(tau);
        double chi2 = 0.0;
        for (const auto& p : pts) {
            const double res = (p.y - decay_model(p.x, r0, tau)) / p.sigma;
            chi2 += res * res;
        }
        return chi2;
    };

    const auto best = detail::golden_min(
        [&](double lg) { return chi2_at(std::pow(10.0, lg)); }, 0.0, 6.0,
        1e-10, 200);
    const double tau = std::pow(10.0, best.x);
    const double r0 = amplitude_for(tau);

    double a = 0.0, b = 0.0, c = 0.0, chi2 = 0.0;
    for (const auto& p : pts) {
        const double w = 1.0 / (p.sigma * p.sigma);
        const double jr = decay_d_r0(p.x, r0, tau);
        const double jt = decay_d_tau(p.x, r0, tau);
        a += w * jr * jr;
        b += w * jr * jt;
        c += w * jt * jt;
        const double res = (p.y - decay_model(p.x, r0, tau)) / p.sigma;
        chi2 += res * res;
    }
    const double det = a * c - b * b;
    if (!(det > 0.0) || !std::isfinite(det))
        throw DegenerateData("decay fit has a singular covariance");

    DecayFit fit;
    fit.r0 = r0;
    fit.tau0_us = tau;
    fit.r0_sigma = std::sqrt(c / det);
    fit.tau0_sigma = std::sqrt(a / det);
    fit.residual_norm = std::sqrt(chi2);
    fit.iterations = best.iterations;
    fit.converged = best.converged;
    return fit;
}

// ── correlation versus storage time, leakage fraction free ─────────────

struct G2FixedParams {
    double chi;
    double r0;
    double tau0_us;
    double finesse;
    double z_noise;
};

inline double g2_model(double t, double xi, const G2FixedParams& fx) {
    model::PhysicsParams p;
    p.chi = fx.chi;
    p.decay = {fx.r0, fx.tau0_us};
    p.finesse = fx.finesse;
    p.xi_se = xi;
    p.z_noise = fx.z_noise;
    return model::analytic_g2(p, t);
}

inline double g2_d_xi(double t, double xi, const G2FixedParams& fx) {
    const double r = model::retrieval_efficiency(t, {fx.r0, fx.tau0_us});
    const double a = model::cavity_enhancement(fx.finesse);
    const double denom = fx.chi * (r + (1.0 - r) * xi * a) + fx.z_noise;
    return -r * fx.chi * (1.0 - r) * a / (denom * denom);
}

struct G2Fit {
    double xi_se;
    double xi_sigma;
    double residual_norm;
    int iterations;
    bool converged;
    bool at_boundary; // optimum pinned to 0 or 1; value still reported
};

inline G2Fit fit_g2_curve(std::span<const DataPoint> pts,
                          const G2FixedParams& fixed) {
    if (pts.empty()) throw DegenerateData("correlation fit needs data");
    detail::check_points(pts);

    auto chi2_at = [&](double xi) {
        double chi2 = 0.0;
        for (const auto& p : pts) {
            const double res = (p.y - g2_model(p.x, xi, fixed)) / p.sigma;
            chi2 += res * res;
        }
        return chi2;
    };
    const auto best = detail::golden_min(chi2_at, 0.0, 1.0, 1e-9, 200);

    double sjj = 0.0;
    for (const auto& p : pts) {
        const double j = g2_d_xi(p.x, best.x, fixed);
        sjj += j * j / (p.sigma * p.sigma);
    }
    if (!(sjj > 0.0))
        throw DegenerateData("correlation fit is insensitive to the leakage");

    G2Fit fit;
    fit.xi_se = best.x;
    fit.xi_sigma = 1.0 / std::sqrt(sjj);
    fit.residual_norm = std::sqrt(chi2_at(best.x));
    fit.iterations = best.iterations;
    fit.converged = best.converged;
    fit.at_boundary = best.x <= 1e-7 || best.x >= 1.0 - 1e-7;
    return fit;
}

// ── proportionality through the origin ──────────────────────────────────

struct LinearFit {
    double slope;
    double slope_sigma;
    double residual_norm;
};

inline LinearFit fit_linear_origin(std::span<const DataPoint> pts) {
    if (pts.empty()) throw DegenerateData("proportionality fit needs data");
    detail::check_points(pts);
    double sxy = 0.0, sxx = 0.0;
    for (const auto& p : pts) {
        const double w = 1.0 / (p.sigma * p.sigma);
        sxy += w * p.x * p.y;
        sxx += w * p.x * p.x;
    }
    if (!(sxx > 0.0))
        throw DegenerateData("proportionality fit needs a nonzero abscissa");
    const double slope = sxy / sxx;
    double chi2 = 0.0;
    for (const auto& p : pts) {
        const double res = (p.y - slope * p.x) / p.sigma;
        chi2 += res * res;
    }
    return {slope, 1.0 / std::sqrt(sxx), std::sqrt(chi2)};
}

} // namespace dlcz::fit
