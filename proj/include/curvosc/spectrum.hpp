#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "curvosc/jacobi.hpp"
#include "curvosc/model.hpp"
#include "curvosc/quadrature.hpp"

namespace curvosc {

/// One radial-angular eigenstate label. mu = +sqrt(m^2 + k) and the
/// principal label n = 2 n_r + mu is generally non-integer; it is kept
/// exact, never rounded. E_n = (n + 1)(-lambda n / 2 + beta).
struct QuantumLevel {
    int n_r;
    int m;
    double mu;
    double n;
    double energy;
    bool normalizable;
};

/// Upper bound on n for normalizable states on the spherical side
/// (lambda > 0): n < beta/lambda - 1/2. No bound for lambda < 0.
inline double normalizability_bound(const ModelParams& p) {
    return p.lambda > 0.0 ? p.beta / p.lambda - 0.5
                          : std::numeric_limits<double>::infinity();
}

inline QuantumLevel energy_level(const ModelParams& p, int n_r, int m) {
    if (n_r < 0) throw std::invalid_argument("energy_level: n_r must be >= 0");
    const double mu = std::sqrt(static_cast<double>(m) * m + p.k);
    const double n = 2.0 * n_r + mu;
    const double energy = (n + 1.0) * (-0.5 * p.lambda * n + p.beta);
    const bool normalizable = n < normalizability_bound(p);
    return QuantumLevel{n_r, m, mu, n, energy, normalizable};
}

/// Jacobi parameters of the radial eigenfunction: P_{n_r}^{(mu, b)} with
/// b = -beta/lambda - 1/2, evaluated at x = 1 + 2 lambda r^2.
inline double jacobi_b_parameter(const ModelParams& p) { return -p.beta / p.lambda - 0.5; }

/// Unnormalized radial shape (1+lambda r^2)^(-beta/(2 lambda)) r^mu P(x).
inline double radial_shape(const ModelParams& p, const QuantumLevel& lv, double r) {
    if (!p.r_in_domain(r)) throw std::domain_error("radial_shape: r outside radial domain");
    const double u = r * r;
    const double w = std::pow(1.0 + p.lambda * u, -p.beta / (2.0 * p.lambda));
    const double q = jacobi(lv.n_r, lv.mu, jacobi_b_parameter(p), 1.0 + 2.0 * p.lambda * u);
    return w * std::pow(r, lv.mu) * q;
}

struct ShapeDerivatives {
    double value;
    double d1;
    double d2;
};

/// Shape together with its first two r-derivatives, all analytic
/// (product rule over the three factors; Jacobi derivatives by the
/// parameter-shift identity).
inline ShapeDerivatives radial_shape_derivatives(const ModelParams& p, const QuantumLevel& lv,
                                                 double r) {
    if (!p.r_in_domain(r))
        throw std::domain_error("radial_shape_derivatives: r outside radial domain");
    const double lam = p.lambda, beta = p.beta, mu = lv.mu;
    const double u = r * r;
    const double om = 1.0 + lam * u;
    const double b = jacobi_b_parameter(p);
    const double x = 1.0 + 2.0 * lam * u;

    const double w = std::pow(om, -beta / (2.0 * lam));
    const double w1 = -beta * r * std::pow(om, -beta / (2.0 * lam) - 1.0);
    const double w2 = -beta * std::pow(om, -beta / (2.0 * lam) - 1.0) +
                      beta * (beta + 2.0 * lam) * u * std::pow(om, -beta / (2.0 * lam) - 2.0);

    const double pw = std::pow(r, mu);
    const double p1 = mu * std::pow(r, mu - 1.0);
    const double p2 = mu * (mu - 1.0) * std::pow(r, mu - 2.0);

    const double q = jacobi(lv.n_r, mu, b, x);
    const double qx = jacobi_derivative(lv.n_r, mu, b, x, 1);
    const double qxx = jacobi_derivative(lv.n_r, mu, b, x, 2);
    const double q1 = qx * 4.0 * lam * r;
    const double q2 = qxx * 16.0 * lam * lam * u + qx * 4.0 * lam;

    return ShapeDerivatives{
        w * pw * q,
        w1 * pw * q + w * p1 * q + w * pw * q1,
        w2 * pw * q + w * p2 * q + w * pw * q2 +
            2.0 * (w1 * p1 * q + w1 * pw * q1 + w * p1 * q1),
    };
}

namespace detail {

// Asymptotic decay rate (in w = ln r^2) of the product of two shapes
// under the measure: positive exactly when both levels are normalizable.
inline double tail_rate(const ModelParams& p, const QuantumLevel& a, const QuantumLevel& b) {
    return p.beta / p.lambda - 0.5 - 0.5 * (a.n + b.n);
}

// integrand of the measure inner product in u = r^2:
//   (1/2) shapeA shapeB (1 + lambda u)^(-1/2)
template <class ShapeA, class ShapeB>
double measure_integrand_u(const ModelParams& p, ShapeA&& sa, ShapeB&& sb, double u) {
    const double r = std::sqrt(u);
    return 0.5 * sa(r) * sb(r) / std::sqrt(1.0 + p.lambda * u);
}

}  // namespace detail

/// Measure-weighted inner product of two (unnormalized) radial shapes,
/// integral of shapeA shapeB (1+lambda r^2)^(-1/2) r dr over the domain.
///
/// Evaluated in u = r^2. On the hyperbolic side the domain is finite and
/// the endpoint factor (1-|lambda|u)^(beta/|lambda| - 1/2) is integrable
/// because beta > |lambda|/2 (checked). On the spherical side the tail
/// decays only like a power, so the integral runs in w = ln u, where it
/// decays exponentially at the rate of the levels' normalizability margin.
inline double measure_inner_product(const ModelParams& p, const QuantumLevel& a,
                                    const QuantumLevel& b, double r_max = 0.0,
                                    double abs_tol = 1e-14, double rel_tol = 1e-13) {
    auto sa = [&](double r) { return radial_shape(p, a, r); };
    auto sb = [&](double r) { return radial_shape(p, b, r); };
    auto fu = [&](double u) { return detail::measure_integrand_u(p, sa, sb, u); };

    if (p.lambda < 0.0) {
        if (!(p.beta > 0.5 * std::abs(p.lambda)))
            throw NumericalError("measure_inner_product: non-integrable boundary exponent");
        double u_hi = 1.0 / -p.lambda;
        if (r_max > 0.0) u_hi = std::min(u_hi, r_max * r_max);
        return integrate_adaptive(fu, 0.0, u_hi, abs_tol, rel_tol);
    }

    const double rate = detail::tail_rate(p, a, b);
    if (r_max <= 0.0 && !(rate > 0.0))
        throw NumericalError("measure_inner_product: levels not jointly normalizable");
    const double mu_min = std::min(a.mu, b.mu);
    const double w_lo = -(40.0 / (mu_min + 1.0) + 10.0);
    // The Jacobi factors grow like u^(n_r) along the tail; keep u^deg
    // representable when picking the truncation of the log range.
    const int deg = a.n_r + b.n_r;
    const double w_cap = deg > 0 ? std::min(640.0, 690.0 / deg) : 640.0;
    double w_hi;
    if (r_max > 0.0) {
        w_hi = std::min(std::log(r_max * r_max), w_cap);
    } else {
        w_hi = std::min((35.0 + std::max(0.0, std::log(1.0 / rate))) / rate, w_cap);
    }
    auto fw = [&](double w) {
        const double u = std::exp(w);
        return fu(u) * u;
    };
    return integrate_adaptive(fw, w_lo, w_hi, abs_tol, rel_tol);
}

/// Norm of the truncated integral over r in (0, r_max]; grows without
/// bound with r_max for levels past the normalizability bound.
inline double truncated_norm_squared(const ModelParams& p, const QuantumLevel& lv,
                                     double r_max) {
    if (!(r_max > 0.0)) throw std::invalid_argument("truncated_norm_squared: r_max must be > 0");
    return measure_inner_product(p, lv, lv, r_max);
}

/// Normalized radial wavefunction R(r) = norm * radial_shape(r) with
/// unit measure-weighted square integral.
struct RadialWavefunction {
    ModelParams params;
    QuantumLevel level;
    double norm;

    double value(double r) const { return norm * radial_shape(params, level, r); }
};

/// Fixes the normalization constant by quadrature; rejects levels past
/// the spherical-side bound, naming the violated inequality.
inline RadialWavefunction normalize(const ModelParams& p, const QuantumLevel& lv) {
    if (!lv.normalizable) {
        std::ostringstream msg;
        msg << "normalize: level (n_r=" << lv.n_r << ", m=" << lv.m << ") has n=" << lv.n
            << " >= beta/lambda - 1/2 = " << normalizability_bound(p)
            << " and is not normalizable";
        throw std::invalid_argument(msg.str());
    }
    const double nsq = measure_inner_product(p, lv, lv);
    if (!(nsq > 0.0) || !std::isfinite(nsq))
        throw NumericalError("normalize: norm integral failed");
    return RadialWavefunction{p, lv, 1.0 / std::sqrt(nsq)};
}

/// Relative residual of the radial equation
///   r^2 (1+lam r^2) R'' + r (1+2 lam r^2) R'
///     + (-beta(beta+lam) r^4/(1+lam r^2) + 2 E r^2 - mu^2) R = 0
/// evaluated with analytic derivatives of the closed-form shape and
/// scaled by the largest of the three term magnitudes at that r.
/// Callers should keep r away from the domain endpoints, where the
/// leading coefficient degenerates.
inline double radial_residual(const ModelParams& p, const QuantumLevel& lv, double r) {
    const ShapeDerivatives d = radial_shape_derivatives(p, lv, r);
    const double u = r * r;
    const double om = 1.0 + p.lambda * u;
    const double t1 = u * om * d.d2;
    const double t2 = r * (1.0 + 2.0 * p.lambda * u) * d.d1;
    const double t3 =
        (-p.beta * (p.beta + p.lambda) * u * u / om + 2.0 * lv.energy * u - lv.mu * lv.mu) *
        d.value;
    const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
    if (scale == 0.0) return 0.0;
    return (t1 + t2 + t3) / scale;
}

/// All levels with |m| <= max_m and n_r <= max_nr, restricted to the
/// normalizable sector for lambda > 0, sorted by energy (ties broken by
/// n_r then m for deterministic output).
inline std::vector<QuantumLevel> enumerate_bound_states(const ModelParams& p, int max_m,
                                                        int max_nr) {
    if (max_m < 0 || max_nr < 0)
        throw std::invalid_argument("enumerate_bound_states: bounds must be >= 0");
    std::vector<QuantumLevel> levels;
    for (int m = -max_m; m <= max_m; ++m)
        for (int n_r = 0; n_r <= max_nr; ++n_r) {
            QuantumLevel lv = energy_level(p, n_r, m);
            if (p.lambda > 0.0 && !lv.normalizable) continue;
            levels.push_back(lv);
        }
    std::sort(levels.begin(), levels.end(), [](const QuantumLevel& x, const QuantumLevel& y) {
        if (x.energy != y.energy) return x.energy < y.energy;
        if (x.n_r != y.n_r) return x.n_r < y.n_r;
        return x.m < y.m;
    });
    return levels;
}

/// Energy functional of the radial equation in Sturm-Liouville form over
/// u = r^2: with P = u sqrt(1+lam u), V = beta(beta+lam) u / (4 (1+lam u)^(3/2))
/// + mu^2/(4 u sqrt(1+lam u)) and weight M = (1+lam u)^(-1/2) / 2,
///   E = integral(P R_u^2 + V R^2) / integral(M R^2).
/// Independent of the closed-form energy expression.
inline double rayleigh_quotient(const ModelParams& p, const QuantumLevel& lv) {
    auto num_u = [&](double u) {
        const double r = std::sqrt(u);
        const ShapeDerivatives d = radial_shape_derivatives(p, lv, r);
        const double om = 1.0 + p.lambda * u;
        const double ru = d.d1 / (2.0 * r);
        // kinetic term as (sqrt(P) R_u)^2: the factored form stays
        // representable far out on the tail where P alone overflows
        const double kin = std::sqrt(u) * std::pow(om, 0.25) * ru;
        const double pot = p.beta * (p.beta + p.lambda) * u / (4.0 * om * std::sqrt(om)) +
                           (lv.mu != 0.0 ? lv.mu * lv.mu / (4.0 * u * std::sqrt(om)) : 0.0);
        return kin * kin + pot * d.value * d.value;
    };
    auto den_u = [&](double u) {
        const double r = std::sqrt(u);
        const double R = radial_shape(p, lv, r);
        return 0.5 * R * R / std::sqrt(1.0 + p.lambda * u);
    };

    double num, den;
    if (p.lambda < 0.0) {
        const double u_hi = 1.0 / -p.lambda;
        num = integrate_adaptive(num_u, 0.0, u_hi, 1e-14, 1e-12);
        den = integrate_adaptive(den_u, 0.0, u_hi, 1e-14, 1e-12);
    } else {
        const double rate = detail::tail_rate(p, lv, lv);
        if (!(rate > 0.0))
            throw NumericalError("rayleigh_quotient: level is not normalizable");
        const double w_lo = -(40.0 / (lv.mu + 1.0) + 10.0);
        const double w_cap = lv.n_r > 0 ? std::min(640.0, 690.0 / (2 * lv.n_r)) : 640.0;
        const double w_hi =
            std::min((35.0 + std::max(0.0, std::log(1.0 / rate))) / rate, w_cap);
        auto numw = [&](double w) {
            const double u = std::exp(w);
            return num_u(u) * u;
        };
        auto denw = [&](double w) {
            const double u = std::exp(w);
            return den_u(u) * u;
        };
        num = integrate_adaptive(numw, w_lo, w_hi, 1e-14, 1e-12);
        den = integrate_adaptive(denw, w_lo, w_hi, 1e-14, 1e-12);
    }
    return num / den;
}

}  // namespace curvosc
