#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "curvosc/model.hpp"

namespace curvosc {

template <typename Real>
struct AdaptiveOptions {
    Real rel_tol = Real(1e-10);
    Real abs_tol = Real(1e-12);
    Real max_step = std::numeric_limits<Real>::infinity();
    Real initial_step = Real(0);  // 0 -> heuristic from the interval length
};

namespace detail {

// Dormand-Prince 5(4) tableau.
template <typename Real>
struct Dopri5 {
    static constexpr Real c[7] = {Real(0), Real(1) / 5, Real(3) / 10, Real(4) / 5,
                                  Real(8) / 9, Real(1), Real(1)};
    static constexpr Real a2[1] = {Real(1) / 5};
    static constexpr Real a3[2] = {Real(3) / 40, Real(9) / 40};
    static constexpr Real a4[3] = {Real(44) / 45, Real(-56) / 15, Real(32) / 9};
    static constexpr Real a5[4] = {Real(19372) / 6561, Real(-25360) / 2187,
                                   Real(64448) / 6561, Real(-212) / 729};
    static constexpr Real a6[5] = {Real(9017) / 3168, Real(-355) / 33, Real(46732) / 5247,
                                   Real(49) / 176, Real(-5103) / 18656};
    static constexpr Real b5[7] = {Real(35) / 384,      Real(0), Real(500) / 1113,
                                   Real(125) / 192,     Real(-2187) / 6784,
                                   Real(11) / 84,       Real(0)};
    // b5 - b4: weights of the embedded error estimate.
    static constexpr Real e[7] = {Real(71) / 57600,  Real(0),
                                  Real(-71) / 16695, Real(71) / 1920,
                                  Real(-17253) / 339200, Real(22) / 525, Real(-1) / 40};
};

}  // namespace detail

/// Adaptive embedded Runge-Kutta 5(4) from t0 to t1 (t1 may be < t0).
/// rhs(t, y) returns the derivative array; on_step(t, y) fires after
/// every accepted step, including the landing on t1.
template <typename Real, std::size_t N, class RHS, class OnStep>
void integrate_adaptive(RHS&& rhs, std::array<Real, N>& y, Real t0, Real t1,
                        const AdaptiveOptions<Real>& opt, OnStep&& on_step) {
    using Tab = detail::Dopri5<Real>;
    if (t1 == t0) return;
    const Real dir = t1 > t0 ? Real(1) : Real(-1);
    const Real span = std::abs(t1 - t0);
    Real h = opt.initial_step > Real(0) ? opt.initial_step : span / Real(100);
    h = std::min(h, opt.max_step);
    Real t = t0;

    std::array<std::array<Real, N>, 7> k;
    while (dir * (t1 - t) > Real(0)) {
        h = std::min(h, std::abs(t1 - t));
        const Real h_min = std::abs(t) * std::numeric_limits<Real>::epsilon() * Real(32) +
                           std::numeric_limits<Real>::min() * Real(1e10);
        if (h < h_min)
            throw NumericalError("integrate_adaptive: step size underflow");

        const Real hs = dir * h;
        k[0] = rhs(t, y);
        auto stage = [&](int si, const Real* a, int na) {
            std::array<Real, N> ys;
            for (std::size_t i = 0; i < N; ++i) {
                Real acc = Real(0);
                for (int j = 0; j < na; ++j) acc += a[j] * k[j][i];
                ys[i] = y[i] + hs * acc;
            }
            k[si] = rhs(t + Tab::c[si] * hs, ys);
        };
        stage(1, Tab::a2, 1);
        stage(2, Tab::a3, 2);
        stage(3, Tab::a4, 3);
        stage(4, Tab::a5, 4);
        stage(5, Tab::a6, 5);

        std::array<Real, N> y5;
        for (std::size_t i = 0; i < N; ++i) {
            Real acc = Real(0);
            for (int j = 0; j < 6; ++j) acc += Tab::b5[j] * k[j][i];
            y5[i] = y[i] + hs * acc;
        }
        k[6] = rhs(t + hs, y5);

        Real err_sq = Real(0);
        for (std::size_t i = 0; i < N; ++i) {
            Real ei = Real(0);
            for (int j = 0; j < 7; ++j) ei += Tab::e[j] * k[j][i];
            ei *= hs;
            const Real scale =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err_sq += (ei / scale) * (ei / scale);
        }
        const Real err = std::sqrt(err_sq / Real(N));

        if (err <= Real(1)) {
            t += hs;
            y = y5;
            on_step(t, y);
            const Real grow = err == Real(0)
                                  ? Real(5)
                                  : std::min(Real(5), Real(0.9) * std::pow(err, Real(-0.2)));
            h = std::min(h * std::max(grow, Real(0.2)), opt.max_step);
        } else {
            h *= std::max(Real(0.2), Real(0.9) * std::pow(err, Real(-0.2)));
        }
    }
}

/// Classical fixed-step fourth-order Runge-Kutta over n_steps equal steps.
template <typename Real, std::size_t N, class RHS, class OnStep>
void integrate_rk4(RHS&& rhs, std::array<Real, N>& y, Real t0, Real t1, int n_steps,
                   OnStep&& on_step) {
    const Real h = (t1 - t0) / Real(n_steps);
    Real t = t0;
    for (int s = 0; s < n_steps; ++s) {
        const auto k1 = rhs(t, y);
        std::array<Real, N> tmp;
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + Real(0.5) * h * k1[i];
        const auto k2 = rhs(t + Real(0.5) * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + Real(0.5) * h * k2[i];
        const auto k3 = rhs(t + Real(0.5) * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
        const auto k4 = rhs(t + h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            y[i] += h / Real(6) * (k1[i] + Real(2) * k2[i] + Real(2) * k3[i] + k4[i]);
        t = t0 + Real(s + 1) * h;
        on_step(t, y);
    }
}

}  // namespace curvosc
