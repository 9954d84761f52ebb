#pragma once

#include <cmath>
#include <queue>
#include <vector>

#include "curvosc/model.hpp"

namespace curvosc {
namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule on [-1, 1].
inline constexpr double gk15_nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
};
inline constexpr double gk15_kronrod_w[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
inline constexpr double gk15_gauss_w[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

template <class F>
void gk15(F&& f, double a, double b, double& kronrod, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fk = 0.0, fg = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = half * gk15_nodes[i];
        const double fv = i == 7 ? f(mid) : f(mid - dx) + f(mid + dx);
        fk += gk15_kronrod_w[i] * fv;
        if (i % 2 == 1) fg += gk15_gauss_w[i / 2] * fv;
    }
    kronrod = fk * half;
    err = std::abs((fk - fg) * half);
}

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b]:
/// the interval with the largest error estimate is bisected until the
/// accumulated estimate meets max(abs_tol, rel_tol * |integral|).
/// The range starts uniformly pre-subdivided; a single panel over a wide
/// range can hide all of the integrand's mass from the error estimator.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-12,
                          double rel_tol = 1e-12, int max_intervals = 20000) {
    constexpr int initial_panels = 32;
    std::priority_queue<detail::Interval> queue;
    double total = 0.0, total_err = 0.0;
    for (int i = 0; i < initial_panels; ++i) {
        const double pa = a + (b - a) * i / initial_panels;
        const double pb = a + (b - a) * (i + 1) / initial_panels;
        double value, error;
        detail::gk15(f, pa, pb, value, error);
        queue.push({pa, pb, value, error});
        total += value;
        total_err += error;
    }
    int used = initial_panels;
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (!std::isfinite(total) || !std::isfinite(total_err))
            throw NumericalError("integrate_adaptive: integrand produced a non-finite value");
        if (used >= max_intervals)
            throw NumericalError("integrate_adaptive: interval budget exhausted");
        const detail::Interval worst = queue.top();
        queue.pop();
        const double m = 0.5 * (worst.a + worst.b);
        if (!(worst.a < m && m < worst.b))
            throw NumericalError("integrate_adaptive: interval underflow before convergence");
        detail::Interval left{worst.a, m, 0, 0}, right{m, worst.b, 0, 0};
        detail::gk15(f, left.a, left.b, left.value, left.error);
        detail::gk15(f, right.a, right.b, right.value, right.error);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++used;
    }
    return total;
}

}  // namespace curvosc
