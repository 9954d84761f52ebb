#pragma once

#include <cmath>
#include <stdexcept>

namespace curvosc {

/// Generalized binomial coefficient binom(z, j) for real z and small
/// non-negative integer j, via the falling factorial.
inline double real_binomial(double z, int j) {
    double acc = 1.0;
    for (int i = 0; i < j; ++i) acc *= (z - i) / (i + 1);
    return acc;
}

/// Jacobi polynomial P_n^(a,b)(x) by the explicit finite sum
///   sum_s binom(n+a, n-s) binom(n+b, s) ((x-1)/2)^s ((x+1)/2)^(n-s).
/// Valid for arbitrary real a, b; used as the independent evaluation
/// route and as the fallback when the recurrence degenerates. The sum
/// alternates and cancels, so it is accumulated in extended precision.
inline double jacobi_explicit_sum(int n, double a, double b, double x) {
    if (n < 0) throw std::invalid_argument("jacobi_explicit_sum: n must be >= 0");
    const long double xm = 0.5L * (static_cast<long double>(x) - 1.0L);
    const long double xp = 0.5L * (static_cast<long double>(x) + 1.0L);
    long double sum = 0.0L;
    for (int s = 0; s <= n; ++s) {
        long double term = 1.0L;
        for (int i = 0; i < n - s; ++i) term *= (static_cast<long double>(n) + a - i) / (i + 1);
        for (int i = 0; i < s; ++i) term *= (static_cast<long double>(n) + b - i) / (i + 1);
        for (int i = 0; i < s; ++i) term *= xm;
        for (int i = 0; i < n - s; ++i) term *= xp;
        sum += term;
    }
    return static_cast<double>(sum);
}

namespace detail {

// The recurrence denominator 2k(k+a+b)(2k+a+b-2) crosses zero for
// a + b in {-2, -3, ...}; treat anything this close as degenerate.
inline bool jacobi_recurrence_degenerate(int n, double a, double b) {
    for (int k = 2; k <= n; ++k) {
        if (std::abs(k + a + b) < 1e-8) return true;
        if (std::abs(2.0 * k + a + b - 2.0) < 1e-8) return true;
    }
    return false;
}

}  // namespace detail

/// Jacobi polynomial P_n^(a,b)(x) via the forward three-term recurrence,
/// for general real parameters (b is negative and non-integer throughout
/// the spherical-side spectrum). Falls back to the explicit sum when an
/// intermediate denominator is within 1e-8 of zero.
inline double jacobi(int n, double a, double b, double x) {
    if (n < 0) throw std::invalid_argument("jacobi: n must be >= 0");
    if (n == 0) return 1.0;
    if (detail::jacobi_recurrence_degenerate(n, a, b))
        return jacobi_explicit_sum(n, a, b, x);

    // extended-precision accumulation: near-degenerate denominators
    // amplify any seed rounding by 1/|k+a+b|, so every intermediate
    // (including the degree-1 seed) is kept in long double
    const long double apb = static_cast<long double>(a) + b;
    long double y0 = 1.0L;
    long double y1 = 0.5L * (static_cast<long double>(a) - b) + 0.5L * (apb + 2.0L) * x;
    for (int k = 2; k <= n; ++k) {
        const long double denom = 2.0L * k * (k + apb) * (2.0L * k + apb - 2.0L);
        const long double g1 =
            (2.0L * k + apb - 1.0L) *
            ((2.0L * k + apb) * (2.0L * k + apb - 2.0L) * x +
             static_cast<long double>(a) * a - static_cast<long double>(b) * b);
        const long double g0 =
            -2.0L * (k + static_cast<long double>(a) - 1.0L) *
            (k + static_cast<long double>(b) - 1.0L) * (2.0L * k + apb);
        const long double yk = (g1 * y1 + g0 * y0) / denom;
        y0 = y1;
        y1 = yk;
    }
    return static_cast<double>(y1);
}

/// order-th derivative: d^m/dx^m P_n^(a,b) =
///   2^-m (n+a+b+1)...(n+a+b+m) P_(n-m)^(a+m,b+m).
inline double jacobi_derivative(int n, double a, double b, double x, int order) {
    if (order < 0) throw std::invalid_argument("jacobi_derivative: order must be >= 0");
    if (order == 0) return jacobi(n, a, b, x);
    if (order > n) return 0.0;
    double scale = 1.0;
    for (int j = 1; j <= order; ++j) scale *= 0.5 * (n + a + b + j);
    return scale * jacobi(n - order, a + order, b + order, x);
}

}  // namespace curvosc
