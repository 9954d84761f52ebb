#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace curvosc {

/// Thrown when a numerical procedure fails (step underflow, lost
/// conservation, non-convergent refinement). Distinct from parameter
/// errors so callers can map it to a different exit path.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Model constants of the curved-plane oscillator with an isotonic term.
///
/// lambda is the nonlinearity parameter (lambda = -kappa, nonzero),
/// alpha the oscillator strength, k the isotonic strength. beta is the
/// positive root of alpha^2 = beta*(beta + lambda); it drives the
/// quantum sector and is derived at construction.
struct ModelParams {
    double lambda;
    double alpha;
    double k;
    double beta;
    double kappa;

    double alpha_sq() const { return alpha * alpha; }

    /// Upper end of the radial domain: 1/sqrt(|lambda|) on the
    /// hyperbolic side (lambda < 0), unbounded otherwise.
    double r_limit() const {
        return lambda < 0 ? 1.0 / std::sqrt(-lambda)
                          : std::numeric_limits<double>::infinity();
    }

    bool r_in_domain(double r) const { return r > 0.0 && r < r_limit(); }

    /// Separatrix energy alpha^2/(2 lambda); only meaningful for lambda > 0
    /// where it is the r -> infinity asymptote of the effective potential.
    double separatrix_energy() const { return alpha_sq() / (2.0 * lambda); }
};

/// Validates (lambda, alpha, k) and derives beta and kappa.
/// lambda = 0 is rejected: every closed form carries 1/lambda.
/// k = 0 is accepted as the isotonic-free regression limit.
inline ModelParams make_params(double lambda, double alpha, double k) {
    if (!(lambda != 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("make_params: lambda must be nonzero and finite");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("make_params: alpha must be positive");
    if (!(k >= 0.0) || !std::isfinite(k))
        throw std::invalid_argument("make_params: k must be non-negative");
    const double beta = 0.5 * (-lambda + std::sqrt(lambda * lambda + 4.0 * alpha * alpha));
    return ModelParams{lambda, alpha, k, beta, -lambda};
}

/// V_eff(r) = alpha^2 r^2 / (2 (1 + lambda r^2)) + (J^2 + k) / (2 r^2).
inline double effective_potential(const ModelParams& p, double J, double r) {
    if (!p.r_in_domain(r))
        throw std::domain_error("effective_potential: r outside radial domain");
    const double r2 = r * r;
    return 0.5 * p.alpha_sq() * r2 / (1.0 + p.lambda * r2) + (J * J + p.k) / (2.0 * r2);
}

/// dV_eff/dr, used by the equations of motion and minimum checks.
inline double effective_potential_derivative(const ModelParams& p, double J, double r) {
    if (!p.r_in_domain(r))
        throw std::domain_error("effective_potential_derivative: r outside radial domain");
    const double w = 1.0 + p.lambda * r * r;
    return p.alpha_sq() * r / (w * w) - (J * J + p.k) / (r * r * r);
}

struct VeffMinimum {
    double r_min;
    double v_min;
};

/// Location and value of the effective-potential minimum.
///
/// For lambda < 0 the minimum always exists. For lambda > 0 it exists
/// only when sqrt(J^2 + k) < alpha/lambda; otherwise V_eff decreases
/// monotonically toward the separatrix asymptote and nullopt is returned.
inline std::optional<VeffMinimum> v_eff_minimum(const ModelParams& p, double J) {
    const double s = std::sqrt(J * J + p.k);
    const double denom = p.alpha - p.lambda * s;
    if (p.lambda > 0.0 && !(s < p.alpha / p.lambda)) return std::nullopt;
    if (s == 0.0) {
        // J = 0 and k = 0: barrier-free well bottoming out at r -> 0.
        return VeffMinimum{0.0, 0.0};
    }
    const double r_min = std::sqrt(s / denom);
    const double v_min = 0.5 * s * (2.0 * p.alpha - p.lambda * s);
    return VeffMinimum{r_min, v_min};
}

/// C = 2E - alpha^2/lambda.
inline double energy_to_constant(const ModelParams& p, double E) {
    return 2.0 * E - p.alpha_sq() / p.lambda;
}

/// E = C/2 + alpha^2/(2 lambda); inverse of energy_to_constant.
inline double constant_to_energy(const ModelParams& p, double C) {
    return 0.5 * C + p.alpha_sq() / (2.0 * p.lambda);
}

/// A classical initial-value problem: parameters plus the conserved
/// quantities and the two integration constants of the closed forms.
/// E and C are the same datum in two parametrizations and are kept
/// consistent by the factories below.
///
/// phi0 is the phase constant of the radial closed form. K is the
/// angular integration constant, fixed operationally as the polar angle
/// at t = 0 (for J = 0 the angle stays at K for all t).
struct ClassicalSetup {
    ModelParams params;
    double J;
    double E;
    double C;
    double phi0;
    double K;
};

inline ClassicalSetup setup_from_energy(const ModelParams& p, double J, double E,
                                        double phi0 = 0.0, double K = 0.0) {
    if (!std::isfinite(J) || !std::isfinite(E))
        throw std::invalid_argument("setup_from_energy: J and E must be finite");
    return ClassicalSetup{p, J, E, energy_to_constant(p, E), phi0, K};
}

inline ClassicalSetup setup_from_constant(const ModelParams& p, double J, double C,
                                          double phi0 = 0.0, double K = 0.0) {
    if (!std::isfinite(J) || !std::isfinite(C))
        throw std::invalid_argument("setup_from_constant: J and C must be finite");
    return ClassicalSetup{p, J, constant_to_energy(p, C), C, phi0, K};
}

/// Coefficients of the radial quadrature polynomial a + b r^2 + c r^4,
/// which equals r^2 (1 + lambda r^2) (2E - 2 V_eff(r)) identically.
struct QuarticCoefficients {
    double a;
    double b;
    double c;
};

inline QuarticCoefficients quartic_coefficients(const ClassicalSetup& s) {
    const ModelParams& p = s.params;
    const double jk = s.J * s.J + p.k;
    return QuarticCoefficients{
        -jk,
        s.C + p.alpha_sq() / p.lambda - p.lambda * jk,
        s.C * p.lambda,
    };
}

enum class RegimeTag { Bounded, Unbounded, Limiting, Forbidden };

inline const char* to_string(RegimeTag t) {
    switch (t) {
        case RegimeTag::Bounded: return "bounded";
        case RegimeTag::Unbounded: return "unbounded";
        case RegimeTag::Limiting: return "limiting";
        case RegimeTag::Forbidden: return "forbidden";
    }
    return "?";
}

/// Classified trajectory regime with its closed-form coefficients.
/// omega is absent (NaN) for Limiting and Forbidden; A and B are absent
/// for Forbidden. monotone_potential marks parameter sets where the
/// effective potential has no interior minimum (lambda > 0 with
/// sqrt(J^2+k) >= alpha/lambda), for which classification falls back to
/// comparing E against inf V_eff = alpha^2/(2 lambda).
struct TrajectoryRegime {
    RegimeTag tag;
    double omega = std::numeric_limits<double>::quiet_NaN();
    double A = std::numeric_limits<double>::quiet_NaN();
    double B = std::numeric_limits<double>::quiet_NaN();
    bool monotone_potential = false;
};

namespace detail {

// |E - separatrix| band that still counts as the limiting regime.
inline double limiting_band(double E) { return 1e-9 * std::max(1.0, std::abs(E)); }

// E below V_min by more than this is Forbidden; inside the band the
// turning points have coalesced and the orbit is treated as circular.
inline constexpr double forbidden_band = 1e-12;

inline TrajectoryRegime bounded_regime(const ClassicalSetup& s) {
    const ModelParams& p = s.params;
    const double c = s.C * p.lambda;
    const double omega = std::sqrt(std::abs(c));
    const double w2 = omega * omega;
    const double sq = std::sqrt(s.J * s.J + p.k);
    const double g1 = (p.alpha - p.lambda * sq) * (p.alpha - p.lambda * sq) - w2;
    const double g2 = (p.alpha + p.lambda * sq) * (p.alpha + p.lambda * sq) - w2;
    double radicand = g1 * g2;
    if (radicand < 0.0) radicand = 0.0;  // coalesced turning points (circular orbit)
    const double A = std::sqrt(radicand) / (2.0 * std::abs(p.lambda) * w2);
    const double B = (p.alpha_sq() - p.lambda * p.lambda * sq * sq - w2) / (2.0 * p.lambda * w2);
    return TrajectoryRegime{RegimeTag::Bounded, omega, A, B};
}

inline TrajectoryRegime unbounded_regime(const ClassicalSetup& s) {
    const ModelParams& p = s.params;
    const double c = s.C * p.lambda;
    const double omega = std::sqrt(c);
    const double w2 = omega * omega;
    const double sq = std::sqrt(s.J * s.J + p.k);
    const double g1 = (p.alpha - p.lambda * sq) * (p.alpha - p.lambda * sq) + w2;
    const double g2 = (p.alpha + p.lambda * sq) * (p.alpha + p.lambda * sq) + w2;
    const double A = std::sqrt(g1 * g2) / (2.0 * p.lambda * w2);
    const double B = -(p.alpha_sq() - p.lambda * p.lambda * sq * sq + w2) / (2.0 * p.lambda * w2);
    return TrajectoryRegime{RegimeTag::Unbounded, omega, A, B};
}

inline TrajectoryRegime limiting_regime(const ClassicalSetup& s) {
    const ModelParams& p = s.params;
    const double sq2 = s.J * s.J + p.k;
    const double num = p.alpha_sq() - p.lambda * p.lambda * sq2;
    const double A = std::sqrt(num / p.lambda);
    const double B = p.lambda * sq2 / num;
    return TrajectoryRegime{RegimeTag::Limiting,
                            std::numeric_limits<double>::quiet_NaN(), A, B};
}

}  // namespace detail

/// Classifies a setup into its trajectory regime and fills in the
/// regime coefficients (omega = sqrt(|c|), A, B of the closed forms).
inline TrajectoryRegime classify(const ClassicalSetup& s) {
    const ModelParams& p = s.params;
    const auto minimum = v_eff_minimum(p, s.J);

    if (p.lambda < 0.0) {
        // Hyperbolic side: every admissible energy gives a bounded orbit.
        if (s.E < minimum->v_min - detail::forbidden_band)
            return TrajectoryRegime{RegimeTag::Forbidden};
        return detail::bounded_regime(s);
    }

    const double sep = p.separatrix_energy();
    if (!minimum) {
        // No interior minimum: inf V_eff is the separatrix asymptote.
        TrajectoryRegime reg;
        if (s.E > sep + detail::limiting_band(s.E)) {
            reg = detail::unbounded_regime(s);
        } else {
            reg = TrajectoryRegime{RegimeTag::Forbidden};
        }
        reg.monotone_potential = true;
        return reg;
    }

    if (s.E < minimum->v_min - detail::forbidden_band)
        return TrajectoryRegime{RegimeTag::Forbidden};
    if (std::abs(s.E - sep) <= detail::limiting_band(s.E))
        return detail::limiting_regime(s);
    if (s.E > sep) return detail::unbounded_regime(s);
    return detail::bounded_regime(s);
}

}  // namespace curvosc
