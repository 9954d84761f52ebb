#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "curvosc/model.hpp"
#include "curvosc/ode.hpp"

namespace curvosc {

/// Raised when a trajectory leaves the admissible radial domain
/// (r <= 0, or r^2 past (1 - 1e-12)/|lambda| on the hyperbolic side).
class DomainExitError : public NumericalError {
public:
    explicit DomainExitError(const std::string& what) : NumericalError(what) {}
};

struct DynamicalState {
    double t;
    double r;
    double v;  // dr/dt
    double phi;
};

struct Derivatives {
    double r_dot;
    double v_dot;
    double phi_dot;
};

/// Total energy of a radial state, E = v^2 / (2 (1 + lambda r^2)) + V_eff(r).
inline double total_energy(const ModelParams& p, double J, double r, double v) {
    return 0.5 * v * v / (1.0 + p.lambda * r * r) + effective_potential(p, J, r);
}

/// Reduced equations of motion with J as a parameter:
///   dr/dt   = v
///   dv/dt   = lambda r v^2 / (1 + lambda r^2) - (1 + lambda r^2) V_eff'(r)
///   dphi/dt = J / r^2
/// The v equation is the unique smooth second-order form conserving
/// v^2 / (2 (1 + lambda r^2)) + V_eff(r) along the flow.
inline Derivatives equations_of_motion(const ClassicalSetup& s, const DynamicalState& st) {
    const ModelParams& p = s.params;
    const double guard = p.lambda < 0.0 ? (1.0 - 1e-12) / -p.lambda
                                        : std::numeric_limits<double>::infinity();
    if (!(st.r > 0.0) || !(st.r * st.r < guard))
        throw DomainExitError("equations_of_motion: state left the radial domain");
    const double w = 1.0 + p.lambda * st.r * st.r;
    const double v_dot = p.lambda * st.r * st.v * st.v / w -
                         w * effective_potential_derivative(p, s.J, st.r);
    return Derivatives{st.v, v_dot, s.J / (st.r * st.r)};
}

struct IntegratorConfig {
    enum class Method { AdaptiveRK54, FixedRK4 };

    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    // Step-size cap for the adaptive method; the fixed-step size for RK4.
    double max_step = std::numeric_limits<double>::infinity();
    Method method = Method::AdaptiveRK54;
};

struct IntegrationSample {
    DynamicalState state;
    double energy;            // recomputed from the state
    double angular_momentum;  // recomputed as r^2 dphi/dt
};

namespace detail {

inline void validate_config(const IntegratorConfig& cfg) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        throw std::invalid_argument("IntegratorConfig: tolerances must be positive");
    if (cfg.method == IntegratorConfig::Method::FixedRK4 && !std::isfinite(cfg.max_step))
        throw std::invalid_argument("IntegratorConfig: fixed-step method needs a finite max_step");
}

}  // namespace detail

/// Integrates the equations of motion and samples the state at each
/// requested output time (monotone in either direction; the first entry
/// may equal initial.t to echo the initial state).
///
/// The initial state must reproduce the setup's energy to 1e-10 relative.
/// With the adaptive method, a recomputed-energy drift beyond
/// 100 x rel_tol aborts with a NumericalError; the fixed-step method is
/// meant for step-size convergence studies and only records the drift.
inline std::vector<IntegrationSample> integrate(const ClassicalSetup& s,
                                                const DynamicalState& initial,
                                                const std::vector<double>& output_times,
                                                const IntegratorConfig& cfg = {}) {
    detail::validate_config(cfg);
    if (output_times.empty())
        throw std::invalid_argument("integrate: no output times requested");
    for (std::size_t i = 1; i < output_times.size(); ++i) {
        const double d0 = output_times[i] - output_times[i - 1];
        const double d1 = output_times[1] - output_times[0];
        if (d0 * (d1 >= 0 ? 1.0 : -1.0) < 0.0)
            throw std::invalid_argument("integrate: output times must be monotone");
    }

    const double E0 = total_energy(s.params, s.J, initial.r, initial.v);
    if (std::abs(E0 - s.E) > 1e-10 * std::max(1.0, std::abs(s.E)))
        throw std::invalid_argument(
            "integrate: initial state energy does not match the setup energy");

    auto rhs = [&s](double, const std::array<double, 3>& y) {
        const Derivatives d = equations_of_motion(s, DynamicalState{0.0, y[0], y[1], y[2]});
        return std::array<double, 3>{d.r_dot, d.v_dot, d.phi_dot};
    };

    const double drift_cap = 100.0 * cfg.rel_tol;
    auto monitor = [&](double, const std::array<double, 3>& y) {
        if (cfg.method != IntegratorConfig::Method::AdaptiveRK54) return;
        const double e = total_energy(s.params, s.J, y[0], y[1]);
        if (std::abs(e - E0) / std::max(1.0, std::abs(E0)) > drift_cap)
            throw NumericalError("integrate: energy drift exceeded 100 x rel_tol");
    };

    std::vector<IntegrationSample> out;
    out.reserve(output_times.size());
    std::array<double, 3> y{initial.r, initial.v, initial.phi};
    double t = initial.t;
    for (double t_target : output_times) {
        if (t_target != t) {
            if (cfg.method == IntegratorConfig::Method::AdaptiveRK54) {
                AdaptiveOptions<double> opt;
                opt.rel_tol = cfg.rel_tol;
                opt.abs_tol = cfg.abs_tol;
                opt.max_step = cfg.max_step;
                integrate_adaptive(rhs, y, t, t_target, opt, monitor);
            } else {
                const int n = std::max(1, static_cast<int>(
                                              std::ceil(std::abs(t_target - t) / cfg.max_step)));
                integrate_rk4(rhs, y, t, t_target, n, [](double, const auto&) {});
            }
            t = t_target;
        }
        const DynamicalState st{t, y[0], y[1], y[2]};
        const double j_re = st.r * st.r * equations_of_motion(s, st).phi_dot;
        out.push_back(IntegrationSample{st, total_energy(s.params, s.J, st.r, st.v), j_re});
    }
    return out;
}

}  // namespace curvosc
