#pragma once

#include <cmath>
#include <stdexcept>

#include "curvosc/model.hpp"

namespace curvosc {

struct TrajectoryState {
    double r;
    double r_dot;
    double phi;
    double phi_dot;
};

/// Exact trajectory of a non-forbidden setup.
///
/// Radial motion:
///   bounded    r^2 = A sin(2 w t + phi0) + B
///   unbounded  r^2 = A cosh(2 w t + phi0) + B
///   limiting   r^2 = (A t + phi0)^2 + B
///
/// The polar angle is reconstructed from the tan relation of the angular
/// quadrature. Its arctangent branch index is derived arithmetically from
/// the inner phase, so evaluation is pure and the returned phi(t) is
/// continuous in t with phi(0) = K (the setup's angular constant).
class ClosedFormTrajectory {
public:
    explicit ClosedFormTrajectory(const ClassicalSetup& setup)
        : ClosedFormTrajectory(setup, classify(setup)) {}

    ClosedFormTrajectory(const ClassicalSetup& setup, const TrajectoryRegime& regime)
        : setup_(setup), regime_(regime), s_(std::sqrt(setup.J * setup.J + setup.params.k)) {
        if (regime_.tag == RegimeTag::Forbidden)
            throw std::invalid_argument(
                "ClosedFormTrajectory: setup is classified as forbidden (E below V_eff minimum)");
        theta_ref_ = setup_.J != 0.0 ? unwrapped_arctan(0.0) : 0.0;
    }

    const ClassicalSetup& setup() const { return setup_; }
    const TrajectoryRegime& regime() const { return regime_; }

    /// Radial period pi/omega; only the bounded regime is periodic.
    double period() const {
        if (regime_.tag != RegimeTag::Bounded)
            throw std::logic_error("period: only bounded trajectories are periodic");
        return M_PI / regime_.omega;
    }

    double r_squared_at(double t) const {
        switch (regime_.tag) {
            case RegimeTag::Bounded:
                return regime_.A * std::sin(2.0 * regime_.omega * t + setup_.phi0) + regime_.B;
            case RegimeTag::Unbounded:
                return regime_.A * std::cosh(2.0 * regime_.omega * t + setup_.phi0) + regime_.B;
            case RegimeTag::Limiting: {
                const double q = regime_.A * t + setup_.phi0;
                return q * q + regime_.B;
            }
            default:
                throw std::logic_error("r_squared_at: forbidden regime");
        }
    }

    /// d(r^2)/dt by analytic differentiation of the closed form.
    double r_squared_rate_at(double t) const {
        switch (regime_.tag) {
            case RegimeTag::Bounded:
                return 2.0 * regime_.A * regime_.omega *
                       std::cos(2.0 * regime_.omega * t + setup_.phi0);
            case RegimeTag::Unbounded:
                return 2.0 * regime_.A * regime_.omega *
                       std::sinh(2.0 * regime_.omega * t + setup_.phi0);
            case RegimeTag::Limiting:
                return 2.0 * regime_.A * (regime_.A * t + setup_.phi0);
            default:
                throw std::logic_error("r_squared_rate_at: forbidden regime");
        }
    }

    /// Continuous polar angle with phi(0) = K; constant K when J = 0.
    double phi_at(double t) const {
        if (setup_.J == 0.0) return setup_.K;
        return setup_.K + (setup_.J / s_) * (unwrapped_arctan(t) - theta_ref_);
    }

    /// Angular constant of the raw tan relation:
    /// tan((s/J)(phi - angular_constant())) equals the regime's right-hand side.
    double angular_constant() const {
        if (setup_.J == 0.0) return setup_.K;
        return setup_.K - (setup_.J / s_) * theta_ref_;
    }

    TrajectoryState state_at(double t) const {
        const double r2 = std::max(r_squared_at(t), 0.0);
        const double r = std::sqrt(r2);
        const double r_dot = r_squared_rate_at(t) / (2.0 * r);
        const double phi_dot = setup_.J == 0.0 ? 0.0 : setup_.J / r2;
        return TrajectoryState{r, r_dot, phi_at(t), phi_dot};
    }

private:
    // (s/J)(phi - K~) as a continuous function of t. For the bounded
    // regime the inner tan(w t + phi0/2) passes a pole once per radial
    // period; the floor term advances the branch at each crossing. The
    // other regimes are single-branch (tanh saturates, the limiting
    // argument is affine in t).
    double unwrapped_arctan(double t) const {
        switch (regime_.tag) {
            case RegimeTag::Bounded: {
                const double theta = regime_.omega * t + 0.5 * setup_.phi0;
                const double rhs =
                    regime_.omega / s_ * (regime_.B * std::tan(theta) + regime_.A);
                return std::atan(rhs) + M_PI * std::floor((theta + M_PI_2) / M_PI);
            }
            case RegimeTag::Unbounded: {
                const double rhs = regime_.omega / s_ * (regime_.A - regime_.B) *
                                   std::tanh(regime_.omega * t + 0.5 * setup_.phi0);
                return std::atan(rhs);
            }
            case RegimeTag::Limiting: {
                const double rhs = regime_.A / s_ * (regime_.A * t + setup_.phi0);
                return std::atan(rhs);
            }
            default:
                throw std::logic_error("unwrapped_arctan: forbidden regime");
        }
    }

    ClassicalSetup setup_;
    TrajectoryRegime regime_;
    double s_;
    double theta_ref_;
};

}  // namespace curvosc
