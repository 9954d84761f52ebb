#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "curvosc/integrator.hpp"
#include "curvosc/model.hpp"
#include "curvosc/trajectory.hpp"

using namespace curvosc;
using Catch::Approx;

namespace {

const ModelParams sphere = make_params(1.0, 2.0, 1.0);
const ModelParams hyper = make_params(-1.0, 2.0, 1.0);

ClosedFormTrajectory bounded_j0() {
    return ClosedFormTrajectory(setup_from_energy(sphere, 0.0, 1.75, M_PI_2, 0.0));
}

}  // namespace

TEST_CASE("bounded trajectory starts at the outer turning point for phi0 = pi/2",
          "[trajectory]") {
    auto traj = bounded_j0();
    const double r2 = traj.r_squared_at(0.0);
    CHECK(r2 == Approx(traj.regime().A + traj.regime().B).epsilon(1e-14));
    // turning point sits on the energy contour
    CHECK(effective_potential(sphere, 0.0, std::sqrt(r2)) == Approx(1.75).epsilon(1e-9));
    CHECK(traj.state_at(0.0).r_dot == Approx(0.0).margin(1e-12));
}

TEST_CASE("limiting trajectory vertex reproduces the parabola constants", "[trajectory]") {
    ClosedFormTrajectory traj(setup_from_energy(sphere, 0.0, 2.0, 0.0, 0.0));
    REQUIRE(traj.regime().tag == RegimeTag::Limiting);
    CHECK(traj.r_squared_at(0.0) == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(traj.regime().A == Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(traj.state_at(0.0).r_dot == Approx(0.0).margin(1e-14));
    CHECK(effective_potential(sphere, 0.0, std::sqrt(1.0 / 3.0)) ==
          Approx(2.0).epsilon(1e-12));
}

TEST_CASE("bounded radial motion is exactly periodic", "[trajectory]") {
    auto traj = bounded_j0();
    const double T = traj.period();
    for (double t : {0.0, 0.37, 1.9, 4.4}) {
        CHECK(std::abs(traj.r_squared_at(t + T) - traj.r_squared_at(t)) < 1e-12);
    }
}

TEST_CASE("angle is frozen at K when J = 0", "[trajectory]") {
    for (double E : {1.75, 2.0, 3.0}) {
        ClosedFormTrajectory traj(setup_from_energy(sphere, 0.0, E, 0.3, 1.234));
        for (double t : {-2.0, 0.0, 0.8, 5.0}) CHECK(traj.phi_at(t) == 1.234);
    }
}

TEST_CASE("unbounded scattering angle saturates", "[trajectory]") {
    ClosedFormTrajectory traj(setup_from_energy(sphere, 1.0, 3.0, 0.0, 0.0));
    REQUIRE(traj.regime().tag == RegimeTag::Unbounded);
    const double late = traj.phi_at(50.0), later = traj.phi_at(60.0);
    CHECK(std::abs(later - late) < 1e-10);
    const double early = traj.phi_at(-50.0), earlier = traj.phi_at(-60.0);
    CHECK(std::abs(earlier - early) < 1e-10);
    CHECK(std::isfinite(late - early));
}

TEST_CASE("angle rate matches J / r^2 in every regime", "[trajectory]") {
    struct Case {
        ModelParams p;
        double J, E;
    };
    const std::vector<Case> cases = {
        {sphere, 1.0, 1.9},  // bounded, J != 0 needs E above V_min(J=1)
        {sphere, 1.0, 3.0},  // unbounded
        {sphere, 1.0, 2.0},  // limiting
        {hyper, 1.0, 4.5},   // hyperbolic bounded
        {sphere, -1.0, 1.9}, // negative J winds the other way
    };
    const double h = 1e-6;
    for (const auto& c : cases) {
        ClosedFormTrajectory traj(setup_from_energy(c.p, c.J, c.E, 0.3, 0.1));
        for (int i = 0; i <= 100; ++i) {
            const double t = -4.0 + 8.0 * i / 100.0;
            const double fd = (traj.phi_at(t + h) - traj.phi_at(t - h)) / (2.0 * h);
            CHECK(std::abs(fd - c.J / traj.r_squared_at(t)) < 1e-6);
        }
    }
}

TEST_CASE("closed forms satisfy the energy identity", "[trajectory]") {
    struct Case {
        ModelParams p;
        double J, E;
    };
    const std::vector<Case> cases = {
        {sphere, 0.0, 1.75}, {sphere, 1.0, 1.9}, {sphere, 0.0, 3.0},
        {sphere, 0.0, 2.0},  {hyper, 1.0, 4.5},
    };
    for (const auto& c : cases) {
        ClosedFormTrajectory traj(setup_from_energy(c.p, c.J, c.E, 0.7, 0.0));
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double t = -5.0 + 10.0 * i / 999.0;
            const auto st = traj.state_at(t);
            const double e = total_energy(c.p, c.J, st.r, st.r_dot);
            worst = std::max(worst, std::abs(e - c.E) / std::abs(c.E));
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("r^2 stays in the regime's stated range", "[trajectory]") {
    auto traj = bounded_j0();
    const double lo = traj.regime().B - traj.regime().A;
    const double hi = traj.regime().B + traj.regime().A;
    for (int i = 0; i < 2000; ++i) {
        const double r2 = traj.r_squared_at(-10.0 + 20.0 * i / 1999.0);
        CHECK(r2 > lo - 1e-12);
        CHECK(r2 < hi + 1e-12);
    }

    ClosedFormTrajectory unb(setup_from_energy(sphere, 1.0, 3.0, -0.4, 0.0));
    for (int i = 0; i < 500; ++i) {
        CHECK(unb.r_squared_at(-5.0 + 10.0 * i / 499.0) >
              unb.regime().A + unb.regime().B - 1e-12);
    }

    ClosedFormTrajectory lim(setup_from_energy(sphere, 1.0, 2.0, 0.3, 0.0));
    for (int i = 0; i < 500; ++i) {
        CHECK(lim.r_squared_at(-5.0 + 10.0 * i / 499.0) > lim.regime().B - 1e-12);
    }
}

TEST_CASE("hyperbolic trajectories respect the domain bound", "[trajectory]") {
    ClosedFormTrajectory traj(setup_from_energy(hyper, 1.0, 4.5, 0.2, 0.0));
    double peak = 0.0;
    for (int i = 0; i < 2000; ++i)
        peak = std::max(peak, traj.r_squared_at(-10.0 + 20.0 * i / 1999.0));
    CHECK(peak < 1.0);  // 1/|lambda|
}

TEST_CASE("apsidal advance per radial period is constant", "[trajectory]") {
    ClosedFormTrajectory traj(setup_from_energy(sphere, 1.0, 1.9, 0.3, 0.0));
    const double T = traj.period();
    const double s = std::sqrt(1.0 + sphere.k);
    const double expected = M_PI * 1.0 / s;
    for (double t : {0.0, 0.31, 1.7, 2.9}) {
        CHECK(traj.phi_at(t + T) - traj.phi_at(t) == Approx(expected).margin(1e-9));
    }
}

TEST_CASE("bounded orbits approach the limiting geometry as E -> separatrix",
          "[trajectory]") {
    const double sep = sphere.separatrix_energy();
    ClosedFormTrajectory lim(setup_from_energy(sphere, 1.0, sep, 0.0, 0.0));
    const double b_lim = lim.regime().B;
    double prev_period = 0.0, prev_gap = 1e300;
    // all energies must stay above V_min(J=1) = 2 sqrt(2) - 1 ~ 1.83
    for (double eps : {0.1, 0.02, 0.004, 0.0008}) {
        ClosedFormTrajectory tr(setup_from_energy(sphere, 1.0, sep - eps, 0.0, 0.0));
        REQUIRE(tr.regime().tag == RegimeTag::Bounded);
        const double period = tr.period();
        const double inner = tr.regime().B - tr.regime().A;
        CHECK(period > prev_period);
        const double gap = std::abs(inner - b_lim);
        CHECK(gap < prev_gap);
        prev_period = period;
        prev_gap = gap;
    }
    CHECK(prev_period > 10.0);   // diverging period
    CHECK(prev_gap < 5e-3);      // inner turning point converging to the vertex
}

TEST_CASE("the raw tan relation holds on every branch", "[trajectory]") {
    ClosedFormTrajectory traj(setup_from_energy(sphere, 1.0, 1.9, 0.3, 0.25));
    const auto& reg = traj.regime();
    const double s = std::sqrt(1.0 + sphere.k);
    for (double t : {-1.3, 0.0, 0.6, 2.2, 5.1}) {
        const double lhs = std::tan(s / 1.0 * (traj.phi_at(t) - traj.angular_constant()));
        const double theta = reg.omega * t + 0.5 * 0.3;
        const double rhs = reg.omega / s * (reg.B * std::tan(theta) + reg.A);
        // compare as angles: both sides may sit near a tan pole
        CHECK(std::atan(lhs) == Approx(std::atan(rhs)).margin(1e-9));
    }
    CHECK(traj.phi_at(0.0) == Approx(0.25).margin(1e-14));
}

TEST_CASE("forbidden setups cannot be evaluated", "[trajectory]") {
    CHECK_THROWS_AS(ClosedFormTrajectory(setup_from_energy(sphere, 0.0, 1.0)),
                    std::invalid_argument);
}
