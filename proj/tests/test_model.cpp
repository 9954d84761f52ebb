#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "curvosc/model.hpp"

using namespace curvosc;
using Catch::Approx;

namespace {

// Independent oracle: golden-section minimization of V_eff on a bracket.
double golden_min_r(const ModelParams& p, double J, double lo, double hi) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 200; ++it) {
        if (effective_potential(p, J, c) < effective_potential(p, J, d))
            b = d;
        else
            a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("parameter construction derives the positive beta root", "[model]") {
    CHECK(make_params(1.0, std::sqrt(2.0), 0.0).beta == Approx(1.0).margin(1e-14));
    CHECK(make_params(-1.0, std::sqrt(2.0), 1.0).beta == Approx(2.0).margin(1e-14));
    const auto p = make_params(1.0, 2.0, 1.0);
    CHECK(p.beta == Approx(0.5 * (-1.0 + std::sqrt(17.0))).epsilon(1e-15));
    CHECK(p.kappa == -1.0);

    // beta consistency across random parameters: beta (beta + lambda) = alpha^2
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> lam(-2.0, 2.0), al(0.1, 5.0), kk(0.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        double l = lam(rng);
        if (std::abs(l) < 1e-3) continue;
        const auto q = make_params(l, al(rng), kk(rng));
        const double resid = q.beta * (q.beta + q.lambda) - q.alpha_sq();
        CHECK(std::abs(resid) <= 32 * std::numeric_limits<double>::epsilon() * q.alpha_sq());
        CHECK(q.beta > 0.0);
    }
}

TEST_CASE("parameter construction rejects out-of-range inputs", "[model]") {
    CHECK_THROWS_AS(make_params(0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_params(1.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_params(1.0, -2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_params(1.0, 1.0, -0.5), std::invalid_argument);
}

TEST_CASE("effective potential values and domain guards", "[model]") {
    const auto p = make_params(1.0, 2.0, 1.0);
    CHECK(effective_potential(p, 0.0, 1.0) == Approx(1.5).epsilon(1e-15));
    // evaluated through an independent arithmetic route
    CHECK(effective_potential(p, 0.0, 10.0) ==
          Approx(200.0 / 101.0 + 1.0 / 200.0).epsilon(1e-15));
    // r -> 0+ divergence from the isotonic barrier
    CHECK(effective_potential(p, 0.0, 1e-7) > 1e13);
    CHECK_THROWS_AS(effective_potential(p, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(effective_potential(p, 0.0, -1.0), std::domain_error);

    const auto ph = make_params(-1.0, 2.0, 1.0);
    CHECK_THROWS_AS(effective_potential(ph, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(effective_potential(ph, 0.0, 1.5), std::domain_error);
    CHECK_NOTHROW(effective_potential(ph, 0.0, 0.999));
}

TEST_CASE("effective potential asymptotes", "[model]") {
    const auto p = make_params(1.0, 2.0, 1.0);
    const double sep = p.separatrix_energy();
    CHECK(std::abs(effective_potential(p, 0.0, 1e3) - sep) < 3e-6);
    CHECK(std::abs(effective_potential(p, 0.0, 1e4) - sep) < 3e-8);

    const auto ph = make_params(-1.0, 2.0, 1.0);
    double prev = 0.0;
    for (double eps : {1e-2, 1e-4, 1e-6}) {
        const double v = effective_potential(ph, 0.0, 1.0 - eps);
        CHECK(v > 10.0 * prev);
        prev = v;
    }
}

TEST_CASE("effective potential minimum: closed form vs grid search", "[model]") {
    // the searched r localizes only to ~sqrt(eps) (the potential is flat
    // at the minimum), but the value there agrees far more tightly
    const auto p = make_params(1.0, 2.0, 1.0);
    auto mn = v_eff_minimum(p, 0.0);
    REQUIRE(mn.has_value());
    CHECK(mn->r_min == Approx(1.0).epsilon(1e-14));
    CHECK(mn->v_min == Approx(1.5).epsilon(1e-14));
    const double r_grid = golden_min_r(p, 0.0, 0.05, 20.0);
    CHECK(std::abs(r_grid - mn->r_min) < 1e-6);
    CHECK(std::abs(effective_potential(p, 0.0, r_grid) - mn->v_min) < 1e-10);

    // sqrt(J^2+k) = sqrt(5) >= alpha/lambda = 2: monotone, no minimum
    CHECK_FALSE(v_eff_minimum(p, 2.0).has_value());

    const auto ph = make_params(-1.0, 2.0, 1.0);
    auto mh = v_eff_minimum(ph, 0.0);
    REQUIRE(mh.has_value());
    CHECK(mh->r_min == Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));
    CHECK(mh->v_min == Approx(2.5).epsilon(1e-14));
    const double rh_grid = golden_min_r(ph, 0.0, 0.05, 0.999);
    CHECK(std::abs(rh_grid - mh->r_min) < 1e-6);
    CHECK(std::abs(effective_potential(ph, 0.0, rh_grid) - mh->v_min) < 1e-10);
}

TEST_CASE("minimum is stationary and locally minimal", "[model]") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> lam(0.3, 2.0), al(0.5, 4.0), kk(0.05, 2.0),
        jj(-1.5, 1.5);
    for (int i = 0; i < 100; ++i) {
        const double l = (i % 2 ? 1.0 : -1.0) * lam(rng);
        const auto p = make_params(l, al(rng), kk(rng));
        const double J = jj(rng);
        const auto mn = v_eff_minimum(p, J);
        if (!mn) continue;
        const double h = 1e-6 * mn->r_min;
        const double fd = (effective_potential(p, J, mn->r_min + h) -
                           effective_potential(p, J, mn->r_min - h)) /
                          (2.0 * h);
        CHECK(std::abs(fd) < 1e-8 * std::max(1.0, std::abs(mn->v_min) / mn->r_min));
        const double d = 1e-3 * mn->r_min;
        CHECK(effective_potential(p, J, mn->r_min + d) > mn->v_min);
        CHECK(effective_potential(p, J, mn->r_min - d) > mn->v_min);
        CHECK(effective_potential(p, J, mn->r_min) == Approx(mn->v_min).epsilon(1e-12));
    }
}

TEST_CASE("energy and integration constant are one datum", "[model]") {
    const auto p = make_params(1.0, 2.0, 1.0);
    CHECK(energy_to_constant(p, 1.75) == Approx(-0.5).epsilon(1e-15));
    CHECK(energy_to_constant(p, 2.0) == 0.0);  // separatrix zeroes C
    const auto ph = make_params(-1.0, 2.0, 1.0);
    CHECK(energy_to_constant(ph, 3.0) == Approx(10.0).epsilon(1e-15));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ee(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const double E = ee(rng);
        CHECK(constant_to_energy(p, energy_to_constant(p, E)) == Approx(E).margin(1e-14));
        const double C = ee(rng);
        CHECK(energy_to_constant(ph, constant_to_energy(ph, C)) == Approx(C).margin(1e-14));
    }
}

TEST_CASE("quartic quadrature coefficients", "[model]") {
    const auto p = make_params(1.0, 2.0, 1.0);
    const auto q = quartic_coefficients(setup_from_energy(p, 0.0, 1.75));
    CHECK(q.a == Approx(-1.0));
    CHECK(q.b == Approx(2.5));
    CHECK(q.c == Approx(-0.5));

    CHECK(quartic_coefficients(setup_from_energy(p, 0.0, 2.0)).c == 0.0);

    const auto ph = make_params(-1.0, 2.0, 1.0);
    const auto qh = quartic_coefficients(setup_from_energy(ph, 1.0, 3.0));
    CHECK(qh.a == Approx(-2.0));
    CHECK(qh.b == Approx(8.0));
    CHECK(qh.c == Approx(-10.0));
}

TEST_CASE("polynomial identity ties the quadrature to the energy form", "[model]") {
    // a + b r^2 + c r^4 = r^2 (1 + lambda r^2) (2E - 2 V_eff(r))
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> lam(0.3, 2.0), al(0.5, 4.0), kk(0.0, 2.0),
        jj(-2.0, 2.0), ee(-3.0, 6.0);
    for (int i = 0; i < 200; ++i) {
        const double l = (i % 2 ? 1.0 : -1.0) * lam(rng);
        const auto p = make_params(l, al(rng), kk(rng));
        const auto s = setup_from_energy(p, jj(rng), ee(rng));
        const auto q = quartic_coefficients(s);
        const double r_cap = l < 0 ? 0.95 / std::sqrt(-l) : 3.0;
        for (int j = 1; j <= 8; ++j) {
            const double r = r_cap * j / 8.0;
            const double lhs = q.a + q.b * r * r + q.c * std::pow(r, 4);
            const double rhs = r * r * (1.0 + l * r * r) *
                               (2.0 * s.E - 2.0 * effective_potential(p, s.J, r));
            const double scale = std::max({std::abs(q.a), std::abs(q.b * r * r),
                                           std::abs(q.c) * std::pow(r, 4), 1e-30});
            CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("regime classification on the reference setups", "[model]") {
    const auto p = make_params(1.0, 2.0, 1.0);

    const auto bounded = classify(setup_from_energy(p, 0.0, 1.75));
    CHECK(bounded.tag == RegimeTag::Bounded);
    CHECK(bounded.omega == Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK(bounded.B == Approx(2.5).epsilon(1e-13));
    CHECK(bounded.A == Approx(std::sqrt(4.25)).epsilon(1e-13));
    // turning points land on the energy contour
    CHECK(effective_potential(p, 0.0, std::sqrt(bounded.B - bounded.A)) ==
          Approx(1.75).epsilon(1e-9));
    CHECK(effective_potential(p, 0.0, std::sqrt(bounded.B + bounded.A)) ==
          Approx(1.75).epsilon(1e-9));

    CHECK(classify(setup_from_energy(p, 0.0, 3.0)).tag == RegimeTag::Unbounded);
    CHECK(classify(setup_from_energy(p, 0.0, 1.0)).tag == RegimeTag::Forbidden);
    CHECK(classify(setup_from_energy(p, 0.0, 2.0)).tag == RegimeTag::Limiting);
    // the limiting band is a relative tolerance
    CHECK(classify(setup_from_energy(p, 0.0, 2.0 + 1e-10)).tag == RegimeTag::Limiting);
    CHECK(classify(setup_from_energy(p, 0.0, 2.0 + 1e-7)).tag == RegimeTag::Unbounded);

    // circular orbit: E at the minimum is bounded with coalesced turning points
    const auto circ = classify(setup_from_energy(p, 0.0, 1.5));
    CHECK(circ.tag == RegimeTag::Bounded);
    CHECK(std::abs(circ.A) < 1e-6);

    // hyperbolic side is bounded whenever admitted
    const auto ph = make_params(-1.0, 2.0, 1.0);
    CHECK(classify(setup_from_energy(ph, 0.0, 3.0)).tag == RegimeTag::Bounded);
    CHECK(classify(setup_from_energy(ph, 0.0, 2.0)).tag == RegimeTag::Forbidden);
}

TEST_CASE("classification without an interior minimum falls back to the asymptote",
          "[model]") {
    const auto p = make_params(1.0, 2.0, 1.0);  // J=2: sqrt(5) > alpha/lambda
    const auto ub = classify(setup_from_energy(p, 2.0, 2.5));
    CHECK(ub.tag == RegimeTag::Unbounded);
    CHECK(ub.monotone_potential);
    const auto fb = classify(setup_from_energy(p, 2.0, 1.9));
    CHECK(fb.tag == RegimeTag::Forbidden);
    CHECK(fb.monotone_potential);
}

TEST_CASE("classification is consistent with the sign of c", "[model]") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> lam(0.3, 2.0), al(0.5, 4.0), kk(0.05, 2.0),
        jj(-1.5, 1.5), xi(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const double l = (i % 2 ? 1.0 : -1.0) * lam(rng);
        const auto p = make_params(l, al(rng), kk(rng));
        const double J = jj(rng);
        const auto s = setup_from_energy(p, J, -2.0 + 10.0 * xi(rng));
        const auto reg = classify(s);
        const double c = quartic_coefficients(s).c;
        switch (reg.tag) {
            case RegimeTag::Bounded:
                CHECK(c < 1e-12);
                break;
            case RegimeTag::Unbounded:
                CHECK(c > 0.0);
                break;
            case RegimeTag::Limiting:
                CHECK(std::abs(c) <= 2e-9 * std::max(1.0, std::abs(s.E)) * std::abs(l));
                break;
            case RegimeTag::Forbidden:
                break;
        }
    }
}
