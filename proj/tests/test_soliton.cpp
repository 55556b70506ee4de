#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gdnls/functionals.hpp"
#include "gdnls/soliton.hpp"

using namespace gdnls;

namespace {

// test-only oracle: composite Simpson on [a,b]
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS(SolitonParams(1.0, 1.0, 0.0));
    CHECK_THROWS(SolitonParams(2.0, 1.0, 0.0));
    CHECK_THROWS(SolitonParams(1.5, 1.0, 2.0));  // 4w - c^2 = 0
    CHECK_NOTHROW(SolitonParams(1.5, 1.0, 1.9));
}

TEST_CASE("psi closed form at the origin and evenness") {
    SolitonParams p(1.5, 1.0, 0.0);
    // (2.5 * 4 / 2)^(1/3) = 5^(1/3)
    CHECK(psi_value(p, 0.0) == doctest::Approx(std::cbrt(5.0)).epsilon(1e-14));
    for (double x : {0.3, 1.7, 9.0, 25.0})
        CHECK(psi_value(p, x) == doctest::Approx(psi_value(p, -x)).epsilon(1e-15));
    SolitonParams q(1.3, 0.7, -0.9);
    for (double x : {0.9, 4.2, 13.0})
        CHECK(psi_value(q, x) == doctest::Approx(psi_value(q, -x)).epsilon(1e-15));
}

TEST_CASE("psi far from the core matches extended evaluation and never overflows") {
    SolitonParams p(1.5, 1.0, 0.0);
    // at x=10, cosh(3x) is large; compare against the asymptotic closed form
    // Psi ~ (2 * 2.5 * 4 / (2 sqrt(1)))^(1/3) e^{-x}, relative error e^{-2*3x}
    const double direct = psi_value(p, 10.0);
    const double asym = std::cbrt(10.0) * std::exp(-10.0);
    CHECK(direct == doctest::Approx(asym).epsilon(1e-12));
    CHECK(std::isfinite(psi_value(p, 400.0)));  // cosh overflows, log form must not
}

TEST_CASE("phase: left edge value and monotone integral part") {
    SolitonParams p(1.5, 1.0, 0.8);
    GridSpec g(80.0, 2048);  // resolved: the monotone check needs the spectral floor
    auto th = phase_value(p, g);
    CHECK(th[0] == doctest::Approx(-p.speed * g.length / 4.0).epsilon(1e-12));
    // the integral contribution theta - (c/2)x is nonincreasing (up to
    // spectral rounding noise in the saturated tails)
    int violations = 0;
    double prev = th[0] - 0.5 * p.speed * g.node(0);
    for (std::size_t j = 1; j < g.count; ++j) {
        const double cur = th[j] - 0.5 * p.speed * g.node(j);
        if (cur > prev + 1e-11) ++violations;
        prev = cur;
    }
    CHECK(violations == 0);
}

TEST_CASE("phase integral at 0 matches a quadrature oracle (and -pi/6 closed form)") {
    SolitonParams p(1.5, 1.0, 0.0);
    GridSpec g(80.0, 2048);
    auto th = phase_value(p, g);
    const double theta0 = th[g.count / 2];  // node at x = 0
    // oracle: Simpson quadrature of Psi^3 over [-40, 0] at two resolutions
    auto integrand = [&](double x) { return std::pow(psi_value(p, x), 3.0); };
    const double i1 = simpson(integrand, -40.0, 0.0, 4000);
    const double i2 = simpson(integrand, -40.0, 0.0, 8000);
    CHECK(std::abs(i2 - i1) < 1e-12);  // oracle self-consistency
    CHECK(theta0 == doctest::Approx(-i2 / 5.0).epsilon(1e-10));
    // Psi^3 = 5 sech(3x) here, so the analytic value is -pi/6
    CHECK(theta0 == doctest::Approx(-M_PI / 6.0).epsilon(1e-12));
}

TEST_CASE("build_profile: |Q| = Psi, residual plateau, boundary rejection") {
    SolitonParams p(1.5, 1.0, 0.0);
    GridSpec g(80.0, 2048);
    SolitonProfile prof = build_profile(p, g);
    for (std::size_t j = 0; j < g.count; j += 97)
        CHECK(std::abs(prof.Q[j]) == doctest::Approx(prof.Psi[j]).epsilon(1e-14));
    CHECK(prof.boundary_magnitude < 1e-10);
    CHECK(soliton_residual(prof) < 1e-8);

    // residual decreases with refinement until the floor
    const double r1024 = soliton_residual(build_profile(p, GridSpec(80.0, 1024)));
    const double r2048 = soliton_residual(prof);
    CHECK(r2048 <= r1024 * 1.5);

    // small box at slow decay must be rejected: 4w - c^2 small
    SolitonParams slow(1.5, 1.0, 1.9);
    CHECK_THROWS_AS(build_profile(slow, GridSpec(40.0, 1024)), ProfileBuildError);
}

TEST_CASE("residual detects a wrong omega and ignores whole-cell translation") {
    SolitonParams p(1.5, 1.0, 0.0);
    GridSpec g(80.0, 1024);
    SolitonProfile prof = build_profile(p, g);
    SolitonParams wrong(1.5, 1.1, 0.0);
    CHECK(soliton_residual(prof.Q, wrong) > 0.01);

    ComplexField rolled(g);
    for (std::size_t j = 0; j < g.count; ++j)
        rolled[j] = prof.Q[(j + 37) % g.count];
    CHECK(soliton_residual(rolled, p) ==
          doctest::Approx(soliton_residual(prof)).epsilon(1e-6));
}

TEST_CASE("QDQ bounds: measured log-slope stays within the reported bracket") {
    SolitonParams p(1.5, 1.0, 0.5);
    GridSpec g(80.0, 2048);
    SolitonProfile prof = build_profile(p, g);
    CHECK(prof.c0_est > 0.0);
    CHECK(prof.c0_est <= prof.c0_inv_est);
    double psi_max = 0.0;
    for (double v : prof.Psi) psi_max = std::max(psi_max, v);
    for (std::size_t j = 0; j < g.count; j += 111) {
        if (prof.Psi[j] < 1e-10 * psi_max) continue;  // below the measured support
        const double r = std::abs(prof.Qx[j]) / prof.Psi[j];
        CHECK(r >= prof.c0_est * (1.0 - 1e-12));
        CHECK(r <= prof.c0_inv_est * (1.0 + 1e-12));
    }
    // at c = 0 the log slope is identically 1 on the support
    SolitonProfile p0 = build_profile(SolitonParams(1.5, 1.0, 0.0), g);
    CHECK(p0.c0_est == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(p0.c0_inv_est == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("gauge covariance: global phase commutes with the build") {
    SolitonParams p(1.5, 1.0, 0.3);
    GridSpec g(80.0, 1024);
    SolitonProfile prof = build_profile(p, g);
    const double g0 = 0.83;
    auto th = phase_value(p, g);
    for (std::size_t j = 0; j < g.count; j += 41) {
        const Complex a = prof.Q[j] * std::polar(1.0, g0);
        const Complex b = std::polar(prof.Psi[j], th[j] + g0);
        CHECK(std::abs(a - b) < 1e-13);
    }
}

TEST_CASE("param_derivative: central-difference order and mass consistency") {
    SolitonParams p(1.5, 1.0, 0.1);
    GridSpec g(80.0, 1024);
    const double h = param_step(p.omega);

    // step-halving: O(h^2) error ratio ~ 4 against the h/4 reference
    ComplexField d1 = param_derivative(p, g, ParamAxis::omega, h);
    ComplexField d2 = param_derivative(p, g, ParamAxis::omega, 0.5 * h);
    ComplexField dref = param_derivative(p, g, ParamAxis::omega, 0.25 * h);
    const double e1 = l2_norm(d1 - dref);
    const double e2 = l2_norm(d2 - dref);
    CHECK(e1 / e2 > 2.5);
    CHECK(e1 / e2 < 6.0);

    // <Q, dQ/dw> = d/dw M(Q) by finite differences of the mass functional
    SolitonProfile prof = build_profile(p, g);
    const double lhs = pairing(prof.Q, d2);
    SolitonParams pp(p.sigma, p.omega + h, p.speed);
    SolitonParams pm(p.sigma, p.omega - h, p.speed);
    const double rhs = (mass(build_profile(pp, g).Q) - mass(build_profile(pm, g).Q)) /
                       (2.0 * h);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));

    CHECK_THROWS(param_derivative(SolitonParams(1.5, 1.0, 1.999), g,
                                  ParamAxis::speed, 0.01));
}

TEST_CASE("tangent_vector linearity") {
    SolitonParams p(1.5, 1.0, 0.1);
    GridSpec g(80.0, 1024);
    const double h = param_step(1.0);
    const double xi1[2] = {1.0, 0.0};
    ComplexField t1 = tangent_vector(p, g, xi1, h);
    ComplexField dw = param_derivative(p, g, ParamAxis::omega, h);
    CHECK(l2_norm(t1 - dw) < 1e-13 * l2_norm(dw));

    const double xi[2] = {0.4, -0.9};
    const double xi2[2] = {0.8, -1.8};
    ComplexField a = tangent_vector(p, g, xi, h);
    ComplexField b = tangent_vector(p, g, xi2, h);
    CHECK(l2_norm(b - 2.0 * a) < 1e-12 * l2_norm(b));
}

TEST_CASE("suggest_grid yields an admissible box") {
    SolitonParams p(1.5, 1.0, 1.7);
    GridSpec g = suggest_grid(p);
    SolitonProfile prof = build_profile(p, g);
    CHECK(prof.boundary_magnitude < 1e-10);
    CHECK(soliton_residual(prof) < 1e-7);
}
