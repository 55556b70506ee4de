#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gdnls/degeneracy.hpp"
#include "gdnls/quadrature.hpp"

using namespace gdnls;

namespace {

// independent oracle: fixed-step Simpson of the F integrands on [0, 60],
// Richardson-verified at two resolutions
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

double F_oracle(double z, double sigma, double* self_err = nullptr) {
    auto i1 = [&](double y) { return std::pow(std::cosh(y) - z, -1.0 / sigma); };
    auto i2 = [&](double y) {
        const double ch = std::cosh(y);
        return std::pow(ch - z, -1.0 / sigma - 1.0) * (z * ch - 1.0);
    };
    auto F_at = [&](int n) {
        const double a = simpson(i1, 0.0, 60.0, n);
        const double b = simpson(i2, 0.0, 60.0, n);
        return (sigma - 1.0) * (sigma - 1.0) * a * a - b * b;
    };
    const double f1 = F_at(48000);
    const double f2 = F_at(96000);
    if (self_err) *self_err = std::abs(f2 - f1);
    return f2;
}

double z0_oracle(double sigma) {
    double lo = -0.999, hi = 0.999;
    double flo = F_oracle(lo, sigma);
    // coarse scan for the bracket
    for (double z = lo + 0.05; z <= hi; z += 0.05) {
        const double f = F_oracle(z, sigma);
        if (flo * f < 0.0) {
            hi = z;
            lo = z - 0.05;
            break;
        }
        flo = f;
    }
    flo = F_oracle(lo, sigma);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = F_oracle(mid, sigma);
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("F(0;1) = -1 exactly (tanh closed form)") {
    CHECK(F_sigma(0.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("F(0;1.5) matches the Simpson oracle") {
    double self_err = 0.0;
    const double oracle = F_oracle(0.0, 1.5, &self_err);
    CHECK(self_err < 1e-11);  // oracle internal consistency
    CHECK(F_sigma(0.0, 1.5) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("domain guards") {
    CHECK_THROWS(F_sigma(1.5, 1.5));
    CHECK_THROWS(F_sigma(0.9995, 1.5));  // endpoint guard
    CHECK_THROWS(F_sigma(0.0, 2.5));
    CHECK_THROWS(find_z0(1.0));
}

TEST_CASE("truncation certificate: doubling the cut moves the integrals below 1e-14") {
    const double z = 0.3, s = 1.4;
    const double Y = s * std::log(4.0 / 1e-16) + 10.0;
    auto f = [&](double y) { return std::pow(std::cosh(y) - z, -1.0 / s); };
    const double a = adaptive_integrate(f, 0.0, Y);
    const double b = adaptive_integrate(f, 0.0, 2.0 * Y);
    CHECK(std::abs(a - b) < 1e-14 * std::abs(a));
}

TEST_CASE("z0(1.5): sign-change bracket and oracle agreement") {
    const double z0 = find_z0(1.5);
    CHECK(F_sigma(z0 - 0.05, 1.5) * F_sigma(z0 + 0.05, 1.5) < 0.0);
    CHECK(z0 == doctest::Approx(z0_oracle(1.5)).epsilon(1e-8));
    CHECK(std::abs(F_sigma(z0, 1.5)) < 1e-10 * F_sigma_scale(z0, 1.5));
}

TEST_CASE("root stability under tighter tolerance") {
    const double a = find_z0(1.3, 1e-10);
    const double b = find_z0(1.3, 1e-12);
    CHECK(std::abs(a - b) < 1e-8);
}

TEST_CASE("z0 sweep: interior, strictly decreasing") {
    std::vector<double> sigmas;
    for (int i = 0; i < 20; ++i) sigmas.push_back(1.05 + 0.045 * i);
    auto rows = z0_sweep(sigmas, 1e-10, 2);
    REQUIRE(rows.size() == 20);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].z0 > -1.0);
        CHECK(rows[i].z0 < 1.0);
        if (i) CHECK(rows[i].z0 < rows[i - 1].z0);
    }
}

TEST_CASE("degenerate_params: admissible and scale-covariant in omega") {
    SolitonParams p1 = degenerate_params(1.5, 1.0);
    SolitonParams p4 = degenerate_params(1.5, 4.0);
    CHECK(4.0 * p1.omega - p1.speed * p1.speed > 0.0);
    CHECK(p1.speed / std::sqrt(p1.omega) ==
          doctest::Approx(p4.speed / std::sqrt(p4.omega)).epsilon(1e-12));
}

TEST_CASE("null_vector on diagonal and generic matrices") {
    std::array<std::array<double, 2>, 2> d05 = {{{0.0, 0.0}, {0.0, 5.0}}};
    auto v = null_vector(d05);
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(std::abs(v[1]) < 1e-14);

    std::array<std::array<double, 2>, 2> d30 = {{{3.0, 0.0}, {0.0, 0.0}}};
    v = null_vector(d30);
    CHECK(std::abs(v[0]) < 1e-14);
    CHECK(v[1] == doctest::Approx(1.0));

    // rotated rank-one matrix: null direction known exactly
    const double c = std::cos(0.3), s = std::sin(0.3);
    std::array<std::array<double, 2>, 2> r = {{{2.0 * c * c, 2.0 * c * s},
                                               {2.0 * c * s, 2.0 * s * s}}};
    v = null_vector(r);
    CHECK(std::abs(v[0] * c + v[1] * s) < 1e-13);  // orthogonal to (c, s)

    std::array<std::array<double, 2>, 2> even = {{{2.0, 0.0}, {0.0, -1.9}}};
    CHECK_THROWS(null_vector(even));
}

TEST_CASE("orient_xi sign convention and noise floor") {
    std::array<double, 2> xi = {0.6, -0.8};
    auto a = orient_xi(xi, -2.0);
    CHECK(a.xi[0] == 0.6);
    CHECK(a.d3 == -2.0);
    auto b = orient_xi(xi, 2.0);
    CHECK(b.xi[0] == -0.6);
    CHECK(b.xi[1] == 0.8);
    CHECK(b.d3 == -2.0);
    CHECK_THROWS(orient_xi(xi, 1e-12));
}

TEST_CASE("degenerate point: tiny det, sharp dip vs offsets, d3 cross-check") {
    const double sigma = 1.5, omega = 1.0;
    const double z0 = find_z0(sigma);
    GridSpec g(80.0, 2048);

    auto det_at = [&](double z) {
        SolitonParams p(sigma, omega, 2.0 * z * std::sqrt(omega));
        return std::abs(d_surface(p, g, 1e-4).det());
    };
    const double d_star = det_at(z0);
    CHECK(d_star * 10.0 < det_at(z0 + 0.1));
    CHECK(d_star * 10.0 < det_at(z0 - 0.1));

    DegeneracyData dd = analyze_degeneracy(sigma, omega, g, 1e-4, 1e-2);
    CHECK(dd.hessian_residual < 1e-3);
    CHECK(dd.d3 < 0.0);
    CHECK(dd.F_residual < 1e-10);

    SolitonParams pstar(sigma, omega, dd.c_star);
    ThirdDerivative t3 = d_third_directional(pstar, dd.xi.data(), g, 1e-2);
    CHECK(t3.rel_gap < 0.02);
    CHECK(std::abs(t3.value - t3.value_half) <
          0.02 * std::max(std::abs(t3.value), 1e-12));
}
