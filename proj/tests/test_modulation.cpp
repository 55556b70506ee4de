#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gdnls/degeneracy.hpp"
#include "gdnls/modulation.hpp"

using namespace gdnls;

namespace {

struct Setup {
    SolitonParams params;
    GridSpec grid;
    SolitonProfile prof;
    std::array<double, 2> xi;
    ComplexField phit;
    ComplexField phi;
    double d3;
};

// degenerate-point fixture shared by the tests (built once)
const Setup& setup() {
    static Setup s = [] {
        const double sigma = 1.5, omega = 1.0;
        GridSpec g(80.0, 1024);
        DegeneracyData dd = analyze_degeneracy(sigma, omega, g, 1e-4, 1e-2);
        SolitonParams p(sigma, omega, dd.c_star);
        Setup out{p,
                  g,
                  build_profile(p, g),
                  dd.xi,
                  tangent_vector(p, g, dd.xi.data(), param_step(1.0)),
                  ComplexField(),
                  dd.d3};
        out.phi = renormalize_tangent(out.prof, out.phit, out.xi.data()).phi;
        return out;
    }();
    return s;
}

ComplexField smooth_random(const GridSpec& g, std::mt19937_64& rng, int modes = 8) {
    std::normal_distribution<double> nd;
    ComplexField out(g);
    for (int m = -modes; m <= modes; ++m) {
        const Complex amp(nd(rng), nd(rng));
        const double k = 2.0 * M_PI * m / g.length;
        for (std::size_t j = 0; j < g.count; ++j)
            out[j] += amp * std::polar(1.0, k * g.node(j));
    }
    const double n = l2_norm(out);
    for (auto& z : out.samples) z /= n;
    return out;
}

// project v off span{dirs} in the real pairing: orthonormalize the spanning
// set first (the generators are not mutually orthogonal), then subtract
ComplexField project_off(ComplexField v, const std::vector<const ComplexField*>& dirs) {
    std::vector<ComplexField> basis;
    for (const auto* d : dirs) {
        ComplexField e = *d;
        for (int sweep = 0; sweep < 2; ++sweep)
            for (const auto& b : basis) e = e - pairing(e, b) * b;
        const double n = l2_norm(e);
        if (n > 1e-12) basis.push_back((1.0 / n) * e);
    }
    for (int sweep = 0; sweep < 2; ++sweep)
        for (const auto& b : basis) v = v - pairing(v, b) * b;
    return v;
}

}  // namespace

TEST_CASE("renormalize_tangent: by-construction orthogonality and small defects") {
    const Setup& s = setup();
    RenormalizedDirection rd = renormalize_tangent(s.prof, s.phit, s.xi.data());
    const double nphi = l2_norm(rd.phi);
    CHECK(std::abs(rd.defects[0]) < 1e-12 * nphi * l2_norm(s.prof.iQ));  // <phi,iQ>
    CHECK(std::abs(rd.defects[1]) < 1e-12 * nphi * l2_norm(s.prof.Qx)); // <phi,Qx>
    // tdg1/tdg2 hold to the numeric-xi accuracy only
    CHECK(std::abs(rd.defects[2]) < 1e-4 * nphi);  // <phi,Q>
    CHECK(std::abs(rd.defects[3]) < 1e-4 * nphi);  // <phi,iQx>
    CHECK(std::abs(rd.defects[4]) < 1e-4 * nphi);  // <phi,BQ>
}

TEST_CASE("renormalize_tangent: already-orthogonal input passes through") {
    const Setup& s = setup();
    // phi itself is orthogonal to iQ and Qx, so a second pass is the identity
    RenormalizedDirection rd = renormalize_tangent(s.prof, s.phi, s.xi.data());
    CHECK(std::abs(rd.a) < 1e-10);
    CHECK(std::abs(rd.b) < 1e-10);
    CHECK(l2_norm(rd.phi - s.phi) < 1e-10 * l2_norm(s.phi));
}

TEST_CASE("expddp identity for the renormalized direction on 100 random psi") {
    const Setup& s = setup();
    const ComplexField BQ = apply_B(s.prof.Q, s.xi.data());
    std::mt19937_64 rng(55);
    const double scale = l2_norm(BQ);
    for (int t = 0; t < 100; ++t) {
        ComplexField psi = smooth_random(s.grid, rng);
        const double lhs = action_hessian_form(s.prof.Q, s.phi, psi, s.params);
        const double rhs = -pairing(BQ, psi);
        CHECK(std::abs(lhs - rhs) < 1e-4 * scale * l2_norm(psi));
    }
}

TEST_CASE("rho coefficient against the J-identity route") {
    const Setup& s = setup();
    const double coef = rho_coefficient(s.prof, s.phi, s.xi.data());
    // independent route: <Bu,u> = 2 J(u) = 2(xi1 M + xi2 P)
    const double bphiphi = 2.0 * J_functional(s.phi, s.xi.data());
    const double bqbq = pairing(apply_B(s.prof.Q, s.xi.data()),
                                apply_B(s.prof.Q, s.xi.data()));
    CHECK(coef == doctest::Approx(-bphiphi / (2.0 * bqbq)).epsilon(1e-11));
    CHECK(rho(0.0, coef) == 0.0);
    CHECK(rho(-0.3, coef) == rho(0.3, coef));
}

TEST_CASE("rho_tilde: zero at zero, tight constraint, quadratic limit") {
    const Setup& s = setup();
    RhoTildeResult r0 = rho_tilde(0.0, s.prof, s.phi, s.xi.data());
    CHECK(std::abs(r0.value) < 1e-14);

    const double coef = rho_coefficient(s.prof, s.phi, s.xi.data());
    double prev_gap = HUGE_VAL;
    for (double lam : {1e-2, 5e-3, 2.5e-3}) {
        RhoTildeResult r = rho_tilde(lam, s.prof, s.phi, s.xi.data());
        CHECK(r.residual < 1e-12);
        const double gap = std::abs(r.value / (lam * lam) - coef);
        CHECK(gap < prev_gap + 1e-14);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-3 * std::abs(coef));
}

TEST_CASE("decompose: fixed point at Q and exact orbit recovery") {
    const Setup& s = setup();
    ModulationState st = decompose(s.prof.Q, s.prof, s.phi, s.xi.data(), {0, 0, 0});
    CHECK(st.converged);
    CHECK(std::abs(st.y) < 1e-12);
    CHECK(std::abs(st.gamma) < 1e-12);
    CHECK(std::abs(st.lambda) < 1e-12);
    CHECK(st.eps_h1 < 1e-10);

    // u(x) = Q(x - 0.3) e^{-0.7 i}  ->  y = 0.3, gamma = 0.7
    ComplexField u = translate(s.prof.Q, -0.3);
    for (auto& z : u.samples) z *= std::polar(1.0, -0.7);
    st = decompose(u, s.prof, s.phi, s.xi.data(), {0, 0, 0});
    CHECK(st.converged);
    CHECK(st.y == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(st.gamma == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(std::abs(st.lambda) < 1e-10);
    CHECK(st.eps_h1 < 1e-9);
}

TEST_CASE("decompose: by-construction lambda recovery") {
    const Setup& s = setup();
    const double coef = rho_coefficient(s.prof, s.phi, s.xi.data());
    const ComplexField BQ = apply_B(s.prof.Q, s.xi.data());
    ComplexField u = s.prof.Q + 0.01 * s.phi + rho(0.01, coef) * BQ;
    ModulationState st = decompose(u, s.prof, s.phi, s.xi.data(), {0, 0, 0});
    CHECK(st.converged);
    CHECK(st.lambda == doctest::Approx(0.01).epsilon(1e-8));
    CHECK(st.eps_h1 < 1e-10);
}

TEST_CASE("decompose round-trip with constrained radiation") {
    const Setup& s = setup();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uy(-0.5, 0.5), ug(-1.5, 1.5),
        ul(-0.05, 0.05), un(-0.05, 0.05);
    for (int trial = 0; trial < 25; ++trial) {
        const double y0 = uy(rng), g0 = ug(rng), l0 = ul(rng);
        ComplexField eps0 = project_off(
            smooth_random(s.grid, rng), {&s.prof.Qx, &s.prof.iQ, &s.phi});
        const double target = 1e-3 / h1_norm(eps0);
        for (auto& z : eps0.samples) z *= target;

        ComplexField u = compose(s.prof, s.phi, s.xi.data(), y0, g0, l0, &eps0);
        // the decomposition map is local; seed near the truth as tracking does
        ModulationState st = decompose(u, s.prof, s.phi, s.xi.data(),
                                       {y0 + un(rng), g0 + un(rng), l0 + un(rng)});
        REQUIRE(st.converged);
        CHECK(std::abs(st.y - y0) < 1e-10);
        CHECK(std::abs(st.gamma - g0) < 1e-10);
        CHECK(std::abs(st.lambda - l0) < 1e-8);
        CHECK(h1_norm(st.eps - eps0) < 1e-8);
        // orthogonality of the recovered radiation
        if (st.eps_h1 > 1e-12) {
            CHECK(std::abs(pairing(st.eps, s.prof.Qx)) < 1e-9 * st.eps_h1 +
                                                             1e-12);
            CHECK(std::abs(pairing(st.eps, s.prof.iQ)) < 1e-9 * st.eps_h1 +
                                                             1e-12);
            CHECK(std::abs(pairing(st.eps, s.phi)) < 1e-9 * st.eps_h1 + 1e-12);
        }
    }
}

TEST_CASE("check_eps_BQ: bookkeeping exactness and quadratic decay") {
    const Setup& s = setup();
    const ComplexField BQ = apply_B(s.prof.Q, s.xi.data());

    // forced component comes back exactly
    ModulationState fake;
    fake.eps = (0.1 / pairing(BQ, BQ)) * BQ;
    CHECK(check_eps_BQ(fake, s.prof, s.xi.data()) == doctest::Approx(0.1).epsilon(1e-12));

    // Theorem-recipe family: <eps, BQ> decays at least quadratically in lambda
    double prev = HUGE_VAL;
    for (double lam : {0.04, 0.02, 0.01}) {
        RhoTildeResult rt = rho_tilde(lam, s.prof, s.phi, s.xi.data());
        ComplexField u = s.prof.Q + lam * s.phi + rt.value * BQ;
        ModulationState st = decompose(u, s.prof, s.phi, s.xi.data(), {0, 0, lam});
        REQUIRE(st.converged);
        const double v = std::abs(check_eps_BQ(st, s.prof, s.xi.data()));
        if (prev != HUGE_VAL) CHECK(prev > 3.5 * v);  // halving lambda: >= ~4x
        prev = v;
    }
}

TEST_CASE("coercivity at the degenerate point (reduced grid)") {
    const double sigma = 1.5, omega = 1.0;
    GridSpec g(60.0, 256);
    DegeneracyData dd = analyze_degeneracy(sigma, omega, g, 1e-4, 1e-2);
    SolitonParams p(sigma, omega, dd.c_star);
    SolitonProfile prof = build_profile(p, g);
    ComplexField phit = tangent_vector(p, g, dd.xi.data(), param_step(1.0));
    ComplexField phi = renormalize_tangent(prof, phit, dd.xi.data()).phi;

    CoercivityEstimate ce = coercivity_estimate(prof, phi, dd.xi.data());
    CHECK(ce.kappa > 0.0);
    CHECK(ce.kappa <= ce.kappa_subspace);
    CHECK(ce.form_asymmetry < 0.05);

    // Rayleigh quotient at iQ (before any projection) is ~ 0; at N=256 the
    // spectral floor of the null identity dominates
    const double riq = action_hessian_form(prof.Q, prof.iQ, prof.iQ, p) /
                       (h1_norm(prof.iQ) * h1_norm(prof.iQ));
    CHECK(std::abs(riq) < 1e-5);

    // sampled tp2 inequality on the 3-constraint subspace
    const ComplexField BQ = apply_B(prof.Q, dd.xi.data());
    std::mt19937_64 rng(7);
    int violations = 0;
    for (int t = 0; t < 200; ++t) {
        ComplexField e = project_off(smooth_random(g, rng, 24),
                                     {&prof.Qx, &prof.iQ, &phi});
        const double lhs = action_hessian_form(prof.Q, e, e, p);
        const double h1 = h1_norm(e);
        const double ebq = pairing(e, BQ);
        if (lhs < ce.kappa * h1 * h1 - ebq * ebq / ce.kappa - 1e-10) ++violations;
    }
    CHECK(violations == 0);

    // the 4-constraint minimizer achieves the subspace quotient
    const double q = action_hessian_form(prof.Q, ce.minimizer, ce.minimizer, p) /
                     (h1_norm(ce.minimizer) * h1_norm(ce.minimizer));
    CHECK(q == doctest::Approx(ce.kappa_subspace).epsilon(1e-6));
}

TEST_CASE("action expansion probe: even terms cancel, cubic matches d3/6") {
    const Setup& s = setup();
    std::vector<double> lams;
    for (double l : {0.02, 0.04, 0.06, 0.08, 0.1}) {
        lams.push_back(l);
        lams.push_back(-l);
    }
    ExpansionProbe pr =
        action_expansion_probe(s.prof, s.phi, s.xi.data(), lams, nullptr, s.d3);
    CHECK(pr.offset == 0.0);
    CHECK(pr.c3_ratio == doctest::Approx(1.0).epsilon(0.05));
    const double c3 = std::abs(pr.coeff[3]);
    CHECK(std::abs(pr.coeff[0]) < 1e-3 * c3);
    CHECK(std::abs(pr.coeff[2]) < 0.05 * c3);

    // with a radiation offset the quadratic term is removed before the fit
    std::mt19937_64 rng(3);
    ComplexField eps = project_off(smooth_random(s.grid, rng),
                                   {&s.prof.Qx, &s.prof.iQ, &s.phi});
    const double amp = 1e-3 / h1_norm(eps);
    for (auto& z : eps.samples) z *= amp;
    ExpansionProbe pe =
        action_expansion_probe(s.prof, s.phi, s.xi.data(), lams, &eps, s.d3);
    CHECK(pe.offset ==
          doctest::Approx(0.5 * action_hessian_form(s.prof.Q, eps, eps, s.params))
              .epsilon(1e-12));
    CHECK(pe.c3_ratio == doctest::Approx(1.0).epsilon(0.08));

    // leaving the cubic regime trips the fit-residual guard
    std::vector<double> wild;
    for (double l : {0.4, 0.8, 1.2, 1.6}) {
        wild.push_back(l);
        wild.push_back(-l);
    }
    CHECK_THROWS(action_expansion_probe(s.prof, s.phi, s.xi.data(), wild, nullptr,
                                        s.d3, 0.05));
}
