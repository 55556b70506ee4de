#pragma once

#include <array>
#include <functional>

#include "gdnls/soliton.hpp"

namespace gdnls {

// Conserved functionals with the normalizations
//   M = 1/2 int |u|^2
//   P = 1/2 Re int i conj(u) u_x
//   E = 1/2 int |u_x|^2 - 1/(2s+2) Re int i |u|^(2s) conj(u) u_x
double mass(const ComplexField& u);
double momentum(const ComplexField& u);
double energy(const ComplexField& u, double sigma);

/// Action S = E + w M + c P.
double action(const ComplexField& u, const SolitonParams& p);

/// Quadratic / nonlinear split S = Qpart - Npart.
double action_quadratic_part(const ComplexField& u, const SolitonParams& p);
double action_nonlinear_part(const ComplexField& u, double sigma);

/// Scaling derivative K = d/dl S(l u) at l=1 = 2 Qpart - (2s+2) Npart.
double scaling_K(const ComplexField& u, const SolitonParams& p);

struct FunctionalReport {
    double mass = 0.0;
    double momentum = 0.0;
    double energy = 0.0;
    double action = 0.0;
    double scaling_K = 0.0;
};

FunctionalReport evaluate_functionals(const ComplexField& u, const SolitonParams& p);

/// J_xi(u) = xi1 M(u) + xi2 P(u) and its derivative B u = xi1 u + xi2 i u_x,
/// tied by <Bu, u> = 2 J(u).
double J_functional(const ComplexField& u, const double xi[2]);
ComplexField apply_B(const ComplexField& u, const double xi[2]);

/// Gradient field of S: -u_xx + w u + i c u_x - i |u|^(2s) u_x, so that
/// <S'(u), h> = pairing(gradient, h) for every h.
ComplexField action_gradient(const ComplexField& u, const SolitonParams& p);

/// Second-derivative bilinear form S''(u)(h,g).
double action_hessian_form(const ComplexField& u, const ComplexField& h,
                           const ComplexField& g, const SolitonParams& p);

/// Linearized operator at a profile: L eta with <L eta, psi> = S''(Q)(eta, psi).
/// Requires |Q| > 0 on the grid (guaranteed for built profiles).
ComplexField apply_linearized(const SolitonProfile& prof, const ComplexField& eta);

/// Third-derivative trilinear form S'''(Q)(f,h,g); fully symmetric under
/// argument permutation. Needs |Q| > 0 everywhere.
double action_third_form_at_Q(const SolitonProfile& prof, const ComplexField& f,
                              const ComplexField& h, const ComplexField& g);

// --- the scalar surface d(w,c) = S(Q_{w,c}) ---------------------------------

struct DSurface {
    double d = 0.0;
    std::array<double, 2> grad{};          // (M(Q), P(Q)) -- exact gradient
    std::array<std::array<double, 2>, 2> hessian{};  // symmetrized
    double fd_step = 0.0;
    double symmetry_defect = 0.0;          // |H01 - H10| before symmetrization

    double det() const {
        return hessian[0][0] * hessian[1][1] - hessian[0][1] * hessian[1][0];
    }
};

/// d, its exact gradient (M, P), and the Hessian as a central-difference
/// Jacobian of the gradient (one differentiation order cheaper than second
/// differences of d itself).
DSurface d_surface(const SolitonParams& p, const GridSpec& g, double h,
                   const BuildOptions& opt = {});

/// Five-point third central difference of a scalar callable; exact on cubics.
double third_directional_difference(const std::function<double(double)>& fn,
                                    double h);

struct ThirdDerivative {
    double value = 0.0;       // finite-difference value at step h
    double value_half = 0.0;  // at step h/2
    double identity = 0.0;    // S'''(Q)(phit,phit,phit) + 3 <B phit, phit>
    double rel_gap = 0.0;     // |value - identity| / |identity|
};

/// d'''_xi along the direction xi, cross-checked against the algebraic
/// identity through the tangent vector.
ThirdDerivative d_third_directional(const SolitonParams& p, const double xi[2],
                                    const GridSpec& g, double h,
                                    const BuildOptions& opt = {});

}  // namespace gdnls
