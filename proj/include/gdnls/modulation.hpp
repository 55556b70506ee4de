#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gdnls/functionals.hpp"

namespace gdnls {

/// phi = phit - a Qx - b iQ, projected off the symmetry null space; the
/// coefficients solve the 2x2 system making phi orthogonal to iQ and Qx.
struct RenormalizedDirection {
    ComplexField phi;
    double a = 0.0;
    double b = 0.0;
    // recorded orthogonality defects: <phi,iQ>, <phi,Qx>, <phi,Q>, <phi,iQx>, <phi,BQ>
    std::array<double, 5> defects{};
};

RenormalizedDirection renormalize_tangent(const SolitonProfile& prof,
                                          const ComplexField& phit,
                                          const double xi[2]);

/// Quadratic coefficient of rho: -<B phi, phi> / (2 <BQ, BQ>).
double rho_coefficient(const SolitonProfile& prof, const ComplexField& phi,
                       const double xi[2]);

inline double rho(double lambda, double coefficient) {
    return coefficient * lambda * lambda;
}

struct RhoTildeResult {
    double value = 0.0;
    double residual = 0.0;  // |J(Q + l phi + value BQ) - J(Q)| / |J(Q)|
    int iters = 0;
};

/// Root of J(Q + lambda phi + r BQ) = J(Q) in r, Newton-seeded at
/// rho(lambda). The constraint is quadratic in r, so convergence is
/// immediate; non-convergence within 50 iterations is an error.
RhoTildeResult rho_tilde(double lambda, const SolitonProfile& prof,
                         const ComplexField& phi, const double xi[2],
                         double rel_tol = 1e-12);

struct ModulationState {
    double y = 0.0;
    double gamma = 0.0;
    double lambda = 0.0;
    ComplexField eps;
    double eps_h1 = 0.0;
    double eps_BQ = 0.0;
    double residual_norm = 0.0;  // max |F_i| at exit
    int newton_iters = 0;
    bool converged = false;
};

struct DecomposeOptions {
    double tol_factor = 1e-13;  // convergence: max|F| < tol_factor * <Q,Q>
    int max_iters = 50;
    double fd_step = 1e-7;
    int max_damping = 12;
};

/// Modulation decomposition: find (y, gamma, lambda) so that
///   eps(x) = u(x+y) e^{i gamma} - [Q + lambda phi + rho(lambda) BQ](x)
/// is orthogonal to Qx, iQ and phi. Newton iteration with spectral
/// translation; the analytic base-point Jacobian preconditions the first
/// step, forward differences refresh it afterwards. A returned state with
/// converged=false is a tube-exit signal, not a failure of the caller.
ModulationState decompose(const ComplexField& u, const SolitonProfile& prof,
                          const ComplexField& phi, const double xi[2],
                          const std::array<double, 3>& seed,
                          const DecomposeOptions& opt = {});

/// Compose the decomposition: u(x) = [Q + lambda phi + rho BQ + eps](x - y) e^{-i gamma}.
ComplexField compose(const SolitonProfile& prof, const ComplexField& phi,
                     const double xi[2], double y, double gamma, double lambda,
                     const ComplexField* eps = nullptr);

/// <eps, BQ> bookkeeping for Lemma-style smallness checks.
double check_eps_BQ(const ModulationState& state, const SolitonProfile& prof,
                    const double xi[2]);

struct CoercivityEstimate {
    double kappa = 0.0;            // certified constant of the quadratic bound
    double kappa_subspace = 0.0;   // min S''/H1 Rayleigh quotient, 4 constraints
    double form_asymmetry = 0.0;   // relative symmetrization defect of S''
    ComplexField minimizer;        // constrained minimizer of the quotient
};

/// Coercivity of S''(Q) on the discrete subspace orthogonal to
/// {iQ, Qx, phi, BQ}: kappa_subspace is the smallest generalized eigenvalue
/// of the S'' form against the H1 Gram there. kappa is then tightened by
/// bisection to the largest constant for which
///   S''(Q)(e,e) >= kappa ||e||_H1^2 - (1/kappa) <e, BQ>^2
/// is positive semidefinite on the whole {iQ, Qx, phi}-orthogonal subspace,
/// so the reported inequality holds for every constrained direction.
CoercivityEstimate coercivity_estimate(const SolitonProfile& prof,
                                       const ComplexField& phi,
                                       const double xi[2],
                                       double asym_tol = 0.05);

struct ExpansionProbe {
    std::vector<double> lambdas;
    std::vector<double> deltas;       // S(Q + l phi + rho(l) BQ [+eps]) - S(Q) [- offset]
    std::array<double, 4> coeff{};    // least-squares fit c0 + c1 l + c2 l^2 + c3 l^3
    double fit_residual = 0.0;        // rms residual / rms delta
    double offset = 0.0;              // 1/2 S''(Q)(eps,eps) when eps is supplied
    double c3_ratio = 0.0;            // coeff[3] / (d3/6) when d3 != 0
};

/// Sample the action along the curved perturbation and fit the cubic
/// landscape; with eps supplied the quadratic radiation offset is removed
/// before fitting. A relative fit residual above max_fit_residual means the
/// lambda range left the cubic regime and is an error.
ExpansionProbe action_expansion_probe(const SolitonProfile& prof,
                                      const ComplexField& phi,
                                      const double xi[2],
                                      const std::vector<double>& lambdas,
                                      const ComplexField* eps = nullptr,
                                      double d3 = 0.0,
                                      double max_fit_residual = 0.5);

}  // namespace gdnls
