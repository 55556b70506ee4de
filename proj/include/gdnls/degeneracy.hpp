#pragma once

#include <array>
#include <vector>

#include "gdnls/functionals.hpp"

namespace gdnls {

/// F(z; s) = (s-1)^2 [I1(z)]^2 - [I2(z)]^2 with the improper integrals
///   I1 = int_0^inf (cosh y - z)^(-1/s) dy
///   I2 = int_0^inf (cosh y - z)^(-1/s-1) (z cosh y - 1) dy,
/// truncated where the exponential tail bound drops below eps_tail and then
/// integrated adaptively. Valid for -1 < z < 1, 1 <= s < 2 (s = 1 admitted
/// for the analytic test case F(0;1) = -1).
double F_sigma(double z, double sigma);

/// Magnitude scale (s-1)^2 I1^2 + I2^2 of the cancellation in F; residuals
/// of the root finder are measured against it.
double F_sigma_scale(double z, double sigma);

struct RootFindError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The unique zero of F(.; s) in (-1, 1). A scan over [-0.999, 0.999] at
/// step 0.01 must see exactly one sign change (anything else is surfaced as
/// an error, never silently resolved); bisection with secant acceleration
/// polishes the bracket until |F| < tol * scale.
double find_z0(double sigma, double tol = 1e-10);

/// Degenerate parameter set c = 2 z0(s) sqrt(w); automatically satisfies
/// 4w - c^2 = 4w (1 - z0^2) > 0.
SolitonParams degenerate_params(double sigma, double omega);

/// Unit eigenvector for the smallest-magnitude eigenvalue of a symmetric
/// 2x2 matrix, sign-normalized (first nonzero component positive). Errors
/// if the two eigenvalues are comparable (caller is off the degenerate
/// curve).
std::array<double, 2> null_vector(const std::array<std::array<double, 2>, 2>& H,
                                  double comparable_ratio = 0.2);

/// Flips xi if needed so that the third directional derivative is negative
/// (it is odd in xi). Errors when |d3_probe| is below the noise floor.
struct OrientedXi {
    std::array<double, 2> xi{};
    double d3 = 0.0;
};
OrientedXi orient_xi(const std::array<double, 2>& xi, double d3_probe,
                     double noise_floor = 1e-8);

struct DegeneracyData {
    double sigma = 0.0;
    double z0 = 0.0;
    double c_star = 0.0;
    std::array<double, 2> xi{};
    double d3 = 0.0;               // oriented (negative)
    double hessian_residual = 0.0; // ||d'' xi|| / ||d''||
    double F_residual = 0.0;       // |F(z0)| / scale
};

/// End-to-end: z0, c*, the Hessian null vector on a suitable grid, and the
/// oriented third derivative.
DegeneracyData analyze_degeneracy(double sigma, double omega,
                                  const GridSpec& grid, double hessian_step,
                                  double d3_step);

struct SweepRow {
    double sigma = 0.0;
    double z0 = 0.0;
    double F_residual = 0.0;
};

/// z0 over a sigma grid (the Figure-1 dataset); strict monotonicity is the
/// caller's check.
std::vector<SweepRow> z0_sweep(const std::vector<double>& sigmas,
                               double tol = 1e-10, int threads = 1);

}  // namespace gdnls
