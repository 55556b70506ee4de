#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gdnls/modulation.hpp"

namespace gdnls {

/// f(u) = i |u|^(2s) u_x, the nonlinear term of the flow.
ComplexField nonlinearity(const ComplexField& u, double sigma);

struct SimConfig {
    GridSpec grid;
    SolitonParams params;
    double dt = 5e-4;
    double T = 5.0;
    double dealias_fraction = 2.0 / 3.0;  // mask on the derivative factor
    std::size_t sample_stride = 100;      // steps between diagnostics/snapshots
    double mass_drift_halt = 1e-6;        // relative drift that stops the run
    double lambda0 = 0.0;                 // unstable-data amplitude
    double tube_radius = 0.0;             // 0 = auto (see instability driver)
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<ComplexField> fields;
    std::vector<double> mass_series;
    std::vector<double> momentum_series;
    std::vector<double> energy_series;
    double dt_used = 0.0;
    bool cfl_reduced = false;
    bool halted_early = false;
    double halt_time = 0.0;
    std::string halt_reason;
};

/// Integrating-factor RK4 in spectral space: the linear flow e^{i k^2 t} is
/// applied exactly; f(u) is evaluated pseudospectrally with the 2/3-rule
/// mask on the derivative factor (the |u|^(2s) factor is non-polynomial and
/// cannot be fully dealiased; conservation monitors bound the leftover).
/// Halts early on NaN/Inf or when the relative mass drift exceeds the
/// configured tolerance; both are recorded, not thrown.
TrajectoryRecord evolve(const SimConfig& cfg, const ComplexField& u0);

/// Theorem-style initial data u0 = Q + l0 phi + rho~(l0) BQ with
/// J(u0) = J(Q) enforced by the rho~ solve.
ComplexField build_unstable_data(const SolitonProfile& prof,
                                 const ComplexField& phi, const double xi[2],
                                 double lambda0);

struct ModulationSeries {
    std::vector<double> times;
    std::vector<double> y, gamma, lambda;
    std::vector<double> eps_h1, eps_BQ;
    std::vector<int> newton_iters;
    std::vector<ComplexField> eps_fields;
    std::optional<double> exit_time;  // tube exit t0, if any
    std::string exit_reason;
};

/// Sequential decomposition along a stored trajectory, each solve seeded by
/// the previous state. Stops at the first decomposition failure or
/// ||eps||_H1 >= delta and records that time as t0.
ModulationSeries track_modulation(const TrajectoryRecord& traj,
                                  const SolitonProfile& prof,
                                  const ComplexField& phi, const double xi[2],
                                  double delta);

struct RateSeries {
    std::vector<double> times;  // interior sample times
    std::vector<double> lambda_dot;
    std::vector<double> y_dot_minus_c;
    std::vector<double> gamma_dot_plus_omega;
    double fitted_C = 0.0;  // least-squares slope of rate sum vs |lambda| + ||eps||
};

/// Centered-difference modulation rates; y and gamma are unwrapped against
/// the free drift (c, -omega) before differencing.
RateSeries parameter_rates(const ModulationSeries& ms, const SolitonParams& p,
                           double box_length);

struct VirialCoeffs {
    double alpha = 0.0;
    double beta = 0.0;
    double system_residual = 0.0;  // residual of the 2x2 solve
    double identity_gap = 0.0;     // |<BQ, aQ + b iQx> + <B phi, phi>| (relative)
};

VirialCoeffs virial_coefficients(const SolitonProfile& prof,
                                 const ComplexField& phi, const double xi[2]);

struct VirialSeries {
    std::vector<double> times;
    std::vector<double> I;
    std::vector<double> I_dot;   // centered differences (ends one-sided)
    std::vector<double> ratio;   // I_dot / (d3 lambda^2 / 2)
};

VirialSeries virial_series(const ModulationSeries& ms,
                           const SolitonProfile& prof, const ComplexField& phi,
                           const VirialCoeffs& vc, double d3);

/// inf over (y, gamma) of ||u - Q(.-y) e^{i gamma}||_H1. Coarse shift from
/// the FFT cross-correlation peak, closed-form optimal phase, then
/// golden-section refinement of the shift.
double orbital_distance(const ComplexField& u, const SolitonProfile& prof);

/// Windowed lattice search used to certify orbital_distance in tests:
/// evaluates the exact distance on an ny x ng lattice over the given ranges.
double orbital_distance_brute(const ComplexField& u, const SolitonProfile& prof,
                              double y_lo, double y_hi, double g_lo, double g_hi,
                              int ny = 64, int ng = 64);

// pieces of the radiation equation (all in the Q frame)
ComplexField R1_term(const SolitonProfile& prof, const ComplexField& eta);
ComplexField R2_term(const SolitonProfile& prof, const ComplexField& eta);
/// R~ = f(Q+eta) - f(Q) - R1 - R2 (definitional bookkeeping).
ComplexField Rtilde_term(const SolitonProfile& prof, const ComplexField& eta);

/// Assembles every term of the radiation equation across one sampled
/// interval [t_k, t_{k+1}] (time derivative and rates by differencing, field
/// terms at the midpoint average) and returns the L2 norm of the total.
double eps_equation_residual(const ModulationSeries& ms, std::size_t k,
                             const SolitonProfile& prof, const ComplexField& phi,
                             const double xi[2]);

}  // namespace gdnls
