#pragma once

#include "gdnls/degeneracy.hpp"
#include "gdnls/dynamics.hpp"

namespace gdnls {

/// Everything the degenerate-point experiments share: the profile at
/// c = 2 z0 sqrt(w), the oriented null direction, the tangent vector and its
/// renormalization, and the third derivative through both routes.
struct DegenerateSetup {
    SolitonParams params;
    GridSpec grid;
    SolitonProfile prof;
    DegeneracyData degeneracy;
    ComplexField phit;
    RenormalizedDirection renorm;
    double rho_coef = 0.0;
    ThirdDerivative d3_fd;      // five-point value, half-step value, identity
    double d3_phi_route = 0.0;  // S'''(Q)(phi,phi,phi) + 3 <B phi, phi>
    double d3 = 0.0;            // oriented value used downstream

    const ComplexField& phi() const { return renorm.phi; }
    const double* xi() const { return degeneracy.xi.data(); }
};

DegenerateSetup make_degenerate_setup(double sigma, double omega,
                                      const GridSpec& grid,
                                      double hessian_step = 1e-4,
                                      double d3_step = 1e-2);

struct InstabilityConfig {
    double sigma = 1.5;
    double omega = 1.0;
    GridSpec grid{80.0, 2048};
    GridSpec kappa_grid{60.0, 512};
    double dt = 5e-4;
    double T = 60.0;
    std::size_t sample_stride = 100;
    double lambda0 = 0.05;          // 0 runs the stable control as the main branch
    double reference_lambda0 = 0.05;  // distance scale when lambda0 = 0
    double tube_radius = 0.0;       // 0 = auto: the radiation-bound envelope
                                    // at lambda = 1.5 * lambda0
    double mass_drift_halt = 1e-4;  // the post-exit collapse is reported, not fatal
    double alpha0_factor = 10.0;
    double control_factor = 2.0;
    double transient = 1.0;         // excluded from the I-dot ratio window
    double eet_margin = 0.5;
    double ratio_lo = 0.5;
    double ratio_hi = 1.5;
    bool run_control = true;
    bool run_mirror = false;        // also run -lambda0 (reported only)
};

struct DistanceSeries {
    std::vector<double> times;
    std::vector<double> dist;
};

struct InstabilityResult {
    double kappa = 0.0;
    double kappa_subspace = 0.0;
    double d3 = 0.0;
    double tube_radius = 0.0;
    double initial_distance = 0.0;

    TrajectoryRecord perturbed;
    ModulationSeries series;
    VirialCoeffs virial;
    VirialSeries virial_series;
    DistanceSeries perturbed_dist;
    RateSeries rates;

    std::optional<double> exit_time;          // t0
    std::optional<double> alpha0_cross_time;
    bool lambda_bound_ok = false;   // lambda(t) >= lambda0/2 while tracked
    bool eet_ok = false;            // ||eps||^2 <= -(2/kappa) d3 lambda^3 (1+margin)
    double eet_worst_ratio = 0.0;   // max of ||eps||^2 / bound over tracked samples
    double idot_ratio_min = 0.0;
    double idot_ratio_max = 0.0;
    bool idot_ok = false;
    bool linear_decay_ok = false;  // I(t)-I(0) <= (1/32) d3 lambda0^2 t past the transient
    bool alpha0_crossed = false;

    DistanceSeries control_dist;
    double control_max_distance = 0.0;
    bool control_ok = false;

    DistanceSeries mirror_dist;     // only when run_mirror
    std::optional<double> mirror_cross_time;
};

/// The Theorem-style experiment: build u0 = Q + l0 phi + rho~(l0) BQ, evolve,
/// track the decomposition until tube exit, evaluate the Virial series and
/// the orbital-distance threshold, and run the lambda0 = 0 control for the
/// same wall-clock window.
InstabilityResult run_instability_experiment(const InstabilityConfig& cfg);

}  // namespace gdnls
