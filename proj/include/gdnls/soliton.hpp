#pragma once

#include <vector>

#include "gdnls/grid.hpp"

namespace gdnls {

/// Parameters (sigma, omega, c) of the solitary-wave family. Valid range:
/// 1 < sigma < 2 and 4*omega > c^2 (strict).
struct SolitonParams {
    double sigma = 1.5;
    double omega = 1.0;
    double speed = 0.0;

    SolitonParams() = default;
    SolitonParams(double s, double w, double c);

    bool admissible() const {
        return sigma > 1.0 && sigma < 2.0 && omega > 0.0 &&
               4.0 * omega - speed * speed > 0.0;
    }
    /// Exponential decay rate of |Q|: sqrt(4w - c^2)/2.
    double amplitude_decay_rate() const;
    /// Decay rate of Psi^(2 sigma): sigma * sqrt(4w - c^2).
    double envelope_decay_rate() const;
};

struct ProfileBuildError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The assembled wave Q = Psi * exp(i theta) with its derivatives and
/// symmetry generators. Immutable after build.
struct SolitonProfile {
    SolitonParams params;
    GridSpec grid;
    ComplexField Q;
    ComplexField Qx;              // translation generator
    ComplexField iQ;              // rotation generator
    std::vector<double> Psi;      // |Q| at the nodes, positive
    std::vector<double> theta;    // phase at the nodes
    double boundary_magnitude = 0.0;
    double c0_est = 0.0;          // measured lower bound of |Q'/Q|
    double c0_inv_est = 0.0;      // measured upper bound
};

/// Closed-form magnitude
///   Psi(x) = [ (s+1)(4w-c^2) / (2 sqrt(w) (cosh(s sqrt(4w-c^2) x) - c/(2 sqrt(w)))) ]^(1/(2s)),
/// evaluated in log space so large |x| cannot overflow cosh.
double psi_value(const SolitonParams& p, double x);

/// Analytic bound on the left tail integral_{-inf}^{-L/2} Psi^(2s) dy.
double phase_tail_bound(const SolitonParams& p, double half_length);

/// Phase theta(x_j) = (c/2) x_j - (1/(2s+2)) * integral_{-L/2}^{x_j} Psi^(2s),
/// with the left tail required below tail_tol (it is added as zero).
std::vector<double> phase_value(const SolitonParams& p, const GridSpec& g,
                                double tail_tol = 1e-12);

struct BuildOptions {
    double boundary_tol = 1e-10;
    double tail_tol = 1e-12;
};

SolitonProfile build_profile(const SolitonParams& p, const GridSpec& g,
                             const BuildOptions& opt = {});

/// Relative L2 residual of -Q_xx + w Q + i c Q_x - i |Q|^(2s) Q_x.
double soliton_residual(const SolitonProfile& prof);
double soliton_residual(const ComplexField& Q, const SolitonParams& p);

enum class ParamAxis { omega, speed };

/// Default finite-difference step for parameter derivatives.
double param_step(double value);

/// Central difference (Q_{p+h} - Q_{p-h}) / 2h with both profiles on the
/// same grid. Throws if a perturbed parameter set leaves the cone.
ComplexField param_derivative(const SolitonParams& p, const GridSpec& g,
                              ParamAxis which, double h,
                              const BuildOptions& opt = {});

/// Tangent vector of the parameter curve: xi1 * dQ/dw + xi2 * dQ/dc.
ComplexField tangent_vector(const SolitonParams& p, const GridSpec& g,
                            const double xi[2], double h,
                            const BuildOptions& opt = {});

/// Smallest grid (L, N) resolving the profile: L from the decay rate and
/// boundary tolerance, N from a resolution bound on the peak width.
GridSpec suggest_grid(const SolitonParams& p, double boundary_tol = 1e-10,
                      double min_length = 0.0, std::size_t max_count = 65536);

}  // namespace gdnls
