#include "gdnls/soliton.hpp"

#include <algorithm>
#include <cmath>

namespace gdnls {

SolitonParams::SolitonParams(double s, double w, double c)
    : sigma(s), omega(w), speed(c) {
    if (!(s > 1.0 && s < 2.0))
        throw std::invalid_argument("SolitonParams: sigma must lie in (1,2)");
    if (!(w > 0.0)) throw std::invalid_argument("SolitonParams: omega must be positive");
    if (!(4.0 * w - c * c > 0.0))
        throw std::invalid_argument("SolitonParams: requires 4*omega > c^2");
}

double SolitonParams::amplitude_decay_rate() const {
    return 0.5 * std::sqrt(4.0 * omega - speed * speed);
}

double SolitonParams::envelope_decay_rate() const {
    return sigma * std::sqrt(4.0 * omega - speed * speed);
}

namespace {

struct PsiConsts {
    double a;       // sigma * sqrt(4w - c^2)
    double z;       // c / (2 sqrt(w))
    double log_num; // log of (s+1)(4w-c^2) / (2 sqrt(w))
};

PsiConsts psi_consts(const SolitonParams& p) {
    const double disc = 4.0 * p.omega - p.speed * p.speed;
    PsiConsts c;
    c.a = p.sigma * std::sqrt(disc);
    c.z = p.speed / (2.0 * std::sqrt(p.omega));
    c.log_num = std::log((p.sigma + 1.0) * disc / (2.0 * std::sqrt(p.omega)));
    return c;
}

// log(cosh(t) - z), stable for large |t|
double log_cosh_minus(double t, double z) {
    const double at = std::abs(t);
    if (at < 30.0) return std::log(std::cosh(at) - z);
    return at - M_LN2 + std::log1p(std::exp(-2.0 * at) - 2.0 * z * std::exp(-at));
}

}  // namespace

double psi_value(const SolitonParams& p, double x) {
    if (!p.admissible())
        throw std::invalid_argument("psi_value: parameters outside the admissible cone");
    const PsiConsts c = psi_consts(p);
    return std::exp((c.log_num - log_cosh_minus(c.a * x, c.z)) / (2.0 * p.sigma));
}

double phase_tail_bound(const SolitonParams& p, double half_length) {
    // Psi^(2s) = A / (cosh(a y) - z); for a|y| >= ln(4(1+|z|)) the
    // denominator exceeds e^(a|y|)/4, so the tail is below 4A e^(-aY)/a.
    const PsiConsts c = psi_consts(p);
    const double A = std::exp(c.log_num);
    const double t0 = std::log(4.0 * (1.0 + std::abs(c.z)));
    if (c.a * half_length < t0) return HUGE_VAL;
    return 4.0 * A * std::exp(-c.a * half_length) / c.a;
}

std::vector<double> phase_value(const SolitonParams& p, const GridSpec& g,
                                double tail_tol) {
    if (!p.admissible())
        throw std::invalid_argument("phase_value: parameters outside the admissible cone");
    const double tail = phase_tail_bound(p, 0.5 * g.length);
    if (!(tail < tail_tol))
        throw ProfileBuildError("phase_value: left-tail mass of Psi^(2s) above tolerance; "
                                "grid too small for these parameters");
    ComplexField env(g);
    for (std::size_t j = 0; j < g.count; ++j) {
        const double v = psi_value(p, g.node(j));
        env[j] = std::pow(v, 2.0 * p.sigma);
    }
    std::vector<double> cum = cumulative_integral(env);
    std::vector<double> th(g.count);
    const double c_half = 0.5 * p.speed;
    const double inv = 1.0 / (2.0 * p.sigma + 2.0);
    for (std::size_t j = 0; j < g.count; ++j)
        th[j] = c_half * g.node(j) - inv * cum[j];
    return th;
}

SolitonProfile build_profile(const SolitonParams& p, const GridSpec& g,
                             const BuildOptions& opt) {
    SolitonProfile prof;
    prof.params = p;
    prof.grid = g;
    prof.Psi.resize(g.count);
    for (std::size_t j = 0; j < g.count; ++j) prof.Psi[j] = psi_value(p, g.node(j));

    const double bmag = std::max(prof.Psi.front(),
                                 psi_value(p, 0.5 * g.length));
    if (!(bmag < opt.boundary_tol))
        throw ProfileBuildError("build_profile: |Q| at the box edge is " +
                                std::to_string(bmag) +
                                "; enlarge L for these parameters");
    prof.boundary_magnitude = bmag;

    prof.theta = phase_value(p, g, opt.tail_tol);
    prof.Q = ComplexField(g);
    for (std::size_t j = 0; j < g.count; ++j)
        prof.Q[j] = std::polar(prof.Psi[j], prof.theta[j]);
    prof.Qx = spectral_derivative(prof.Q);
    prof.iQ = Complex(0.0, 1.0) * prof.Q;

    // measured log-slope bounds; nodes with Psi near the spectral roundoff
    // floor are excluded (the derivative there is noise, not signal)
    double psi_max = 0.0;
    for (double v : prof.Psi) psi_max = std::max(psi_max, v);
    const double floor = 1e-10 * psi_max;
    double rmin = HUGE_VAL, rmax = 0.0;
    for (std::size_t j = 0; j < g.count; ++j) {
        if (prof.Psi[j] < floor) continue;
        const double r = std::abs(prof.Qx[j]) / prof.Psi[j];
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    prof.c0_est = rmin;
    prof.c0_inv_est = rmax;
    return prof;
}

double soliton_residual(const ComplexField& Q, const SolitonParams& p) {
    const ComplexField Qx = spectral_derivative(Q);
    const ComplexField Qxx = spectral_derivative(Qx);
    ComplexField r(Q.grid);
    const Complex I(0.0, 1.0);
    for (std::size_t j = 0; j < Q.size(); ++j) {
        const double m = std::pow(std::abs(Q[j]), 2.0 * p.sigma);
        r[j] = -Qxx[j] + p.omega * Q[j] + p.speed * I * Qx[j] - I * m * Qx[j];
    }
    return l2_norm(r) / l2_norm(Q);
}

double soliton_residual(const SolitonProfile& prof) {
    return soliton_residual(prof.Q, prof.params);
}

double param_step(double value) {
    return std::max(1e-5, 1e-4 * std::abs(value));
}

ComplexField param_derivative(const SolitonParams& p, const GridSpec& g,
                              ParamAxis which, double h,
                              const BuildOptions& opt) {
    SolitonParams plus = p, minus = p;
    if (which == ParamAxis::omega) {
        plus.omega += h;
        minus.omega -= h;
    } else {
        plus.speed += h;
        minus.speed -= h;
    }
    if (!plus.admissible() || !minus.admissible())
        throw std::invalid_argument("param_derivative: perturbed parameters leave the cone");
    SolitonProfile qp = build_profile(plus, g, opt);
    SolitonProfile qm = build_profile(minus, g, opt);
    return (1.0 / (2.0 * h)) * (qp.Q - qm.Q);
}

ComplexField tangent_vector(const SolitonParams& p, const GridSpec& g,
                            const double xi[2], double h,
                            const BuildOptions& opt) {
    if (xi[0] == 0.0 && xi[1] == 0.0)
        throw std::invalid_argument("tangent_vector: xi must be nonzero");
    ComplexField out(g);
    if (xi[0] != 0.0) out += xi[0] * param_derivative(p, g, ParamAxis::omega, h, opt);
    if (xi[1] != 0.0) out += xi[1] * param_derivative(p, g, ParamAxis::speed, h, opt);
    return out;
}

GridSpec suggest_grid(const SolitonParams& p, double boundary_tol,
                      double min_length, std::size_t max_count) {
    const double rate = p.amplitude_decay_rate();
    const double amp = psi_value(p, 0.0);
    // |Q|(L/2) ~ amp' e^{-rate L/2}; pad by a couple of decades
    double half = (std::log(std::max(amp, 1.0)) - std::log(boundary_tol) + 6.0) / rate;
    double L = std::max(2.0 * half, min_length);
    // peak curvature scale of cosh(a x) - z near x = 0
    const PsiConsts c = psi_consts(p);
    const double width = std::sqrt(2.0 * std::max(1.0 - c.z, 1e-3)) / c.a;
    const double dx_needed = std::min(0.08, width / 12.0);
    std::size_t n = 16;
    while (L / static_cast<double>(n) > dx_needed && n < max_count) n *= 2;
    return GridSpec(L, n);
}

}  // namespace gdnls
