#include "gdnls/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace gdnls {

namespace {
const Complex I(0.0, 1.0);

double unwrap_step(double prev, double raw, double drift, double period) {
    const double predicted = prev + drift;
    return raw + period * std::round((predicted - raw) / period);
}
}  // namespace

ComplexField nonlinearity(const ComplexField& u, double sigma) {
    const ComplexField ux = spectral_derivative(u);
    ComplexField r(u.grid);
    for (std::size_t j = 0; j < u.size(); ++j)
        r[j] = I * std::pow(std::abs(u[j]), 2.0 * sigma) * ux[j];
    return r;
}

TrajectoryRecord evolve(const SimConfig& cfg, const ComplexField& u0) {
    if (u0.grid != cfg.grid) throw GridMismatchError("evolve: grid mismatch");
    const std::size_t n = cfg.grid.count;
    const double sigma = cfg.params.sigma;
    const double dx = cfg.grid.dx();

    TrajectoryRecord rec;

    // CFL-style guard on the advective speed |u|^(2s)
    double umax = 0.0;
    for (const auto& z : u0.samples) umax = std::max(umax, std::abs(z));
    const double speed = std::max(1.0, std::pow(umax, 2.0 * sigma));
    double dt = cfg.dt;
    while (dt > 0.5 * dx / speed) {
        dt *= 0.5;
        rec.cfl_reduced = true;
    }
    rec.dt_used = dt;
    const std::size_t nsteps = static_cast<std::size_t>(std::llround(cfg.T / dt));

    // spectral tables. The 2/3 band is removed from the state and from the
    // nonlinear output (Orszag truncation): the derivative factor is fully
    // dealiased and, crucially, the upper band cannot feed back through the
    // non-polynomial modulus factor. Residual in-band aliasing of |u|^(2s)
    // is bounded by the conservation monitors.
    std::vector<double> k(n);
    std::vector<double> band(n);
    std::vector<Complex> e_half(n), e_full(n), dmask(n);
    const double kmax = M_PI * static_cast<double>(n) / cfg.grid.length;
    for (std::size_t m = 0; m < n; ++m) {
        k[m] = cfg.grid.wavenumber(m);
        e_half[m] = std::polar(1.0, -k[m] * k[m] * dt * 0.5);
        e_full[m] = e_half[m] * e_half[m];
        const bool keep = std::abs(k[m]) <= cfg.dealias_fraction * kmax &&
                          m != n / 2;
        band[m] = keep ? 1.0 : 0.0;
        dmask[m] = keep ? Complex(0.0, k[m]) : Complex(0.0, 0.0);
    }

    std::vector<Complex> uh(n), work(n), stage(n), k1(n), k2(n), k3(n), k4(n);
    std::vector<Complex> phys(n);

    // N(u_hat) = band * FFT[ -|u|^2s u_x ] with the masked derivative
    auto eval_nl = [&](const std::vector<Complex>& what, std::vector<Complex>& out) {
        for (std::size_t m = 0; m < n; ++m) work[m] = what[m] * dmask[m];
        fft_inverse(cfg.grid, work.data(), out.data());  // u_x (dealiased)
        fft_inverse(cfg.grid, what.data(), phys.data()); // u
        for (std::size_t m = 0; m < n; ++m)
            out[m] = -std::pow(std::abs(phys[m]), 2.0 * sigma) * out[m];
        for (std::size_t m = 0; m < n; ++m) work[m] = out[m];
        fft_forward(cfg.grid, work.data(), out.data());
        for (std::size_t m = 0; m < n; ++m) out[m] *= band[m];
    };

    ComplexField u = u0;
    fft_forward(cfg.grid, u.samples.data(), uh.data());
    for (std::size_t m = 0; m < n; ++m) uh[m] *= band[m];

    const double M0 = mass(u0);
    auto sample = [&](double t) {
        rec.times.push_back(t);
        rec.fields.push_back(u);
        rec.mass_series.push_back(mass(u));
        rec.momentum_series.push_back(momentum(u));
        rec.energy_series.push_back(energy(u, sigma));
    };
    sample(0.0);

    for (std::size_t step = 1; step <= nsteps; ++step) {
        eval_nl(uh, k1);
        for (std::size_t m = 0; m < n; ++m)
            stage[m] = e_half[m] * (uh[m] + 0.5 * dt * k1[m]);
        eval_nl(stage, k2);
        for (std::size_t m = 0; m < n; ++m)
            stage[m] = e_half[m] * uh[m] + 0.5 * dt * k2[m];
        eval_nl(stage, k3);
        for (std::size_t m = 0; m < n; ++m)
            stage[m] = e_full[m] * uh[m] + dt * e_half[m] * k3[m];
        eval_nl(stage, k4);
        for (std::size_t m = 0; m < n; ++m)
            uh[m] = e_full[m] * uh[m] +
                    dt / 6.0 *
                        (e_full[m] * k1[m] + 2.0 * e_half[m] * (k2[m] + k3[m]) +
                         k4[m]);

        if (step % cfg.sample_stride == 0 || step == nsteps) {
            const double t = dt * static_cast<double>(step);
            fft_inverse(cfg.grid, uh.data(), u.samples.data());
            if (!u.all_finite()) {
                rec.halted_early = true;
                rec.halt_time = t;
                rec.halt_reason = "non-finite field";
                break;
            }
            const double drift = std::abs(mass(u) - M0) / std::max(M0, 1e-300);
            if (drift > cfg.mass_drift_halt) {
                rec.halted_early = true;
                rec.halt_time = t;
                rec.halt_reason = "mass drift " + std::to_string(drift);
                break;
            }
            sample(t);
        }
    }
    return rec;
}

ComplexField build_unstable_data(const SolitonProfile& prof,
                                 const ComplexField& phi, const double xi[2],
                                 double lambda0) {
    if (lambda0 == 0.0) return prof.Q;
    const RhoTildeResult rt = rho_tilde(lambda0, prof, phi, xi);
    const ComplexField BQ = apply_B(prof.Q, xi);
    return prof.Q + lambda0 * phi + rt.value * BQ;
}

ModulationSeries track_modulation(const TrajectoryRecord& traj,
                                  const SolitonProfile& prof,
                                  const ComplexField& phi, const double xi[2],
                                  double delta) {
    ModulationSeries ms;
    std::array<double, 3> seed = {0.0, 0.0, 0.0};
    const double c = prof.params.speed;
    const double w = prof.params.omega;
    double t_prev = 0.0;
    for (std::size_t i = 0; i < traj.fields.size(); ++i) {
        const double t = traj.times[i];
        // advance the seed by the free drift since the previous sample
        const double dtau = t - t_prev;
        seed[0] += c * dtau;
        seed[1] -= w * dtau;
        ModulationState st = decompose(traj.fields[i], prof, phi, xi, seed);
        if (!st.converged) {
            ms.exit_time = t;
            ms.exit_reason = "decomposition diverged";
            break;
        }
        if (st.eps_h1 >= delta) {
            ms.exit_time = t;
            ms.exit_reason = "||eps||_H1 reached tube radius";
            break;
        }
        ms.times.push_back(t);
        ms.y.push_back(st.y);
        ms.gamma.push_back(st.gamma);
        ms.lambda.push_back(st.lambda);
        ms.eps_h1.push_back(st.eps_h1);
        ms.eps_BQ.push_back(st.eps_BQ);
        ms.newton_iters.push_back(st.newton_iters);
        ms.eps_fields.push_back(std::move(st.eps));
        seed = {st.y, st.gamma, st.lambda};
        t_prev = t;
    }
    return ms;
}

RateSeries parameter_rates(const ModulationSeries& ms, const SolitonParams& p,
                           double box_length) {
    RateSeries rs;
    const std::size_t n = ms.times.size();
    if (n < 3) return rs;
    std::vector<double> yu(n), gu(n);
    yu[0] = ms.y[0];
    gu[0] = ms.gamma[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double dtau = ms.times[i] - ms.times[i - 1];
        yu[i] = unwrap_step(yu[i - 1], ms.y[i], p.speed * dtau, box_length);
        gu[i] = unwrap_step(gu[i - 1], ms.gamma[i], -p.omega * dtau, 2.0 * M_PI);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h2 = ms.times[i + 1] - ms.times[i - 1];
        const double ld = (ms.lambda[i + 1] - ms.lambda[i - 1]) / h2;
        const double yd = (yu[i + 1] - yu[i - 1]) / h2 - p.speed;
        const double gd = (gu[i + 1] - gu[i - 1]) / h2 + p.omega;
        rs.times.push_back(ms.times[i]);
        rs.lambda_dot.push_back(ld);
        rs.y_dot_minus_c.push_back(yd);
        rs.gamma_dot_plus_omega.push_back(gd);
        const double r = std::abs(ld) + std::abs(yd) + std::abs(gd);
        const double s = std::abs(ms.lambda[i]) + ms.eps_h1[i];
        num += r * s;
        den += s * s;
    }
    rs.fitted_C = den > 0.0 ? num / den : 0.0;
    return rs;
}

VirialCoeffs virial_coefficients(const SolitonProfile& prof,
                                 const ComplexField& phi, const double xi[2]) {
    const ComplexField iQx = I * prof.Qx;
    const double a00 = pairing(prof.Q, prof.Q);
    const double a01 = pairing(iQx, prof.Q);
    const double a11 = pairing(iQx, iQx);
    const ComplexField phix = spectral_derivative(phi);
    const ComplexField iphix = I * phix;
    const double b0 = -pairing(phi, phi);
    const double b1 = -pairing(iphix, phi);
    const double det = a00 * a11 - a01 * a01;
    if (det == 0.0)
        throw std::runtime_error("virial_coefficients: singular system");
    VirialCoeffs vc;
    vc.alpha = (b0 * a11 - a01 * b1) / det;
    vc.beta = (a00 * b1 - b0 * a01) / det;
    const double r0 = a00 * vc.alpha + a01 * vc.beta - b0;
    const double r1 = a01 * vc.alpha + a11 * vc.beta - b1;
    vc.system_residual = std::hypot(r0, r1) /
                         std::max(std::hypot(b0, b1), 1e-300);
    const ComplexField BQ = apply_B(prof.Q, xi);
    const ComplexField Bphi = apply_B(phi, xi);
    const double lhs = pairing(BQ, vc.alpha * prof.Q + vc.beta * iQx);
    const double rhs = pairing(Bphi, phi);
    vc.identity_gap = std::abs(lhs + rhs) / std::max(std::abs(rhs), 1e-300);
    return vc;
}

VirialSeries virial_series(const ModulationSeries& ms,
                           const SolitonProfile& prof, const ComplexField& phi,
                           const VirialCoeffs& vc, double d3) {
    VirialSeries vs;
    const std::size_t n = ms.times.size();
    vs.times = ms.times;
    vs.I.resize(n);
    const ComplexField iQx = I * prof.Qx;
    for (std::size_t i = 0; i < n; ++i) {
        const double l = ms.lambda[i];
        ComplexField Phi = phi + (vc.alpha * l) * prof.Q + (vc.beta * l) * iQx;
        vs.I[i] = pairing(I * ms.eps_fields[i], Phi);
    }
    vs.I_dot.resize(n);
    vs.ratio.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double idot;
        if (i == 0)
            idot = (vs.I[1] - vs.I[0]) / (ms.times[1] - ms.times[0]);
        else if (i + 1 == n)
            idot = (vs.I[n - 1] - vs.I[n - 2]) / (ms.times[n - 1] - ms.times[n - 2]);
        else
            idot = (vs.I[i + 1] - vs.I[i - 1]) / (ms.times[i + 1] - ms.times[i - 1]);
        vs.I_dot[i] = idot;
        const double pred = 0.5 * d3 * ms.lambda[i] * ms.lambda[i];
        vs.ratio[i] = pred != 0.0 ? idot / pred : 0.0;
    }
    return vs;
}

namespace {

// H1 cross-correlation C(y) = sum_m (1+k^2) u_hat conj(Q_hat) e^{iky} dx / N
struct Correlator {
    const GridSpec& grid;
    std::vector<Complex> weighted;  // (1+k^2) u_hat conj(Q_hat) * dx / N

    Correlator(const ComplexField& u, const ComplexField& Q) : grid(u.grid) {
        const std::size_t n = grid.count;
        std::vector<Complex> uh(n), qh(n);
        fft_forward(grid, u.samples.data(), uh.data());
        fft_forward(grid, Q.samples.data(), qh.data());
        weighted.resize(n);
        const double scale = grid.dx() / static_cast<double>(n);
        for (std::size_t m = 0; m < n; ++m) {
            const double k = grid.wavenumber(m);
            weighted[m] = (1.0 + k * k) * uh[m] * std::conj(qh[m]) * scale;
        }
    }
    // |C(y)| at arbitrary y
    double magnitude(double y) const {
        Complex c(0.0, 0.0);
        for (std::size_t m = 0; m < grid.count; ++m)
            c += weighted[m] * std::polar(1.0, grid.wavenumber(m) * y);
        return std::abs(c);
    }
    // C at all grid shifts in one inverse FFT
    std::vector<Complex> at_grid_shifts() const {
        std::vector<Complex> out(grid.count);
        std::vector<Complex> tmp = weighted;
        fft_inverse(grid, tmp.data(), out.data());
        for (auto& z : out) z *= static_cast<double>(grid.count);
        return out;
    }
};

}  // namespace

double orbital_distance(const ComplexField& u, const SolitonProfile& prof) {
    if (u.grid != prof.grid) throw GridMismatchError("orbital_distance: grid mismatch");
    Correlator corr(u, prof.Q);
    const std::vector<Complex> cg = corr.at_grid_shifts();
    std::size_t best = 0;
    double bm = -1.0;
    for (std::size_t j = 0; j < cg.size(); ++j) {
        const double m = std::abs(cg[j]);
        if (m > bm) {
            bm = m;
            best = j;
        }
    }
    // shift associated with index j is y = j*dx (wrapped)
    const double dx = u.grid.dx();
    double y0 = static_cast<double>(best) * dx;
    if (y0 > 0.5 * u.grid.length) y0 -= u.grid.length;

    // golden-section maximization of |C(y)| on [y0 - dx, y0 + dx]
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = y0 - dx, b = y0 + dx;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = corr.magnitude(x1), f2 = corr.magnitude(x2);
    for (int it = 0; it < 80 && (b - a) > 1e-13; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = corr.magnitude(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = corr.magnitude(x1);
        }
    }
    const double cbest = std::max(f1, f2);
    const double nu = h1_pairing(u, u);
    const double nq = h1_pairing(prof.Q, prof.Q);
    return std::sqrt(std::max(nu + nq - 2.0 * cbest, 0.0));
}

double orbital_distance_brute(const ComplexField& u, const SolitonProfile& prof,
                              double y_lo, double y_hi, double g_lo, double g_hi,
                              int ny, int ng) {
    double best = HUGE_VAL;
    for (int iy = 0; iy < ny; ++iy) {
        const double y = y_lo + (y_hi - y_lo) * iy / (ny - 1.0);
        const ComplexField Qy = translate(prof.Q, -y);
        for (int ig = 0; ig < ng; ++ig) {
            const double g = g_lo + (g_hi - g_lo) * ig / (ng - 1.0);
            const Complex ph = std::polar(1.0, g);
            ComplexField diff(u.grid);
            for (std::size_t j = 0; j < u.size(); ++j)
                diff[j] = u[j] - Qy[j] * ph;
            best = std::min(best, h1_norm(diff));
        }
    }
    return best;
}

ComplexField R1_term(const SolitonProfile& prof, const ComplexField& eta) {
    const double s = prof.params.sigma;
    const ComplexField ex = spectral_derivative(eta);
    ComplexField r(eta.grid);
    for (std::size_t j = 0; j < eta.size(); ++j) {
        const double m = prof.Psi[j];
        const double m2s = std::pow(m, 2.0 * s);
        const double m2sm2 = std::pow(m, 2.0 * s - 2.0);
        r[j] = I * m2s * ex[j] +
               I * s * m2sm2 * std::conj(prof.Q[j]) * prof.Qx[j] * eta[j] +
               I * s * m2sm2 * prof.Q[j] * prof.Qx[j] * std::conj(eta[j]);
    }
    return r;
}

ComplexField R2_term(const SolitonProfile& prof, const ComplexField& eta) {
    const double s = prof.params.sigma;
    const ComplexField ex = spectral_derivative(eta);
    ComplexField r(eta.grid);
    for (std::size_t j = 0; j < eta.size(); ++j) {
        const double m = prof.Psi[j];
        const double m2sm2 = std::pow(m, 2.0 * s - 2.0);
        const double m2sm4_22 = 0.5 * (s - 1.0) * m2sm2 / (m * m);
        const Complex Q = prof.Q[j], Qx = prof.Qx[j], e = eta[j];
        r[j] = I * s * m2sm2 * std::conj(Q) * e * ex[j] +
               I * s * m2sm2 * Q * std::conj(e) * ex[j] +
               I * s * s * m2sm2 * Qx * e * std::conj(e) +
               I * s * m2sm4_22 * std::conj(Q) * std::conj(Q) * Qx * e * e +
               I * s * m2sm4_22 * Q * Q * Qx * std::conj(e) * std::conj(e);
    }
    return r;
}

ComplexField Rtilde_term(const SolitonProfile& prof, const ComplexField& eta) {
    const double s = prof.params.sigma;
    ComplexField sum = nonlinearity(prof.Q + eta, s) - nonlinearity(prof.Q, s);
    const ComplexField r1 = R1_term(prof, eta);
    const ComplexField r2 = R2_term(prof, eta);
    for (std::size_t j = 0; j < sum.size(); ++j)
        sum[j] -= r1[j] + r2[j];
    return sum;
}

double eps_equation_residual(const ModulationSeries& ms, std::size_t k,
                             const SolitonProfile& prof, const ComplexField& phi,
                             const double xi[2]) {
    if (k + 1 >= ms.times.size())
        throw std::invalid_argument("eps_equation_residual: need snapshots k, k+1");
    const double dt = ms.times[k + 1] - ms.times[k];
    const SolitonParams& p = prof.params;
    // unwrap the pair against the free drift
    const double y1 = ms.y[k];
    const double y2 = unwrap_step(y1, ms.y[k + 1], p.speed * dt, prof.grid.length);
    const double g1 = ms.gamma[k];
    const double g2 = unwrap_step(g1, ms.gamma[k + 1], -p.omega * dt, 2.0 * M_PI);

    const double lam = 0.5 * (ms.lambda[k] + ms.lambda[k + 1]);
    const double lam_dot = (ms.lambda[k + 1] - ms.lambda[k]) / dt;
    const double y_dot = (y2 - y1) / dt;
    const double g_dot = (g2 - g1) / dt;

    const ComplexField BQ = apply_B(prof.Q, xi);
    const double coef = rho_coefficient(prof, phi, xi);
    const double rho_l = rho(lam, coef);
    const double rho_prime = 2.0 * coef * lam;

    ComplexField eps_mid = 0.5 * (ms.eps_fields[k] + ms.eps_fields[k + 1]);
    ComplexField eps_t = (1.0 / dt) * (ms.eps_fields[k + 1] - ms.eps_fields[k]);

    ComplexField eta = lam * phi + rho_l * BQ + eps_mid;
    ComplexField full = prof.Q + eta;
    ComplexField full_x = spectral_derivative(full);

    const ComplexField Leta = apply_linearized(prof, eta);
    const ComplexField r2 = R2_term(prof, eta);
    const ComplexField rt = Rtilde_term(prof, eta);

    ComplexField res(prof.grid);
    for (std::size_t j = 0; j < res.size(); ++j) {
        res[j] = I * eps_t[j] - Leta[j] +
                 I * lam_dot * (phi[j] + rho_prime * BQ.samples[j]) -
                 I * (y_dot - p.speed) * full_x[j] +
                 (g_dot + p.omega) * full[j] + r2[j] + rt[j];
    }
    return l2_norm(res);
}

}  // namespace gdnls
