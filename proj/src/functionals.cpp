#include "gdnls/functionals.hpp"

#include <cmath>

namespace gdnls {

namespace {
const Complex I(0.0, 1.0);
}

double mass(const ComplexField& u) {
    double s = 0.0;
    for (const auto& z : u.samples) s += std::norm(z);
    return 0.5 * s * u.grid.dx();
}

double momentum(const ComplexField& u) {
    const ComplexField ux = spectral_derivative(u);
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
        s += (I * std::conj(u[j]) * ux[j]).real();
    return 0.5 * s * u.grid.dx();
}

double energy(const ComplexField& u, double sigma) {
    const ComplexField ux = spectral_derivative(u);
    double kin = 0.0, nl = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        kin += std::norm(ux[j]);
        nl += std::pow(std::abs(u[j]), 2.0 * sigma) *
              (I * std::conj(u[j]) * ux[j]).real();
    }
    const double dx = u.grid.dx();
    return 0.5 * kin * dx - nl * dx / (2.0 * sigma + 2.0);
}

double action(const ComplexField& u, const SolitonParams& p) {
    return energy(u, p.sigma) + p.omega * mass(u) + p.speed * momentum(u);
}

double action_quadratic_part(const ComplexField& u, const SolitonParams& p) {
    const ComplexField ux = spectral_derivative(u);
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        s += 0.5 * std::norm(ux[j]) + 0.5 * p.omega * std::norm(u[j]) +
             0.5 * p.speed * (I * std::conj(u[j]) * ux[j]).real();
    }
    return s * u.grid.dx();
}

double action_nonlinear_part(const ComplexField& u, double sigma) {
    const ComplexField ux = spectral_derivative(u);
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
        s += std::pow(std::abs(u[j]), 2.0 * sigma) *
             (I * std::conj(u[j]) * ux[j]).real();
    return s * u.grid.dx() / (2.0 * sigma + 2.0);
}

double scaling_K(const ComplexField& u, const SolitonParams& p) {
    return 2.0 * action_quadratic_part(u, p) -
           (2.0 * p.sigma + 2.0) * action_nonlinear_part(u, p.sigma);
}

FunctionalReport evaluate_functionals(const ComplexField& u, const SolitonParams& p) {
    FunctionalReport r;
    r.mass = mass(u);
    r.momentum = momentum(u);
    r.energy = energy(u, p.sigma);
    r.action = r.energy + p.omega * r.mass + p.speed * r.momentum;
    r.scaling_K = scaling_K(u, p);
    return r;
}

double J_functional(const ComplexField& u, const double xi[2]) {
    return xi[0] * mass(u) + xi[1] * momentum(u);
}

ComplexField apply_B(const ComplexField& u, const double xi[2]) {
    ComplexField r = spectral_derivative(u);
    for (std::size_t j = 0; j < u.size(); ++j) r[j] = xi[0] * u[j] + xi[1] * I * r[j];
    return r;
}

ComplexField action_gradient(const ComplexField& u, const SolitonParams& p) {
    const ComplexField ux = spectral_derivative(u);
    const ComplexField uxx = spectral_derivative(ux);
    ComplexField r(u.grid);
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double m = std::pow(std::abs(u[j]), 2.0 * p.sigma);
        r[j] = -uxx[j] + p.omega * u[j] + p.speed * I * ux[j] - I * m * ux[j];
    }
    return r;
}

double action_hessian_form(const ComplexField& u, const ComplexField& h,
                           const ComplexField& g, const SolitonParams& p) {
    if (u.grid != h.grid || u.grid != g.grid)
        throw GridMismatchError("action_hessian_form: grid mismatch");
    const ComplexField ux = spectral_derivative(u);
    const ComplexField hx = spectral_derivative(h);
    const ComplexField gx = spectral_derivative(g);
    const double s = p.sigma;
    double acc = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const Complex gb = std::conj(g[j]);
        acc += (hx[j] * std::conj(gx[j])).real() + p.omega * (h[j] * gb).real() +
               p.speed * (I * hx[j] * gb).real();
        const double au = std::abs(u[j]);
        if (au > 0.0) {
            const double m2s = std::pow(au, 2.0 * s);
            const double m2sm2 = std::pow(au, 2.0 * s - 2.0);
            acc -= (I * m2s * hx[j] * gb).real();
            acc -= s * m2sm2 *
                   (I * (std::conj(u[j]) * ux[j] * h[j] +
                         u[j] * ux[j] * std::conj(h[j])) * gb).real();
        }
    }
    return acc * u.grid.dx();
}

ComplexField apply_linearized(const SolitonProfile& prof, const ComplexField& eta) {
    if (prof.grid != eta.grid)
        throw GridMismatchError("apply_linearized: grid mismatch");
    const SolitonParams& p = prof.params;
    const ComplexField ex = spectral_derivative(eta);
    const ComplexField exx = spectral_derivative(ex);
    ComplexField r(eta.grid);
    const double s = p.sigma;
    for (std::size_t j = 0; j < eta.size(); ++j) {
        const double m = prof.Psi[j];
        const double m2s = std::pow(m, 2.0 * s);
        const double m2sm2 = std::pow(m, 2.0 * s - 2.0);
        r[j] = -exx[j] + p.omega * eta[j] + p.speed * I * ex[j] - I * m2s * ex[j] -
               I * s * m2sm2 * std::conj(prof.Q[j]) * prof.Qx[j] * eta[j] -
               I * s * m2sm2 * prof.Q[j] * prof.Qx[j] * std::conj(eta[j]);
    }
    return r;
}

double action_third_form_at_Q(const SolitonProfile& prof, const ComplexField& f,
                              const ComplexField& h, const ComplexField& g) {
    if (prof.grid != f.grid || prof.grid != h.grid || prof.grid != g.grid)
        throw GridMismatchError("action_third_form_at_Q: grid mismatch");
    const double s = prof.params.sigma;
    const ComplexField fx = spectral_derivative(f);
    const ComplexField hx = spectral_derivative(h);
    double acc = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const Complex Q = prof.Q[j];
        const Complex Qx = prof.Qx[j];
        const double m = prof.Psi[j];
        const double m2sm2 = std::pow(m, 2.0 * s - 2.0);
        const Complex phase2 = (Q / m) * (Q / m);  // Q^2 / |Q|^2, unit modulus
        const Complex gb = std::conj(g[j]);
        acc -= (I * s * m2sm2 * (Q * std::conj(f[j]) + std::conj(Q) * f[j]) *
                hx[j] * gb).real();
        acc -= (I * s * m2sm2 *
                (std::conj(Q) * fx[j] + s * Qx * std::conj(f[j]) +
                 (s - 1.0) * std::conj(phase2) * Qx * f[j]) *
                h[j] * gb).real();
        acc -= (I * s * m2sm2 *
                (Q * fx[j] + s * Qx * f[j] + (s - 1.0) * phase2 * Qx * std::conj(f[j])) *
                std::conj(h[j]) * gb).real();
    }
    return acc * f.grid.dx();
}

DSurface d_surface(const SolitonParams& p, const GridSpec& g, double h,
                   const BuildOptions& opt) {
    auto grad_at = [&](double w, double c) -> std::array<double, 2> {
        SolitonParams q(p.sigma, w, c);
        SolitonProfile prof = build_profile(q, g, opt);
        return {mass(prof.Q), momentum(prof.Q)};
    };
    const double w = p.omega, c = p.speed;
    {
        // the whole stencil must stay in the cone
        const double probes[4][2] = {{w + h, c}, {w - h, c}, {w, c + h}, {w, c - h}};
        for (auto& pr : probes) {
            if (!(pr[0] > 0.0) || !(4.0 * pr[0] - pr[1] * pr[1] > 0.0))
                throw std::invalid_argument("d_surface: stencil leaves the admissible cone");
        }
    }
    DSurface out;
    out.fd_step = h;
    SolitonProfile base = build_profile(p, g, opt);
    out.d = action(base.Q, p);
    out.grad = {mass(base.Q), momentum(base.Q)};
    const auto gp = grad_at(w + h, c), gm = grad_at(w - h, c);
    const auto cp = grad_at(w, c + h), cm = grad_at(w, c - h);
    const double h2 = 2.0 * h;
    double H[2][2];
    H[0][0] = (gp[0] - gm[0]) / h2;  // d(M)/dw
    H[1][0] = (gp[1] - gm[1]) / h2;  // d(P)/dw
    H[0][1] = (cp[0] - cm[0]) / h2;  // d(M)/dc
    H[1][1] = (cp[1] - cm[1]) / h2;  // d(P)/dc
    out.symmetry_defect = std::abs(H[0][1] - H[1][0]);
    const double off = 0.5 * (H[0][1] + H[1][0]);
    out.hessian = {{{H[0][0], off}, {off, H[1][1]}}};
    return out;
}

double third_directional_difference(const std::function<double(double)>& fn,
                                    double h) {
    return (-fn(-2.0 * h) + 2.0 * fn(-h) - 2.0 * fn(h) + fn(2.0 * h)) /
           (2.0 * h * h * h);
}

ThirdDerivative d_third_directional(const SolitonParams& p, const double xi[2],
                                    const GridSpec& g, double h,
                                    const BuildOptions& opt) {
    if (xi[0] == 0.0 && xi[1] == 0.0) {
        return {};
    }
    auto dval = [&](double lam) {
        SolitonParams q(p.sigma, p.omega + lam * xi[0], p.speed + lam * xi[1]);
        SolitonProfile prof = build_profile(q, g, opt);
        return action(prof.Q, q);
    };
    {
        const double l = 2.0 * h;
        const double wm = p.omega - l * std::abs(xi[0]);
        const double cm = std::abs(p.speed) + l * std::abs(xi[1]);
        if (!(wm > 0.0) || !(4.0 * wm - cm * cm > 0.0))
            throw std::invalid_argument("d_third_directional: stencil leaves the cone");
    }
    ThirdDerivative out;
    out.value = third_directional_difference(dval, h);
    out.value_half = third_directional_difference(dval, 0.5 * h);

    SolitonProfile prof = build_profile(p, g, opt);
    const double hs = param_step(std::max(std::abs(p.omega), std::abs(p.speed)));
    ComplexField phit = tangent_vector(p, g, xi, hs, opt);
    out.identity = action_third_form_at_Q(prof, phit, phit, phit) +
                   3.0 * pairing(apply_B(phit, xi), phit);
    out.rel_gap = std::abs(out.value - out.identity) /
                  std::max(std::abs(out.identity), 1e-300);
    return out;
}

}  // namespace gdnls
