#include "gdnls/modulation.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace gdnls {

namespace {
const Complex I(0.0, 1.0);

double wrap_interval(double v, double lo, double hi) {
    const double span = hi - lo;
    double r = std::fmod(v - lo, span);
    if (r < 0.0) r += span;
    r += lo;
    if (r <= lo) r += span;  // normalize to (lo, hi]
    return r;
}
}  // namespace

RenormalizedDirection renormalize_tangent(const SolitonProfile& prof,
                                          const ComplexField& phit,
                                          const double xi[2]) {
    const ComplexField& Qx = prof.Qx;
    const ComplexField& iQ = prof.iQ;
    // a <iQ,Qx> + b <iQ,iQ> = <iQ,phit>
    // a <Qx,Qx> + b <Qx,iQ> = <Qx,phit>
    const double m00 = pairing(iQ, Qx), m01 = pairing(iQ, iQ);
    const double m10 = pairing(Qx, Qx), m11 = pairing(Qx, iQ);
    const double r0 = pairing(iQ, phit), r1 = pairing(Qx, phit);
    const double det = m00 * m11 - m01 * m10;
    if (std::abs(det) < 1e-14 * (std::abs(m01 * m10) + std::abs(m00 * m11)) ||
        det == 0.0)
        throw std::runtime_error("renormalize_tangent: singular 2x2 system");
    RenormalizedDirection out;
    out.a = (r0 * m11 - m01 * r1) / det;
    out.b = (m00 * r1 - r0 * m10) / det;
    out.phi = phit - out.a * Qx - out.b * iQ;
    const ComplexField BQ = apply_B(prof.Q, xi);
    const ComplexField iQx = I * Qx;
    out.defects = {pairing(out.phi, iQ), pairing(out.phi, Qx),
                   pairing(out.phi, prof.Q), pairing(out.phi, iQx),
                   pairing(out.phi, BQ)};
    return out;
}

double rho_coefficient(const SolitonProfile& prof, const ComplexField& phi,
                       const double xi[2]) {
    const ComplexField BQ = apply_B(prof.Q, xi);
    const ComplexField Bphi = apply_B(phi, xi);
    return -pairing(Bphi, phi) / (2.0 * pairing(BQ, BQ));
}

RhoTildeResult rho_tilde(double lambda, const SolitonProfile& prof,
                         const ComplexField& phi, const double xi[2],
                         double rel_tol) {
    const ComplexField BQ = apply_B(prof.Q, xi);
    const double JQ = J_functional(prof.Q, xi);
    const ComplexField base = prof.Q + lambda * phi;
    auto g = [&](double r) {
        return J_functional(base + r * BQ, xi) - JQ;
    };
    RhoTildeResult out;
    double r = rho(lambda, rho_coefficient(prof, phi, xi));
    const double scale = std::abs(JQ);
    const double hd = 1e-8 * std::max(1.0, std::abs(r));
    for (int it = 1; it <= 50; ++it) {
        const double gv = g(r);
        if (std::abs(gv) < rel_tol * scale) {
            out.value = r;
            out.residual = std::abs(gv) / scale;
            out.iters = it - 1;
            return out;
        }
        const double dg = (g(r + hd) - g(r - hd)) / (2.0 * hd);
        if (dg == 0.0) break;
        r -= gv / dg;
        out.iters = it;
    }
    throw std::runtime_error("rho_tilde: Newton failed to converge in 50 iterations");
}

namespace {

struct DecomposeWork {
    const ComplexField& u;
    const SolitonProfile& prof;
    const ComplexField& phi;
    const ComplexField& BQ;
    double rho_coef;

    ComplexField eps_at(const std::array<double, 3>& p) const {
        ComplexField v = translate(u, p[0]);
        const Complex ph = std::polar(1.0, p[1]);
        const double r = rho(p[2], rho_coef);
        for (std::size_t j = 0; j < v.size(); ++j)
            v[j] = v[j] * ph -
                   (prof.Q[j] + p[2] * phi.samples[j] + r * BQ.samples[j]);
        return v;
    }
    std::array<double, 3> F_at(const ComplexField& e) const {
        return {pairing(e, prof.Qx), pairing(e, prof.iQ), pairing(e, phi)};
    }
};

double norm3(const std::array<double, 3>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

}  // namespace

ModulationState decompose(const ComplexField& u, const SolitonProfile& prof,
                          const ComplexField& phi, const double xi[2],
                          const std::array<double, 3>& seed,
                          const DecomposeOptions& opt) {
    if (u.grid != prof.grid) throw GridMismatchError("decompose: grid mismatch");
    const ComplexField BQ = apply_B(prof.Q, xi);
    DecomposeWork w{u, prof, phi, BQ, rho_coefficient(prof, phi, xi)};

    const double tol = opt.tol_factor * pairing(prof.Q, prof.Q);
    std::array<double, 3> p = seed;
    ComplexField e = w.eps_at(p);
    std::array<double, 3> F = w.F_at(e);

    // analytic Jacobian at the base point (y, gamma, lambda) = (0, 0, 0)
    Eigen::Matrix3d Jbase;
    Jbase << pairing(prof.Qx, prof.Qx), pairing(prof.iQ, prof.Qx), -pairing(phi, prof.Qx),
             pairing(prof.Qx, prof.iQ), pairing(prof.iQ, prof.iQ), -pairing(phi, prof.iQ),
             pairing(prof.Qx, phi),      pairing(prof.iQ, phi),    -pairing(phi, phi);

    ModulationState st;
    int it = 0;
    bool ok = false;
    for (; it < opt.max_iters; ++it) {
        if (std::max({std::abs(F[0]), std::abs(F[1]), std::abs(F[2])}) < tol) {
            ok = true;
            break;
        }
        Eigen::Matrix3d Jm;
        if (it == 0) {
            Jm = Jbase;
        } else {
            for (int c = 0; c < 3; ++c) {
                std::array<double, 3> pp = p;
                pp[c] += opt.fd_step;
                const std::array<double, 3> Fp = w.F_at(w.eps_at(pp));
                for (int r = 0; r < 3; ++r)
                    Jm(r, c) = (Fp[r] - F[r]) / opt.fd_step;
            }
        }
        Eigen::Vector3d Fv(F[0], F[1], F[2]);
        Eigen::Vector3d dp = Jm.fullPivLu().solve(-Fv);
        if (!dp.allFinite()) break;

        double damp = 1.0;
        bool improved = false;
        for (int k = 0; k < opt.max_damping; ++k, damp *= 0.5) {
            std::array<double, 3> pn = {p[0] + damp * dp(0), p[1] + damp * dp(1),
                                        p[2] + damp * dp(2)};
            ComplexField en = w.eps_at(pn);
            std::array<double, 3> Fn = w.F_at(en);
            if (norm3(Fn) < norm3(F)) {
                p = pn;
                F = Fn;
                e = std::move(en);
                improved = true;
                break;
            }
        }
        if (!improved) break;  // stalled: report as non-converged
    }

    st.y = wrap_interval(p[0], -0.5 * u.grid.length, 0.5 * u.grid.length);
    st.gamma = wrap_interval(p[1], -M_PI, M_PI);
    st.lambda = p[2];
    st.eps = std::move(e);
    st.eps_h1 = h1_norm(st.eps);
    st.eps_BQ = pairing(st.eps, BQ);
    st.residual_norm = std::max({std::abs(F[0]), std::abs(F[1]), std::abs(F[2])});
    st.newton_iters = it;
    st.converged = ok;
    return st;
}

ComplexField compose(const SolitonProfile& prof, const ComplexField& phi,
                     const double xi[2], double y, double gamma, double lambda,
                     const ComplexField* eps) {
    const ComplexField BQ = apply_B(prof.Q, xi);
    const double r = rho(lambda, rho_coefficient(prof, phi, xi));
    ComplexField v = prof.Q + lambda * phi + r * BQ;
    if (eps) v += *eps;
    v = translate(v, -y);
    const Complex ph = std::polar(1.0, -gamma);
    for (auto& z : v.samples) z *= ph;
    return v;
}

double check_eps_BQ(const ModulationState& state, const SolitonProfile& prof,
                    const double xi[2]) {
    return pairing(state.eps, apply_B(prof.Q, xi));
}

CoercivityEstimate coercivity_estimate(const SolitonProfile& prof,
                                       const ComplexField& phi,
                                       const double xi[2], double asym_tol) {
    const std::size_t n = prof.grid.count;
    const std::size_t dim = 2 * n;
    const double dx = prof.grid.dx();

    // real coordinates: field e = v[0..n) + i v[n..2n)
    auto to_field = [&](const Eigen::VectorXd& v) {
        ComplexField f(prof.grid);
        for (std::size_t j = 0; j < n; ++j) f[j] = Complex(v(j), v(n + j));
        return f;
    };
    auto to_vec = [&](const ComplexField& f) {
        Eigen::VectorXd v(dim);
        for (std::size_t j = 0; j < n; ++j) {
            v(j) = f[j].real();
            v(n + j) = f[j].imag();
        }
        return v;
    };

    Eigen::MatrixXd A(dim, dim), G(dim, dim);
    {
        ComplexField basis(prof.grid);
        for (std::size_t col = 0; col < dim; ++col) {
            for (auto& z : basis.samples) z = 0.0;
            if (col < n)
                basis[col] = Complex(1.0, 0.0);
            else
                basis[col - n] = Complex(0.0, 1.0);
            const ComplexField Le = apply_linearized(prof, basis);
            const ComplexField ge = basis - spectral_derivative(spectral_derivative(basis));
            for (std::size_t j = 0; j < n; ++j) {
                A(j, col) = Le[j].real() * dx;
                A(n + j, col) = Le[j].imag() * dx;
                G(j, col) = ge[j].real() * dx;
                G(n + j, col) = ge[j].imag() * dx;
            }
        }
    }
    CoercivityEstimate out;
    const double asym = (A - A.transpose()).norm() / A.norm();
    out.form_asymmetry = asym;
    if (!(asym < asym_tol))
        throw std::runtime_error("coercivity_estimate: assembled form asymmetry " +
                                 std::to_string(asym) + " above tolerance");
    A = 0.5 * (A + A.transpose()).eval();
    G = 0.5 * (G + G.transpose()).eval();

    const ComplexField BQ = apply_B(prof.Q, xi);
    Eigen::MatrixXd C(dim, 4);
    C.col(0) = to_vec(prof.iQ) * dx;
    C.col(1) = to_vec(prof.Qx) * dx;
    C.col(2) = to_vec(phi) * dx;
    C.col(3) = to_vec(BQ) * dx;

    // orthonormal bases of the constraint complements
    Eigen::HouseholderQR<Eigen::MatrixXd> qr4(C);
    Eigen::MatrixXd Z4 =
        Eigen::MatrixXd(qr4.householderQ()).rightCols(dim - 4);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr3(C.leftCols(3));
    Eigen::MatrixXd Z3 =
        Eigen::MatrixXd(qr3.householderQ()).rightCols(dim - 3);

    Eigen::MatrixXd A4 = Z4.transpose() * A * Z4;
    Eigen::MatrixXd G4 = Z4.transpose() * G * Z4;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A4, G4);
    out.kappa_subspace = es.eigenvalues()(0);
    Eigen::VectorXd v0 = Z4 * es.eigenvectors().col(0);
    out.minimizer = to_field(v0);

    if (!(out.kappa_subspace > 0.0)) {
        out.kappa = out.kappa_subspace;
        return out;
    }

    // certify: A3 - kappa G3 + (1/kappa) q q^T  >= 0 on the 3-constraint space
    Eigen::MatrixXd A3 = Z3.transpose() * A * Z3;
    Eigen::MatrixXd G3 = Z3.transpose() * G * Z3;
    Eigen::VectorXd q = Z3.transpose() * (to_vec(BQ) * dx);
    auto psd_min = [&](double kap) {
        Eigen::MatrixXd M = A3 - kap * G3 + (q * q.transpose()) / kap;
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> e2(M, G3);
        return e2.eigenvalues()(0);
    };
    double lo = 0.0, hi = out.kappa_subspace;
    if (psd_min(hi) >= 0.0) {
        lo = hi;
    } else {
        for (int it = 0; it < 36; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            if (psd_min(mid) >= 0.0)
                lo = mid;
            else
                hi = mid;
        }
    }
    out.kappa = lo * (1.0 - 1e-9);
    return out;
}

ExpansionProbe action_expansion_probe(const SolitonProfile& prof,
                                      const ComplexField& phi,
                                      const double xi[2],
                                      const std::vector<double>& lambdas,
                                      const ComplexField* eps, double d3,
                                      double max_fit_residual) {
    if (lambdas.size() < 4)
        throw std::invalid_argument("action_expansion_probe: need >= 4 samples");
    const ComplexField BQ = apply_B(prof.Q, xi);
    const double coef = rho_coefficient(prof, phi, xi);
    const double SQ = action(prof.Q, prof.params);

    ExpansionProbe out;
    out.lambdas = lambdas;
    if (eps)
        out.offset = 0.5 * action_hessian_form(prof.Q, *eps, *eps, prof.params);
    out.deltas.reserve(lambdas.size());
    for (double l : lambdas) {
        ComplexField u = prof.Q + l * phi + rho(l, coef) * BQ;
        if (eps) u += *eps;
        out.deltas.push_back(action(u, prof.params) - SQ - out.offset);
    }
    // least-squares cubic fit via normal equations
    Eigen::MatrixXd V(lambdas.size(), 4);
    Eigen::VectorXd b(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double l = lambdas[i];
        V(i, 0) = 1.0;
        V(i, 1) = l;
        V(i, 2) = l * l;
        V(i, 3) = l * l * l;
        b(i) = out.deltas[i];
    }
    Eigen::Vector4d c = V.colPivHouseholderQr().solve(b);
    for (int i = 0; i < 4; ++i) out.coeff[i] = c(i);
    const double rms_d = std::sqrt(b.squaredNorm() / b.size());
    out.fit_residual = std::sqrt((V * c - b).squaredNorm() / b.size()) /
                       std::max(rms_d, 1e-300);
    if (out.fit_residual > max_fit_residual)
        throw std::runtime_error(
            "action_expansion_probe: fit residual " +
            std::to_string(out.fit_residual) +
            " above tolerance; the lambda range left the cubic regime");
    if (d3 != 0.0) out.c3_ratio = out.coeff[3] / (d3 / 6.0);
    return out;
}

}  // namespace gdnls
