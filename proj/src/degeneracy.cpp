#include "gdnls/degeneracy.hpp"

#include <cmath>
#include <future>

#include "gdnls/quadrature.hpp"

namespace gdnls {

namespace {

// Truncation point: (cosh y - z)^(-1/s) <= (e^y/4)^(-1/s) for y >= 2, so the
// tail beyond Y is below s * 4^(1/s) * e^(-Y/s); solve for eps_tail = 1e-16.
double y_max(double sigma) {
    return sigma * std::log(4.0 / 1e-16) + 10.0;
}

void check_domain(double z, double sigma) {
    if (!(z > -1.0 && z < 1.0))
        throw std::invalid_argument("F_sigma: z must lie in (-1, 1)");
    if (!(sigma >= 1.0 && sigma < 2.0))
        throw std::invalid_argument("F_sigma: sigma must lie in [1, 2)");
    if (std::abs(z) > 0.999)
        throw std::invalid_argument("F_sigma: |z| > 0.999 endpoint guard");
}

struct FParts {
    double I1;
    double I2;
};

FParts f_parts(double z, double sigma) {
    const double Y = y_max(sigma);
    const double e1 = -1.0 / sigma;
    const double e2 = e1 - 1.0;
    FParts p;
    p.I1 = adaptive_integrate(
        [=](double y) { return std::pow(std::cosh(y) - z, e1); }, 0.0, Y);
    p.I2 = adaptive_integrate(
        [=](double y) {
            const double ch = std::cosh(y);
            return std::pow(ch - z, e2) * (z * ch - 1.0);
        },
        0.0, Y);
    return p;
}

}  // namespace

double F_sigma(double z, double sigma) {
    check_domain(z, sigma);
    const FParts p = f_parts(z, sigma);
    const double sm1 = sigma - 1.0;
    return sm1 * sm1 * p.I1 * p.I1 - p.I2 * p.I2;
}

double F_sigma_scale(double z, double sigma) {
    check_domain(z, sigma);
    const FParts p = f_parts(z, sigma);
    const double sm1 = sigma - 1.0;
    return sm1 * sm1 * p.I1 * p.I1 + p.I2 * p.I2;
}

double find_z0(double sigma, double tol) {
    if (!(sigma > 1.0 && sigma < 2.0))
        throw std::invalid_argument("find_z0: sigma must lie in (1, 2)");
    const double lo = -0.999, hi = 0.999, step = 0.01;
    double za = lo, fa = F_sigma(za, sigma);
    double bl = 0.0, bh = 0.0, fl = 0.0, fh = 0.0;
    int crossings = 0;
    for (double zb = lo + step; zb < hi + 0.5 * step; zb += step) {
        const double zc = std::min(zb, hi);
        const double fb = F_sigma(zc, sigma);
        if (fa == 0.0 || fa * fb < 0.0) {
            ++crossings;
            bl = za;
            bh = zc;
            fl = fa;
            fh = fb;
        }
        za = zc;
        fa = fb;
    }
    if (crossings != 1)
        throw RootFindError("find_z0: scan found " + std::to_string(crossings) +
                            " sign changes, expected exactly one (sigma=" +
                            std::to_string(sigma) + ")");
    // bisection with a secant proposal when it lands inside the bracket
    double scale = F_sigma_scale(0.5 * (bl + bh), sigma);
    for (int it = 0; it < 200; ++it) {
        double zm = bl - fl * (bh - bl) / (fh - fl);
        if (!(zm > bl && zm < bh)) zm = 0.5 * (bl + bh);
        const double fm = F_sigma(zm, sigma);
        if (std::abs(fm) < tol * scale || bh - bl < 1e-15) return zm;
        if ((fl < 0.0) == (fm < 0.0)) {
            bl = zm;
            fl = fm;
        } else {
            bh = zm;
            fh = fm;
        }
        if ((it & 7) == 7) {
            const double m = 0.5 * (bl + bh);
            const double fmid = F_sigma(m, sigma);
            if ((fl < 0.0) == (fmid < 0.0)) {
                bl = m;
                fl = fmid;
            } else {
                bh = m;
                fh = fmid;
            }
        }
    }
    throw RootFindError("find_z0: bisection failed to reach tolerance");
}

SolitonParams degenerate_params(double sigma, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("degenerate_params: omega > 0");
    const double z0 = find_z0(sigma);
    return SolitonParams(sigma, omega, 2.0 * z0 * std::sqrt(omega));
}

std::array<double, 2> null_vector(const std::array<std::array<double, 2>, 2>& H,
                                  double comparable_ratio) {
    const double a = H[0][0], b = H[0][1], d = H[1][1];
    const double tr = a + d;
    const double disc = std::sqrt(std::max((a - d) * (a - d) + 4.0 * b * b, 0.0));
    const double l1 = 0.5 * (tr + disc);
    const double l2 = 0.5 * (tr - disc);
    const double small = std::abs(l1) <= std::abs(l2) ? l1 : l2;
    const double big = std::abs(l1) <= std::abs(l2) ? l2 : l1;
    if (!(std::abs(small) < comparable_ratio * std::abs(big)))
        throw std::invalid_argument(
            "null_vector: eigenvalues comparable in magnitude; matrix is not "
            "near-degenerate");
    // eigenvector of the small eigenvalue
    std::array<double, 2> v{};
    if (std::abs(b) > 1e-300 * std::abs(big)) {
        v = {b, small - a};
    } else if (std::abs(a - small) <= std::abs(d - small)) {
        v = {1.0, 0.0};
    } else {
        v = {0.0, 1.0};
    }
    const double n = std::hypot(v[0], v[1]);
    v[0] /= n;
    v[1] /= n;
    if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) {
        v[0] = -v[0];
        v[1] = -v[1];
    }
    return v;
}

OrientedXi orient_xi(const std::array<double, 2>& xi, double d3_probe,
                     double noise_floor) {
    if (!(std::abs(d3_probe) > noise_floor))
        throw std::invalid_argument(
            "orient_xi: |d3| below the noise floor; cannot certify a sign");
    OrientedXi out;
    if (d3_probe < 0.0) {
        out.xi = xi;
        out.d3 = d3_probe;
    } else {
        out.xi = {-xi[0], -xi[1]};
        out.d3 = -d3_probe;
    }
    return out;
}

DegeneracyData analyze_degeneracy(double sigma, double omega,
                                  const GridSpec& grid, double hessian_step,
                                  double d3_step) {
    DegeneracyData d;
    d.sigma = sigma;
    d.z0 = find_z0(sigma);
    d.c_star = 2.0 * d.z0 * std::sqrt(omega);
    d.F_residual = std::abs(F_sigma(d.z0, sigma)) / F_sigma_scale(d.z0, sigma);
    SolitonParams p(sigma, omega, d.c_star);
    DSurface ds = d_surface(p, grid, hessian_step);
    std::array<double, 2> xi = null_vector(ds.hessian);
    const auto& H = ds.hessian;
    const double hx0 = H[0][0] * xi[0] + H[0][1] * xi[1];
    const double hx1 = H[1][0] * xi[0] + H[1][1] * xi[1];
    const double hn = std::sqrt(H[0][0] * H[0][0] + 2.0 * H[0][1] * H[0][1] +
                                H[1][1] * H[1][1]);
    d.hessian_residual = std::hypot(hx0, hx1) / hn;
    ThirdDerivative t3 = d_third_directional(p, xi.data(), grid, d3_step);
    OrientedXi ox = orient_xi(xi, t3.value);
    d.xi = ox.xi;
    d.d3 = ox.d3;
    return d;
}

std::vector<SweepRow> z0_sweep(const std::vector<double>& sigmas, double tol,
                               int threads) {
    std::vector<SweepRow> rows(sigmas.size());
    auto work = [&](std::size_t i) {
        SweepRow r;
        r.sigma = sigmas[i];
        r.z0 = find_z0(sigmas[i], tol);
        r.F_residual = std::abs(F_sigma(r.z0, sigmas[i])) /
                       F_sigma_scale(r.z0, sigmas[i]);
        rows[i] = r;
    };
    if (threads <= 1) {
        for (std::size_t i = 0; i < sigmas.size(); ++i) work(i);
    } else {
        std::vector<std::future<void>> fs;
        std::size_t next = 0;
        while (next < sigmas.size()) {
            fs.clear();
            for (int t = 0; t < threads && next < sigmas.size(); ++t, ++next)
                fs.push_back(std::async(std::launch::async, work, next));
            for (auto& f : fs) f.get();
        }
    }
    return rows;
}

}  // namespace gdnls
