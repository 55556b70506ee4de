#include "gdnls/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace gdnls {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW planning is not thread-safe; new-array execution is. One plan pair
// per size, created under a lock, executed lock-free on caller buffers.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

PlanPair& plans_for(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<Complex> a(n), b(n);
    auto* ap = reinterpret_cast<fftw_complex*>(a.data());
    auto* bp = reinterpret_cast<fftw_complex*>(b.data());
    PlanPair p;
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.fwd = fftw_plan_dft_1d(static_cast<int>(n), ap, bp, FFTW_FORWARD, flags);
    p.bwd = fftw_plan_dft_1d(static_cast<int>(n), ap, bp, FFTW_BACKWARD, flags);
    return cache.emplace(n, p).first->second;
}

void require_same_grid(const ComplexField& a, const ComplexField& b) {
    if (a.grid != b.grid) throw GridMismatchError("fields live on different grids");
}

}  // namespace

GridSpec::GridSpec(double L, std::size_t N) : length(L), count(N) {
    if (!(L > 0.0)) throw std::invalid_argument("GridSpec: length must be positive");
    if (N < 16 || !is_pow2(N))
        throw std::invalid_argument("GridSpec: count must be a power of two >= 16");
}

double GridSpec::wavenumber(std::size_t m) const {
    const double base = 2.0 * M_PI / length;
    const std::size_t half = count / 2;
    if (m <= half) return base * static_cast<double>(m);
    return base * (static_cast<double>(m) - static_cast<double>(count));
}

ComplexField::ComplexField(const GridSpec& g, std::vector<Complex> v)
    : grid(g), samples(std::move(v)) {
    if (samples.size() != g.count)
        throw std::invalid_argument("ComplexField: sample count does not match grid");
}

bool ComplexField::all_finite() const {
    for (const auto& z : samples)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

ComplexField operator+(const ComplexField& a, const ComplexField& b) {
    require_same_grid(a, b);
    ComplexField r(a.grid);
    for (std::size_t j = 0; j < a.size(); ++j) r[j] = a[j] + b[j];
    return r;
}

ComplexField operator-(const ComplexField& a, const ComplexField& b) {
    require_same_grid(a, b);
    ComplexField r(a.grid);
    for (std::size_t j = 0; j < a.size(); ++j) r[j] = a[j] - b[j];
    return r;
}

ComplexField operator*(Complex s, const ComplexField& a) {
    ComplexField r(a.grid);
    for (std::size_t j = 0; j < a.size(); ++j) r[j] = s * a[j];
    return r;
}

ComplexField operator*(double s, const ComplexField& a) {
    return Complex(s, 0.0) * a;
}

ComplexField& operator+=(ComplexField& a, const ComplexField& b) {
    require_same_grid(a, b);
    for (std::size_t j = 0; j < a.size(); ++j) a[j] += b[j];
    return a;
}

void fft_forward(const GridSpec& g, const Complex* in, Complex* out) {
    PlanPair& p = plans_for(g.count);
    fftw_execute_dft(p.fwd,
                     reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void fft_inverse(const GridSpec& g, const Complex* in, Complex* out) {
    PlanPair& p = plans_for(g.count);
    fftw_execute_dft(p.bwd,
                     reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    const double inv = 1.0 / static_cast<double>(g.count);
    for (std::size_t j = 0; j < g.count; ++j) out[j] *= inv;
}

ComplexField spectral_derivative(const ComplexField& f) {
    const std::size_t n = f.size();
    std::vector<Complex> hat(n);
    fft_forward(f.grid, f.samples.data(), hat.data());
    for (std::size_t m = 0; m < n; ++m)
        hat[m] *= Complex(0.0, f.grid.wavenumber(m));
    hat[n / 2] = 0.0;  // Nyquist
    ComplexField r(f.grid);
    fft_inverse(f.grid, hat.data(), r.samples.data());
    return r;
}

Complex integrate(const ComplexField& f) {
    Complex s(0.0, 0.0);
    for (const auto& z : f.samples) s += z;
    return s * f.grid.dx();
}

double pairing(const ComplexField& u, const ComplexField& v) {
    require_same_grid(u, v);
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
        s += u[j].real() * v[j].real() + u[j].imag() * v[j].imag();
    return s * u.grid.dx();
}

double l2_norm(const ComplexField& u) { return std::sqrt(pairing(u, u)); }

double h1_norm(const ComplexField& u) {
    ComplexField ux = spectral_derivative(u);
    return std::sqrt(pairing(u, u) + pairing(ux, ux));
}

double h1_pairing(const ComplexField& u, const ComplexField& v) {
    return pairing(u, v) + pairing(spectral_derivative(u), spectral_derivative(v));
}

std::vector<double> cumulative_integral(const ComplexField& f) {
    const std::size_t n = f.size();
    std::vector<Complex> hat(n);
    fft_forward(f.grid, f.samples.data(), hat.data());
    const Complex mean = hat[0] / static_cast<double>(n);
    hat[0] = 0.0;
    for (std::size_t m = 1; m < n; ++m) {
        const double k = f.grid.wavenumber(m);
        hat[m] /= Complex(0.0, k);
    }
    hat[n / 2] = 0.0;
    std::vector<Complex> anti(n);
    fft_inverse(f.grid, hat.data(), anti.data());
    std::vector<double> out(n);
    const double halfL = 0.5 * f.grid.length;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = f.grid.node(j);
        out[j] = (mean * (x + halfL) + (anti[j] - anti[0])).real();
    }
    return out;
}

ComplexField translate(const ComplexField& u, double y) {
    const std::size_t n = u.size();
    std::vector<Complex> hat(n);
    fft_forward(u.grid, u.samples.data(), hat.data());
    for (std::size_t m = 0; m < n; ++m) {
        const double k = u.grid.wavenumber(m);
        hat[m] *= std::polar(1.0, k * y);
    }
    ComplexField r(u.grid);
    fft_inverse(u.grid, hat.data(), r.samples.data());
    return r;
}

}  // namespace gdnls
