#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdnls {

using Complex = std::complex<double>;

/// Uniform periodic grid on [-L/2, L/2) with N samples, N a power of two.
/// Nodes are x_j = -L/2 + j*dx, dx = L/N. The box stands in for the whole
/// line: every profile placed on it must decay below tolerance at +-L/2.
struct GridSpec {
    double length = 0.0;
    std::size_t count = 0;

    GridSpec() = default;
    GridSpec(double L, std::size_t N);

    double dx() const { return length / static_cast<double>(count); }
    double node(std::size_t j) const {
        return -0.5 * length + dx() * static_cast<double>(j);
    }
    /// Angular wavenumber of Fourier mode m (m in FFT storage order).
    double wavenumber(std::size_t m) const;

    bool operator==(const GridSpec& o) const {
        return length == o.length && count == o.count;
    }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

/// Complex-valued field sampled on a GridSpec. Immutable by convention:
/// operations return fresh fields.
struct ComplexField {
    GridSpec grid;
    std::vector<Complex> samples;

    ComplexField() = default;
    explicit ComplexField(const GridSpec& g)
        : grid(g), samples(g.count, Complex(0.0, 0.0)) {}
    ComplexField(const GridSpec& g, std::vector<Complex> v);

    std::size_t size() const { return samples.size(); }
    Complex& operator[](std::size_t j) { return samples[j]; }
    const Complex& operator[](std::size_t j) const { return samples[j]; }

    bool all_finite() const;
};

// arithmetic (same grid required)
ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(Complex s, const ComplexField& a);
ComplexField operator*(double s, const ComplexField& a);
ComplexField& operator+=(ComplexField& a, const ComplexField& b);

/// Thrown when two fields on different grids are combined.
struct GridMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- spectral operations ---------------------------------------------------

/// In-place FFT pair used by all spectral ops; forward is unnormalized,
/// inverse divides by N.
void fft_forward(const GridSpec& g, const Complex* in, Complex* out);
void fft_inverse(const GridSpec& g, const Complex* in, Complex* out);

/// Fourier-multiplier derivative. Exact on resolved modes; the Nyquist mode
/// is zeroed to keep d/dx of a real field real.
ComplexField spectral_derivative(const ComplexField& f);

/// Periodic trapezoid rule, dx * sum(f). Spectrally accurate for smooth
/// periodic integrands.
Complex integrate(const ComplexField& f);

/// Real pairing <u,v> = Re integral u * conj(v) dx.
double pairing(const ComplexField& u, const ComplexField& v);

double l2_norm(const ComplexField& u);

/// sqrt( integral |u|^2 + |u_x|^2 ) with the spectral derivative.
double h1_norm(const ComplexField& u);

/// H1 pairing Re integral (u conj(v) + u_x conj(v_x)) dx.
double h1_pairing(const ComplexField& u, const ComplexField& v);

/// Cumulative integral F(x_j) = integral_{-L/2}^{x_j} f dy for smooth f that
/// is periodic on the box (decayed at both ends). The mean is split off and
/// integrated exactly; the mean-zero remainder uses the spectral
/// antiderivative, so the result is exact for the trigonometric interpolant.
std::vector<double> cumulative_integral(const ComplexField& f);

/// u(x + y) for arbitrary real y via Fourier phase shift (exact for
/// band-limited fields).
ComplexField translate(const ComplexField& u, double y);

}  // namespace gdnls
