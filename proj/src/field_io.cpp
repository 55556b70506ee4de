#include "gdnls/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace gdnls {

namespace {
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

void write_field_csv(std::ostream& os, const ComplexField& f) {
    os << "x,re,im\n";
    for (std::size_t j = 0; j < f.size(); ++j) {
        os << fmt(f.grid.node(j)) << ',' << fmt(f[j].real()) << ','
           << fmt(f[j].imag()) << '\n';
    }
}

void write_field_csv(const std::string& path, const ComplexField& f) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_field_csv(os, f);
}

ComplexField read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("field csv: empty stream");
    if (line != "x,re,im" && line != "x,re,im\r")
        throw std::runtime_error("field csv: expected header 'x,re,im'");
    std::vector<double> xs;
    std::vector<Complex> vs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double x, re, im;
        char c1, c2;
        if (!(ss >> x >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',')
            throw std::runtime_error("field csv: malformed row: " + line);
        xs.push_back(x);
        vs.emplace_back(re, im);
    }
    const std::size_t n = xs.size();
    if (n < 16) throw std::runtime_error("field csv: too few rows");
    const double dx = xs[1] - xs[0];
    if (!(dx > 0.0)) throw std::runtime_error("field csv: nodes not ascending");
    for (std::size_t j = 1; j < n; ++j) {
        const double step = xs[j] - xs[j - 1];
        if (std::abs(step - dx) > 1e-12 * std::max(1.0, std::abs(dx)))
            throw std::runtime_error("field csv: non-uniform spacing");
    }
    const double L = dx * static_cast<double>(n);
    if (std::abs(xs[0] + 0.5 * L) > 1e-9 * L)
        throw std::runtime_error("field csv: nodes must start at -L/2");
    GridSpec g(L, n);
    return ComplexField(g, std::move(vs));
}

ComplexField read_field_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return read_field_csv(is);
}

}  // namespace gdnls
