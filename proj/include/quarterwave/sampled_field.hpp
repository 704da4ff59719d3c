#pragma once

// Complex samples on the uniform grid (i h, j h), 0 <= i < nx, 0 <= j < ny,
// of the box [0, X]^2 with X = max(nx, ny) h.
//
// Plain-text CSV layout:
//   X,h,nx,ny
//   <X>,<h>,<nx>,<ny>
//   then ny rows (j = 0..ny-1), each holding nx pairs re,im (i = 0..nx-1)

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace quarterwave {

struct SampledField {
    double h = 0.0;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<std::complex<double>> values; // row-major: index j * nx + i

    SampledField() = default;
    SampledField(double spacing, std::size_t nx_, std::size_t ny_)
        : h(spacing), nx(nx_), ny(ny_), values(nx_ * ny_, 0.0) {
        if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ValidationError("h must be positive");
        if (nx_ == 0 || ny_ == 0) throw ValidationError("nx and ny must be positive");
    }

    template <class F>
    static SampledField from_function(double spacing, std::size_t nx_, std::size_t ny_, F&& f) {
        SampledField s(spacing, nx_, ny_);
        for (std::size_t j = 0; j < ny_; ++j)
            for (std::size_t i = 0; i < nx_; ++i) s.at(i, j) = f(i * spacing, j * spacing);
        return s;
    }

    double box() const { return double(std::max(nx, ny)) * h; }
    std::complex<double>& at(std::size_t i, std::size_t j) { return values[j * nx + i]; }
    const std::complex<double>& at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }

    /// Discrete L2 norm with cell area h^2.
    double l2_norm() const {
        double s = 0.0;
        for (const auto& v : values) s += std::norm(v);
        return std::sqrt(s) * h;
    }

    void validate() const {
        if (values.size() != nx * ny) throw ValidationError("sampled field: value count does not match nx*ny");
        for (const auto& v : values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw ValidationError("sampled field: values must be finite");
    }
};

inline void write_field_csv(std::ostream& os, const SampledField& f) {
    char buf[64];
    os << "X,h,nx,ny\n";
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", f.box(), f.h);
    os << buf << f.nx << ',' << f.ny << '\n';
    for (std::size_t j = 0; j < f.ny; ++j) {
        for (std::size_t i = 0; i < f.nx; ++i) {
            const auto v = f.at(i, j);
            std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", i ? "," : "", v.real(), v.imag());
            os << buf;
        }
        os << '\n';
    }
}

inline SampledField read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("X,h,nx,ny", 0) != 0)
        throw ValidationError("sampled field: expected header 'X,h,nx,ny'");
    if (!std::getline(is, line)) throw ValidationError("sampled field: missing header values");
    double x = 0.0, h = 0.0;
    long nx = 0, ny = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%ld,%ld", &x, &h, &nx, &ny) != 4)
        throw ValidationError("sampled field: malformed header values");
    if (nx <= 0 || ny <= 0 || !(h > 0.0)) throw ValidationError("sampled field: h, nx, ny must be positive");
    if (std::fabs(x - std::max(nx, ny) * h) > 1e-9 * std::max(1.0, x))
        throw ValidationError("sampled field: X must equal max(nx, ny) * h");
    SampledField f(h, std::size_t(nx), std::size_t(ny));
    for (long j = 0; j < ny; ++j) {
        if (!std::getline(is, line)) throw ValidationError("sampled field: too few rows");
        std::stringstream row(line);
        std::string cell;
        std::vector<double> nums;
        while (std::getline(row, cell, ',')) {
            try {
                std::size_t used = 0;
                nums.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw ValidationError("sampled field: non-numeric entry in row " + std::to_string(j));
            }
        }
        if (nums.size() != std::size_t(2 * nx))
            throw ValidationError("sampled field: row " + std::to_string(j) + " must hold 2*nx numbers");
        for (long i = 0; i < nx; ++i) f.at(std::size_t(i), std::size_t(j)) = {nums[2 * i], nums[2 * i + 1]};
    }
    f.validate();
    return f;
}

inline SampledField read_field_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open field file '" + path + "'");
    return read_field_csv(is);
}

} // namespace quarterwave
