#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mkdv {

using cplx = std::complex<double>;

/// Periodic grid on [-L/2, L/2) standing in for the real line.
///
/// Samples sit at x_j = -L/2 + j dx. Frequencies are stored in FFT order:
/// index k < M/2 carries xi = 2 pi k / L, index k >= M/2 carries
/// xi = 2 pi (k - M) / L.
class GridSpec {
public:
    /// Requires M a power of two and dxi = 2 pi / L <= 1/8.
    GridSpec(double length, std::size_t points);

    double length() const noexcept { return length_; }
    std::size_t points() const noexcept { return points_; }
    double dx() const noexcept { return length_ / static_cast<double>(points_); }
    double dxi() const noexcept;
    /// Largest |xi| on the lattice, pi M / L.
    double nyquist() const noexcept;

    double x(std::size_t j) const noexcept { return -0.5 * length_ + static_cast<double>(j) * dx(); }
    long signed_index(std::size_t k) const noexcept;
    double wavenumber(std::size_t k) const noexcept;
    /// Storage index of lattice frequency index m in [-M/2, M/2).
    std::size_t storage_index(long m) const noexcept;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    double length_;
    std::size_t points_;
};

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

/// Physical-space snapshot u(x_j).
class Field {
public:
    explicit Field(const GridSpec& grid);
    Field(const GridSpec& grid, std::vector<cplx> samples);

    const GridSpec& grid() const noexcept { return grid_; }
    std::span<const cplx> samples() const noexcept { return samples_; }
    std::span<cplx> samples() noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    cplx operator[](std::size_t j) const noexcept { return samples_[j]; }

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(cplx c);

private:
    GridSpec grid_;
    std::vector<cplx> samples_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx c, Field f);

/// Frequency-space snapshot approximating the continuum transform
/// u^(xi) = int u(x) e^{-i xi x} dx, stored in FFT order.
class SpectralField {
public:
    explicit SpectralField(const GridSpec& grid);
    SpectralField(const GridSpec& grid, std::vector<cplx> coefficients);

    const GridSpec& grid() const noexcept { return grid_; }
    std::span<const cplx> coefficients() const noexcept { return coeffs_; }
    std::span<cplx> coefficients() noexcept { return coeffs_; }
    std::size_t size() const noexcept { return coeffs_.size(); }
    cplx operator[](std::size_t k) const noexcept { return coeffs_[k]; }

private:
    GridSpec grid_;
    std::vector<cplx> coeffs_;
};

/// Throws std::invalid_argument unless both grids are identical.
void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

} // namespace mkdv
