#include "mkdv/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mkdv {

namespace {
bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
} // namespace

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

GridSpec::GridSpec(double length, std::size_t points) : length_(length), points_(points) {
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("GridSpec: length must be positive and finite");
    if (!is_pow2(points) || points < 2)
        throw std::invalid_argument("GridSpec: point count must be a power of two >= 2, got " +
                                    std::to_string(points));
    if (dxi() > 0.125)
        throw std::invalid_argument("GridSpec: frequency spacing 2pi/L = " + std::to_string(dxi()) +
                                    " exceeds 1/8; need L >= 16 pi");
}

double GridSpec::dxi() const noexcept { return 2.0 * std::numbers::pi / length_; }

double GridSpec::nyquist() const noexcept {
    return std::numbers::pi * static_cast<double>(points_) / length_;
}

long GridSpec::signed_index(std::size_t k) const noexcept {
    const auto m = static_cast<long>(points_);
    const auto kk = static_cast<long>(k);
    return kk < m / 2 ? kk : kk - m;
}

double GridSpec::wavenumber(std::size_t k) const noexcept {
    return dxi() * static_cast<double>(signed_index(k));
}

std::size_t GridSpec::storage_index(long m) const noexcept {
    const auto n = static_cast<long>(points_);
    return static_cast<std::size_t>(m >= 0 ? m : m + n);
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

Field::Field(const GridSpec& grid) : grid_(grid), samples_(grid.points()) {}

Field::Field(const GridSpec& grid, std::vector<cplx> samples)
    : grid_(grid), samples_(std::move(samples)) {
    if (samples_.size() != grid_.points())
        throw std::invalid_argument("Field: sample count " + std::to_string(samples_.size()) +
                                    " does not match grid size " + std::to_string(grid_.points()));
    for (const auto& v : samples_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("Field: non-finite sample");
}

Field& Field::operator+=(const Field& other) {
    require_same_grid(grid_, other.grid_, "Field::operator+=");
    for (std::size_t j = 0; j < samples_.size(); ++j) samples_[j] += other.samples_[j];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require_same_grid(grid_, other.grid_, "Field::operator-=");
    for (std::size_t j = 0; j < samples_.size(); ++j) samples_[j] -= other.samples_[j];
    return *this;
}

Field& Field::operator*=(cplx c) {
    for (auto& v : samples_) v *= c;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx c, Field f) { return f *= c; }

SpectralField::SpectralField(const GridSpec& grid) : grid_(grid), coeffs_(grid.points()) {}

SpectralField::SpectralField(const GridSpec& grid, std::vector<cplx> coefficients)
    : grid_(grid), coeffs_(std::move(coefficients)) {
    if (coeffs_.size() != grid_.points())
        throw std::invalid_argument("SpectralField: coefficient count does not match grid size");
}

} // namespace mkdv
