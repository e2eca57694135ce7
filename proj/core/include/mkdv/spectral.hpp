#pragma once

#include "mkdv/grid.hpp"

namespace mkdv {

/// Delta-x weighted transform: coefficients approximate int u e^{-i xi x} dx.
/// Rejects non-finite input.
SpectralField forward_transform(const Field& f);
/// Exact inverse of forward_transform.
Field inverse_transform(const SpectralField& F);

/// Multiplies by (i xi)^order.
SpectralField spatial_derivative(const SpectralField& F, unsigned order);
Field spatial_derivative(const Field& f, unsigned order);

/// Frequency window generating the unit-cube projectors. Both choices are
/// supported in [-1, 1] and satisfy sum_n psi(xi - n) = 1 exactly.
enum class Window {
    CosSquared,     ///< cos^2(pi xi / 2)
    QuarticSpline,  ///< (1 - xi^2)^2, renormalized to a partition of unity
};

double window_value(Window w, double xi) noexcept;

/// Sharp dyadic annulus: |xi| <= 1 for N = 1, N/2 < |xi| <= N for N >= 2.
/// N must be a power of two not above the grid's Nyquist frequency.
Field littlewood_paley(const Field& f, long dyadic);
SpectralField littlewood_paley(const SpectralField& F, long dyadic);

/// Pi_n: multiplies u^ by psi(xi - n). Requires |n| + 1 < nyquist.
Field unit_cube_project(const Field& f, long n, Window w = Window::CosSquared);
SpectralField unit_cube_project(const SpectralField& F, long n, Window w = Window::CosSquared);

/// Linear flow e^{-t d_x^3}: multiplier e^{i xi^3 t}.
Field airy_propagator(const Field& f, double t);
SpectralField airy_propagator(const SpectralField& F, double t);

/// Largest number of occupied lattice bins per input accepted by riesz_bilinear.
inline constexpr std::size_t kRieszBandwidthCap = 1u << 14;

/// Bilinear operator with symbol |xi_1 - xi_2|^theta:
///   out^(xi) = (2 pi)^{-1} sum_{xi_1 + xi_2 = xi} |xi_1 - xi_2|^theta f^(xi_1) g^(xi_2) dxi.
///
/// Evaluated as an exact double sum over occupied bins, so both inputs must
/// be band-limited to |xi| < nyquist / 2 (otherwise the sum would wrap) and
/// occupy at most kRieszBandwidthCap bins. theta must lie in (0, 1].
Field riesz_bilinear(double theta, const Field& f, const Field& g);

/// Sum_j |u_j|^2 dx.
double l2_mass(const Field& f);
/// (2 pi)^{-1} sum_k |u^_k|^2 dxi.
double l2_mass(const SpectralField& F);
double sup_norm(const Field& f);

} // namespace mkdv
