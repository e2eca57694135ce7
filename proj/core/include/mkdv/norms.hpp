#pragma once

#include "mkdv/grid.hpp"
#include "mkdv/spectral.hpp"

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace mkdv {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Regularity/summability parameters shared by every norm.
struct NormParams {
    double s = 0.0;
    double p = 2.0;                 ///< in [1, inf]; kInfinity selects sup
    std::optional<double> b;        ///< space-time norms only
    std::optional<double> epsilon;  ///< for b = 1/2 +- epsilon conventions

    void validate() const;
};

/// <x> = (1 + x^2)^{1/2}
double japanese_bracket(double x) noexcept;

/// (sum_i (w_i v_i)^p)^{1/p}, or max_i w_i v_i for p = inf. Scaled to avoid
/// overflow at large p.
double weighted_lp(std::span<const double> values, std::span<const double> weights, double p);

double sobolev_norm(const Field& f, double s);
double sobolev_norm(const SpectralField& F, double s);

/// ||<xi>^s u^||_{L^p_xi} with dxi-weighted sums. At p = 2 this equals
/// sqrt(2 pi) * sobolev_norm because of the transform convention.
double fourier_lebesgue_norm(const Field& f, double s, double p);
double fourier_lebesgue_norm(const SpectralField& F, double s, double p);

/// L^2 masses ||Pi_n f||_{L^2} for consecutive cubes n = first, first + 1, ...
struct CubeMasses {
    long first = 0;
    std::vector<double> l2;

    long last() const noexcept { return first + static_cast<long>(l2.size()) - 1; }
};

CubeMasses cube_masses(const SpectralField& F, Window w = Window::CosSquared);

/// M^{2,p}_s norm: (sum_n <n>^{sp} ||Pi_n f||_{L^2}^p)^{1/p}.
///
/// Throws ResolutionError if more than 1e-10 of the L^2 mass sits within two
/// units of the Nyquist edge, where cubes are only partially resolved.
double modulation_norm(const Field& f, double s, double p, Window w = Window::CosSquared);
double modulation_norm(const SpectralField& F, double s, double p, Window w = Window::CosSquared);

/// Fraction of L^2 mass within `margin` of the Nyquist edge.
double edge_mass_fraction(const SpectralField& F, double margin);

/// Temporal cutoff: cos^2 shoulders over the first and last 10% of [0, T_w],
/// one in between, zero outside.
double temporal_cutoff(double t, double window_length) noexcept;

/// |eta^(sigma)| in closed form, eta^(sigma) = int eta(t) e^{-i sigma t} dt.
double cutoff_transform_modulus(double sigma, double window_length) noexcept;

/// (2 pi)^{-1} int <sigma>^{2b} |eta^(sigma)|^2 dsigma by adaptive quadrature
/// over the lobes of eta^. Requires b < 2.
double cutoff_weighted_energy(double b, double window_length);

/// Trajectory on K equispaced times t_j = j T_w / K over [0, T_w), K a power
/// of two. Samples are stored raw; the cutoff is applied by every space-time
/// transform.
class SpaceTimeField {
public:
    SpaceTimeField(const GridSpec& grid, double window_length, std::vector<Field> samples);

    /// eta(t) e^{-t d_x^3} f sampled on K times.
    static SpaceTimeField free_evolution(const Field& f, double window_length, std::size_t K);

    const GridSpec& grid() const noexcept { return grid_; }
    double window_length() const noexcept { return window_length_; }
    std::size_t time_points() const noexcept { return samples_.size(); }
    double dt() const noexcept { return window_length_ / static_cast<double>(samples_.size()); }
    double time(std::size_t j) const noexcept { return static_cast<double>(j) * dt(); }
    const Field& sample(std::size_t j) const { return samples_.at(j); }
    double cutoff(std::size_t j) const noexcept { return temporal_cutoff(time(j), window_length_); }

private:
    GridSpec grid_;
    double window_length_;
    std::vector<Field> samples_;
};

/// ||<xi>^s <tau - xi^3>^b u~||_{L^2_{xi,tau}} of the cutoff trajectory.
///
/// The temporal transform is taken in the frame co-moving with the Airy
/// symbol (sigma = tau - xi^3), which leaves the continuum integral unchanged
/// and removes the xi^3 sweep from the temporal bandwidth. The time axis is
/// zero-padded eightfold, so the sigma lattice is 2 pi / (8 T_w). Throws
/// ResolutionError naming the required K when more than 1e-8 of the energy
/// lies in the upper half of the sigma band.
double xsb_norm(const SpaceTimeField& U, double s, double b);

/// l^p over sharp unit cubes [n, n+1) of the block space-time L^2 norms,
/// weighted by <n>^s.
double xsb_p_norm(const SpaceTimeField& U, double s, double b, double p);

/// xsb_norm / xsb_p_norm of the cutoff free evolution of f in the continuum
/// tau variable. In the co-moving frame a free evolution is eta(t) f^(xi), so
/// the tau integral reduces to cutoff_weighted_energy. The table route
/// approaches these values as the sigma lattice is refined.
double free_evolution_xsb_norm(const Field& f, double s, double b, double window_length);
double free_evolution_xsb_p_norm(const Field& f, double s, double b, double p, double window_length);

} // namespace mkdv
