#pragma once

#include "mkdv/grid.hpp"
#include "mkdv/spectral.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace mkdv {

/// Focusing soliton
///   u(x, t) = e^{i t (N^3 - 3 N lambda^2) + i N x} lambda sech(lambda (x + (3N^2 - lambda^2) t)).
struct SolitonParams {
    double carrier = 1.0;  ///< N > 0
    double scale = 1.0;    ///< lambda > 0

    void validate() const;
    /// Translation speed: the profile argument is x + velocity() * t.
    double velocity() const noexcept { return 3.0 * carrier * carrier - scale * scale; }
    /// L^2 mass 2 lambda.
    double mass() const noexcept { return 2.0 * scale; }
};

/// Q(x) = sech(x).
double ground_state(double x) noexcept;
/// d^k Q / dx^k for k <= 3, closed form.
double ground_state_derivative(double x, unsigned order);

/// How a soliton is placed on a periodic grid.
enum class SolitonFrame {
    /// The profile argument wraps modulo L; this is what a periodic solver
    /// evolves the sampled initial datum into.
    Periodic,
    /// Exact whole-line values u(x + shift, t); the caller must choose a
    /// shift that keeps the profile inside the domain.
    Line,
};

/// Samples the soliton at time t. Requires N + 10 lambda < nyquist and
/// lambda L >= 40.
Field soliton_field(const SolitonParams& params, double t, const GridSpec& grid, double shift = 0.0,
                    SolitonFrame frame = SolitonFrame::Periodic);

/// |u^(xi, t)| = pi sech(pi (xi - N) / (2 lambda)), independent of t.
double soliton_spectrum(const SolitonParams& params, double xi) noexcept;

/// Continuum transform of the Line-frame field u(x + shift, t).
cplx soliton_transform(const SolitonParams& params, double t, double shift, double xi) noexcept;

/// Linear combination of Line-frame soliton spectra, evaluated in closed form.
class SpectrumModel {
public:
    struct Term {
        double weight;
        SolitonParams params;
        double time;
        double shift;
    };

    SpectrumModel() = default;
    SpectrumModel& add(double weight, const SolitonParams& params, double t = 0.0, double shift = 0.0);

    cplx operator()(double xi) const noexcept;
    /// |sum|^2 with every phase taken relative to the first term, so the large
    /// common phases of fast-moving solitons drop out before rounding.
    double modulus_squared(double xi) const noexcept;
    const std::vector<Term>& terms() const noexcept { return terms_; }
    /// Frequency interval outside which |u^|^2 < 1e-30 of its peak.
    std::pair<double, double> support() const;

private:
    std::vector<Term> terms_;
};

struct QuadratureOptions {
    Window window = Window::CosSquared;
    double rel_tol = 1e-9;
    /// When set, drop the frequencies strictly inside (first, second).
    std::optional<std::pair<double, double>> exclude;
};

/// ||Pi_n u||_{L^2} for all cubes touching the support, by adaptive
/// Gauss-Kronrod on psi(xi - n)^2 |u^(xi)|^2.
std::vector<std::pair<long, double>> quadrature_cube_masses(const SpectrumModel& model,
                                                            const QuadratureOptions& opts = {});
double quadrature_modulation_norm(const SpectrumModel& model, double s, double p,
                                  const QuadratureOptions& opts = {});

/// Grid-free M^{2,p}_s norm of a single soliton.
double soliton_modulation_norm(const SolitonParams& params, double s, double p,
                               Window window = Window::CosSquared);

/// |<Pi_n a(t), Pi_n b(t)>_{L^2}| computed on the grid from Line-frame
/// samples u(x + shift, t). Both solitons must share lambda.
double pair_overlap(long n, const SolitonParams& a, const SolitonParams& b, double t, const GridSpec& grid,
                    double shift = 0.0, Window window = Window::CosSquared);

} // namespace mkdv
