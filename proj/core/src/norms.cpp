#include "mkdv/norms.hpp"

#include "mkdv/error.hpp"
#include "mkdv/fft.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mkdv {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEdgeTolerance = 1e-10;
constexpr double kTemporalAliasTolerance = 1e-8;
// Zero-padding factor of the temporal transform; the sigma lattice is 2 pi / (P T_w).
constexpr std::size_t kTemporalPadding = 8;

double sinc(double x) noexcept { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }
} // namespace

void NormParams::validate() const {
    if (!(p >= 1.0)) throw std::invalid_argument("NormParams: p must be >= 1");
    if (!std::isfinite(s)) throw std::invalid_argument("NormParams: s must be finite");
    if (epsilon && !(*epsilon > 0.0)) throw std::invalid_argument("NormParams: epsilon must be > 0");
}

double japanese_bracket(double x) noexcept { return std::sqrt(1.0 + x * x); }

double weighted_lp(std::span<const double> values, std::span<const double> weights, double p) {
    if (values.size() != weights.size()) throw std::invalid_argument("weighted_lp: size mismatch");
    if (!(p >= 1.0)) throw std::invalid_argument("weighted_lp: p must be >= 1");
    double peak = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) peak = std::max(peak, std::abs(values[i] * weights[i]));
    if (peak == 0.0 || std::isinf(p)) return peak;
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += std::pow(std::abs(values[i] * weights[i]) / peak, p);
    return peak * std::pow(acc, 1.0 / p);
}

double sobolev_norm(const SpectralField& F, double s) {
    const auto& g = F.grid();
    double acc = 0.0;
    for (std::size_t k = 0; k < F.size(); ++k) {
        const double xi = g.wavenumber(k);
        acc += std::pow(1.0 + xi * xi, s) * std::norm(F[k]);
    }
    return std::sqrt(acc * g.dxi() / (2.0 * kPi));
}

double sobolev_norm(const Field& f, double s) { return sobolev_norm(forward_transform(f), s); }

double fourier_lebesgue_norm(const SpectralField& F, double s, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("fourier_lebesgue_norm: p must be >= 1");
    const auto& g = F.grid();
    std::vector<double> vals(F.size());
    std::vector<double> wts(F.size());
    const double w = std::isinf(p) ? 1.0 : std::pow(g.dxi(), 1.0 / p);
    for (std::size_t k = 0; k < F.size(); ++k) {
        vals[k] = std::abs(F[k]);
        wts[k] = std::pow(japanese_bracket(g.wavenumber(k)), s) * w;
    }
    return weighted_lp(vals, wts, p);
}

double fourier_lebesgue_norm(const Field& f, double s, double p) {
    return fourier_lebesgue_norm(forward_transform(f), s, p);
}

CubeMasses cube_masses(const SpectralField& F, Window w) {
    const auto& g = F.grid();
    const long reach = static_cast<long>(std::ceil(g.nyquist())) + 1;
    CubeMasses out;
    out.first = -reach;
    std::vector<double> sq(static_cast<std::size_t>(2 * reach + 1), 0.0);
    for (std::size_t k = 0; k < F.size(); ++k) {
        const double a = std::norm(F[k]);
        if (a == 0.0) continue;
        const double xi = g.wavenumber(k);
        const long n0 = static_cast<long>(std::floor(xi));
        for (long n = n0; n <= n0 + 1; ++n) {
            const double psi = window_value(w, xi - static_cast<double>(n));
            if (psi != 0.0) sq[static_cast<std::size_t>(n + reach)] += psi * psi * a;
        }
    }
    const double scale = g.dxi() / (2.0 * kPi);
    out.l2.resize(sq.size());
    for (std::size_t i = 0; i < sq.size(); ++i) out.l2[i] = std::sqrt(sq[i] * scale);
    return out;
}

double edge_mass_fraction(const SpectralField& F, double margin) {
    const auto& g = F.grid();
    const double edge = g.nyquist() - margin;
    double total = 0.0;
    double outer = 0.0;
    for (std::size_t k = 0; k < F.size(); ++k) {
        const double a = std::norm(F[k]);
        total += a;
        if (std::abs(g.wavenumber(k)) >= edge) outer += a;
    }
    return total > 0.0 ? outer / total : 0.0;
}

double modulation_norm(const SpectralField& F, double s, double p, Window w) {
    if (!(p >= 1.0)) throw std::invalid_argument("modulation_norm: p must be >= 1");
    const double edge = edge_mass_fraction(F, 2.0);
    if (edge > kEdgeTolerance)
        throw ResolutionError("modulation_norm: " + std::to_string(edge) +
                              " of the L2 mass lies within 2 of the Nyquist edge " +
                              std::to_string(F.grid().nyquist()) +
                              "; refine the grid so the band exceeds " +
                              std::to_string(2.0 * F.grid().nyquist()));
    const CubeMasses cm = cube_masses(F, w);
    std::vector<double> wts(cm.l2.size());
    for (std::size_t i = 0; i < wts.size(); ++i)
        wts[i] = std::pow(japanese_bracket(static_cast<double>(cm.first + static_cast<long>(i))), s);
    return weighted_lp(cm.l2, wts, p);
}

double modulation_norm(const Field& f, double s, double p, Window w) {
    return modulation_norm(forward_transform(f), s, p, w);
}

double temporal_cutoff(double t, double window_length) noexcept {
    if (!(t >= 0.0 && t <= window_length)) return 0.0;
    const double shoulder = 0.1 * window_length;
    auto rise = [&](double u) {
        const double v = std::sin(0.5 * kPi * u / shoulder);
        return v * v;
    };
    if (t < shoulder) return rise(t);
    if (t > window_length - shoulder) return rise(window_length - t);
    return 1.0;
}

double cutoff_transform_modulus(double sigma, double window_length) noexcept {
    // eta^ factors as the transform of a box of length T_w - h smoothed by the
    // cos^2 shoulder of width h = T_w / 10; both factors are written as sincs
    // so the removable singularities at sigma = 0 and |sigma| = pi / h stay finite.
    const double h = 0.1 * window_length;
    const double a = kPi / h;
    const double x = std::abs(sigma);
    const double box = (window_length - h) * std::abs(sinc(0.5 * x * (window_length - h)));
    const double shoulder = a * a * 0.5 * h * std::abs(sinc(0.5 * (a - x) * h)) / (a + x);
    return box * shoulder;
}

double cutoff_weighted_energy(double b, double window_length) {
    if (!(window_length > 0.0)) throw std::invalid_argument("cutoff_weighted_energy: window length must be positive");
    if (!(b < 2.0)) throw std::invalid_argument("cutoff_weighted_energy: requires b < 2");
    static std::mutex mutex;
    static std::map<std::pair<double, double>, double> cache;
    {
        const std::lock_guard lock(mutex);
        if (const auto it = cache.find({b, window_length}); it != cache.end()) return it->second;
    }
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto f = [&](double sigma) {
        const double e = cutoff_transform_modulus(sigma, window_length);
        return std::pow(1.0 + sigma * sigma, b) * e * e;
    };
    // Lobes of the box factor up to 200 shoulder periods, with the <sigma>
    // kink near 0 split off. Beyond that |eta^|^2 averages to a^4 / sigma^6
    // (sin^2 cos^2 of commensurate frequencies has mean 1/4), and the tail is
    // integrated in closed form.
    const double h = 0.1 * window_length;
    const double a = kPi / h;
    const double lobe = 2.0 * kPi / (window_length - h);
    const double lobes = std::ceil(200.0 * 4.0 * kPi / h / lobe);
    const double cut = lobes * lobe;
    double acc = 0.0;
    double lo = 0.0;
    if (lobe > 4.0) {
        acc += GK::integrate(f, 0.0, 4.0, 20, 1e-12);
        lo = 4.0;
    }
    for (double k = 1.0; k <= lobes; k += 1.0) {
        const double hi = k * lobe;
        if (hi <= lo) continue;
        acc += GK::integrate(f, lo, hi, 20, 1e-11);
        lo = hi;
    }
    acc += std::pow(a, 4.0) * std::pow(cut, 2.0 * b - 5.0) / (5.0 - 2.0 * b);
    const double value = acc / kPi;
    const std::lock_guard lock(mutex);
    cache.emplace(std::make_pair(b, window_length), value);
    return value;
}

SpaceTimeField::SpaceTimeField(const GridSpec& grid, double window_length, std::vector<Field> samples)
    : grid_(grid), window_length_(window_length), samples_(std::move(samples)) {
    if (!(window_length > 0.0)) throw std::invalid_argument("SpaceTimeField: window length must be > 0");
    const std::size_t K = samples_.size();
    if (K < 2 || (K & (K - 1)) != 0)
        throw std::invalid_argument("SpaceTimeField: time sample count must be a power of two >= 2");
    for (const auto& f : samples_) require_same_grid(grid_, f.grid(), "SpaceTimeField");
}

SpaceTimeField SpaceTimeField::free_evolution(const Field& f, double window_length, std::size_t K) {
    const SpectralField F = forward_transform(f);
    std::vector<Field> samples;
    samples.reserve(K);
    const double dt = window_length / static_cast<double>(K);
    for (std::size_t j = 0; j < K; ++j)
        samples.push_back(inverse_transform(airy_propagator(F, static_cast<double>(j) * dt)));
    return SpaceTimeField(f.grid(), window_length, std::move(samples));
}

namespace {

// Per spatial lattice bin, (2 pi)^{-2} sum_m <sigma_m>^{2b} |u~(xi_k, sigma_m)|^2 dsigma dxi
// in the frame sigma = tau - xi^3.
std::vector<double> weighted_space_time_energy(const SpaceTimeField& U, double b) {
    const auto& g = U.grid();
    const std::size_t M = g.points();
    const std::size_t K = U.time_points();
    const std::size_t Kp = K * kTemporalPadding;
    const double dt = U.dt();

    std::vector<cplx> table(K * M);
    for (std::size_t j = 0; j < K; ++j) {
        const SpectralField F = forward_transform(U.sample(j));
        const double t = U.time(j);
        const double eta = U.cutoff(j);
        for (std::size_t k = 0; k < M; ++k) {
            const double xi = g.wavenumber(k);
            table[k * K + j] = eta * dt * F[k] * std::polar(1.0, -xi * xi * xi * t);
        }
    }

    const double dsigma = 2.0 * kPi / (U.window_length() * static_cast<double>(kTemporalPadding));
    const double norm = dsigma * g.dxi() / (4.0 * kPi * kPi);
    std::vector<double> weight(Kp);
    for (std::size_t m = 0; m < Kp; ++m) {
        const long mm = m < Kp / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(Kp);
        weight[m] = std::pow(japanese_bracket(dsigma * static_cast<double>(mm)), 2.0 * b);
    }

    std::vector<double> energy(M, 0.0);
    double total = 0.0;
    double upper = 0.0;
    std::vector<cplx> row(Kp);
    for (std::size_t k = 0; k < M; ++k) {
        std::copy_n(table.begin() + static_cast<std::ptrdiff_t>(k * K), K, row.begin());
        std::fill(row.begin() + static_cast<std::ptrdiff_t>(K), row.end(), cplx{0.0, 0.0});
        fft::forward(row, row);
        double e = 0.0;
        for (std::size_t m = 0; m < Kp; ++m) {
            const double a = std::norm(row[m]);
            e += weight[m] * a;
            total += a;
            if (m >= Kp / 4 && m < Kp - Kp / 4) upper += a;
        }
        energy[k] = e * norm;
    }
    if (total > 0.0 && upper / total > kTemporalAliasTolerance)
        throw ResolutionError("xsb_norm: " + std::to_string(upper / total) +
                              " of the space-time energy lies in the upper half of the temporal band; "
                              "temporal Nyquist too small, need K >= " + std::to_string(2 * K));
    return energy;
}

} // namespace

namespace {

double sum_l2(const GridSpec& g, const std::vector<double>& energy, double s) {
    double acc = 0.0;
    for (std::size_t k = 0; k < energy.size(); ++k) {
        const double xi = g.wavenumber(k);
        acc += std::pow(1.0 + xi * xi, s) * energy[k];
    }
    return std::sqrt(acc);
}

double sum_cubes_lp(const GridSpec& g, const std::vector<double>& energy, double s, double p) {
    const long reach = static_cast<long>(std::ceil(g.nyquist())) + 1;
    std::vector<double> blocks(static_cast<std::size_t>(2 * reach + 1), 0.0);
    for (std::size_t k = 0; k < energy.size(); ++k) {
        const long n = static_cast<long>(std::floor(g.wavenumber(k)));
        blocks[static_cast<std::size_t>(n + reach)] += energy[k];
    }
    std::vector<double> wts(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        blocks[i] = std::sqrt(blocks[i]);
        wts[i] = std::pow(japanese_bracket(static_cast<double>(static_cast<long>(i) - reach)), s);
    }
    return weighted_lp(blocks, wts, p);
}

std::vector<double> free_space_time_energy(const Field& f, double b, double window_length) {
    const double scale = cutoff_weighted_energy(b, window_length) * f.grid().dxi() / (2.0 * kPi);
    const SpectralField F = forward_transform(f);
    std::vector<double> energy(F.size());
    for (std::size_t k = 0; k < F.size(); ++k) energy[k] = std::norm(F[k]) * scale;
    return energy;
}

} // namespace

double xsb_norm(const SpaceTimeField& U, double s, double b) {
    return sum_l2(U.grid(), weighted_space_time_energy(U, b), s);
}

double xsb_p_norm(const SpaceTimeField& U, double s, double b, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("xsb_p_norm: p must be >= 1");
    return sum_cubes_lp(U.grid(), weighted_space_time_energy(U, b), s, p);
}

double free_evolution_xsb_norm(const Field& f, double s, double b, double window_length) {
    return sum_l2(f.grid(), free_space_time_energy(f, b, window_length), s);
}

double free_evolution_xsb_p_norm(const Field& f, double s, double b, double p, double window_length) {
    if (!(p >= 1.0)) throw std::invalid_argument("xsb_p_norm: p must be >= 1");
    return sum_cubes_lp(f.grid(), free_space_time_energy(f, b, window_length), s, p);
}

} // namespace mkdv
