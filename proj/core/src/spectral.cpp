#include "mkdv/spectral.hpp"

#include "mkdv/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mkdv {

namespace {

constexpr double kPi = std::numbers::pi;

// e^{-i xi_k x_0} with x_0 = -L/2 reduces to (-1)^k for even M.
double parity(long m) { return (m & 1) ? -1.0 : 1.0; }

bool is_pow2(long n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

SpectralField forward_transform(const Field& f) {
    const auto& g = f.grid();
    for (const auto& v : f.samples())
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("forward_transform: non-finite input sample");
    SpectralField out(g);
    auto c = out.coefficients();
    fft::forward(f.samples(), c);
    const double dx = g.dx();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= dx * parity(g.signed_index(k));
    return out;
}

Field inverse_transform(const SpectralField& F) {
    const auto& g = F.grid();
    std::vector<cplx> buf(F.coefficients().begin(), F.coefficients().end());
    const double inv_len = 1.0 / g.length();
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] *= inv_len * parity(g.signed_index(k));
    fft::backward(buf, buf);
    return Field(g, std::move(buf));
}

SpectralField spatial_derivative(const SpectralField& F, unsigned order) {
    SpectralField out = F;
    if (order == 0) return out;
    auto c = out.coefficients();
    const auto& g = F.grid();
    for (std::size_t k = 0; k < c.size(); ++k) {
        const cplx ik(0.0, g.wavenumber(k));
        cplx m = 1.0;
        for (unsigned r = 0; r < order; ++r) m *= ik;
        c[k] *= m;
    }
    return out;
}

Field spatial_derivative(const Field& f, unsigned order) {
    return inverse_transform(spatial_derivative(forward_transform(f), order));
}

double window_value(Window w, double xi) noexcept {
    if (!(std::abs(xi) < 1.0)) return 0.0;
    switch (w) {
    case Window::CosSquared: {
        const double c = std::cos(0.5 * kPi * xi);
        return c * c;
    }
    case Window::QuarticSpline: {
        auto bump = [](double y) {
            const double a = 1.0 - y * y;
            return std::abs(y) < 1.0 ? a * a : 0.0;
        };
        const double r = xi - std::floor(xi);
        return bump(xi) / (bump(r) + bump(r - 1.0));
    }
    }
    return 0.0;
}

SpectralField littlewood_paley(const SpectralField& F, long dyadic) {
    const auto& g = F.grid();
    if (!is_pow2(dyadic))
        throw std::invalid_argument("littlewood_paley: N must be a power of two >= 1");
    if (static_cast<double>(dyadic) > g.nyquist())
        throw std::invalid_argument("littlewood_paley: N = " + std::to_string(dyadic) +
                                    " above Nyquist " + std::to_string(g.nyquist()));
    SpectralField out = F;
    auto c = out.coefficients();
    const double hi = static_cast<double>(dyadic);
    const double lo = dyadic == 1 ? -1.0 : 0.5 * hi;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double a = std::abs(g.wavenumber(k));
        if (!(a > lo && a <= hi)) c[k] = 0.0;
    }
    return out;
}

Field littlewood_paley(const Field& f, long dyadic) {
    return inverse_transform(littlewood_paley(forward_transform(f), dyadic));
}

SpectralField unit_cube_project(const SpectralField& F, long n, Window w) {
    const auto& g = F.grid();
    if (static_cast<double>(std::abs(n) + 1) >= g.nyquist())
        throw std::invalid_argument("unit_cube_project: cube " + std::to_string(n) +
                                    " outside resolved band |xi| < " + std::to_string(g.nyquist()));
    SpectralField out = F;
    auto c = out.coefficients();
    for (std::size_t k = 0; k < c.size(); ++k)
        c[k] *= window_value(w, g.wavenumber(k) - static_cast<double>(n));
    return out;
}

Field unit_cube_project(const Field& f, long n, Window w) {
    return inverse_transform(unit_cube_project(forward_transform(f), n, w));
}

SpectralField airy_propagator(const SpectralField& F, double t) {
    SpectralField out = F;
    if (t == 0.0) return out;
    auto c = out.coefficients();
    const auto& g = F.grid();
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double xi = g.wavenumber(k);
        c[k] *= std::polar(1.0, xi * xi * xi * t);
    }
    return out;
}

Field airy_propagator(const Field& f, double t) {
    if (t == 0.0) return f;
    return inverse_transform(airy_propagator(forward_transform(f), t));
}

Field riesz_bilinear(double theta, const Field& f, const Field& g) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("riesz_bilinear: theta must lie in (0, 1]");
    require_same_grid(f.grid(), g.grid(), "riesz_bilinear");
    const auto& grid = f.grid();
    const SpectralField F = forward_transform(f);
    const SpectralField G = forward_transform(g);
    const double half_band = 0.5 * grid.nyquist();

    struct Bin {
        long index;
        double xi;
        cplx value;
    };
    auto occupied = [&](const SpectralField& S, const char* name) {
        double peak = 0.0;
        for (auto v : S.coefficients()) peak = std::max(peak, std::abs(v));
        std::vector<Bin> bins;
        for (std::size_t k = 0; k < S.size(); ++k) {
            const double xi = grid.wavenumber(k);
            const double a = std::abs(S[k]);
            if (std::abs(xi) >= half_band) {
                if (a > 1e-12 * peak)
                    throw std::invalid_argument(std::string("riesz_bilinear: input ") + name +
                                                " has content at |xi| >= nyquist/2; the "
                                                "convolution would alias");
                continue;
            }
            if (a > 1e-16 * peak) bins.push_back({grid.signed_index(k), xi, S[k]});
        }
        if (bins.size() > kRieszBandwidthCap)
            throw std::invalid_argument("riesz_bilinear: occupied bandwidth exceeds cap");
        return bins;
    };
    const auto bf = occupied(F, "f");
    const auto bg = occupied(G, "g");

    SpectralField out(grid);
    auto c = out.coefficients();
    const double norm = grid.dxi() / (2.0 * kPi);
    for (const auto& a : bf) {
        for (const auto& b : bg) {
            const double gap = std::abs(a.xi - b.xi);
            if (gap == 0.0) continue;
            c[grid.storage_index(a.index + b.index)] += std::pow(gap, theta) * a.value * b.value;
        }
    }
    for (auto& v : c) v *= norm;
    return inverse_transform(out);
}

double l2_mass(const Field& f) {
    double s = 0.0;
    for (auto v : f.samples()) s += std::norm(v);
    return s * f.grid().dx();
}

double l2_mass(const SpectralField& F) {
    double s = 0.0;
    for (auto v : F.coefficients()) s += std::norm(v);
    return s * F.grid().dxi() / (2.0 * kPi);
}

double sup_norm(const Field& f) {
    double m = 0.0;
    for (auto v : f.samples()) m = std::max(m, std::abs(v));
    return m;
}

} // namespace mkdv
