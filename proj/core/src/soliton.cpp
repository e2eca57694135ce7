#include "mkdv/soliton.hpp"

#include "mkdv/norms.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mkdv {

namespace {

constexpr double kPi = std::numbers::pi;
// Unit amplitude: lambda sech(lambda x) e^{iNx} solves the +6|u|^2 u_x equation exactly.
constexpr double kAmplitude = 1.0;
constexpr long double kTwoPiL = 2.0L * std::numbers::pi_v<long double>;

// Phases here reach N^3 t ~ 1e9 for desk-scale sweeps; reduce in extended precision.
cplx unit_phase(long double phase) {
    const long double r = std::fmod(phase, kTwoPiL);
    return std::polar(1.0, static_cast<double>(r));
}

constexpr double kCancellationFloor = 1e-12;
constexpr unsigned kMaxDepth = 20;

// Adaptive Gauss-Kronrod accepting a panel once its error estimate is below
// rel_tol * |I| or the absolute floor, which is split between the halves.
template <class F>
double adaptive_gk(const F& f, double a, double b, double rel_tol, double abs_tol, unsigned depth) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double value = gauss_kronrod<double, 61>::integrate(f, a, b, 0, 0.0, &err);
    if (depth == 0 || err <= std::max(rel_tol * std::abs(value), abs_tol)) return value;
    const double mid = 0.5 * (a + b);
    return adaptive_gk(f, a, mid, rel_tol, 0.5 * abs_tol, depth - 1) +
           adaptive_gk(f, mid, b, rel_tol, 0.5 * abs_tol, depth - 1);
}

// Half-width, in units of lambda, beyond which sech^2 < 1e-30 of its peak.
constexpr double kSupportHalfWidth = 22.5;

} // namespace

void SolitonParams::validate() const {
    if (!(carrier > 0.0) || !std::isfinite(carrier))
        throw std::invalid_argument("SolitonParams: carrier N must be positive");
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("SolitonParams: scale lambda must be positive");
}

double ground_state(double x) noexcept { return 1.0 / std::cosh(x); }

double ground_state_derivative(double x, unsigned order) {
    const double q = ground_state(x);
    const double th = std::tanh(x);
    switch (order) {
    case 0: return q;
    case 1: return -q * th;
    case 2: return q * th * th - q * q * q;
    case 3: return -q * th * th * th + 5.0 * q * q * q * th;
    default: throw std::invalid_argument("ground_state_derivative: order must be <= 3");
    }
}

Field soliton_field(const SolitonParams& params, double t, const GridSpec& grid, double shift,
                    SolitonFrame frame) {
    params.validate();
    const double N = params.carrier;
    const double lam = params.scale;
    if (N + 10.0 * lam >= grid.nyquist())
        throw std::invalid_argument("soliton_field: carrier N + 10 lambda = " + std::to_string(N + 10.0 * lam) +
                                    " not resolved below Nyquist " + std::to_string(grid.nyquist()));
    if (lam * grid.length() < 40.0)
        throw std::invalid_argument("soliton_field: lambda L = " + std::to_string(lam * grid.length()) +
                                    " < 40; the profile tail would wrap");

    const long double NL = N;
    const long double lamL = lam;
    const long double tL = t;
    const long double L = grid.length();
    const long double travel = static_cast<long double>(shift) + (3.0L * NL * NL - lamL * lamL) * tL;

    std::vector<cplx> samples(grid.points());
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const long double x = grid.x(j);
        long double arg = x + travel;
        long double phase;
        if (frame == SolitonFrame::Periodic) {
            arg -= L * std::floor((arg + 0.5L * L) / L);
            phase = NL * arg - 2.0L * NL * (NL * NL + lamL * lamL) * tL;
        } else {
            phase = tL * (NL * NL * NL - 3.0L * NL * lamL * lamL) + NL * (x + static_cast<long double>(shift));
        }
        const double profile = lam * ground_state(lam * static_cast<double>(arg));
        samples[j] = profile == 0.0 ? cplx{} : kAmplitude * profile * unit_phase(phase);
    }
    return Field(grid, std::move(samples));
}

double soliton_spectrum(const SolitonParams& params, double xi) noexcept {
    return kAmplitude * kPi / std::cosh(0.5 * kPi * (xi - params.carrier) / params.scale);
}

cplx soliton_transform(const SolitonParams& params, double t, double shift, double xi) noexcept {
    const long double N = params.carrier;
    const long double lam = params.scale;
    const long double tL = t;
    const long double xiL = xi;
    const long double phase = tL * (N * N * N - 3.0L * N * lam * lam) +
                              (xiL - N) * (3.0L * N * N - lam * lam) * tL + xiL * static_cast<long double>(shift);
    return soliton_spectrum(params, xi) * unit_phase(phase);
}

SpectrumModel& SpectrumModel::add(double weight, const SolitonParams& params, double t, double shift) {
    params.validate();
    terms_.push_back({weight, params, t, shift});
    return *this;
}

cplx SpectrumModel::operator()(double xi) const noexcept {
    cplx acc{};
    for (const auto& term : terms_) acc += term.weight * soliton_transform(term.params, term.time, term.shift, xi);
    return acc;
}

double SpectrumModel::modulus_squared(double xi) const noexcept {
    if (terms_.empty()) return 0.0;
    // Phase of a term: C + xi * S with S = velocity * t + shift.
    auto slope = [](const Term& term) {
        return static_cast<long double>(term.params.velocity()) * term.time + static_cast<long double>(term.shift);
    };
    auto offset = [](const Term& term) {
        const long double N = term.params.carrier;
        const long double lam = term.params.scale;
        const long double t = term.time;
        return t * (N * N * N - 3.0L * N * lam * lam) - N * (3.0L * N * N - lam * lam) * t;
    };
    const long double s0 = slope(terms_.front());
    const long double c0 = offset(terms_.front());
    // Expand around the first carrier so the xi-dependent part stays small.
    const long double centre = terms_.front().params.carrier;
    const double dxi = static_cast<double>(static_cast<long double>(xi) - centre);
    cplx acc{};
    for (const auto& term : terms_) {
        const long double ds = slope(term) - s0;
        const long double dc = std::fmod(offset(term) - c0 + centre * ds, kTwoPiL);
        const double phase = static_cast<double>(dc) + dxi * static_cast<double>(ds);
        acc += term.weight * soliton_spectrum(term.params, xi) * std::polar(1.0, phase);
    }
    return std::norm(acc);
}

std::pair<double, double> SpectrumModel::support() const {
    if (terms_.empty()) throw std::logic_error("SpectrumModel: empty model");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& term : terms_) {
        const double r = kSupportHalfWidth * term.params.scale;
        lo = std::min(lo, term.params.carrier - r);
        hi = std::max(hi, term.params.carrier + r);
    }
    return {lo, hi};
}

std::vector<std::pair<long, double>> quadrature_cube_masses(const SpectrumModel& model,
                                                            const QuadratureOptions& opts) {
    using boost::math::quadrature::gauss_kronrod;
    const auto [lo, hi] = model.support();
    const long first = static_cast<long>(std::floor(lo)) - 1;
    const long last = static_cast<long>(std::ceil(hi)) + 1;

    std::vector<std::pair<long, double>> out;
    out.reserve(static_cast<std::size_t>(last - first + 1));
    for (long n = first; n <= last; ++n) {
        const double nd = static_cast<double>(n);
        std::vector<double> cuts{std::max(nd - 1.0, lo), std::clamp(nd, lo, hi), std::min(nd + 1.0, hi)};
        for (const auto& term : model.terms())
            if (term.params.carrier > nd - 1.0 && term.params.carrier < nd + 1.0) cuts.push_back(term.params.carrier);
        if (opts.exclude) {
            cuts.push_back(std::clamp(opts.exclude->first, nd - 1.0, nd + 1.0));
            cuts.push_back(std::clamp(opts.exclude->second, nd - 1.0, nd + 1.0));
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        auto integrand = [&](double xi) {
            const double psi = window_value(opts.window, xi - nd);
            return psi * psi * model.modulus_squared(xi);
        };
        // Sum of the moduli: differences of nearly equal terms cannot be
        // resolved below ~1e-16 of this, so it sets the absolute floor.
        auto envelope = [&](double xi) {
            const double psi = window_value(opts.window, xi - nd);
            double m = 0.0;
            for (const auto& term : model.terms()) m += std::abs(term.weight) * soliton_spectrum(term.params, xi);
            return psi * psi * m * m;
        };
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double a = cuts[i];
            const double b = cuts[i + 1];
            if (!(b > a) || a >= hi || b <= lo) continue;
            if (opts.exclude && a >= opts.exclude->first && b <= opts.exclude->second) continue;
            const double floor = kCancellationFloor * gauss_kronrod<double, 61>::integrate(envelope, a, b, 0, 0.0);
            acc += adaptive_gk(integrand, a, b, opts.rel_tol, floor, kMaxDepth);
        }
        out.emplace_back(n, std::sqrt(acc / (2.0 * kPi)));
    }
    return out;
}

double quadrature_modulation_norm(const SpectrumModel& model, double s, double p, const QuadratureOptions& opts) {
    if (!(p >= 1.0)) throw std::invalid_argument("quadrature_modulation_norm: p must be >= 1");
    const auto masses = quadrature_cube_masses(model, opts);
    std::vector<double> vals;
    std::vector<double> wts;
    vals.reserve(masses.size());
    wts.reserve(masses.size());
    for (const auto& [n, m] : masses) {
        vals.push_back(m);
        wts.push_back(std::pow(std::sqrt(1.0 + static_cast<double>(n) * static_cast<double>(n)), s));
    }
    return weighted_lp(vals, wts, p);
}

double soliton_modulation_norm(const SolitonParams& params, double s, double p, Window window) {
    SpectrumModel model;
    model.add(1.0, params);
    QuadratureOptions opts;
    opts.window = window;
    return quadrature_modulation_norm(model, s, p, opts);
}

double pair_overlap(long n, const SolitonParams& a, const SolitonParams& b, double t, const GridSpec& grid,
                    double shift, Window window) {
    if (a.scale != b.scale) throw std::invalid_argument("pair_overlap: solitons must share lambda");
    const Field pa = unit_cube_project(soliton_field(a, t, grid, shift, SolitonFrame::Line), n, window);
    const Field pb = unit_cube_project(soliton_field(b, t, grid, shift, SolitonFrame::Line), n, window);
    cplx acc{};
    for (std::size_t j = 0; j < pa.size(); ++j) acc += pa[j] * std::conj(pb[j]);
    return std::abs(acc * grid.dx());
}

} // namespace mkdv
