#include "mkdv/probes.hpp"

#include "mkdv/config.hpp"
#include "mkdv/error.hpp"
#include "mkdv/fft.hpp"
#include "mkdv/spectral.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mkdv {

namespace {

constexpr double kPi = std::numbers::pi;
// Bins below this fraction of the peak coefficient are treated as empty.
constexpr double kOccupancyFloor = 1e-12;
constexpr std::size_t kMaxTimePoints = std::size_t{1} << 22;
// Phase advance allowed across one 16-point Gauss-Legendre panel.
constexpr double kPanelPhase = 12.0;
constexpr std::size_t kMaxSpaceTimeTable = std::size_t{1} << 26;

struct Occupied {
    long lo = 0;
    long hi = -1;
    bool empty() const noexcept { return hi < lo; }
    std::size_t width() const noexcept { return empty() ? 0 : static_cast<std::size_t>(hi - lo + 1); }
};

Occupied occupied_range(const SpectralField& F) {
    double peak = 0.0;
    for (const cplx& c : F.coefficients()) peak = std::max(peak, std::abs(c));
    Occupied r;
    if (peak == 0.0) return r;
    const auto& g = F.grid();
    r.lo = std::numeric_limits<long>::max();
    r.hi = std::numeric_limits<long>::min();
    for (std::size_t k = 0; k < F.size(); ++k) {
        if (std::abs(F[k]) <= kOccupancyFloor * peak) continue;
        const long m = g.signed_index(k);
        r.lo = std::min(r.lo, m);
        r.hi = std::max(r.hi, m);
    }
    return r;
}

double cubic_spread(const GridSpec& g, const Occupied& r) {
    if (r.empty()) return 0.0;
    const double a = g.dxi() * static_cast<double>(r.lo);
    const double b = g.dxi() * static_cast<double>(r.hi);
    // xi^3 is monotone, so the extremes sit at the ends of the range.
    return b * b * b - a * a * a;
}

double max_square(const GridSpec& g, const Occupied& r) {
    const double a = g.dxi() * static_cast<double>(r.lo);
    const double b = g.dxi() * static_cast<double>(r.hi);
    return std::max(a * a, b * b);
}

double min_square(const GridSpec& g, const Occupied& r) {
    const double a = g.dxi() * static_cast<double>(r.lo);
    const double b = g.dxi() * static_cast<double>(r.hi);
    return a <= 0.0 && b >= 0.0 ? 0.0 : std::min(a * a, b * b);
}

// Unit window, shortened so the relative drift 3|xi_a^2 - xi_b^2| t of the two
// pieces stays within half the box: on the line the pieces meet once, and the
// periodic images must not bring them back.
double line_window(const SpectralField& A, const SpectralField& B) {
    const Occupied ra = occupied_range(A);
    const Occupied rb = occupied_range(B);
    if (ra.empty() || rb.empty()) return 1.0;
    const GridSpec& g = A.grid();
    const double spread = std::max(max_square(g, ra) - min_square(g, rb), max_square(g, rb) - min_square(g, ra));
    if (!(spread > 0.0)) return 1.0;
    return std::min(1.0, 0.5 * g.length() / (3.0 * spread));
}

struct TimeNode {
    double t;
    double weight;
};

// Composite Gauss-Legendre nodes on the three smooth pieces of the cutoff. The
// integrand eta^4 E(t) carries frequencies up to omega, plus 4 pi / h on the shoulders.
std::vector<TimeNode> cutoff_time_nodes(double window_length, double omega) {
    using GL = boost::math::quadrature::gauss<double, 16>;
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    const double h = 0.1 * window_length;
    const double edges[] = {0.0, h, window_length - h, window_length};
    std::vector<TimeNode> nodes;
    for (int piece = 0; piece < 3; ++piece) {
        const double a = edges[piece];
        const double len = edges[piece + 1] - a;
        const double freq = omega + (piece == 1 ? 0.0 : 4.0 * kPi / h);
        const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(freq * len / kPanelPhase)));
        const double width = len / static_cast<double>(panels);
        for (std::size_t q = 0; q < panels; ++q) {
            const double mid = a + width * (static_cast<double>(q) + 0.5);
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double wi = 0.5 * width * w[i];
                nodes.push_back({mid + 0.5 * width * x[i], wi});
                if (x[i] != 0.0) nodes.push_back({mid - 0.5 * width * x[i], wi});
            }
        }
    }
    return nodes;
}

// Runs body(i) for i in [0, n) on `jobs` threads; rethrows the first failure in index order.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned count = std::clamp<unsigned>(jobs, 1u, static_cast<unsigned>(std::max<std::size_t>(n, 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

template <class Build>
double with_time_refinement(std::size_t K, Build&& build) {
    for (;; K *= 2) {
        try {
            return build(K);
        } catch (const ResolutionError&) {
            if (K >= kMaxTimePoints) throw;
        }
    }
}

bool band_limited_to_third(const Field& f) {
    const SpectralField F = forward_transform(f);
    double peak = 0.0;
    for (const cplx& c : F.coefficients()) peak = std::max(peak, std::abs(c));
    const double limit = F.grid().nyquist() / 3.0;
    for (std::size_t k = 0; k < F.size(); ++k)
        if (std::abs(F.grid().wavenumber(k)) > limit && std::abs(F[k]) > kOccupancyFloor * peak) return false;
    return true;
}

std::string describe(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

ResonanceValue resonance_identity(double xi1, double xi2, double xi3) {
    const long double a = xi1, b = xi2, c = xi3;
    const long double sum = a + b + c;
    const long double lhs = sum * sum * sum - a * a * a - b * b * b - c * c * c;
    const double rhs = 3.0 * (xi1 + xi2) * (xi2 + xi3) * (xi1 + xi3);
    return {static_cast<double>(lhs), rhs};
}

ResonanceSweep resonance_fuzz(std::size_t trials, std::uint64_t seed, double range) {
    Rng rng(seed);
    ResonanceSweep out;
    out.trials = trials;
    for (std::size_t i = 0; i < trials; ++i) {
        const double a = rng.uniform(-range, range);
        const double b = rng.uniform(-range, range);
        const double c = rng.uniform(-range, range);
        const auto [lhs, rhs] = resonance_identity(a, b, c);
        const double dev = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
        if (dev > out.max_deviation || i == 0) {
            out.max_deviation = std::max(out.max_deviation, dev);
            out.argmax = {a, b, c};
        }
    }
    return out;
}

double bilinear_space_time_l2(const SpectralField& A, const SpectralField& B, double window_length) {
    require_same_grid(A.grid(), B.grid(), "bilinear_space_time_l2");
    if (!(window_length > 0.0)) throw std::invalid_argument("bilinear_space_time_l2: window length must be positive");
    const Occupied ra = occupied_range(A);
    const Occupied rb = occupied_range(B);
    if (ra.empty() || rb.empty()) return 0.0;
    const GridSpec& g = A.grid();
    const double L = g.length();
    const double dxi = g.dxi();

    // Both factors are shifted to baseband; the product spans wa + wb - 1 bins,
    // so a grid of next_pow2(wa + wb) points holds it without wrap-around.
    const std::size_t wa = ra.width();
    const std::size_t wb = rb.width();
    const std::size_t Ms = next_pow2(wa + wb);
    std::vector<cplx> base_a(wa), base_b(wb);
    std::vector<double> cube_a(wa), cube_b(wb);
    for (std::size_t j = 0; j < wa; ++j) {
        const long m = ra.lo + static_cast<long>(j);
        base_a[j] = A[g.storage_index(m)];
        const double xi = dxi * static_cast<double>(m);
        cube_a[j] = xi * xi * xi;
    }
    for (std::size_t j = 0; j < wb; ++j) {
        const long m = rb.lo + static_cast<long>(j);
        base_b[j] = B[g.storage_index(m)];
        const double xi = dxi * static_cast<double>(m);
        cube_b[j] = xi * xi * xi;
    }

    // |U V|^2 oscillates in t at most at the combined spread of xi^3.
    const double omega = cubic_spread(g, ra) + cubic_spread(g, rb);
    const double needed = 1.5 * omega * window_length + 200.0;
    if (needed > static_cast<double>(kMaxTimePoints))
        throw ResolutionError("bilinear_space_time_l2: needs " + describe(needed) + " time samples; cap " +
                              std::to_string(kMaxTimePoints));
    const std::vector<TimeNode> nodes = cutoff_time_nodes(window_length, omega);

    std::vector<cplx> fa(Ms), fb(Ms);
    double acc = 0.0;
    for (const TimeNode& node : nodes) {
        const double t = node.t;
        const double eta = temporal_cutoff(t, window_length);
        std::fill(fa.begin(), fa.end(), cplx{0.0, 0.0});
        std::fill(fb.begin(), fb.end(), cplx{0.0, 0.0});
        for (std::size_t j = 0; j < wa; ++j) fa[j] = base_a[j] * std::polar(1.0, cube_a[j] * t);
        for (std::size_t j = 0; j < wb; ++j) fb[j] = base_b[j] * std::polar(1.0, cube_b[j] * t);
        fft::backward(fa, fa);
        fft::backward(fb, fb);
        double e = 0.0;
        for (std::size_t l = 0; l < Ms; ++l) e += std::norm(fa[l] * fb[l]);
        const double e2 = eta * eta;
        acc += node.weight * e2 * e2 * e;
    }
    // u(x) = L^{-1} sum_k u^_k e^{i xi_k x}, so int |uv|^2 dx = sum_l |p_l|^2 / (Ms L^3).
    return std::sqrt(acc / (static_cast<double>(Ms) * L * L * L));
}

double bilinear_ratio_cube(const Field& u, const Field& v, long m, long n, double eps, double window_length) {
    if (std::abs(m + n) < 2 || std::abs(m - n) < 2)
        throw std::invalid_argument("bilinear_ratio_cube: requires |m+n| >= 2 and |m-n| >= 2");
    if (!(eps > 0.0)) throw std::invalid_argument("bilinear_ratio_cube: eps must be positive");
    require_same_grid(u.grid(), v.grid(), "bilinear_ratio_cube");
    const SpectralField A = unit_cube_project(forward_transform(u), m);
    const SpectralField B = unit_cube_project(forward_transform(v), n);
    if (!(window_length > 0.0)) window_length = line_window(A, B);
    const double lhs = bilinear_space_time_l2(A, B, window_length);
    if (lhs == 0.0) return 0.0;
    const double b = 0.5 + eps;
    const double weight = 1.0 / std::sqrt(static_cast<double>(std::abs(m + n)) * static_cast<double>(std::abs(m - n)));
    const double rhs = weight * free_evolution_xsb_norm(inverse_transform(A), 0.0, b, window_length) *
                       free_evolution_xsb_norm(inverse_transform(B), 0.0, b, window_length);
    return lhs / rhs;
}

double bilinear_ratio_lp(const Field& u, const Field& v, long N1, long N2, double eps, double window_length) {
    if (N2 < 1 || N1 < 4 * N2) throw std::invalid_argument("bilinear_ratio_lp: requires N1 >= 4 N2 >= 4");
    if (!(eps > 0.0)) throw std::invalid_argument("bilinear_ratio_lp: eps must be positive");
    require_same_grid(u.grid(), v.grid(), "bilinear_ratio_lp");
    const SpectralField A = littlewood_paley(forward_transform(u), N1);
    const SpectralField B = littlewood_paley(forward_transform(v), N2);
    if (!(window_length > 0.0)) window_length = line_window(A, B);
    const double lhs = bilinear_space_time_l2(A, B, window_length);
    if (lhs == 0.0) return 0.0;
    const double b = 0.5 + eps;
    const double rhs = free_evolution_xsb_norm(inverse_transform(A), 0.0, b, window_length) *
                       free_evolution_xsb_norm(inverse_transform(B), 0.0, b, window_length) / static_cast<double>(N1);
    return lhs / rhs;
}

TrilinearRatio trilinear_ratio(const Field& u1, const Field& u2, const Field& u3, double s, double p, double eps,
                               double T) {
    require_same_grid(u1.grid(), u2.grid(), "trilinear_ratio");
    require_same_grid(u1.grid(), u3.grid(), "trilinear_ratio");
    if (!(eps > 0.0) || !(T > 0.0) || !(p >= 1.0))
        throw std::invalid_argument("trilinear_ratio: requires eps > 0, T > 0, p >= 1");
    for (const Field* f : {&u1, &u2, &u3})
        if (!band_limited_to_third(*f))
            throw std::invalid_argument("trilinear_ratio: inputs must be band-limited to |xi| <= nyquist/3");
    TrilinearRatio out;
    out.in_range = s >= 0.25 && p >= 2.0 && std::isfinite(p);

    const GridSpec& g = u1.grid();
    const SpectralField F1 = forward_transform(u1);
    const SpectralField F2 = forward_transform(u2);
    const SpectralField F3 = spatial_derivative(forward_transform(u3), 1);
    if (l2_mass(F1) == 0.0 || l2_mass(F2) == 0.0 || l2_mass(F3) == 0.0) return out;

    // The product oscillates in the co-moving frame at most at the resonance
    // 3 |(a+b)(b+c)(a+c)| <= 24 B^3 for bands |xi| <= B.
    double band = 0.0;
    for (const SpectralField* F : {&F1, &F2, &F3}) {
        const Occupied r = occupied_range(*F);
        band = std::max({band, std::abs(g.dxi() * static_cast<double>(r.lo)),
                         std::abs(g.dxi() * static_cast<double>(r.hi))});
    }
    const double resonance = 24.0 * band * band * band;
    const std::size_t K0 = next_pow2(static_cast<std::size_t>(std::ceil(4.0 * resonance * T / (2.0 * kPi))) + 128);

    const double b_num = -0.5 + 2.0 * eps;
    const double num = with_time_refinement(K0, [&](std::size_t K) {
        if (K * g.points() > kMaxSpaceTimeTable)
            throw ResolutionError("trilinear_ratio: space-time table of " + std::to_string(K) + " x " +
                                  std::to_string(g.points()) + " exceeds the memory cap");
        std::vector<Field> samples;
        samples.reserve(K);
        const double dt = T / static_cast<double>(K);
        for (std::size_t j = 0; j < K; ++j) {
            const double t = dt * static_cast<double>(j);
            const double eta = temporal_cutoff(t, T);
            const Field a = inverse_transform(airy_propagator(F1, t));
            const Field b = inverse_transform(airy_propagator(F2, t));
            const Field c = inverse_transform(airy_propagator(F3, t));
            std::vector<cplx> prod(g.points());
            // Two cutoffs here, the third is applied by the space-time transform.
            for (std::size_t l = 0; l < prod.size(); ++l) prod[l] = eta * eta * a[l] * std::conj(b[l]) * c[l];
            samples.emplace_back(g, std::move(prod));
        }
        out.time_points = K;
        return xsb_p_norm(SpaceTimeField(g, T, std::move(samples)), s, b_num, p);
    });
    const double b_den = 0.5 + eps;
    const double den = free_evolution_xsb_p_norm(u1, s, b_den, p, T) * free_evolution_xsb_p_norm(u2, s, b_den, p, T) *
                       free_evolution_xsb_p_norm(u3, s, b_den, p, T);
    out.ratio = num / den;
    return out;
}

double convolution_lhs(std::span<const double> a, std::span<const double> b, double eps) {
    std::vector<std::size_t> ia, ib;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0.0 || !std::isfinite(a[i])) throw std::invalid_argument("convolution_lhs: a must be nonnegative");
        if (a[i] != 0.0) ia.push_back(i);
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] < 0.0 || !std::isfinite(b[i])) throw std::invalid_argument("convolution_lhs: b must be nonnegative");
        if (b[i] != 0.0) ib.push_back(i);
    }
    double acc = 0.0;
    for (std::size_t n : ib) {
        const double wn = b[n] / std::pow(japanese_bracket(static_cast<double>(n)), eps);
        double row = 0.0;
        for (std::size_t m : ia) {
            if (m == n) continue;
            row += a[m] / std::abs(static_cast<double>(m) - static_cast<double>(n));
        }
        acc += wn * row;
    }
    return acc;
}

double convolution_ratio(std::span<const double> a, std::span<const double> b, double eps, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("convolution_ratio: p must be >= 1");
    const double q = std::isinf(p) ? 1.0 : (p == 1.0 ? kInfinity : p / (p - 1.0));
    const std::vector<double> ones_a(a.size(), 1.0), ones_b(b.size(), 1.0);
    const double na = weighted_lp(a, ones_a, p);
    const double nb = weighted_lp(b, ones_b, q);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return convolution_lhs(a, b, eps) / (na * nb);
}

ConvolutionCheck convolution_inequality_check(std::span<const double> a, std::span<const double> b, double eps,
                                              double p, double constant) {
    ConvolutionCheck out;
    out.lhs = convolution_lhs(a, b, eps);
    const double q = std::isinf(p) ? 1.0 : (p == 1.0 ? kInfinity : p / (p - 1.0));
    const std::vector<double> ones_a(a.size(), 1.0), ones_b(b.size(), 1.0);
    out.bound = constant * weighted_lp(a, ones_a, p) * weighted_lp(b, ones_b, q);
    out.violated = out.lhs > out.bound;
    return out;
}

std::vector<double> random_sparse_sequence(Rng& rng, std::size_t length, std::size_t nonzeros) {
    std::vector<double> out(length, 0.0);
    for (std::size_t i = 0; i < nonzeros && length > 0; ++i)
        out[static_cast<std::size_t>(rng.integer(0, static_cast<long>(length) - 1))] = rng.uniform();
    return out;
}

double calibrate_convolution_constant(double eps, double p, std::uint64_t seed) {
    double best = 0.0;
    for (std::size_t K = 1; K <= 1024; K *= 2) {
        std::vector<double> ind(K + 1, 1.0);
        ind[0] = 0.0;
        best = std::max(best, convolution_ratio(ind, ind, eps, p));
    }
    for (std::size_t n = 0; n < 64; ++n) {
        std::vector<double> a(n + 2, 0.0), b(n + 2, 0.0);
        a[n + 1] = 1.0;
        b[n] = 1.0;
        best = std::max({best, convolution_ratio(a, b, eps, p), convolution_ratio(b, a, eps, p)});
    }
    Rng rng(seed);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> a(256), b(256);
        for (auto& x : a) x = rng.uniform();
        for (auto& x : b) x = rng.uniform();
        best = std::max(best, convolution_ratio(a, b, eps, p));
        const auto sa = random_sparse_sequence(rng, 1024, static_cast<std::size_t>(rng.integer(1, 32)));
        const auto sb = random_sparse_sequence(rng, 1024, static_cast<std::size_t>(rng.integer(1, 32)));
        best = std::max(best, convolution_ratio(sa, sb, eps, p));
    }
    return 1.25 * best;
}

AprioriSeries apriori_tracking(const Field& u0, double s, double p, double T, const SolverConfig& cfg,
                               std::size_t record_every) {
    const Trajectory traj = evolve(u0, T, cfg, record_every);
    AprioriSeries out;
    out.times = traj.times;
    for (const auto& snap : traj.snapshots) out.norms.push_back(modulation_norm(snap, s, p));
    out.max_mass_drift = traj.max_relative_mass_drift();
    const double initial = out.norms.front();
    const double sup = *std::max_element(out.norms.begin(), out.norms.end());
    out.sup_ratio = initial == 0.0 ? 0.0 : sup / initial;
    return out;
}

namespace {

ProbeReport reduce(std::string id, const std::vector<double>& ratios, const std::vector<std::string>& labels,
                   const ProbeCorpus& corpus) {
    ProbeReport r;
    r.estimate = std::move(id);
    r.corpus_size = ratios.size();
    r.corpus_hash = hex64(corpus.hash());
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!std::isfinite(ratios[i])) throw std::runtime_error(r.estimate + ": non-finite ratio at " + labels[i]);
        if (i == 0 || ratios[i] > r.max_ratio) {
            r.max_ratio = ratios[i];
            r.argmax = labels[i];
        }
    }
    const Calibration& cal = frozen_calibration();
    r.flags.push_back(corpus.hash() == cal.corpus_hash ? "frozen-corpus" : "unfrozen-corpus");
    return r;
}

} // namespace

std::vector<double> cube_ratios(const ProbeCorpus& corpus, double eps, unsigned jobs) {
    std::vector<double> out(corpus.cube.size());
    parallel_for(out.size(), jobs, [&](std::size_t i) {
        const auto& c = corpus.cube[i];
        out[i] = bilinear_ratio_cube(c.u, c.v, c.m, c.n, eps);
    });
    return out;
}

std::vector<double> dyadic_ratios(const ProbeCorpus& corpus, double eps, unsigned jobs) {
    std::vector<double> out(corpus.dyadic.size());
    parallel_for(out.size(), jobs, [&](std::size_t i) {
        const auto& c = corpus.dyadic[i];
        out[i] = bilinear_ratio_lp(c.u, c.v, c.N1, c.N2, eps);
    });
    return out;
}

std::vector<double> trilinear_ratios(const ProbeCorpus& corpus, double s, double p, double eps, double T,
                                     unsigned jobs) {
    std::vector<double> out(corpus.trilinear.size());
    parallel_for(out.size(), jobs, [&](std::size_t i) {
        const auto& c = corpus.trilinear[i];
        out[i] = trilinear_ratio(c.u1, c.u2, c.u3, s, p, eps, T).ratio;
    });
    return out;
}

ProbeReport probe_bilinear_cube(const ProbeCorpus& corpus, double eps, unsigned jobs) {
    const auto ratios = cube_ratios(corpus, eps, jobs);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < corpus.cube.size(); ++i)
        labels.push_back("element " + std::to_string(i) + " m=" + std::to_string(corpus.cube[i].m) +
                         " n=" + std::to_string(corpus.cube[i].n));
    ProbeReport r = reduce("bilinear_cube", ratios, labels, corpus);
    r.representative_based = true;
    if (eps == frozen_calibration().epsilon) r.calibration = frozen_calibration().bilinear_cube;
    return r;
}

ProbeReport probe_bilinear_dyadic(const ProbeCorpus& corpus, double eps, unsigned jobs) {
    const auto ratios = dyadic_ratios(corpus, eps, jobs);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < corpus.dyadic.size(); ++i)
        labels.push_back("element " + std::to_string(i) + " N1=" + std::to_string(corpus.dyadic[i].N1) +
                         " N2=" + std::to_string(corpus.dyadic[i].N2));
    ProbeReport r = reduce("bilinear_dyadic", ratios, labels, corpus);
    r.representative_based = true;
    if (eps == frozen_calibration().epsilon) r.calibration = frozen_calibration().bilinear_dyadic;
    return r;
}

ProbeReport probe_trilinear(const ProbeCorpus& corpus, double s, double p, double eps, double T, unsigned jobs) {
    const auto ratios = trilinear_ratios(corpus, s, p, eps, T, jobs);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < corpus.trilinear.size(); ++i)
        labels.push_back("element " + std::to_string(i) + (corpus.trilinear[i].same_sign ? " same-sign" : ""));
    ProbeReport r = reduce("trilinear", ratios, labels, corpus);
    r.representative_based = true;
    if (!(s >= 0.25 && p >= 2.0 && std::isfinite(p))) r.flags.push_back("outside-proposition-range");
    const Calibration& cal = frozen_calibration();
    if (eps == cal.epsilon && s == cal.trilinear_s && p == cal.trilinear_p && T == cal.trilinear_T)
        r.calibration = cal.trilinear;
    return r;
}

std::string to_json(const std::vector<ProbeReport>& reports, const std::string& config_hash) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["config_hash"] = config_hash;
    ordered_json list = ordered_json::array();
    for (const auto& r : reports) {
        ordered_json e;
        e["estimate"] = r.estimate;
        e["corpus_size"] = r.corpus_size;
        e["max_ratio"] = r.max_ratio;
        e["argmax"] = r.argmax;
        e["representative_based"] = r.representative_based;
        e["flags"] = r.flags;
        e["calibration"] = r.calibration ? ordered_json(*r.calibration) : ordered_json(nullptr);
        e["within_calibration"] = r.calibration ? ordered_json(r.max_ratio <= *r.calibration) : ordered_json(nullptr);
        e["corpus_hash"] = r.corpus_hash;
        list.push_back(std::move(e));
    }
    j["reports"] = std::move(list);
    return j.dump(2) + "\n";
}

} // namespace mkdv
