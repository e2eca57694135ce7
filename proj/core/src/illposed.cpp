#include "mkdv/illposed.hpp"

#include "mkdv/error.hpp"
#include "mkdv/norms.hpp"
#include "mkdv/soliton.hpp"
#include "mkdv/solver.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mkdv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMaxGridPoints = std::size_t{1} << 21;
// Profile half-width, in units of 1/lambda, beyond which sech < 1e-15.
constexpr double kProfileHalfWidth = 36.0;
// Cube support plus edge margin above the highest carrier band.
constexpr double kBandMargin = 22.5;

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

double relative_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double field_value(const ExperimentRecord& r, RecordField f) {
    switch (f) {
    case RecordField::NormU: return r.norm_u;
    case RecordField::NormV: return r.norm_v;
    case RecordField::Diff0: return r.diff0;
    case RecordField::DiffT: return r.diffT;
    case RecordField::Tail: return r.tail;
    }
    return 0.0;
}

} // namespace

const char* regime_name(Regime r) noexcept {
    return r == Regime::NonnegativeS ? "nonneg-s" : "neg-s";
}

Regime ExperimentPlan::regime() const { return s >= 0.0 ? Regime::NonnegativeS : Regime::NegativeS; }

double ExperimentPlan::effective_theta() const {
    if (theta) return *theta;
    return regime() == Regime::NonnegativeS ? (1.0 - 4.0 * s) / 4.0 : -p * s + 0.05;
}

void ExperimentPlan::validate() const {
    if (!std::isfinite(s)) throw std::invalid_argument("plan: s must be finite");
    if (!(p >= 2.0)) throw std::invalid_argument("plan: p must satisfy p >= 2");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("plan: T must be positive");
    if (!is_power_of_two(N_min) || !is_power_of_two(N_max) || N_max < N_min)
        throw std::invalid_argument("plan: N_min and N_max must be powers of two with N_min <= N_max");
    if (!(solver_dt > 0.0)) throw std::invalid_argument("plan: solver_dt must be positive");
    const double th = effective_theta();
    if (regime() == Regime::NonnegativeS) {
        if (!(s < 0.25)) throw std::invalid_argument("plan: s outside 0 <= s < 1/4");
        if (!(4.0 * s - 1.0 + 2.0 * th < 0.0))
            throw std::invalid_argument("plan: theta must satisfy 4s - 1 + 2 theta < 0");
        if (!(th > 0.0)) throw std::invalid_argument("plan: theta must be positive");
    } else {
        if (!std::isfinite(p)) throw std::invalid_argument("plan: p must be finite when s < 0");
        if (!(s > -1.0 / p)) throw std::invalid_argument("plan: s outside -1/p < s < 0");
        if (!(-p * s < th && th < 1.0))
            throw std::invalid_argument("plan: theta must satisfy -ps < theta < 1");
    }
    if (!(thresholds.norm_band >= 1.0) || !(thresholds.diff_t_fraction > 0.0) ||
        !(thresholds.slope_tolerance > 0.0))
        throw std::invalid_argument("plan: thresholds out of range (norm_band >= 1, diffT_fraction > 0, slope_tolerance > 0)");
}

std::vector<long> ExperimentPlan::carriers() const {
    std::vector<long> out;
    for (long n = N_min; n <= N_max; n *= 2) out.push_back(n);
    return out;
}

ExperimentPlan ExperimentPlan::from_config(const Config& cfg) {
    ExperimentPlan plan;
    plan.s = cfg.get_double("s", plan.s);
    plan.p = cfg.get_double("p", plan.p);
    plan.T = cfg.get_double("T", plan.T);
    plan.N_min = cfg.get_int("N_min", plan.N_min);
    plan.N_max = cfg.get_int("N_max", plan.N_max);
    if (cfg.has("theta")) plan.theta = cfg.get_double("theta");
    plan.use_solver = cfg.get_bool("use_solver", false);
    plan.force_equal_carriers = cfg.get_bool("force_equal", false);
    plan.solver_dt = cfg.get_double("solver_dt", plan.solver_dt);
    const std::string window = cfg.get_string("window", "cos2");
    if (window == "cos2") plan.window = Window::CosSquared;
    else if (window == "quartic") plan.window = Window::QuarticSpline;
    else throw ConfigError("window", "expected cos2 or quartic, got '" + window + "'");
    plan.thresholds.norm_band = cfg.get_double("norm_band", plan.thresholds.norm_band);
    plan.thresholds.diff_t_fraction = cfg.get_double("diffT_fraction", plan.thresholds.diff_t_fraction);
    plan.thresholds.slope_tolerance = cfg.get_double("slope_tolerance", plan.thresholds.slope_tolerance);

    try {
        plan.validate();
    } catch (const std::invalid_argument& e) {
        // Messages read "plan: <key> ...".
        const std::string msg = e.what();
        const std::size_t from = msg.find(": ") + 2;
        throw ConfigError(msg.substr(from, msg.find(' ', from) - from), msg);
    }
    return plan;
}

SoliPair choose_parameters(const ExperimentPlan& plan, double N) {
    plan.validate();
    if (!(N >= 1.0)) throw std::invalid_argument("choose_parameters: N must be >= 1");
    const double th = plan.effective_theta();
    SoliPair out{};
    out.theta = th;
    out.carrier1 = N;
    double separation = 0.0;
    if (plan.regime() == Regime::NonnegativeS) {
        out.scale = std::pow(N, -2.0 * plan.s);
        separation = std::pow(N, 2.0 * plan.s - 1.0 + 2.0 * th) / plan.T;
    } else {
        out.scale = std::pow(N, -plan.p * plan.s);
        separation = std::pow(N, plan.p * plan.s - 1.0 + 1.5 * th) / plan.T;
    }
    out.carrier2 = plan.force_equal_carriers ? N : N + separation;
    if (!plan.force_equal_carriers && !(out.carrier2 > out.carrier1))
        throw std::invalid_argument("choose_parameters: separation underflows at N = " + format_double(N));
    return out;
}

double predicted_diff0_exponent(const ExperimentPlan& plan) {
    const double th = plan.effective_theta();
    if (plan.regime() == Regime::NonnegativeS) return 4.0 * plan.s - 1.0 + 2.0 * th;
    return plan.s + 1.5 * (th + plan.p * plan.s) - 1.0;
}

double ExperimentRecord::oracle_discrepancy() const {
    return std::max({relative_gap(norm_u, norm_u_quad), relative_gap(norm_v, norm_v_quad),
                     relative_gap(diff0, diff0_quad), relative_gap(diffT, diffT_quad)});
}

namespace {

std::size_t required_points(const ExperimentPlan& plan, const SoliPair& pair, double& length) {
    const SolitonParams a{pair.carrier1, pair.scale};
    const SolitonParams b{pair.carrier2, pair.scale};
    const double separation = std::abs(a.velocity() - b.velocity()) * plan.T;
    const double needed = std::max(16.0 * std::numbers::pi, separation + 2.0 * kProfileHalfWidth / pair.scale + 8.0);
    std::size_t periods = 8;
    while (kTwoPi * static_cast<double>(periods) < needed) periods *= 2;
    length = kTwoPi * static_cast<double>(periods);
    const double band = pair.carrier2 + kBandMargin * pair.scale + 4.0;
    const double dxi = kTwoPi / length;
    return next_pow2(static_cast<std::size_t>(std::ceil(2.0 * band / dxi)));
}

} // namespace

GridSpec size_grid(const ExperimentPlan& plan, const SoliPair& pair) {
    double length = 0.0;
    const std::size_t points = required_points(plan, pair, length);
    if (points > kMaxGridPoints) {
        long cap = 0;
        for (long n = 1; n <= (1L << 20); n *= 2) {
            double l = 0.0;
            if (required_points(plan, choose_parameters(plan, static_cast<double>(n)), l) > kMaxGridPoints) break;
            cap = n;
        }
        throw ResolutionError("grid sizing infeasible at N = " + format_double(pair.carrier1) + ": needs " +
                              std::to_string(points) + " points (cap " + std::to_string(kMaxGridPoints) +
                              "); largest feasible dyadic N is " + std::to_string(cap));
    }
    return GridSpec(length, points);
}

namespace {

// Relative L2 error of the solver against the analytic soliton on a periodic grid.
double solver_cross_check(const ExperimentPlan& plan, const SolitonParams& params) {
    std::size_t periods = 8;
    while (kTwoPi * static_cast<double>(periods) < 2.0 * kProfileHalfWidth / params.scale) periods *= 2;
    const double length = kTwoPi * static_cast<double>(periods);
    // Keep the spectrum inside the dealiased 2/3 band.
    const double band = 1.5 * (params.carrier + kBandMargin * params.scale) + 4.0;
    const GridSpec grid(length, next_pow2(static_cast<std::size_t>(std::ceil(2.0 * band * length / kTwoPi))));
    const Field u0 = soliton_field(params, 0.0, grid);
    const double peak = params.scale * params.scale;
    SolverConfig cfg;
    cfg.dt = std::min(plan.solver_dt, 0.25 / (6.0 * peak * grid.nyquist()));
    cfg.max_mass_drift = 1e-8;
    const Trajectory traj = evolve(u0, plan.T, cfg, 1u << 30);
    const Field exact = soliton_field(params, plan.T, grid);
    return std::sqrt(l2_mass(traj.final_state() - exact) / l2_mass(exact));
}

} // namespace

ExperimentRecord run_point(const ExperimentPlan& plan, long N, bool with_solver) {
    const SoliPair pair = choose_parameters(plan, static_cast<double>(N));
    const GridSpec grid = size_grid(plan, pair);
    const SolitonParams a{pair.carrier1, pair.scale};
    const SolitonParams b{pair.carrier2, pair.scale};
    const double s = plan.s;
    const double p = plan.p;
    const Window w = plan.window;

    ExperimentRecord r;
    r.N = static_cast<double>(N);
    r.carrier1 = pair.carrier1;
    r.carrier2 = pair.carrier2;
    r.scale = pair.scale;
    r.theta = pair.theta;
    r.grid_length = grid.length();
    r.grid_points = grid.points();

    // At time T the pair sits near x = -(c_a + c_b) T / 2; sample it recentred.
    const double shift_T = -0.5 * (a.velocity() + b.velocity()) * plan.T;
    {
        const SpectralField ua0 = forward_transform(soliton_field(a, 0.0, grid, 0.0, SolitonFrame::Line));
        const SpectralField ub0 = forward_transform(soliton_field(b, 0.0, grid, 0.0, SolitonFrame::Line));
        r.norm_u = modulation_norm(ua0, s, p, w);
        r.norm_v = modulation_norm(ub0, s, p, w);
        SpectralField d0 = ua0;
        auto dc = d0.coefficients();
        for (std::size_t k = 0; k < dc.size(); ++k) dc[k] -= ub0[k];
        r.diff0 = modulation_norm(d0, s, p, w);
    }
    {
        const SpectralField uaT = forward_transform(soliton_field(a, plan.T, grid, shift_T, SolitonFrame::Line));
        const SpectralField ubT = forward_transform(soliton_field(b, plan.T, grid, shift_T, SolitonFrame::Line));
        r.norm_u_T = modulation_norm(uaT, s, p, w);
        SpectralField dT = uaT;
        auto dc = dT.coefficients();
        for (std::size_t k = 0; k < dc.size(); ++k) dc[k] -= ubT[k];
        r.diffT = modulation_norm(dT, s, p, w);
    }

    QuadratureOptions q;
    q.window = w;
    r.norm_u_quad = soliton_modulation_norm(a, s, p, w);
    r.norm_v_quad = soliton_modulation_norm(b, s, p, w);
    if (pair.carrier1 == pair.carrier2) {
        r.diff0_quad = 0.0;
        r.diffT_quad = 0.0;
    } else {
        r.diff0_quad = quadrature_modulation_norm(SpectrumModel().add(1.0, a).add(-1.0, b), s, p, q);
        r.diffT_quad = quadrature_modulation_norm(
            SpectrumModel().add(1.0, a, plan.T, shift_T).add(-1.0, b, plan.T, shift_T), s, p, q);
    }
    QuadratureOptions tail = q;
    const double reach = std::pow(static_cast<double>(N), pair.theta);
    tail.exclude = std::make_pair(pair.carrier1 - reach, pair.carrier1 + reach);
    r.tail = quadrature_modulation_norm(SpectrumModel().add(1.0, a), s, p, tail);

    if (with_solver) r.solver_error = solver_cross_check(plan, a);
    return r;
}

std::vector<ExperimentRecord> run_sweep(const ExperimentPlan& plan, unsigned jobs) {
    plan.validate();
    const std::vector<long> carriers = plan.carriers();
    std::vector<ExperimentRecord> out(carriers.size());
    std::vector<std::exception_ptr> errors(carriers.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < carriers.size(); i = next++) {
            try {
                out[i] = run_point(plan, carriers[i], plan.use_solver && i == 0);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::clamp<unsigned>(jobs, 1u, static_cast<unsigned>(carriers.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

ExponentFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: size mismatch");
    if (x.size() < 4) throw std::invalid_argument("fit_loglog: need at least 4 points");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i]))
            throw std::invalid_argument("fit_loglog: values must be positive and finite");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const auto [lo, hi] = std::minmax_element(lx.begin(), lx.end());
    if (*hi - *lo < 3.0 * std::log(2.0) - 1e-12)
        throw std::invalid_argument("fit_loglog: abscissae must span at least 3 octaves");
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    ExponentFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

ExponentFit fit_exponent(std::span<const ExperimentRecord> records, RecordField field, bool squared) {
    std::vector<double> x, y;
    for (const auto& r : records) {
        x.push_back(r.N);
        const double v = field_value(r, field);
        y.push_back(squared ? v * v : v);
    }
    return fit_loglog(x, y);
}

Verdict verify_lemma(std::span<const ExperimentRecord> records, const ExperimentPlan& plan) {
    Verdict v;
    v.predicted_exponent = predicted_diff0_exponent(plan);
    v.exponent_match = "neither";
    if (records.empty()) {
        v.notes.push_back("empty sweep");
        return v;
    }
    const auto& th = plan.thresholds;

    double lo = records.front().norm_u, hi = lo;
    std::vector<double> norms;
    for (const auto& r : records) {
        for (double n : {r.norm_u, r.norm_v}) {
            lo = std::min(lo, n);
            hi = std::max(hi, n);
        }
        norms.push_back(r.norm_u);
    }
    v.norm_ratio = lo > 0.0 ? hi / lo : kInfinity;
    v.bounded = v.norm_ratio <= th.norm_band;

    bool decreasing = true;
    for (std::size_t i = 1; i < records.size(); ++i)
        if (!(records[i].diff0 < records[i - 1].diff0)) decreasing = false;
    try {
        v.diff0_fit = fit_exponent(records, RecordField::Diff0);
        const ExponentFit sq = fit_exponent(records, RecordField::Diff0, true);
        const double tol = th.slope_tolerance * std::abs(v.predicted_exponent);
        if (std::abs(v.diff0_fit->slope - v.predicted_exponent) <= tol) v.exponent_match = "norm";
        else if (std::abs(sq.slope - v.predicted_exponent) <= tol) v.exponent_match = "square";
    } catch (const std::invalid_argument& e) {
        v.notes.push_back(std::string("diff0 fit unavailable: ") + e.what());
    }
    v.vanishing = decreasing && v.diff0_fit && v.diff0_fit->slope < 0.0;

    v.median_norm = median(norms);
    v.diff_t_min_top = kInfinity;
    for (std::size_t i = records.size() / 2; i < records.size(); ++i)
        v.diff_t_min_top = std::min(v.diff_t_min_top, records[i].diffT);
    v.separated = v.diff_t_min_top >= th.diff_t_fraction * v.median_norm;

    for (const auto& r : records) {
        if (r.diffT > r.norm_u + r.norm_v * (1.0 + 1e-12))
            v.notes.push_back("triangle inequality violated at N = " + format_double(r.N));
        if (relative_gap(r.norm_u, r.norm_u_T) > 1e-8)
            v.notes.push_back("norm not time-invariant at N = " + format_double(r.N));
        if (r.oracle_discrepancy() > 1e-4)
            v.notes.push_back("grid and quadrature disagree at N = " + format_double(r.N));
        if (r.solver_error && *r.solver_error > 1e-4)
            v.notes.push_back("solver cross-check error " + format_double(*r.solver_error));
    }
    v.pass = v.bounded && v.vanishing && v.separated;
    return v;
}

void write_records_csv(std::ostream& os, std::span<const ExperimentRecord> records,
                       const std::vector<std::string>& header_comments) {
    for (const auto& line : header_comments) os << "# " << line << '\n';
    os << "N,N1,N2,lambda,theta,norm_u,norm_v,diff0,diffT,tail,norm_u_T,norm_u_quad,norm_v_quad,"
          "diff0_quad,diffT_quad,oracle_discrepancy,L,M,solver_error\n";
    for (const auto& r : records) {
        const double cols[] = {r.N,           r.carrier1,    r.carrier2,    r.scale,      r.theta,
                               r.norm_u,      r.norm_v,      r.diff0,       r.diffT,      r.tail,
                               r.norm_u_T,    r.norm_u_quad, r.norm_v_quad, r.diff0_quad, r.diffT_quad,
                               r.oracle_discrepancy(), r.grid_length};
        for (double c : cols) os << format_double(c) << ',';
        os << r.grid_points << ',';
        if (r.solver_error) os << format_double(*r.solver_error);
        os << '\n';
    }
}

std::string verdict_json(const Verdict& verdict, const ExperimentPlan& plan, const std::string& config_hash) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["config_hash"] = config_hash;
    j["regime"] = regime_name(plan.regime());
    j["plan"] = {{"s", plan.s},         {"p", std::isfinite(plan.p) ? ordered_json(plan.p) : ordered_json("inf")},
                 {"T", plan.T},         {"N_min", plan.N_min},
                 {"N_max", plan.N_max}, {"theta", plan.effective_theta()},
                 {"use_solver", plan.use_solver}, {"force_equal", plan.force_equal_carriers}};
    j["thresholds"] = {{"norm_band", plan.thresholds.norm_band},
                       {"diffT_fraction", plan.thresholds.diff_t_fraction},
                       {"slope_tolerance", plan.thresholds.slope_tolerance}};
    j["verdict"] = verdict.pass ? "PASS" : "FAIL";
    j["a_bounded"] = {{"pass", verdict.bounded}, {"norm_ratio", verdict.norm_ratio}};
    ordered_json b = {{"pass", verdict.vanishing}, {"predicted_exponent", verdict.predicted_exponent},
                      {"exponent_match", verdict.exponent_match}};
    if (verdict.diff0_fit) {
        b["slope"] = verdict.diff0_fit->slope;
        b["slope_of_square"] = 2.0 * verdict.diff0_fit->slope;
        b["r2"] = verdict.diff0_fit->r2;
    }
    j["b_vanishing"] = b;
    j["c_separated"] = {{"pass", verdict.separated},
                        {"min_diffT_top_half", std::isfinite(verdict.diff_t_min_top)
                                                   ? ordered_json(verdict.diff_t_min_top)
                                                   : ordered_json(nullptr)},
                        {"median_norm", verdict.median_norm}};
    j["notes"] = verdict.notes;
    return j.dump(2) + "\n";
}

} // namespace mkdv
