// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "commands.hpp"
#include "mkdv/corpus.hpp"
#include "mkdv/illposed.hpp"
#include "mkdv/norms.hpp"
#include "mkdv/probes.hpp"
#include "mkdv/soliton.hpp"
#include "mkdv/solver.hpp"
#include "mkdv/spectral.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace mkdv;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

double relative_l2(const Field& a, const Field& b) { return std::sqrt(l2_mass(a - b) / l2_mass(b)); }

/// Tau-a over all pairs; ties count as neither concordant nor discordant.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    double score = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double d = (x[j] - x[i]) * (y[j] - y[i]);
            score += d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
            ++pairs;
        }
    return pairs ? score / static_cast<double>(pairs) : 0.0;
}

SolverConfig measuring(double dt) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.max_mass_drift = 1.0;  // measure the drift rather than abort on it
    return cfg;
}

// Shared with criterion 2.
double g_soliton_drift = -1.0;

Outcome soliton_exactness() {
    const GridSpec g(128.0, 4096);
    const SolitonParams sp{2.0, 1.0};
    Stopwatch sw;
    const Trajectory traj = evolve(soliton_field(sp, 0.0, g), 1.0, measuring(1e-4), 1000);
    const double elapsed = sw.seconds();
    const double err = relative_l2(traj.final_state(), soliton_field(sp, 1.0, g));
    g_soliton_drift = traj.max_relative_mass_drift();
    return {err <= 1e-6 && elapsed <= 60.0, "relative L2 error " + num(err) + ", " + num(elapsed) + " s"};
}

Outcome conservation() {
    if (g_soliton_drift < 0.0) {
        const GridSpec g(128.0, 4096);
        g_soliton_drift = evolve(soliton_field(SolitonParams{2.0, 1.0}, 0.0, g), 1.0, measuring(1e-4), 1000)
                              .max_relative_mass_drift();
    }
    double random_drift = 0.0;
    const GridSpec g(2.0 * kPi * 8.0, 256);
    for (std::uint64_t seed : {101u, 102u, 103u})
        for (int sign : {+1, -1}) {
            Rng rng(seed);
            const Field u0 = random_field_with_norm(g, rng, PacketSpec{3, -4.0, 4.0, 1.5, 2.5}, 0.125, 4.0, 0.5);
            // Same step as the a-priori runs.
            SolverConfig cfg = measuring(2.5e-4);
            cfg.sign = sign;
            random_drift = std::max(random_drift, evolve(u0, 1.0, cfg, 400).max_relative_mass_drift());
        }

    const GridSpec coarse(64.0, 512);
    const Field u0 = soliton_field(SolitonParams{2.0, 1.0}, 0.0, coarse);
    const double T = 0.2;
    auto run = [&](double dt) { return evolve(u0, T, measuring(dt), 1u << 20).final_state(); };
    const Field ref = run(T / 3200.0);
    const double ratio = relative_l2(run(T / 100.0), ref) / relative_l2(run(T / 200.0), ref);

    const bool ok = g_soliton_drift <= 1e-9 && random_drift <= 1e-9 && ratio >= 12.0 && ratio <= 20.0;
    return {ok, "mass drift soliton " + num(g_soliton_drift) + ", random " + num(random_drift) +
                    "; Richardson ratio " + num(ratio)};
}

Outcome norm_engine() {
    double pou = 0.0;
    for (const GridSpec& g : {GridSpec(2.0 * kPi * 16.0, 1024), cube_grid(), dyadic_grid(), trilinear_grid()})
        for (Window w : {Window::CosSquared, Window::QuarticSpline})
            for (std::size_t k = 0; k < g.points(); ++k) {
                const double xi = g.wavenumber(k);
                double sum = 0.0;
                for (long n = static_cast<long>(std::floor(xi)) - 2; n <= static_cast<long>(std::floor(xi)) + 3; ++n)
                    sum += window_value(w, xi - static_cast<double>(n));
                pou = std::max(pou, std::abs(sum - 1.0));
            }

    const GridSpec g(2.0 * kPi * 16.0, 1024);
    Rng rng(0x5eed);
    double lo = 1e300, hi = 0.0, embed = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double centre = rng.uniform(-12.0, 12.0);
        const Field f = random_wavepackets(
            g, rng, PacketSpec{static_cast<int>(rng.integer(1, 4)), centre - 3.0, centre + 3.0, 0.8, 3.0});
        const double r = modulation_norm(f, 0.0, 2.0) / sobolev_norm(f, 0.0);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        for (double s : {0.0, 0.25})
            for (double p : {1.0, 2.0, 4.0, 8.0, kInfinity})
                embed = std::max(embed, modulation_norm(f, s, p) / fourier_lebesgue_norm(f, s, p));
    }

    const GridSpec fine(2.0 * kPi * 64.0, 8192);
    double quad_err = 0.0;
    for (const SolitonParams& sp : {SolitonParams{8.5, 0.5}, SolitonParams{4.0, 1.0}, SolitonParams{12.25, 0.75}})
        for (double s : {0.0, 0.5, -0.125})
            for (double p : {2.0, 4.0}) {
                const double grid = modulation_norm(soliton_field(sp, 0.0, fine), s, p);
                SpectrumModel model;
                model.add(1.0, sp);
                const double quad = quadrature_modulation_norm(model, s, p);
                quad_err = std::max(quad_err, std::abs(grid - quad) / quad);
            }

    const bool ok = pou <= 1e-14 && lo >= 0.25 && hi <= 4.0 && embed <= 4.0 && quad_err <= 1e-6;
    return {ok, "partition of unity " + num(pou) + "; M/H ratio in [" + num(lo) + ", " + num(hi) +
                    "]; embedding constant " + num(embed) + "; grid vs quadrature " + num(quad_err)};
}

std::string fit_text(const Verdict& v) {
    return v.diff0_fit ? num(v.diff0_fit->slope) : std::string("n/a");
}

Outcome illposed_nonneg() {
    ExperimentPlan plan;
    plan.s = 0.125;
    plan.p = 4.0;
    plan.T = 1.0;
    plan.theta = 0.125;
    plan.N_min = 16;
    plan.N_max = 1024;
    Stopwatch sw;
    const auto records = run_sweep(plan);
    const double elapsed = sw.seconds();
    const Verdict v = verify_lemma(records, plan);
    const bool slope_ok = v.diff0_fit && std::abs(v.diff0_fit->slope - v.predicted_exponent) <=
                                             0.15 * std::abs(v.predicted_exponent);
    const bool ok = v.bounded && slope_ok && v.separated && elapsed <= 300.0;
    return {ok, "(a) norm ratio " + num(v.norm_ratio) + (v.bounded ? " ok" : " FAIL") + "; (b) diff0 slope " +
                    fit_text(v) + " vs " + num(v.predicted_exponent) + (slope_ok ? " ok" : " FAIL") +
                    "; (c) min top diffT " + num(v.diff_t_min_top) + " vs median norm " + num(v.median_norm) +
                    (v.separated ? " ok" : " FAIL") + "; " + num(elapsed) + " s"};
}

Outcome illposed_neg() {
    ExperimentPlan plan;
    plan.s = -0.125;
    plan.p = 4.0;
    plan.T = 1.0;
    plan.theta = 0.55;
    const auto records = run_sweep(plan);
    const Verdict v = verify_lemma(records, plan);
    const double sq = fit_exponent(records, RecordField::Diff0, true).slope;
    const bool ok = v.vanishing && v.exponent_match != "neither" && v.separated;
    return {ok, "diff0 slope " + fit_text(v) + " (square " + num(sq) + ") vs " + num(v.predicted_exponent) +
                    ", match: " + v.exponent_match + "; decreasing " + (v.vanishing ? "yes" : "no") +
                    "; min top diffT " + num(v.diff_t_min_top) + " vs median norm " + num(v.median_norm)};
}

Outcome overlap_bound() {
    ExperimentPlan plan;
    plan.s = 0.125;
    plan.p = 4.0;
    plan.T = 1.0;
    plan.theta = 0.125;
    plan.N_min = 16;
    plan.N_max = 256;
    std::vector<double> Ns, ratios;
    for (long N : plan.carriers()) {
        const SoliPair pair = choose_parameters(plan, static_cast<double>(N));
        const GridSpec grid = size_grid(plan, pair);
        const SolitonParams a{pair.carrier1, pair.scale};
        const SolitonParams b{pair.carrier2, pair.scale};
        // Centre the midpoint of the two solitons at time T.
        const double shift = -0.5 * (a.velocity() + b.velocity()) * plan.T;
        const double lo = std::min(a.carrier, b.carrier) - 10.0 * pair.scale;
        const double hi = std::max(a.carrier, b.carrier) + 10.0 * pair.scale;
        double worst = 0.0;
        for (long n = static_cast<long>(std::floor(lo)) - 1; n <= static_cast<long>(std::ceil(hi)) + 1; ++n)
            worst = std::max(worst, pair_overlap(n, a, b, plan.T, grid, shift, plan.window));
        Ns.push_back(static_cast<double>(N));
        ratios.push_back(worst * static_cast<double>(N) * std::abs(a.carrier - b.carrier) * plan.T);
    }
    const double tau = kendall_tau(Ns, ratios);
    const double C = *std::max_element(ratios.begin(), ratios.end());
    std::string list;
    for (double r : ratios) list += (list.empty() ? "" : " ") + num(r);
    return {std::isfinite(C) && tau <= 0.3, "ratios [" + list + "], constant " + num(C) + ", Kendall tau " + num(tau)};
}

Outcome resonance() {
    Stopwatch sw;
    const ResonanceSweep r = resonance_fuzz(1'000'000, 2024);
    const double elapsed = sw.seconds();
    return {r.max_deviation <= 1e-12 && elapsed <= 5.0,
            "max relative deviation " + num(r.max_deviation) + ", " + num(elapsed) + " s"};
}

double max_rel_change(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, a[i] == 0.0 ? std::abs(b[i]) : std::abs(b[i] - a[i]) / std::abs(a[i]));
    return worst;
}

Outcome estimate_probes() {
    const ProbeCorpus corpus = frozen_corpus();
    const Calibration& cal = frozen_calibration();
    const double eps = cal.epsilon;
    const auto cube = cube_ratios(corpus, eps);
    const auto dyadic = dyadic_ratios(corpus, eps);
    const auto tri = trilinear_ratios(corpus, cal.trilinear_s, cal.trilinear_p, eps, cal.trilinear_T);
    const double mc = *std::max_element(cube.begin(), cube.end());
    const double md = *std::max_element(dyadic.begin(), dyadic.end());
    const double mt = *std::max_element(tri.begin(), tri.end());

    ProbeCorpus scaled = corpus;
    for (auto& c : scaled.cube) {
        c.u *= cplx(2.5, 0.0);
        c.v *= cplx(0.0, 0.4);
    }
    for (auto& c : scaled.dyadic) {
        c.u *= cplx(0.3, 0.0);
        c.v *= cplx(-7.0, 0.0);
    }
    for (auto& c : scaled.trilinear) {
        c.u1 *= cplx(3.0, 0.0);
        c.u2 *= cplx(0.0, 0.5);
        c.u3 *= cplx(1.2, -0.9);
    }
    const double hom = std::max({max_rel_change(cube, cube_ratios(scaled, eps)),
                                 max_rel_change(dyadic, dyadic_ratios(scaled, eps)),
                                 max_rel_change(tri, trilinear_ratios(scaled, cal.trilinear_s, cal.trilinear_p, eps,
                                                                      cal.trilinear_T))});
    const bool ok = corpus.hash() == cal.corpus_hash && mc <= cal.bilinear_cube && md <= cal.bilinear_dyadic &&
                    mt <= cal.trilinear && hom <= 1e-10;
    return {ok, "cube " + num(mc) + "/" + num(cal.bilinear_cube) + ", dyadic " + num(md) + "/" +
                    num(cal.bilinear_dyadic) + ", trilinear " + num(mt) + "/" + num(cal.trilinear) +
                    "; homogeneity " + num(hom)};
}

Outcome apriori() {
    const GridSpec g(2.0 * kPi * 8.0, 256);
    const double s = 0.125, p = 4.0, T = 2.0, dt = 2.5e-4;
    double sup = 0.0, drift = 0.0, edge = 0.0;
    std::uint64_t worst_seed = 0;
    auto u0_for = [&](std::uint64_t seed) {
        Rng rng(seed);
        return random_field_with_norm(g, rng, PacketSpec{3, -4.0, 4.0, 1.5, 2.5}, s, p, 0.5);
    };
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Field u0 = u0_for(seed);
        const Trajectory traj = evolve(u0, T, measuring(dt), 40);
        const double n0 = modulation_norm(u0, s, p);
        for (const Field& f : traj.snapshots) {
            const double r = modulation_norm(f, s, p) / n0;
            if (r > sup) {
                sup = r;
                worst_seed = seed;
            }
            edge = std::max(edge, edge_mass_fraction(forward_transform(f), 2.0));
        }
        drift = std::max(drift, traj.max_relative_mass_drift());
    }
    // Resolution check: the worst seed at half the step and on a doubled grid.
    const Field w0 = u0_for(worst_seed);
    const double sup_half = apriori_tracking(w0, s, p, T, measuring(dt / 2.0), 80).sup_ratio;
    const GridSpec g2(g.length(), 2 * g.points());
    Field w2(g2);
    {
        SpectralField W(g2);
        const SpectralField F = forward_transform(w0);
        for (std::size_t k = 0; k < g.points(); ++k) W.coefficients()[g2.storage_index(g.signed_index(k))] = F[k];
        w2 = inverse_transform(W);
    }
    const double sup_fine = apriori_tracking(w2, s, p, T, measuring(dt), 40).sup_ratio;
    const double sup_worst = apriori_tracking(w0, s, p, T, measuring(dt), 40).sup_ratio;
    const double resolution = std::max(std::abs(sup_half - sup_worst), std::abs(sup_fine - sup_worst)) / sup_worst;

    const GridSpec gs(2.0 * kPi * 16.0, 512);
    const auto sol = apriori_tracking(soliton_field(SolitonParams{1.0, 1.0}, 0.0, gs), s, p, T, measuring(dt), 400);
    double sol_dev = 0.0;
    for (double n : sol.norms) sol_dev = std::max(sol_dev, std::abs(n / sol.norms.front() - 1.0));

    const bool ok = sup <= 5.0 && resolution <= 1e-4 && drift <= 1e-9 && edge <= 1e-12 && sol_dev <= 1e-6;
    return {ok, "sup ratio " + num(sup) + " (seed " + std::to_string(worst_seed) + "), resolution change " +
                    num(resolution) + ", edge mass " + num(edge) + ", mass drift " + num(drift) +
                    "; soliton deviation " + num(sol_dev)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const fs::path& work) {
    const fs::path cfg = work / "illposed.cfg";
    {
        std::ofstream out(cfg);
        out << "s = 0.125\np = 4\nT = 1\ntheta = 0.125\nN_max = 256\nseed = 11\n";
    }
    std::vector<std::string> csv, json;
    for (const char* run : {"run_a", "run_b"}) {
        cli::RunConfig rc;
        rc.subcommand = cli::Subcommand::Illposed;
        rc.config = cfg;
        rc.out_dir = work / run;
        fs::create_directories(rc.out_dir);
        const int code = cli::run(rc);
        if (code != cli::kExitOk && code != cli::kExitFail)
            return {false, std::string(run) + " exited with " + std::to_string(code)};
        csv.push_back(slurp(rc.out_dir / "records.csv"));
        json.push_back(slurp(rc.out_dir / "verdict.json"));
    }
    const bool ok = !csv[0].empty() && csv[0] == csv[1] && json[0] == json[1];
    return {ok, "records.csv " + std::to_string(csv[0].size()) + " bytes, " +
                    (csv[0] == csv[1] ? "identical" : "DIFFERENT") + "; verdict.json " +
                    (json[0] == json[1] ? "identical" : "DIFFERENT")};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mkdv acceptance suite"};
    fs::path work = fs::temp_directory_path() / "mkdv_acceptance";
    std::vector<int> only;
    app.add_option("--work", work, "scratch directory for CLI outputs");
    app.add_option("--only", only, "run only these criteria")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);
    fs::create_directories(work);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"soliton exactness", soliton_exactness},
        {"conservation", conservation},
        {"norm engine", norm_engine},
        {"ill-posedness, s >= 0", illposed_nonneg},
        {"ill-posedness, s < 0", illposed_neg},
        {"overlap bound", overlap_bound},
        {"resonance identity", resonance},
        {"estimate probes", estimate_probes},
        {"a-priori observable", apriori},
        {"determinism", [&] { return determinism(work); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << "criterion " << id << " [" << criteria[i].first << "]: " << (o.pass ? "PASS" : "FAIL") << "  "
                  << o.detail << std::endl;
    }
    std::cout << (failures ? std::to_string(failures) + " criterion(s) failed" : std::string("all criteria passed"))
              << std::endl;
    return failures ? 1 : 0;
}
