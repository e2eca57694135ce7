#include "commands.hpp"

#include "mkdv/config.hpp"
#include "mkdv/corpus.hpp"
#include "mkdv/error.hpp"
#include "mkdv/illposed.hpp"
#include "mkdv/norms.hpp"
#include "mkdv/probes.hpp"
#include "mkdv/soliton.hpp"
#include "mkdv/solver.hpp"
#include "mkdv/trajectory_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mkdv::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.3.0";

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

const char* subcommand_name(Subcommand s) {
    switch (s) {
    case Subcommand::Solve: return "solve";
    case Subcommand::Illposed: return "illposed";
    case Subcommand::Probe: return "probe";
    case Subcommand::Norms: return "norms";
    }
    return "?";
}

Config load_config(const RunConfig& rc) {
    if (!fs::exists(rc.config)) throw ConfigError("--config", "file not found: " + rc.config.string());
    return Config::load(rc.config);
}

std::uint64_t resolve_seed(const RunConfig& rc, const Config& cfg) {
    if (rc.seed) return *rc.seed;
    const long s = cfg.get_int("seed", 1);
    if (s < 0) throw ConfigError("seed", "must be nonnegative");
    return static_cast<std::uint64_t>(s);
}

std::vector<std::string> base_header(const RunConfig& rc, const Config& cfg, std::uint64_t seed) {
    return {std::string("mkdvlab ") + kVersion + " " + subcommand_name(rc.subcommand),
            "config_hash=" + hex64(cfg.hash()), "seed=" + std::to_string(seed)};
}

std::string grid_line(const GridSpec& g) {
    return "grid L=" + fmt(g.length()) + " M=" + std::to_string(g.points()) + " dxi=" + fmt(g.dxi()) +
           " nyquist=" + fmt(g.nyquist());
}

void ensure_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
    const fs::path probe = dir / ".mkdvlab-write-test";
    {
        std::ofstream os(probe);
        if (!os) throw std::runtime_error("output directory not writable: " + dir.string());
    }
    fs::remove(probe, ec);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

fs::path resolve_relative(const RunConfig& rc, const std::string& value) {
    fs::path p(value);
    if (p.is_absolute()) return p;
    return rc.config.parent_path() / p;
}

// "0.125:4" -> (s, p)
std::pair<double, double> parse_pair(const std::string& key, const std::string& item) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError(key, "expected s:p, got '" + item + "'");
    Config c;
    c.set("s", item.substr(0, colon));
    c.set("p", item.substr(colon + 1));
    try {
        return {c.get_double("s"), c.get_double("p")};
    } catch (const ConfigError& e) {
        throw ConfigError(key, std::string("malformed entry '") + item + "'");
    }
}

template <class Fn>
auto with_key(const std::string& key, Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
    }
}

Field initial_field(const Config& cfg, const GridSpec& grid, std::uint64_t seed, std::optional<SolitonParams>& sol) {
    const std::string kind = cfg.get_string("initial", "soliton");
    if (kind == "soliton") {
        SolitonParams p{cfg.get_double("N", 2.0), cfg.get_double("lambda", 1.0)};
        with_key("lambda", [&] { p.validate(); return 0; });
        sol = p;
        return with_key("lambda", [&] { return soliton_field(p, 0.0, grid); });
    }
    if (kind == "sech") {
        const double amp = cfg.get_double("amplitude", 1.0);
        const double width = cfg.get_double("width", 1.0);
        if (!(width > 0.0)) throw ConfigError("width", "must be positive");
        std::vector<cplx> v(grid.points());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = amp * ground_state(grid.x(j) / width);
        return Field(grid, std::move(v));
    }
    if (kind == "zero") return Field(grid);
    if (kind == "random") {
        Rng rng(seed);
        PacketSpec spec;
        spec.count = static_cast<int>(cfg.get_int("packets", 3));
        const double band = cfg.get_double("band", 4.0);
        spec.band_lo = -band;
        spec.band_hi = band;
        spec.w_lo = cfg.get_double("width_min", 1.5);
        spec.w_hi = cfg.get_double("width_max", 2.5);
        const double target = cfg.get_double("target_norm", 0.5);
        const double s = cfg.get_double("target_s", 0.125);
        const double p = cfg.get_double("target_p", 4.0);
        return with_key("initial", [&] { return random_field_with_norm(grid, rng, spec, s, p, target); });
    }
    throw ConfigError("initial", "expected soliton, sech, zero, random or file, got '" + kind + "'");
}

} // namespace

int cmd_solve(const RunConfig& rc) {
    const Config cfg = load_config(rc);
    cfg.require_known({"initial", "L", "M", "T", "dt", "sign", "record_every", "max_mass_drift", "N", "lambda",
                       "amplitude", "width", "packets", "band", "width_min", "width_max", "target_norm",
                       "target_s", "target_p", "input", "snapshot", "norms", "seed"});
    const std::uint64_t seed = resolve_seed(rc, cfg);

    std::optional<SolitonParams> sol;
    std::optional<Field> u0;
    if (cfg.get_string("initial", "soliton") == "file") {
        if (!cfg.has("input")) throw ConfigError("input", "required when initial = file");
        const Trajectory src = io::read_trajectory(resolve_relative(rc, cfg.get_string("input")));
        const long idx = cfg.get_int("snapshot", static_cast<long>(src.snapshots.size()) - 1);
        if (idx < 0 || idx >= static_cast<long>(src.snapshots.size()))
            throw ConfigError("snapshot", "index out of range");
        u0 = src.snapshots[static_cast<std::size_t>(idx)];
    } else {
        const double L = cfg.get_double("L", 128.0);
        const long M = cfg.get_int("M", 4096);
        if (M <= 0) throw ConfigError("M", "must be positive");
        const GridSpec grid = with_key("L", [&] { return GridSpec(L, static_cast<std::size_t>(M)); });
        u0 = initial_field(cfg, grid, seed, sol);
    }

    SolverConfig sc;
    sc.dt = cfg.get_double("dt", sc.dt);
    sc.sign = static_cast<int>(cfg.get_int("sign", 1));
    sc.max_mass_drift = cfg.get_double("max_mass_drift", sc.max_mass_drift);
    with_key("dt", [&] { sc.validate(); return 0; });
    const double T = cfg.get_double("T", 1.0);
    const long every = cfg.get_int("record_every", 100);
    if (every <= 0) throw ConfigError("record_every", "must be positive");

    std::vector<io::NormColumn> columns;
    for (const auto& item : cfg.get_list("norms")) {
        const auto [s, p] = parse_pair("norms", item);
        columns.push_back({"M2p_s" + fmt(s) + "_p" + fmt(p), s, p});
    }

    const Trajectory traj = evolve(*u0, T, sc, static_cast<std::size_t>(every));

    ensure_out_dir(rc.out_dir);
    auto header = base_header(rc, cfg, seed);
    header.push_back(grid_line(traj.grid));
    header.push_back("dt=" + fmt(traj.dt) + " sign=" + std::to_string(traj.sign) + " T=" + fmt(T));
    io::write_trajectory(rc.out_dir / "trajectory.bin", traj);
    io::write_invariants_csv(rc.out_dir / "invariants.csv", traj, header, columns);

    std::cout << "snapshots: " << traj.snapshots.size() << "\n";
    std::cout << "max relative mass drift: " << fmt(traj.max_relative_mass_drift()) << "\n";
    if (sol && sc.sign == 1) {
        const Field exact = soliton_field(*sol, traj.times.back(), traj.grid);
        const double err = std::sqrt(l2_mass(traj.final_state() - exact) / l2_mass(exact));
        std::cout << "final relative L2 error vs exact soliton: " << fmt(err) << "\n";
    }
    return kExitOk;
}

int cmd_illposed(const RunConfig& rc) {
    const Config cfg = load_config(rc);
    cfg.require_known({"s", "p", "T", "N_min", "N_max", "theta", "use_solver", "force_equal", "solver_dt",
                       "window", "norm_band", "diffT_fraction", "slope_tolerance", "seed"});
    const std::uint64_t seed = resolve_seed(rc, cfg);
    const ExperimentPlan plan = ExperimentPlan::from_config(cfg);
    ensure_out_dir(rc.out_dir);

    const auto records = run_sweep(plan, rc.jobs);
    const Verdict verdict = verify_lemma(records, plan);

    auto header = base_header(rc, cfg, seed);
    header.push_back(std::string("regime=") + regime_name(plan.regime()) + " s=" + fmt(plan.s) + " p=" +
                     fmt(plan.p) + " T=" + fmt(plan.T) + " theta=" + fmt(plan.effective_theta()));
    header.push_back("grid auto-sized per row: L = 2 pi 2^j, M power of two (columns L, M)");
    header.push_back("schema illposed-records v1");
    {
        std::ostringstream os;
        write_records_csv(os, records, header);
        write_text(rc.out_dir / "records.csv", os.str());
    }
    write_text(rc.out_dir / "verdict.json", verdict_json(verdict, plan, hex64(cfg.hash())));

    std::cout << "regime " << regime_name(plan.regime()) << ", " << records.size() << " points\n";
    std::cout << "(a) bounded norms:     " << (verdict.bounded ? "pass" : "FAIL") << "  max/min = "
              << fmt(verdict.norm_ratio) << "\n";
    std::cout << "(b) vanishing diff0:   " << (verdict.vanishing ? "pass" : "FAIL");
    if (verdict.diff0_fit)
        std::cout << "  slope = " << fmt(verdict.diff0_fit->slope) << " (predicted " << fmt(verdict.predicted_exponent)
                  << ", match: " << verdict.exponent_match << ")";
    std::cout << "\n(c) separated diffT:   " << (verdict.separated ? "pass" : "FAIL") << "  min top-half diffT = "
              << fmt(verdict.diff_t_min_top) << ", median norm = " << fmt(verdict.median_norm) << "\n";
    for (const auto& n : verdict.notes) std::cout << "note: " << n << "\n";
    std::cout << "verdict: " << (verdict.pass ? "PASS" : "FAIL") << "\n";
    return verdict.pass ? kExitOk : kExitFail;
}

int cmd_probe(const RunConfig& rc) {
    const Config cfg = load_config(rc);
    cfg.require_known({"probes", "eps", "corpus_seed", "corpus_size", "resonance_trials", "resonance_range",
                       "trilinear_s", "trilinear_p", "trilinear_T", "conv_eps", "conv_p", "conv_trials",
                       "apriori_seeds", "apriori_target", "apriori_s", "apriori_p", "apriori_T", "apriori_dt",
                       "seed"});
    const std::uint64_t seed = resolve_seed(rc, cfg);
    static const std::set<std::string> kKnown = {"resonance",  "bilinear_cube", "bilinear_dyadic",
                                                 "trilinear", "convolution",   "apriori"};
    const auto probes = cfg.get_list("probes");
    for (const auto& p : probes)
        if (!kKnown.count(p)) throw ConfigError("probes", "unknown probe '" + p + "'");
    const double eps = cfg.get_double("eps", frozen_calibration().epsilon);
    if (!(eps > 0.0)) throw ConfigError("eps", "must be positive");
    ensure_out_dir(rc.out_dir);

    std::optional<ProbeCorpus> corpus;
    auto need_corpus = [&]() -> const ProbeCorpus& {
        if (!corpus) {
            const long size = cfg.get_int("corpus_size", static_cast<long>(kFrozenCorpusSize));
            if (size < 0) throw ConfigError("corpus_size", "must be nonnegative");
            const auto cs = cfg.has("corpus_seed") ? static_cast<std::uint64_t>(cfg.get_int("corpus_seed"))
                                                   : kFrozenCorpusSeed;
            corpus = make_corpus(cs, static_cast<std::size_t>(size));
        }
        return *corpus;
    };

    std::vector<ProbeReport> reports;
    std::ostringstream ratios_csv;
    for (const auto& line : base_header(rc, cfg, seed)) ratios_csv << "# " << line << "\n";
    ratios_csv << "# schema probe-ratios v1\nprobe,element,ratio\n";
    auto dump = [&](const std::string& id, const std::vector<double>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) ratios_csv << id << ',' << i << ',' << fmt(r[i]) << "\n";
    };
    bool failed = false;

    for (const auto& id : probes) {
        ProbeReport r;
        if (id == "resonance") {
            const long trials = cfg.get_int("resonance_trials", 1000000);
            if (trials < 0) throw ConfigError("resonance_trials", "must be nonnegative");
            const auto sweep = resonance_fuzz(static_cast<std::size_t>(trials), seed,
                                              cfg.get_double("resonance_range", 10.0));
            r.estimate = "resonance";
            r.corpus_size = sweep.trials;
            r.max_ratio = sweep.max_deviation;
            r.argmax = "(" + fmt(sweep.argmax[0]) + ", " + fmt(sweep.argmax[1]) + ", " + fmt(sweep.argmax[2]) + ")";
            r.calibration = 1e-12;
            r.flags.push_back("max |lhs - rhs| / (1 + |rhs|)");
        } else if (id == "bilinear_cube") {
            const auto& c = need_corpus();
            r = probe_bilinear_cube(c, eps, rc.jobs);
            dump(id, cube_ratios(c, eps, rc.jobs));
        } else if (id == "bilinear_dyadic") {
            const auto& c = need_corpus();
            r = probe_bilinear_dyadic(c, eps, rc.jobs);
            dump(id, dyadic_ratios(c, eps, rc.jobs));
        } else if (id == "trilinear") {
            const auto& c = need_corpus();
            const double s = cfg.get_double("trilinear_s", frozen_calibration().trilinear_s);
            const double p = cfg.get_double("trilinear_p", frozen_calibration().trilinear_p);
            const double T = cfg.get_double("trilinear_T", frozen_calibration().trilinear_T);
            r = probe_trilinear(c, s, p, eps, T, rc.jobs);
            dump(id, trilinear_ratios(c, s, p, eps, T, rc.jobs));
        } else if (id == "convolution") {
            const double ce = cfg.get_double("conv_eps", 0.1);
            const double cp = cfg.get_double("conv_p", 2.0);
            const long trials = cfg.get_int("conv_trials", 10000);
            const double C = with_key("conv_p", [&] { return calibrate_convolution_constant(ce, cp); });
            Rng rng(seed);
            std::size_t violations = 0;
            r.estimate = "convolution";
            r.corpus_size = static_cast<std::size_t>(std::max(0L, trials));
            for (long i = 0; i < trials; ++i) {
                const auto a = random_sparse_sequence(rng, 1024, static_cast<std::size_t>(rng.integer(1, 32)));
                const auto b = random_sparse_sequence(rng, 1024, static_cast<std::size_t>(rng.integer(1, 32)));
                const auto chk = convolution_inequality_check(a, b, ce, cp, C);
                if (chk.violated) ++violations;
                const double ratio = chk.bound > 0.0 ? chk.lhs / chk.bound * C : 0.0;
                if (i == 0 || ratio > r.max_ratio) {
                    r.max_ratio = ratio;
                    r.argmax = "trial " + std::to_string(i);
                }
            }
            r.calibration = C;
            r.flags.push_back("violations=" + std::to_string(violations));
        } else if (id == "apriori") {
            const long seeds = cfg.get_int("apriori_seeds", 20);
            const double target = cfg.get_double("apriori_target", 0.5);
            const double s = cfg.get_double("apriori_s", 0.125);
            const double p = cfg.get_double("apriori_p", 4.0);
            const double T = cfg.get_double("apriori_T", 2.0);
            SolverConfig sc;
            sc.dt = cfg.get_double("apriori_dt", 2.5e-4);
            with_key("apriori_dt", [&] { sc.validate(); return 0; });
            const GridSpec grid(2.0 * std::numbers::pi * 8.0, 256);
            r.estimate = "apriori";
            r.corpus_size = static_cast<std::size_t>(std::max(0L, seeds));
            std::vector<double> sups;
            for (long i = 0; i < seeds; ++i) {
                Rng rng(seed + static_cast<std::uint64_t>(i));
                const PacketSpec spec{3, -4.0, 4.0, 1.5, 2.5};
                const Field u0 = random_field_with_norm(grid, rng, spec, s, p, target);
                const auto series = apriori_tracking(u0, s, p, T, sc, 40);
                sups.push_back(series.sup_ratio);
                if (i == 0 || series.sup_ratio > r.max_ratio) {
                    r.max_ratio = series.sup_ratio;
                    r.argmax = "seed " + std::to_string(seed + static_cast<std::uint64_t>(i));
                }
            }
            dump(id, sups);
            r.calibration = 5.0;
            r.flags.push_back("sup_t ||u(t)|| / ||u(0)||");
        }
        if (r.calibration && r.max_ratio > *r.calibration) failed = true;
        if (id == "convolution" && r.flags.back() != "violations=0") failed = true;
        reports.push_back(std::move(r));
    }

    write_text(rc.out_dir / "probe_report.json", to_json(reports, hex64(cfg.hash())));
    write_text(rc.out_dir / "probe_ratios.csv", ratios_csv.str());
    for (const auto& r : reports)
        std::cout << r.estimate << ": max " << fmt(r.max_ratio)
                  << (r.calibration ? " (limit " + fmt(*r.calibration) + ")" : std::string()) << " at " << r.argmax
                  << "\n";
    std::cout << reports.size() << " probe reports written\n";
    return failed ? kExitFail : kExitOk;
}

int cmd_norms(const RunConfig& rc) {
    const Config cfg = load_config(rc);
    cfg.require_known({"input", "snapshot", "norms", "window", "seed"});
    const std::uint64_t seed = resolve_seed(rc, cfg);
    if (!cfg.has("input")) throw ConfigError("input", "required");
    const Trajectory traj = io::read_trajectory(resolve_relative(rc, cfg.get_string("input")));
    const std::string wname = cfg.get_string("window", "cos2");
    Window window = Window::CosSquared;
    if (wname == "quartic") window = Window::QuarticSpline;
    else if (wname != "cos2") throw ConfigError("window", "expected cos2 or quartic");

    std::vector<std::size_t> indices;
    if (cfg.has("snapshot")) {
        const long idx = cfg.get_int("snapshot");
        if (idx < 0 || idx >= static_cast<long>(traj.snapshots.size()))
            throw ConfigError("snapshot", "index out of range");
        indices.push_back(static_cast<std::size_t>(idx));
    } else {
        for (std::size_t i = 0; i < traj.snapshots.size(); ++i) indices.push_back(i);
    }

    struct Request {
        std::string kind;
        double s;
        double p;
    };
    std::vector<Request> requests;
    for (const auto& item : cfg.get_list("norms")) {
        const auto colon = item.find(':');
        const std::string kind = item.substr(0, colon);
        const std::string rest = colon == std::string::npos ? "" : item.substr(colon + 1);
        if (kind == "l2") requests.push_back({kind, 0.0, 2.0});
        else if (kind == "sobolev") {
            Config c;
            c.set("s", rest);
            requests.push_back({kind, with_key("norms", [&] { return c.get_double("s"); }), 2.0});
        } else if (kind == "modulation" || kind == "fourier_lebesgue") {
            const auto [s, p] = parse_pair("norms", rest);
            requests.push_back({kind, s, p});
        } else {
            throw ConfigError("norms", "unknown norm '" + kind + "'");
        }
    }
    if (requests.empty()) requests.push_back({"modulation", 0.0, 2.0});

    ensure_out_dir(rc.out_dir);
    std::ostringstream os;
    auto header = base_header(rc, cfg, seed);
    header.push_back(grid_line(traj.grid));
    header.push_back("schema norms v1");
    for (const auto& line : header) os << "# " << line << "\n";
    os << "snapshot,t,norm,s,p,value\n";
    for (std::size_t i : indices) {
        const SpectralField F = forward_transform(traj.snapshots[i]);
        for (const auto& r : requests) {
            double v = 0.0;
            if (r.kind == "l2") v = std::sqrt(l2_mass(F));
            else if (r.kind == "sobolev") v = sobolev_norm(F, r.s);
            else if (r.kind == "fourier_lebesgue") v = fourier_lebesgue_norm(F, r.s, r.p);
            else v = modulation_norm(F, r.s, r.p, window);
            os << i << ',' << fmt(traj.times[i]) << ',' << r.kind << ',' << fmt(r.s) << ',' << fmt(r.p) << ','
               << fmt(v) << "\n";
            std::cout << "snapshot " << i << " " << r.kind << "(s=" << fmt(r.s) << ", p=" << fmt(r.p)
                      << ") = " << fmt(v) << "\n";
        }
    }
    write_text(rc.out_dir / "norms.csv", os.str());
    return kExitOk;
}

int run(const RunConfig& rc) {
    try {
        switch (rc.subcommand) {
        case Subcommand::Solve: return cmd_solve(rc);
        case Subcommand::Illposed: return cmd_illposed(rc);
        case Subcommand::Probe: return cmd_probe(rc);
        case Subcommand::Norms: return cmd_norms(rc);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ResolutionError& e) {
        std::cerr << "resolution error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const DriftError& e) {
        std::cerr << "drift error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}

} // namespace mkdv::cli
