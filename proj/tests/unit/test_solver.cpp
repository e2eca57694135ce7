#include "mkdv/corpus.hpp"
#include "mkdv/error.hpp"
#include "mkdv/soliton.hpp"
#include "mkdv/solver.hpp"
#include "mkdv/trajectory_io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace mkdv;

namespace {

constexpr double kPi = std::numbers::pi;

double relative_l2(const Field& a, const Field& b) { return std::sqrt(l2_mass(a - b) / l2_mass(b)); }

double max_abs(const Field& f) { return sup_norm(f); }

Field small_random(const GridSpec& g, std::uint64_t seed, double amplitude) {
    Rng rng(seed);
    Field f = random_wavepackets(g, rng, PacketSpec{3, -3.0, 3.0, 1.5, 2.5});
    f *= cplx(amplitude / sup_norm(f), 0.0);
    return f;
}

} // namespace

TEST_CASE("solver configuration validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.sign = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.max_mass_drift = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("nonlinearity trivial cases") {
    const GridSpec g(2.0 * kPi * 8.0, 256);
    CHECK(max_abs(nonlinearity(Field(g), +1)) == 0.0);
    Field c(g);
    for (auto& v : c.samples()) v = 0.7;
    CHECK(max_abs(nonlinearity(c, +1)) < 1e-14);
}

TEST_CASE("nonlinearity output stays in the dealiased band") {
    const GridSpec g(2.0 * kPi * 8.0, 256);
    Rng rng(4);
    const Field f = random_wavepackets(g, rng, PacketSpec{3, -9.0, 9.0, 0.5, 1.0});
    const SpectralField N = forward_transform(nonlinearity(f, -1));
    const double band = 2.0 / 3.0 * g.nyquist();
    double outside = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < N.size(); ++k) {
        peak = std::max(peak, std::abs(N[k]));
        if (std::abs(g.wavenumber(k)) > band) outside = std::max(outside, std::abs(N[k]));
    }
    CHECK(outside < 1e-14 * peak);
}

TEST_CASE("step: identity at dt = 0 and linear limit") {
    const GridSpec g(2.0 * kPi * 8.0, 256);
    const SolverConfig cfg;
    const Field f = small_random(g, 11, 1.0);
    CHECK(relative_l2(step(f, 0.0, cfg), f) == 0.0);

    const Field tiny = small_random(g, 12, 1e-6);
    const double dt = 1e-3;
    CHECK(relative_l2(step(tiny, dt, cfg), airy_propagator(tiny, dt)) <= 1e-10);
}

TEST_CASE("step rejects a violated CFL proxy") {
    const GridSpec g(2.0 * kPi * 8.0, 256);
    const Field big = small_random(g, 13, 10.0);
    CHECK_THROWS_AS(step(big, 1e-2, SolverConfig{}), ResolutionError);
}

TEST_CASE("soliton benchmark") {
    const GridSpec g(128.0, 4096);
    const SolitonParams sp{2.0, 1.0};
    SolverConfig cfg;
    cfg.dt = 5e-4;  // coarser than the acceptance run; still far below 1e-6 in error
    const Trajectory traj = evolve(soliton_field(sp, 0.0, g), 0.25, cfg, 50);
    CHECK(relative_l2(traj.final_state(), soliton_field(sp, 0.25, g)) <= 1e-6);
    CHECK(traj.max_relative_mass_drift() <= 1e-9);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(0.25));
    CHECK(traj.snapshots.size() == traj.times.size());
    CHECK(traj.invariants.size() == traj.times.size());
}

TEST_CASE("fourth-order convergence") {
    // Errors against a fine reference on a coarse grid keep rounding out of the way.
    const GridSpec g(64.0, 512);
    const Field u0 = soliton_field(SolitonParams{2.0, 1.0}, 0.0, g);
    const double T = 0.2;
    auto run = [&](double dt) {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.max_mass_drift = 1.0;
        return evolve(u0, T, cfg, 1u << 20).final_state();
    };
    const Field ref = run(T / 3200.0);
    const double e1 = relative_l2(run(T / 100.0), ref);
    const double e2 = relative_l2(run(T / 200.0), ref);
    const double ratio = e1 / e2;
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("time reversibility") {
    const GridSpec g(2.0 * kPi * 8.0, 256);
    const Field u0 = small_random(g, 14, 0.5);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const Field forward = evolve(u0, 0.5, cfg, 1000).final_state();
    const Field back = evolve(forward, -0.5, cfg, 1000).final_state();
    CHECK(relative_l2(back, u0) <= 1e-8);
}

TEST_CASE("zero data stays zero") {
    const GridSpec g(2.0 * kPi * 8.0, 256);
    const Trajectory traj = evolve(Field(g), 0.1, SolverConfig{}, 100);
    for (const Field& f : traj.snapshots) CHECK(max_abs(f) == 0.0);
}

TEST_CASE("mass conservation for random small data, both signs") {
    const GridSpec g(2.0 * kPi * 8.0, 256);
    for (int sign : {+1, -1}) {
        SolverConfig cfg;
        cfg.sign = sign;
        cfg.dt = 1e-3;
        const Trajectory traj = evolve(small_random(g, 15, 0.3), 1.0, cfg, 100);
        CHECK(traj.max_relative_mass_drift() <= 1e-9);
    }
}

TEST_CASE("drift tolerance aborts the run") {
    const GridSpec g(2.0 * kPi * 8.0, 256);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.max_mass_drift = 1e-300;
    CHECK_THROWS_AS(evolve(small_random(g, 16, 0.3), 0.1, cfg, 10), DriftError);
}

TEST_CASE("invariants of a soliton") {
    const GridSpec g(128.0, 4096);
    const SolitonParams sp{1.5, 0.8};
    const Invariants inv = invariants(soliton_field(sp, 0.0, g));
    CHECK(inv.mass == doctest::Approx(2.0 * 0.8).epsilon(1e-10));
    CHECK(inv.momentum == doctest::Approx(1.5 * 2.0 * 0.8).epsilon(1e-10));
}

TEST_CASE("trajectory file round trip") {
    const GridSpec g(2.0 * kPi * 8.0, 128);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const Trajectory traj = evolve(small_random(g, 17, 0.3), 0.02, cfg, 5);
    const auto dir = std::filesystem::temp_directory_path() / "mkdv_test_solver";
    std::filesystem::create_directories(dir);
    const auto path = dir / "traj.bin";
    io::write_trajectory(path, traj);
    const Trajectory back = io::read_trajectory(path);
    CHECK(back.grid == traj.grid);
    CHECK(back.dt == traj.dt);
    CHECK(back.sign == traj.sign);
    REQUIRE(back.times.size() == traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        CHECK(back.times[i] == traj.times[i]);
        CHECK(relative_l2(back.snapshots[i], traj.snapshots[i]) == 0.0);
    }
    CHECK(std::filesystem::file_size(path) == 56 + traj.times.size() * (8 + 16 * g.points()));

    {
        std::ofstream os(dir / "bad.bin", std::ios::binary);
        os << "NOTATRAJECTORY";
    }
    CHECK_THROWS(io::read_trajectory(dir / "bad.bin"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("trajectory as a space-time field") {
    const GridSpec g(2.0 * kPi * 8.0, 128);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const Trajectory traj = evolve(small_random(g, 18, 0.2), 0.035, cfg, 1);
    const SpaceTimeField U = traj.as_space_time();
    CHECK(U.time_points() == 32);
    CHECK(U.window_length() == doctest::Approx(0.032));
}
