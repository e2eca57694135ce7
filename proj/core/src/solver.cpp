#include "mkdv/solver.hpp"

#include "mkdv/error.hpp"
#include "mkdv/fft.hpp"
#include "mkdv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mkdv {

namespace {

constexpr double kCflLimit = 0.5;

struct LinearFactors {
    std::vector<cplx> half;
    std::vector<cplx> full;
};

LinearFactors linear_factors(const GridSpec& g, double dt) {
    LinearFactors f;
    f.half.resize(g.points());
    f.full.resize(g.points());
    for (std::size_t k = 0; k < g.points(); ++k) {
        const double xi = g.wavenumber(k);
        const double w = xi * xi * xi;
        f.half[k] = std::polar(1.0, 0.5 * w * dt);
        f.full[k] = std::polar(1.0, w * dt);
    }
    return f;
}

void check_cfl(const SpectralField& F, double dt) {
    const Field u = inverse_transform(F);
    const double amp = sup_norm(u);
    const double proxy = std::abs(dt) * 6.0 * amp * amp * F.grid().nyquist();
    if (proxy > kCflLimit) {
        std::ostringstream os;
        os << "step: cubic CFL proxy dt*6*max|u|^2*max|xi| = " << proxy << " exceeds " << kCflLimit
           << "; reduce dt below " << std::abs(dt) * kCflLimit / proxy;
        throw ResolutionError(os.str());
    }
}

SpectralField rk4_step(const SpectralField& U, double dt, int sign, const LinearFactors& E) {
    const std::size_t M = U.size();
    const auto u = U.coefficients();
    const SpectralField k1 = nonlinearity(U, sign);

    SpectralField a(U.grid());
    for (std::size_t k = 0; k < M; ++k) a.coefficients()[k] = E.half[k] * (u[k] + 0.5 * dt * k1[k]);
    const SpectralField k2 = nonlinearity(a, sign);

    SpectralField b(U.grid());
    for (std::size_t k = 0; k < M; ++k) b.coefficients()[k] = E.half[k] * u[k] + 0.5 * dt * k2[k];
    const SpectralField k3 = nonlinearity(b, sign);

    SpectralField c(U.grid());
    for (std::size_t k = 0; k < M; ++k) c.coefficients()[k] = E.full[k] * u[k] + dt * E.half[k] * k3[k];
    const SpectralField k4 = nonlinearity(c, sign);

    SpectralField out(U.grid());
    for (std::size_t k = 0; k < M; ++k)
        out.coefficients()[k] = E.full[k] * u[k] +
                                dt / 6.0 * (E.full[k] * k1[k] + 2.0 * E.half[k] * (k2[k] + k3[k]) + k4[k]);
    return out;
}

} // namespace

void SolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("SolverConfig: dt must be positive");
    if (sign != 1 && sign != -1) throw std::invalid_argument("SolverConfig: sign must be +1 or -1");
    if (!(max_mass_drift > 0.0)) throw std::invalid_argument("SolverConfig: max_mass_drift must be positive");
}

SpectralField nonlinearity(const SpectralField& F, int sign) {
    const auto& g = F.grid();
    const std::size_t M = g.points();
    const std::size_t P = 3 * M / 2;
    const double len = g.length();

    std::vector<cplx> u(P, 0.0);
    std::vector<cplx> ux(P, 0.0);
    for (std::size_t k = 0; k < M; ++k) {
        const std::size_t dst = k < M / 2 ? k : k + M / 2;
        u[dst] = F[k] / len;
        ux[dst] = cplx(0.0, g.wavenumber(k)) * F[k] / len;
    }
    fft::backward(u, u);
    fft::backward(ux, ux);
    const double coeff = -6.0 * static_cast<double>(sign);
    for (std::size_t j = 0; j < P; ++j) u[j] = coeff * std::norm(u[j]) * ux[j];
    fft::forward(u, u);

    SpectralField out(g);
    auto c = out.coefficients();
    const double band = 2.0 / 3.0 * g.nyquist();
    const double scale = len / static_cast<double>(P);
    for (std::size_t k = 0; k < M; ++k) {
        const std::size_t src = k < M / 2 ? k : k + M / 2;
        c[k] = std::abs(g.wavenumber(k)) <= band ? scale * u[src] : cplx{};
    }
    return out;
}

Field nonlinearity(const Field& f, int sign) { return inverse_transform(nonlinearity(forward_transform(f), sign)); }

Field step(const Field& f, double dt, const SolverConfig& cfg) {
    if (dt == 0.0) return f;
    const SpectralField F = forward_transform(f);
    check_cfl(F, dt);
    return inverse_transform(rk4_step(F, dt, cfg.sign, linear_factors(f.grid(), dt)));
}

Invariants invariants(const SpectralField& F) {
    const auto& g = F.grid();
    double mass = 0.0;
    double momentum = 0.0;
    for (std::size_t k = 0; k < F.size(); ++k) {
        const double a = std::norm(F[k]);
        mass += a;
        momentum += g.wavenumber(k) * a;
    }
    const double w = g.dxi() / (2.0 * std::numbers::pi);
    return {mass * w, momentum * w};
}

Invariants invariants(const Field& f) { return invariants(forward_transform(f)); }

double Trajectory::max_relative_mass_drift() const {
    if (invariants.empty() || invariants.front().mass == 0.0) return 0.0;
    const double m0 = invariants.front().mass;
    double worst = 0.0;
    for (const auto& inv : invariants) worst = std::max(worst, std::abs(inv.mass - m0) / m0);
    return worst;
}

SpaceTimeField Trajectory::as_space_time() const {
    if (snapshots.size() < 2) throw std::invalid_argument("Trajectory::as_space_time: need >= 2 snapshots");
    std::size_t K = 1;
    while (2 * K <= snapshots.size()) K *= 2;
    const double spacing = times[1] - times[0];
    for (std::size_t i = 1; i < K; ++i)
        if (std::abs((times[i] - times[i - 1]) - spacing) > 1e-9 * std::abs(spacing))
            throw std::invalid_argument("Trajectory::as_space_time: records are not equispaced");
    std::vector<Field> block(snapshots.begin(), snapshots.begin() + static_cast<std::ptrdiff_t>(K));
    return SpaceTimeField(grid, spacing * static_cast<double>(K), std::move(block));
}

Trajectory evolve(const Field& f0, double T, const SolverConfig& cfg, std::size_t record_every) {
    cfg.validate();
    if (record_every == 0) throw std::invalid_argument("evolve: record_every must be >= 1");
    const auto& g = f0.grid();

    Trajectory traj{g, 0.0, cfg.sign, {}, {}, {}};
    SpectralField U = forward_transform(f0);
    traj.times.push_back(0.0);
    traj.snapshots.push_back(f0);
    traj.invariants.push_back(invariants(U));
    if (T == 0.0) return traj;

    const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(std::abs(T) / cfg.dt)));
    const double dt = T / static_cast<double>(steps);
    traj.dt = dt;
    const LinearFactors E = linear_factors(g, dt);
    const double m0 = traj.invariants.front().mass;

    check_cfl(U, dt);
    for (std::size_t n = 1; n <= steps; ++n) {
        U = rk4_step(U, dt, cfg.sign, E);
        if (n % record_every != 0 && n != steps) continue;

        const Invariants inv = invariants(U);
        const double t = dt * static_cast<double>(n);
        if (m0 > 0.0 && std::abs(inv.mass - m0) > cfg.max_mass_drift * m0) {
            std::ostringstream os;
            os << "evolve: relative mass drift " << std::abs(inv.mass - m0) / m0 << " at t = " << t
               << " exceeds " << cfg.max_mass_drift << " (grid M = " << g.points() << ", dt = " << dt
               << "); the run is under-resolved, reduce dt or refine the grid";
            throw DriftError(os.str());
        }
        traj.times.push_back(t);
        traj.snapshots.push_back(inverse_transform(U));
        traj.invariants.push_back(inv);
        check_cfl(U, dt);
    }
    return traj;
}

} // namespace mkdv
