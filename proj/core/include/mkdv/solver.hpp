#pragma once

#include "mkdv/grid.hpp"
#include "mkdv/norms.hpp"

#include <cstddef>
#include <vector>

namespace mkdv {

/// Integrating-factor RK4 for d_t u + d_x^3 u + sign * 6 |u|^2 d_x u = 0.
struct SolverConfig {
    double dt = 1e-4;
    int sign = +1;                ///< +1 focusing, -1 defocusing
    double max_mass_drift = 1e-9; ///< relative, checked at every record and at the end

    void validate() const;
};

/// -sign * 6 |u|^2 u_x, the nonlinear part of d_t u.
///
/// The cubic product is formed on a 3/2 zero-padded grid and the result is
/// restricted to |xi| <= 2/3 nyquist, so states that start in that band stay
/// in it and the product never aliases into retained modes.
SpectralField nonlinearity(const SpectralField& F, int sign);
Field nonlinearity(const Field& f, int sign);

/// One step of size dt (negative dt runs backward). Throws ResolutionError if
/// dt * 6 max|u|^2 * nyquist > 0.5.
Field step(const Field& f, double dt, const SolverConfig& cfg);

struct Invariants {
    double mass = 0.0;      ///< int |u|^2 dx
    double momentum = 0.0;  ///< int Im(conj(u) u_x) dx
};

Invariants invariants(const Field& f);
Invariants invariants(const SpectralField& F);

/// Snapshots of one run. times[i] matches snapshots[i] and invariants[i].
struct Trajectory {
    GridSpec grid;
    double dt = 0.0;
    int sign = +1;
    std::vector<double> times;
    std::vector<Field> snapshots;
    std::vector<Invariants> invariants;

    const Field& final_state() const { return snapshots.back(); }
    double max_relative_mass_drift() const;

    /// Leading power-of-two block of snapshots as a cutoff space-time field.
    /// Requires equispaced records.
    SpaceTimeField as_space_time() const;
};

/// Evolves f0 to time T (negative T runs backward). The step is adjusted to
/// T / round(|T| / cfg.dt). A snapshot is kept every `record_every` steps,
/// plus the initial and final states. Throws DriftError if relative mass
/// drift exceeds cfg.max_mass_drift.
Trajectory evolve(const Field& f0, double T, const SolverConfig& cfg, std::size_t record_every = 1);

} // namespace mkdv
