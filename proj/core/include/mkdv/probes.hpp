#pragma once

#include "mkdv/corpus.hpp"
#include "mkdv/grid.hpp"
#include "mkdv/norms.hpp"
#include "mkdv/solver.hpp"

#include <array>
#include <optional>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mkdv {

struct ResonanceValue {
    double lhs;  ///< sigma + sigma_1 + sigma_2 + sigma_3 on the constraint surfaces
    double rhs;  ///< 3 (xi_1 + xi_2)(xi_2 + xi_3)(xi_1 + xi_3)
};

ResonanceValue resonance_identity(double xi1, double xi2, double xi3);

struct ResonanceSweep {
    std::size_t trials = 0;
    double max_deviation = 0.0;  ///< max |lhs - rhs| / (1 + |rhs|)
    std::array<double, 3> argmax{};
};

/// Triples drawn uniformly from [-range, range]^3.
ResonanceSweep resonance_fuzz(std::size_t trials, std::uint64_t seed, double range = 10.0);

/// ||eta^2 (e^{-t d^3} A)(e^{-t d^3} B)||_{L^2_{x,t}} for spectral inputs A, B,
/// with composite Gauss-Legendre panels in time on the smooth pieces of the
/// cutoff, sized by the spread of xi^3 over the occupied bins.
double bilinear_space_time_l2(const SpectralField& A, const SpectralField& B, double window_length);

/// ||Pi_m U Pi_n V||_{L^2} / (|m+n|^{-1/2} |m-n|^{-1/2} ||Pi_m U||_{X^{0,1/2+eps}} ||Pi_n V||_{X^{0,1/2+eps}})
/// with U, V the cutoff free evolutions over [0, window_length]. Requires
/// |m+n|, |m-n| >= 2. Zero input gives 0. A nonpositive window_length picks
/// the longest window up to 1 in which the two pieces drift apart by at most
/// half the box, so periodic images do not re-interact.
double bilinear_ratio_cube(const Field& u, const Field& v, long m, long n, double eps, double window_length = 0.0);

/// Same with sharp Littlewood-Paley pieces and weight 1/N1. Requires N1 >= 4 N2.
double bilinear_ratio_lp(const Field& u, const Field& v, long N1, long N2, double eps, double window_length = 0.0);

struct TrilinearRatio {
    double ratio = 0.0;
    bool in_range = true;  ///< s >= 1/4 and 2 <= p < inf
    std::size_t time_points = 0;
};

/// X^{s,-1/2+2eps}_p norm of U1 conj(U2) d_x U3 over the product of the
/// X^{s,1/2+eps}_p norms of the U_j = cutoff free evolutions on [0, T].
/// Representative-based: both sides are evaluated on one extension, so the
/// value is a diagnostic and not a bound on the restriction-norm ratio.
/// Inputs must be band-limited to |xi| <= nyquist / 3.
TrilinearRatio trilinear_ratio(const Field& u1, const Field& u2, const Field& u3, double s, double p, double eps,
                               double T);

/// sum_{m != n} a_m b_n / (|m - n| <n>^eps) over indices m, n >= 0.
double convolution_lhs(std::span<const double> a, std::span<const double> b, double eps);
/// lhs / (||a||_{l^p} ||b||_{l^p'}); 0 when either sequence vanishes.
double convolution_ratio(std::span<const double> a, std::span<const double> b, double eps, double p);

struct ConvolutionCheck {
    double lhs = 0.0;
    double bound = 0.0;  ///< C ||a||_p ||b||_p'
    bool violated = false;
};

ConvolutionCheck convolution_inequality_check(std::span<const double> a, std::span<const double> b, double eps,
                                              double p, double constant);

/// C_eps as 1.25 times the largest ratio over a reference family: indicators
/// of [1, K] for K = 1 ... 1024, adjacent spikes, and seeded random dense and
/// sparse sequences.
double calibrate_convolution_constant(double eps, double p, std::uint64_t seed = 7);

/// Random nonnegative sequence of length `length` with `nonzeros` entries.
std::vector<double> random_sparse_sequence(Rng& rng, std::size_t length, std::size_t nonzeros);

struct AprioriSeries {
    std::vector<double> times;
    std::vector<double> norms;
    double sup_ratio = 0.0;  ///< sup_t ||u(t)|| / ||u(0)||, 0 for zero data
    double max_mass_drift = 0.0;
};

/// Evolves u0 and records the M^{2,p}_s norm at every kept snapshot.
AprioriSeries apriori_tracking(const Field& u0, double s, double p, double T, const SolverConfig& cfg,
                               std::size_t record_every = 10);

struct ProbeReport {
    std::string estimate;
    std::size_t corpus_size = 0;
    double max_ratio = 0.0;
    std::string argmax;
    bool representative_based = false;
    std::vector<std::string> flags;
    std::optional<double> calibration;
    std::string corpus_hash;
};

/// Evaluates a probe family over a corpus. Elements run on `jobs` threads;
/// the reduction is deterministic.
ProbeReport probe_bilinear_cube(const ProbeCorpus& corpus, double eps, unsigned jobs = 1);
ProbeReport probe_bilinear_dyadic(const ProbeCorpus& corpus, double eps, unsigned jobs = 1);
ProbeReport probe_trilinear(const ProbeCorpus& corpus, double s, double p, double eps, double T, unsigned jobs = 1);

/// Per-element ratios in corpus order.
std::vector<double> cube_ratios(const ProbeCorpus& corpus, double eps, unsigned jobs = 1);
std::vector<double> dyadic_ratios(const ProbeCorpus& corpus, double eps, unsigned jobs = 1);
std::vector<double> trilinear_ratios(const ProbeCorpus& corpus, double s, double p, double eps, double T,
                                     unsigned jobs = 1);

std::string to_json(const std::vector<ProbeReport>& reports, const std::string& config_hash);

} // namespace mkdv
