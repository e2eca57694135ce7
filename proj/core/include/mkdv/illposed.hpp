#pragma once

#include "mkdv/config.hpp"
#include "mkdv/spectral.hpp"

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace mkdv {

enum class Regime {
    NonnegativeS,  ///< 0 <= s < 1/4, lambda = N^{-2s}
    NegativeS,     ///< -1/p < s < 0, lambda = N^{-ps}
};

const char* regime_name(Regime r) noexcept;

/// Pass thresholds for verify_lemma. The lemma is asymptotic; these are
/// desk-scale stand-ins for "bounded", "-> 0" and "bounded below".
struct VerdictThresholds {
    double norm_band = 3.0;       ///< (a) max/min of the solution norms
    double diff_t_fraction = 0.3; ///< (c) diffT >= fraction * median(norm_u)
    double slope_tolerance = 0.15;///< reported exponent match, relative
};

struct ExperimentPlan {
    double s = 0.125;
    double p = 4.0;
    double T = 1.0;
    long N_min = 16;
    long N_max = 1024;
    std::optional<double> theta;  ///< defaults per regime
    bool use_solver = false;
    bool force_equal_carriers = false;
    double solver_dt = 1e-4;
    Window window = Window::CosSquared;
    VerdictThresholds thresholds;

    Regime regime() const;
    double effective_theta() const;
    /// Throws std::invalid_argument naming the violated condition.
    void validate() const;
    /// N_min, 2 N_min, ..., N_max.
    std::vector<long> carriers() const;

    /// Keys: s, p, T, N_min, N_max, theta, use_solver, force_equal,
    /// solver_dt, window (cos2 | quartic), norm_band, diffT_fraction,
    /// slope_tolerance.
    static ExperimentPlan from_config(const Config& cfg);
};

struct SoliPair {
    double scale;     ///< lambda
    double theta;
    double carrier1;  ///< N_1
    double carrier2;  ///< N_2
};

/// lambda, theta and the carrier pair for dyadic N. N_2 - N_1 is
/// N^{2s-1+2theta}/T (nonnegative s) or N^{ps-1+3theta/2}/T (negative s),
/// kept real-valued.
SoliPair choose_parameters(const ExperimentPlan& plan, double N);

/// Exponent of N predicted for diff0: 4s-1+2theta, or s+(3/2)(theta+ps)-1.
double predicted_diff0_exponent(const ExperimentPlan& plan);

struct ExperimentRecord {
    double N = 0.0;
    double carrier1 = 0.0;
    double carrier2 = 0.0;
    double scale = 0.0;
    double theta = 0.0;
    double norm_u = 0.0;    ///< ||u(0)||, grid
    double norm_v = 0.0;    ///< ||v(0)||, grid
    double norm_u_T = 0.0;  ///< ||u(T)||, grid
    double diff0 = 0.0;     ///< ||u(0) - v(0)||, grid
    double diffT = 0.0;     ///< ||u(T) - v(T)||, grid
    double tail = 0.0;      ///< norm of the |xi - N| >= N^theta part of u, quadrature
    double norm_u_quad = 0.0;
    double norm_v_quad = 0.0;
    double diff0_quad = 0.0;
    double diffT_quad = 0.0;
    double grid_length = 0.0;
    std::size_t grid_points = 0;
    std::optional<double> solver_error;  ///< relative L2, smallest N only

    /// Largest relative grid-vs-quadrature discrepancy over the four pairs.
    double oracle_discrepancy() const;
};

/// Grid needed to realize both solitons at t = 0 and t = T. Throws
/// ResolutionError (with the largest feasible dyadic N) beyond 2^21 points.
GridSpec size_grid(const ExperimentPlan& plan, const SoliPair& pair);

ExperimentRecord run_point(const ExperimentPlan& plan, long N, bool with_solver = false);
/// All carriers of the plan, evaluated on `jobs` threads, ordered by N.
std::vector<ExperimentRecord> run_sweep(const ExperimentPlan& plan, unsigned jobs = 1);

enum class RecordField { NormU, NormV, Diff0, DiffT, Tail };

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least-squares slope of log(value) against log(N). Requires >= 4 records
/// spanning >= 3 octaves with positive values.
ExponentFit fit_exponent(std::span<const ExperimentRecord> records, RecordField field, bool squared = false);
ExponentFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct Verdict {
    bool pass = false;
    bool bounded = false;         ///< (a)
    bool vanishing = false;       ///< (b)
    bool separated = false;       ///< (c)
    double norm_ratio = 0.0;
    std::optional<ExponentFit> diff0_fit;
    double diff_t_min_top = 0.0;
    double median_norm = 0.0;
    double predicted_exponent = 0.0;
    std::string exponent_match;   ///< "norm", "square" or "neither"
    std::vector<std::string> notes;
};

Verdict verify_lemma(std::span<const ExperimentRecord> records, const ExperimentPlan& plan);

/// Column schema v1, see README.
void write_records_csv(std::ostream& os, std::span<const ExperimentRecord> records,
                       const std::vector<std::string>& header_comments);
std::string verdict_json(const Verdict& verdict, const ExperimentPlan& plan, const std::string& config_hash);

} // namespace mkdv
