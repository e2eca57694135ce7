#pragma once

#include "mkdv/grid.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace mkdv {

/// Portable random source. std::mt19937_64 has a specified output sequence;
/// the conversions to doubles below are fixed here rather than left to the
/// implementation-defined standard distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    long integer(long lo, long hi);  ///< uniform on [lo, hi]
    double normal();                 ///< Box-Muller, standard normal
    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Sum of `count` Gaussian wave packets c e^{i k x} exp(-(x - x0)^2 / (2 w^2))
/// with carriers k drawn from [band_lo, band_hi], widths w from [w_lo, w_hi]
/// and centres within L/16 of the origin.
struct PacketSpec {
    int count = 3;
    double band_lo = -4.0;
    double band_hi = 4.0;
    double w_lo = 2.0;
    double w_hi = 4.0;
};

Field random_wavepackets(const GridSpec& grid, Rng& rng, const PacketSpec& spec);

/// Field scaled so that its M^{2,p}_s norm equals `target`.
Field random_field_with_norm(const GridSpec& grid, Rng& rng, const PacketSpec& spec, double s, double p,
                             double target);

struct CubeCase {
    Field u;
    Field v;
    long m;
    long n;
};

struct DyadicCase {
    Field u;
    Field v;
    long N1;
    long N2;
};

struct TrilinearCase {
    Field u1;
    Field u2;
    Field u3;
    bool same_sign;  ///< all carriers positive, the resonant configuration
};

/// Regression corpus for the estimate probes.
struct ProbeCorpus {
    std::uint64_t seed = 0;
    std::vector<CubeCase> cube;
    std::vector<DyadicCase> dyadic;
    std::vector<TrilinearCase> trilinear;
    std::size_t size() const noexcept { return cube.size() + dyadic.size() + trilinear.size(); }
    /// FNV-1a over grid parameters, integer labels and sample bits.
    std::uint64_t hash() const;
};

inline constexpr std::uint64_t kFrozenCorpusSeed = 0x6d6b6476'00000200ULL;
inline constexpr std::size_t kFrozenCorpusSize = 200;

/// Corpus of `size` elements split 2:1:1 between cube, dyadic and trilinear cases.
ProbeCorpus make_corpus(std::uint64_t seed, std::size_t size);
/// make_corpus(kFrozenCorpusSeed, kFrozenCorpusSize).
ProbeCorpus frozen_corpus();

/// Grids the corpus cases live on.
GridSpec cube_grid();
GridSpec dyadic_grid();
GridSpec trilinear_grid();

/// Empirical constants measured once on the frozen corpus, tied to its hash.
struct Calibration {
    std::uint64_t corpus_hash;
    double bilinear_cube;
    double bilinear_dyadic;
    double trilinear;
    double epsilon;        ///< epsilon used by all three ratios
    double trilinear_s;
    double trilinear_p;
    double trilinear_T;
};

const Calibration& frozen_calibration();

} // namespace mkdv
