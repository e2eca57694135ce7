#include "mkdv/corpus.hpp"
#include "mkdv/probes.hpp"
#include "mkdv/soliton.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace mkdv;

namespace {

constexpr double kPi = std::numbers::pi;

Field plane_wave(const GridSpec& g, double xi, cplx amplitude = 1.0) {
    Field f(g);
    for (std::size_t j = 0; j < g.points(); ++j) f.samples()[j] = amplitude * std::polar(1.0, xi * g.x(j));
    return f;
}

Field scaled(Field f, double c) {
    f *= cplx(c, 0.0);
    return f;
}

// (2 pi)^{-1} int <sigma>^{2b} |eta^|^2, with eta^ written out from the two
// elementary integrals over the flat part and the sin^2 shoulders.
double cutoff_energy_oracle(double b, double Tw) {
    const double h = 0.1 * Tw, c = 0.5 * Tw, a = kPi / h;
    auto G = [&](double s) {
        const double v = (std::sin(s * c) + std::sin(s * (c - h))) * a * a / (s * (a * a - s * s));
        return std::pow(1.0 + s * s, b) * v * v;
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double panel = 0.25 * a;
    const double cut = 4000.0 * panel;
    double acc = 0.0;
    for (int k = 0; k < 4000; ++k) acc += GK::integrate(G, k * panel, (k + 1) * panel, 0, 0);
    acc += std::pow(a, 4.0) * std::pow(cut, 2.0 * b - 5.0) / (5.0 - 2.0 * b);
    return acc / kPi;
}

} // namespace

TEST_CASE("resonance identity") {
    const auto v = resonance_identity(1.0, 2.0, 3.0);
    CHECK(v.lhs == 180.0);
    CHECK(v.rhs == 180.0);
    const auto z = resonance_identity(2.5, -2.5, 7.0);
    CHECK(z.lhs == 0.0);
    CHECK(z.rhs == 0.0);
    const ResonanceSweep sweep = resonance_fuzz(100000, 3);
    CHECK(sweep.trials == 100000);
    CHECK(sweep.max_deviation <= 1e-12);
}

TEST_CASE("pure-mode bilinear ratio against direct integration") {
    const GridSpec g = dyadic_grid();
    const double L = g.length();
    const double Tw = 1e-3, eps = 0.01;
    const Field u = plane_wave(g, 192.0);
    const Field v = plane_wave(g, 0.5);
    // |U V| = 1 pointwise, so ||eta^2 U V||^2 = L int eta^4, and each factor's
    // X^{0,b} norm squared is L times the weighted cutoff energy.
    const double eta4 = Tw * (0.8 + 0.2 * 35.0 / 128.0);
    const double lhs = std::sqrt(L * eta4);
    CHECK(bilinear_space_time_l2(forward_transform(u), forward_transform(v), Tw) == doctest::Approx(lhs).epsilon(1e-12));
    const double oracle = 256.0 * lhs / (L * cutoff_energy_oracle(0.5 + eps, Tw));
    CHECK(bilinear_ratio_lp(u, v, 256, 1, eps, Tw) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("bilinear L2 of a random pair against adaptive time quadrature") {
    // Nyquist 16 keeps the Littlewood-Paley block off the sign-ambiguous Nyquist bin.
    const GridSpec g(2.0 * kPi * 16.0, 512);
    Rng rng(5);
    const SpectralField A = littlewood_paley(forward_transform(random_wavepackets(g, rng, PacketSpec{2, 5.0, 7.0, 3.0, 4.0})), 8);
    const SpectralField B = littlewood_paley(forward_transform(random_wavepackets(g, rng, PacketSpec{2, -1.0, 1.0, 3.0, 4.0})), 1);
    const double Tw = 0.02;
    auto integrand = [&](double t) {
        const Field a = inverse_transform(airy_propagator(A, t));
        const Field b = inverse_transform(airy_propagator(B, t));
        double e = 0.0;
        for (std::size_t j = 0; j < g.points(); ++j) e += std::norm(a[j] * b[j]);
        const double eta = temporal_cutoff(t, Tw);
        return eta * eta * eta * eta * e * g.dx();
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double h = 0.1 * Tw;
    const double I = GK::integrate(integrand, 0.0, h, 10, 1e-12) + GK::integrate(integrand, h, Tw - h, 10, 1e-12) +
                     GK::integrate(integrand, Tw - h, Tw, 10, 1e-12);
    CHECK(bilinear_space_time_l2(A, B, Tw) == doctest::Approx(std::sqrt(I)).epsilon(1e-10));
}

TEST_CASE("bilinear ratios: zero input, constraints, homogeneity") {
    const GridSpec g = cube_grid();
    Rng rng(21);
    const Field u = random_wavepackets(g, rng, PacketSpec{2, 14.5, 17.5, 1.5, 3.0});
    const Field v = random_wavepackets(g, rng, PacketSpec{2, -15.5, -12.5, 1.5, 3.0});
    CHECK(bilinear_ratio_cube(Field(g), v, 16, -14, 0.01) == 0.0);
    CHECK(bilinear_ratio_cube(u, Field(g), 16, -14, 0.01) == 0.0);
    CHECK_THROWS_AS(bilinear_ratio_cube(u, v, 16, -15, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(bilinear_ratio_cube(u, v, 5, 4, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(bilinear_ratio_cube(u, v, 16, -14, 0.0), std::invalid_argument);

    const double r = bilinear_ratio_cube(u, v, 16, -14, 0.01);
    CHECK(r > 0.0);
    CHECK(bilinear_ratio_cube(scaled(u, 3.0), scaled(v, 0.2), 16, -14, 0.01) == doctest::Approx(r).epsilon(1e-10));

    const GridSpec dg = dyadic_grid();
    const Field hi = random_wavepackets(dg, rng, PacketSpec{1, 40.0, 60.0, 5.0, 8.0});
    const Field lo = random_wavepackets(dg, rng, PacketSpec{1, -0.5, 0.5, 5.0, 8.0});
    CHECK(bilinear_ratio_lp(Field(dg), lo, 64, 1, 0.01) == 0.0);
    CHECK_THROWS_AS(bilinear_ratio_lp(hi, lo, 64, 32, 0.01), std::invalid_argument);
    const double d = bilinear_ratio_lp(hi, lo, 64, 1, 0.01);
    CHECK(d > 0.0);
    CHECK(bilinear_ratio_lp(scaled(hi, 1e-3), scaled(lo, 50.0), 64, 1, 0.01) == doctest::Approx(d).epsilon(1e-10));
}

TEST_CASE("cube anisotropy pair stays below one constant") {
    const GridSpec g = cube_grid();
    const double C = frozen_calibration().bilinear_cube;
    Rng rng(22);
    for (int trial = 0; trial < 3; ++trial) {
        const Field u = random_wavepackets(g, rng, PacketSpec{2, 14.5, 17.5, 1.5, 3.0});
        const Field v = random_wavepackets(g, rng, PacketSpec{2, 12.5, 15.5, 1.5, 3.0});
        Field w = v;
        // The mirrored piece: same profile around -14.
        const SpectralField V = forward_transform(v);
        std::vector<cplx> mirrored(V.size());
        for (std::size_t k = 0; k < V.size(); ++k) mirrored[g.storage_index(-g.signed_index(k))] = std::conj(V[k]);
        w = inverse_transform(SpectralField(g, mirrored));
        const double plus = bilinear_ratio_cube(u, v, 16, 14, 0.01);
        const double minus = bilinear_ratio_cube(u, w, 16, -14, 0.01);
        CHECK(plus <= C);
        CHECK(minus <= C);
    }
}

TEST_CASE("trilinear ratio basics") {
    const GridSpec g = trilinear_grid();
    Rng rng(23);
    const PacketSpec spec{2, -1.3, 1.3, 6.0, 8.0};
    const Field u1 = random_wavepackets(g, rng, spec);
    const Field u2 = random_wavepackets(g, rng, spec);
    const Field u3 = random_wavepackets(g, rng, spec);

    CHECK(trilinear_ratio(Field(g), u2, u3, 0.25, 4.0, 0.01, 1.0).ratio == 0.0);
    const TrilinearRatio r = trilinear_ratio(u1, u2, u3, 0.25, 4.0, 0.01, 1.0);
    CHECK(r.in_range);
    CHECK(r.ratio > 0.0);
    CHECK(r.time_points >= 2);
    const TrilinearRatio rs = trilinear_ratio(scaled(u1, 2.0), scaled(u2, 0.1), scaled(u3, 7.0), 0.25, 4.0, 0.01, 1.0);
    CHECK(rs.ratio == doctest::Approx(r.ratio).epsilon(1e-10));
    CHECK_FALSE(trilinear_ratio(u1, u2, u3, 0.125, 4.0, 0.01, 1.0).in_range);

    const Field wide = plane_wave(g, 6.0);  // above nyquist / 3
    CHECK_THROWS_AS(trilinear_ratio(wide, u2, u3, 0.25, 4.0, 0.01, 1.0), std::invalid_argument);
}

TEST_CASE("trilinear ratio of soliton profiles is stable under refinement") {
    const SolitonParams sp{1.0, 0.2};
    double prev = 0.0;
    // lambda L = 80 keeps the periodic wrap below the band-limit floor.
    for (std::size_t M : {2048u, 4096u}) {
        const GridSpec g(2.0 * kPi * 64.0, M);
        const Field u = soliton_field(sp, 0.0, g);
        const TrilinearRatio r = trilinear_ratio(u, u, u, 0.25, 4.0, 0.01, 1.0);
        CHECK(std::isfinite(r.ratio));
        CHECK(r.ratio > 0.0);
        if (prev > 0.0) CHECK(std::abs(r.ratio / prev - 1.0) <= 0.2);
        prev = r.ratio;
    }
}

TEST_CASE("same-sign resonant triple against the corpus median") {
    const ProbeCorpus corpus = make_corpus(kFrozenCorpusSeed, 40);
    std::vector<double> ratios = trilinear_ratios(corpus, 0.25, 4.0, 0.01, 1.0);
    std::sort(ratios.begin(), ratios.end());
    const double median = ratios[ratios.size() / 2];

    const GridSpec g = trilinear_grid();
    Rng rng(24);
    const PacketSpec same{1, 1.0, 1.3, 6.0, 8.0};
    const Field u1 = random_wavepackets(g, rng, same);
    const Field u2 = random_wavepackets(g, rng, same);
    const Field u3 = random_wavepackets(g, rng, same);
    const double r = trilinear_ratio(u1, u2, u3, 0.25, 4.0, 0.01, 1.0).ratio;
    CHECK(r <= 10.0 * median);
}

TEST_CASE("convolution inequality") {
    // Spikes at distance one: a_{n+1} b_n / <n>^eps.
    std::vector<double> a(6, 0.0), b(6, 0.0);
    a[5] = 2.0;
    b[4] = 3.0;
    CHECK(convolution_lhs(a, b, 0.1) == doctest::Approx(6.0 / std::pow(std::sqrt(17.0), 0.1)).epsilon(1e-14));
    CHECK(convolution_lhs(a, a, 0.1) == 0.0);
    CHECK(convolution_ratio(std::vector<double>(4, 0.0), b, 0.1, 2.0) == 0.0);
    CHECK_THROWS(convolution_lhs(std::vector<double>{-1.0}, b, 0.1));

    const double C = calibrate_convolution_constant(0.1, 2.0);
    CHECK_FALSE(convolution_inequality_check(a, b, 0.1, 2.0, C).violated);

    // Indicators of [1, K]: the ratio stays bounded as K grows.
    double at_1024 = 0.0;
    for (std::size_t K = 16; K <= 1024; K *= 4) {
        std::vector<double> ind(K + 1, 1.0);
        ind[0] = 0.0;
        const auto chk = convolution_inequality_check(ind, ind, 0.1, 2.0, C);
        CHECK_FALSE(chk.violated);
        at_1024 = chk.lhs / chk.bound;
    }
    CHECK(at_1024 < 1.0);

    Rng rng(25);
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto sa = random_sparse_sequence(rng, 512, static_cast<std::size_t>(rng.integer(1, 16)));
        const auto sb = random_sparse_sequence(rng, 512, static_cast<std::size_t>(rng.integer(1, 16)));
        if (convolution_inequality_check(sa, sb, 0.1, 2.0, C).violated) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("a-priori tracking") {
    const GridSpec g(128.0, 4096);
    SolverConfig cfg;
    cfg.dt = 5e-4;
    const AprioriSeries zero = apriori_tracking(Field(g), 0.125, 4.0, 0.05, cfg, 10);
    CHECK(zero.sup_ratio == 0.0);
    for (double n : zero.norms) CHECK(n == 0.0);

    const AprioriSeries sol = apriori_tracking(soliton_field(SolitonParams{2.0, 1.0}, 0.0, g), 0.125, 4.0, 0.2, cfg, 20);
    CHECK(sol.sup_ratio == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.times.size() == sol.norms.size());
    CHECK(sol.max_mass_drift <= 1e-9);
}

TEST_CASE("corpus is deterministic and the frozen one matches its calibration") {
    CHECK(make_corpus(9, 12).hash() == make_corpus(9, 12).hash());
    CHECK(make_corpus(9, 12).hash() != make_corpus(10, 12).hash());
    const ProbeCorpus small = make_corpus(9, 12);
    CHECK(small.cube.size() == 6);
    CHECK(small.dyadic.size() == 3);
    CHECK(small.trilinear.size() == 3);
    for (const auto& c : small.cube) {
        CHECK(std::abs(c.m + c.n) >= 2);
        CHECK(std::abs(c.m - c.n) >= 2);
    }
    CHECK(frozen_corpus().hash() == frozen_calibration().corpus_hash);
}

TEST_CASE("probe reports and JSON") {
    const ProbeCorpus corpus = make_corpus(9, 12);
    const ProbeReport cube = probe_bilinear_cube(corpus, 0.01);
    CHECK(cube.estimate == "bilinear_cube");
    CHECK(cube.corpus_size == 6);
    CHECK(cube.representative_based);
    REQUIRE(cube.calibration.has_value());
    CHECK(std::find(cube.flags.begin(), cube.flags.end(), "unfrozen-corpus") != cube.flags.end());
    const auto ratios = cube_ratios(corpus, 0.01);
    CHECK(cube.max_ratio == *std::max_element(ratios.begin(), ratios.end()));
    CHECK(cube_ratios(corpus, 0.01, 3) == ratios);

    const ProbeReport tri = probe_trilinear(corpus, 0.125, 4.0, 0.01, 1.0);
    CHECK_FALSE(tri.calibration.has_value());
    CHECK(std::find(tri.flags.begin(), tri.flags.end(), "outside-proposition-range") != tri.flags.end());

    const auto j = nlohmann::json::parse(to_json({cube, tri}, "cfg"));
    CHECK(j["config_hash"] == "cfg");
    REQUIRE(j["reports"].size() == 2);
    CHECK(j["reports"][0]["estimate"] == "bilinear_cube");
    CHECK(j["reports"][0]["within_calibration"].is_boolean());
    CHECK(j["reports"][1]["calibration"].is_null());
}
