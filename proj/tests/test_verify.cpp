#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "qwave/error.hpp"
#include "qwave/parallel.hpp"
#include "qwave/verify.hpp"

using namespace qwave;
using namespace qwave::testing;

namespace {

VerifyParams mixed(double r, double sigma, double b) {
    VerifyParams p;
    p.r = r;
    p.sigma = sigma;
    p.b = b;
    p.signs = {Sign::Plus, Sign::Minus};
    p.workers = 4;
    return p;
}

std::vector<Spectrum> low_members(const SpatialGrid& g, int count) {
    std::vector<Spectrum> out;
    for (int i = 0; i < count; ++i)
        out.push_back(generate(DataFamily::random({0, 0, 0}, 0.5, 100 + i), g, 1.0, 1.0));
    return out;
}

SpacetimeGrid low_grid() { return SpacetimeGrid::make(SpatialGrid::make(16, 12.0), 32, 4.0); }

}  // namespace

TEST_CASE("growth fit recovers an exact power law") {
    std::vector<double> l{2, 4, 8, 16}, q;
    for (double x : l) q.push_back(3.0 * std::pow(x, 0.7));
    auto fit = fit_growth(l, q);
    CHECK(fit.slope == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log2(3.0)).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0));
    CHECK(fit.ci_low <= fit.slope);
    CHECK(fit.ci_high >= fit.slope);

    q[1] *= 1.1;
    auto noisy = fit_growth(l, q);
    CHECK(noisy.ci_low < noisy.slope);
    CHECK(noisy.ci_high > noisy.slope);
    CHECK(noisy.r2 < 1.0);

    CHECK_THROWS_AS(fit_growth({2, 4}, {1, 1}), ParameterError);
    CHECK_THROWS_AS(fit_growth({2, 4, 8}, {1, 0, 1}), ParameterError);
    CHECK_THROWS_AS(fit_growth({2, 2, 2}, {1, 2, 3}), ParameterError);
}

TEST_CASE("parallel map keeps order and rethrows") {
    std::vector<int> x(50);
    std::iota(x.begin(), x.end(), 0);
    auto y = parallel_map(x, [](int v) { return v * v; }, 8);
    for (int i = 0; i < 50; ++i) CHECK(y[i] == i * i);
    CHECK_THROWS_AS(parallel_map(x, [](int v) { return v == 17 ? throw ParameterError("x") : v; }, 4), ParameterError);
}

TEST_CASE("report summary") {
    EstimateReport rep;
    rep.samples = {{2, 1, 1, 1.0}, {4, 3, 1, 3.0}, {8, 2, 1, 2.0}};
    rep.summarize();
    CHECK_FALSE(rep.skipped);
    CHECK(rep.max_ratio == 3.0);
    CHECK(rep.min_ratio == 1.0);
    CHECK(rep.median_ratio == 2.0);
    CHECK(rep.spread == 3.0);
    rep.samples.push_back({16, 0, 0, 0});
    rep.summarize();
    CHECK(rep.skipped);
}

TEST_CASE("zero data are skipped") {
    VerifyParams p;
    p.u.amplitude = 0.0;
    auto rep = check_elliptic_lemma(p);
    CHECK(rep.skipped);
    CHECK_FALSE(rep.passed);
    auto st = check_strichartz_l2(0.55, 0.55, p);
    CHECK(st.skipped);
    auto lf = check_lowfreq_young(p, {Spectrum(low_grid().spatial, Representation::Frequency),
                                      Spectrum(low_grid().spatial, Representation::Frequency)},
                                  low_grid());
    CHECK(lf.skipped);
}

TEST_CASE("preconditions") {
    VerifyParams p;
    p.u = DataFamily::gaussian({3.0, 0, 0}, 0.5);
    CHECK_THROWS_WITH_AS(check_elliptic_lemma(p), doctest::Contains("headroom"), ParameterError);
    p = VerifyParams{};
    p.sigma = 0.9;
    CHECK_THROWS_AS(check_elliptic_lemma(p), ParameterError);
    CHECK_THROWS_AS(check_key_estimate(p), ParameterError);
    p.sigma = 1.25;
    p.b = 0.5;
    CHECK_THROWS_AS(check_key_estimate(p), ParameterError);
    p = VerifyParams{};
    CHECK_THROWS_AS(sharpness_probe(p), ParameterError);
    p.r = 1.0;
    p.sigma = 2.5;
    CHECK_THROWS_AS(check_hyperbolic_lemmas(p), ParameterError);
    p = VerifyParams{};
    p.sigma = 0.5;
    p.lambdas = {2, 4};
    CHECK_THROWS_AS(sharpness_probe(p), ParameterError);
    CHECK_THROWS_AS(check_strichartz_l2(0.4, 0.4, VerifyParams{}), ParameterError);
    CHECK_THROWS_AS(check_strichartz_l2(-0.1, 1.5, VerifyParams{}), ParameterError);
}

TEST_CASE("elliptic lemma ratios stay bounded and shrink with sigma") {
    VerifyParams p;
    p.workers = 4;
    auto rep = check_elliptic_lemma(p);
    CHECK(rep.passed);
    CHECK(rep.spread <= kBoundedSpread);
    REQUIRE(rep.growth);
    CHECK(rep.growth->ci_low <= rep.growth->ci_high);

    p.sigma = 2.0;
    auto hi = check_elliptic_lemma(p);
    // well above the threshold the ratio decays with lambda, so only the upper side is compared
    CHECK(hi.max_ratio <= rep.max_ratio);
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
        CHECK(hi.samples[i].ratio <= rep.samples[i].ratio);
        CHECK(hi.samples[i].rhs >= rep.samples[i].rhs);
    }
}

TEST_CASE("hyperbolic lemmas") {
    auto p = mixed(2.0, 1.25, 0.55);
    auto h = check_hyperbolic_lemmas(p);
    CHECK(h.partition_residual < 1e-10);
    CHECK(h.triangle_ok);
    CHECK(h.p_region.passed);
    CHECK(h.q_region.passed);
    for (const auto& s : h.q_region.samples) CHECK(s.ratio >= 0.0);
}

TEST_CASE("parallel data put the output near zero in the Q region") {
    VerifyParams p;
    p.u = DataFamily::gaussian({1.2, 0, 0}, 0.4);
    p.v = DataFamily::gaussian({-1.2, 0, 0}, 0.4);
    CHECK(q_region_share_near_zero(p, 4.0) > 0.5);
}

TEST_CASE("key estimate, both forms") {
    SUBCASE("r = 2, sigma = 1.25, mixed signs") {
        auto k = check_key_estimate(mixed(2.0, 1.25, 0.55));
        CHECK(k.free_form.passed);
        CHECK(k.full_form.passed);
    }
    SUBCASE("r = 1.5, sigma = 1.4, b = 0.72") {
        auto p = mixed(1.5, 1.4, 0.72);
        p.lambdas = {2, 4, 8};
        auto k = check_key_estimate(p);
        CHECK(k.free_form.passed);
        CHECK(k.full_form.passed);
    }
}

TEST_CASE("single-mode data give a finite ratio") {
    VerifyParams p = mixed(2.0, 1.25, 0.55);
    // a narrow bump puts essentially all mass on one lattice point
    p.u = DataFamily::gaussian({1.0, 0, 0}, 0.02);
    p.v = DataFamily::gaussian({0, 1.0, 0}, 0.02);
    p.lambdas = {2, 4, 8};
    auto k = check_key_estimate(p);
    for (const auto* rep : {&k.free_form, &k.full_form}) {
        CHECK_FALSE(rep->skipped);
        for (const auto& s : rep->samples) {
            CHECK(std::isfinite(s.ratio));
            CHECK(s.ratio > 0.0);
        }
    }
}

TEST_CASE("sharpness probe grows below the threshold, control does not") {
    VerifyParams p;
    p.workers = 4;
    p.sigma = 0.5;
    auto probe = sharpness_probe(p);
    REQUIRE(probe.growth);
    CHECK(probe.growth->slope >= 0.4);
    CHECK(probe.growth->r2 > kGrowthR2);
    CHECK(probe.passed);

    p.sigma = 1.25;
    auto control = growth_run(p, "control");
    REQUIRE(control.growth);
    CHECK(control.growth->slope <= 0.1);
}

TEST_CASE("low-frequency product bound") {
    const auto g = low_grid();
    VerifyParams p = mixed(2.0, 1.25, 0.55);
    auto rep = check_lowfreq_young(p, low_members(g.spatial, 8), g);
    CHECK(rep.passed);
    CHECK(rep.spread <= 2.0);

    p = mixed(1.5, 1.4, 0.72);
    CHECK(check_lowfreq_young(p, low_members(g.spatial, 8), g).passed);

    Spectrum one(g.spatial, Representation::Frequency);
    one.data[g.spatial.index_of_modes(1, 0, 0)] = 1.0;
    Spectrum two(g.spatial, Representation::Frequency);
    two.data[g.spatial.index_of_modes(0, 1, 0)] = 1.0;
    auto single = check_lowfreq_young(p, {one, two}, g);
    CHECK_FALSE(single.skipped);
    for (const auto& s : single.samples) CHECK(std::isfinite(s.ratio));

    Spectrum far(g.spatial, Representation::Frequency);
    far.data[g.spatial.index_of_modes(5, 0, 0)] = 1.0;  // |xi| = 5 pi / 12 > 1
    CHECK_THROWS_AS(check_lowfreq_young(p, {one, far}, g), ParameterError);
}

TEST_CASE("strichartz input") {
    VerifyParams p;
    p.workers = 4;
    auto rep = check_strichartz_l2(0.55, 0.55, p);
    CHECK(rep.passed);

    auto probe = check_strichartz_l2(0.4, 0.4, p, true);
    REQUIRE(probe.growth);
    CHECK(std::abs(probe.growth->slope - 0.2) <= 0.1);
    CHECK(probe.growth->r2 > kGrowthR2);
    CHECK(probe.growth->ci_low > 0.0);
}

TEST_CASE("far-region mass scales with the homogeneity degree") {
    const double r = 2.0, s1 = 1.0, s2 = 1.0;
    std::vector<double> l, m;
    for (double k : {1.0, 2.0, 4.0}) {
        l.push_back(k);
        m.push_back(far_region_mass(k, 0.3, r, s1, s2));
    }
    auto fit = fit_growth(l, m);
    CHECK(fit.slope == doctest::Approx(2.0 - (s1 + s2) * r).epsilon(0.05));
    CHECK_THROWS_AS(far_region_mass(0.0, 0.3, r, s1, s2), ParameterError);
    CHECK_THROWS_AS(far_region_mass(1.0, 1.0, r, s1, s2), ParameterError);
}

TEST_CASE("pipelines are deterministic") {
    VerifyParams p = mixed(2.0, 1.25, 0.55);
    p.u = DataFamily::random({1, 0, 0}, 0.5, 3);
    p.lambdas = {2, 4, 8};
    p.workers = 1;
    auto a = check_key_estimate(p);
    p.workers = 3;
    auto b = check_key_estimate(p);
    for (std::size_t i = 0; i < a.free_form.samples.size(); ++i) {
        CHECK(a.free_form.samples[i].lhs == b.free_form.samples[i].lhs);
        CHECK(a.free_form.samples[i].rhs == b.free_form.samples[i].rhs);
        CHECK(a.full_form.samples[i].lhs == b.full_form.samples[i].lhs);
        CHECK(a.full_form.samples[i].rhs == b.full_form.samples[i].rhs);
    }
}

TEST_CASE("exchanging the inputs leaves the free-form side unchanged") {
    VerifyParams p;
    p.lambdas = {2, 4, 8};
    p.u = DataFamily::knapp({1, 0.3, 0}, 0.3, {2, 1, 1});
    p.v = DataFamily::gaussian({0, 1, 0}, 0.5);
    for (auto signs : {SignPair{Sign::Plus, Sign::Plus}, SignPair{Sign::Plus, Sign::Minus}}) {
        p.signs = signs;
        auto a = growth_run(p, "a");
        VerifyParams q = p;
        std::swap(q.u, q.v);
        q.signs = {signs.v, signs.u};
        auto b = growth_run(q, "b");
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            CHECK(std::abs(a.samples[i].lhs - b.samples[i].lhs) <= 1e-10 * a.samples[i].lhs);
    }
}

TEST_CASE("data norms grow with sigma") {
    VerifyParams p;
    p.lambdas = {2, 4, 8};
    std::vector<double> prev;
    for (double sigma : {0.2, 0.6, 1.0, 1.5}) {
        p.sigma = sigma;
        auto rep = growth_run(p, "rhs");
        if (!prev.empty())
            for (std::size_t i = 0; i < prev.size(); ++i) CHECK(rep.samples[i].rhs >= prev[i]);
        prev.clear();
        for (const auto& s : rep.samples) prev.push_back(s.rhs);
    }
}

TEST_CASE("surface cross-check: lattice product against the level-set integral") {
    SurfaceCheckConfig cfg;
    auto res = surface_cross_check(cfg);
    REQUIRE(res.probes.size() == 3);
    for (const auto& p : res.probes)
        MESSAGE("|xi| " << norm3(p.xi) << ", tau " << p.tau << ": direct " << p.direct << ", surface " << p.surface);
    CHECK(res.passed);
    CHECK(res.max_rel_error <= 0.05);

    // direct value at the first probe from the convolution sum over eta
    const auto& g = cfg.grid;
    const auto& sp = g.spatial;
    const auto& p = res.probes[0];
    auto u = [&](const Vec3& k) { return std::exp(-0.5 * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) / (cfg.width * cfg.width)); };
    double acc = 0.0;
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const Vec3 eta = sp.frequency(i);
        const Vec3 rest{p.xi[0] - eta[0], p.xi[1] - eta[1], p.xi[2] - eta[2]};
        const double omega = norm3(eta) + norm3(rest);
        double wt = 0.0;
        for (int j = 0; j < g.m; ++j) wt += cfg.window(g.time(j)) * std::cos((omega - p.tau) * g.time(j)) * g.dt();
        acc += u(eta) * u(rest) * wt;
    }
    acc *= std::pow(sp.dxi() / (2.0 * M_PI), 3);
    CHECK(p.direct == doctest::Approx(acc).epsilon(1e-9));

    cfg.probes = {{{0, 0, 0}, 2}};
    CHECK_THROWS_AS(surface_cross_check(cfg), ParameterError);
    cfg.probes = {{{1, 0, 0}, g.m}};
    CHECK_THROWS_AS(surface_cross_check(cfg), ParameterError);
}
