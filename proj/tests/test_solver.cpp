#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "qwave/error.hpp"
#include "qwave/families.hpp"
#include "qwave/propagator.hpp"
#include "qwave/solver.hpp"

using namespace qwave;
using namespace qwave::testing;

namespace {

constexpr cplx kI(0.0, 1.0);

SolveConfig config(int m = 64) {
    SolveConfig cfg;
    cfg.grid = SpacetimeGrid::make(SpatialGrid::make(16, 2.0 * M_PI), m, 1.0);
    return cfg;
}

double box_volume(const SpatialGrid& g) { return std::pow(2.0 * g.half_length, 3); }

Spectrum bump(const SpatialGrid& g, const Vec3& xi0, double width, double amplitude, std::uint64_t seed = 0) {
    auto f = seed ? DataFamily::random(xi0, width, seed) : DataFamily::gaussian(xi0, width);
    auto s = generate(f, g, 1.0, 2.5);
    // amplitude is the peak of the profile in space
    const double peak = max_abs(inverse_transform(s).data);
    for (auto& v : s.data) v *= amplitude / peak;
    return s;
}

FirstOrderData small_data(const SpatialGrid& g, double amplitude, std::uint64_t seed = 0) {
    return to_first_order({bump(g, {1, 0, 0}, 0.7, amplitude, seed), bump(g, {0, 1, 0}, 0.7, 0.5 * amplitude, seed + 1)});
}

// constant-in-time field holding the given spectrum on every slice
SpacetimeField constant_field(const SpacetimeGrid& g, const Spectrum& s) {
    SpacetimeField f(g, Representation::SpatialFrequency);
    for (int n = 0; n < g.m; ++n) std::copy(s.data.begin(), s.data.end(), f.slice(n));
    return f;
}

// exact solution of the linear wave equation
Spectrum wave_flow(const Spectrum& u0, const Spectrum& u1, double t) {
    Spectrum out = u0;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const double k = norm3(u0.grid.frequency(i));
        const double sinc = k > 0 ? std::sin(t * k) / k : t;
        out.data[i] = std::cos(t * k) * u0.data[i] + sinc * u1.data[i];
    }
    return out;
}

double sup_error_vs_wave(const SolveResult& res, const CauchyData& d, const SolveConfig& cfg) {
    auto us = spatial_forward(res.u);
    double err = 0.0, ref = 0.0;
    for (int n = 0; n < cfg.grid.m; ++n) {
        const double t = cfg.grid.time(n);
        if (std::abs(t) > cfg.delta + 1e-12) continue;
        auto w = wave_flow(d.u0, d.u1, t);
        for (std::size_t i = 0; i < w.data.size(); ++i) {
            err = std::max(err, std::abs(us.slice(n)[i] - w.data[i]));
            ref = std::max(ref, std::abs(w.data[i]));
        }
    }
    return err / ref;
}

struct Manufactured {
    FirstOrderData data;
    NonlinearitySpec ns;
    SpacetimeField exact;  // SpatialFrequency
};

// u = A cos(omega t) e^{i xi.x} solves box u = d_1(u^2) + F for the F built here
Manufactured manufactured(const SolveConfig& cfg) {
    const auto& g = cfg.grid.spatial;
    const double A = 0.1, omega = 1.3;
    const std::size_t a = g.index_of_modes(2, 1, 0), a2 = g.index_of_modes(4, 2, 0);
    const Vec3 xi = g.frequency(a);
    const double k2 = xi[0] * xi[0] + xi[1] * xi[1];
    const double vol = box_volume(g);
    Manufactured m;
    SpacetimeField src(cfg.grid, Representation::SpatialFrequency);
    m.exact = SpacetimeField(cfg.grid, Representation::SpatialFrequency);
    for (int n = 0; n < cfg.grid.m; ++n) {
        const double c = std::cos(omega * cfg.grid.time(n));
        m.exact.slice(n)[a] = A * c * vol;
        src.slice(n)[a] = (k2 - omega * omega) * A * c * vol;
        src.slice(n)[a2] = -kI * 2.0 * xi[0] * A * A * c * c * vol;
    }
    Spectrum u0(g, Representation::Frequency), u1(g, Representation::Frequency);
    u0.data[a] = A * vol;
    m.data = to_first_order({u0, u1});
    m.ns.source = std::make_shared<const SpacetimeField>(spatial_inverse(src));
    return m;
}

}  // namespace

TEST_CASE("first-order data") {
    const auto g = config().grid.spatial;
    auto u0 = bump(g, {1, 0, 0}, 0.7, 1.0, 3);
    auto u1 = bump(g, {0, 1, 0}, 0.7, 1.0, 4);
    Spectrum zero(g, Representation::Frequency);

    auto a = to_first_order({u0, zero});
    CHECK(a.plus.data == u0.data);
    CHECK(a.minus.data == u0.data);

    auto b = to_first_order({zero, u1});
    for (std::size_t i = 0; i < u1.data.size(); ++i) {
        const cplx v = kI * u1.data[i] / bracket(norm3(g.frequency(i)));
        CHECK(std::abs(b.plus.data[i] - v) <= 1e-15 * std::abs(v));
        CHECK(std::abs(b.minus.data[i] + v) <= 1e-15 * std::abs(v));
    }

    auto back = from_first_order(to_first_order({u0, u1}));
    CHECK(max_abs_diff(back.u0.data, u0.data) <= 1e-12 * max_abs(u0.data));
    CHECK(max_abs_diff(back.u1.data, u1.data) <= 1e-12 * max_abs(u1.data));

    Spectrum other(SpatialGrid::make(8, 1.0), Representation::Frequency);
    CHECK_THROWS_AS(to_first_order({u0, other}), ContractError);
}

TEST_CASE("derivative names") {
    for (auto d : {Derivative::T, Derivative::X1, Derivative::X2, Derivative::X3})
        CHECK(parse_derivative(to_string(d)) == d);
    CHECK_THROWS_AS(parse_derivative("y"), ParameterError);
    NonlinearitySpec ns;
    ns.k = 3;
    CHECK_THROWS_AS(validate(ns), ParameterError);
}

TEST_CASE("config checks") {
    auto cfg = config();
    CHECK_NOTHROW(cfg.validate());
    cfg.delta = 0.6;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = config();
    cfg.b = 0.4;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = config();
    cfg.window = WindowSpec::canonical(2.0);
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("dealiasing keeps only the inner two thirds") {
    const auto cfg = config(4);
    const auto& g = cfg.grid.spatial;
    SpacetimeField f(cfg.grid, Representation::SpatialFrequency);
    for (auto& v : f.data) v = 1.0;
    auto d = dealias(f);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto m = g.modes(i);
        const bool kept = std::abs(m[0]) <= 5 && std::abs(m[1]) <= 5 && std::abs(m[2]) <= 5;
        CHECK(d.slice(2)[i] == (kept ? cplx(1) : cplx(0)));
    }
}

TEST_CASE("right side") {
    const auto cfg = config(4);
    const auto& g = cfg.grid.spatial;
    const double vol = box_volume(g);

    SUBCASE("zero in, zero out") {
        SpacetimeField z(cfg.grid, Representation::SpatialFrequency);
        auto r = rhs_eval({z, z}, {});
        CHECK(max_abs(r.plus.data) == 0.0);
        CHECK(max_abs(r.minus.data) == 0.0);
    }

    SUBCASE("antisymmetry in configuration and spectral form") {
        auto f = small_data(g, 1.0, 7);
        FieldPair u{free_spacetime(f.plus, cfg.grid, {EvolutionKind::Bessel, Sign::Plus}),
                    free_spacetime(f.minus, cfg.grid, {EvolutionKind::Bessel, Sign::Minus})};
        for (auto k : {1, 2}) {
            NonlinearitySpec ns;
            ns.k = k;
            auto r = rhs_eval(u, ns);
            CHECK(r.plus.rep == Representation::Configuration);
            for (std::size_t i = 0; i < r.plus.data.size(); ++i) CHECK(r.plus.data[i] == -r.minus.data[i]);
        }
    }

    // two modes a, b with spectral weights ca, cb; the products land on 2a, a + b, 2b
    const std::array<int, 3> ma{1, 2, 0}, mb{-2, 1, 1};
    const std::size_t ia = g.index_of_modes(ma[0], ma[1], ma[2]), ib = g.index_of_modes(mb[0], mb[1], mb[2]);
    const cplx ca(0.7, 0.2), cb(-0.3, 0.5);
    Spectrum w(g, Representation::Frequency);
    w.data[ia] = ca;
    w.data[ib] = cb;
    auto mode = [&](std::array<int, 3> m) { return g.index_of_modes(m[0], m[1], m[2]); };
    auto sum = [](std::array<int, 3> x, std::array<int, 3> y) {
        return std::array<int, 3>{x[0] + y[0], x[1] + y[1], x[2] + y[2]};
    };
    // hand convolution of (alpha_a e_a + alpha_b e_b)^2 in spectral units
    auto square = [&](cplx alpha_a, cplx alpha_b) {
        std::vector<std::pair<std::size_t, cplx>> out{{mode(sum(ma, ma)), alpha_a * alpha_a / vol},
                                                      {mode(sum(ma, mb)), 2.0 * alpha_a * alpha_b / vol},
                                                      {mode(sum(mb, mb)), alpha_b * alpha_b / vol}};
        return out;
    };

    SUBCASE("B1 with d_x1 against the hand convolution") {
        const SpacetimeField u = constant_field(cfg.grid, w);
        NonlinearitySpec ns;
        auto B = quadratic_term({u, u}, ns);
        Spectrum expect(g, Representation::Frequency);
        for (auto [i, v] : square(ca, cb)) expect.data[i] += kI * g.frequency(i)[0] * v;
        for (int n = 0; n < cfg.grid.m; ++n)
            for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(B.slice(n)[i] - expect.data[i]) < 1e-12);

        auto r = rhs_eval({u, u}, ns);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const cplx h = (expect.data[i] + w.data[i]) / bracket(norm3(g.frequency(i)));
            CHECK(std::abs(r.plus.slice(1)[i] + h) < 1e-12);
            CHECK(std::abs(r.minus.slice(1)[i] - h) < 1e-12);
        }
    }

    SUBCASE("B2 with d_t uses u_t = J (u+ - u-) / 2i") {
        // u+ = w, u- = -w: u = 0 and u_t = -i J w
        const SpacetimeField up = constant_field(cfg.grid, w);
        const SpacetimeField um = cplx(-1.0) * up;
        NonlinearitySpec ns;
        ns.k = 2;
        ns.derivative = Derivative::T;
        auto B = quadratic_term({up, um}, ns);
        const cplx da = -kI * bracket(norm3(g.frequency(ia))) * ca, db = -kI * bracket(norm3(g.frequency(ib))) * cb;
        Spectrum expect(g, Representation::Frequency);
        for (auto [i, v] : square(da, db)) expect.data[i] += v;
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(B.slice(0)[i] - expect.data[i]) < 1e-12);

        // B1 with d_t of u^2 vanishes since u = 0
        ns.k = 1;
        CHECK(max_abs(quadratic_term({up, um}, ns).data) < 1e-14);
    }

    SUBCASE("B2 with d_x2") {
        const SpacetimeField u = constant_field(cfg.grid, w);
        NonlinearitySpec ns;
        ns.k = 2;
        ns.derivative = Derivative::X2;
        auto B = quadratic_term({u, u}, ns);
        const cplx da = kI * g.frequency(ia)[1] * ca, db = kI * g.frequency(ib)[1] * cb;
        Spectrum expect(g, Representation::Frequency);
        for (auto [i, v] : square(da, db)) expect.data[i] += v;
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(B.slice(3)[i] - expect.data[i]) < 1e-12);
    }
}

TEST_CASE("zero data give the zero solution") {
    const auto cfg = config();
    Spectrum z(cfg.grid.spatial, Representation::Frequency);
    auto res = solve_local({z, z}, {}, cfg);
    CHECK(res.ok);
    CHECK(res.picard.converged);
    CHECK(max_abs(res.u.data) == 0.0);
    CHECK(res.residual.absolute == 0.0);
    for (const auto& s : res.picard.steps) CHECK(s.distance == 0.0);
}

TEST_CASE("free iterates keep their data norm") {
    const auto cfg = config();
    auto f = small_data(cfg.grid.spatial, 1.0, 5);
    auto free = free_spacetime_spectral(f.plus, cfg.grid, {EvolutionKind::Bessel, Sign::Plus});
    const double n0 = sobolev_hat_norm(f.plus, cfg.r, cfg.s);
    for (int n = 0; n < cfg.grid.m; ++n) {
        Spectrum s(cfg.grid.spatial, Representation::Frequency);
        std::copy(free.slice(n), free.slice(n) + s.data.size(), s.data.begin());
        CHECK(std::abs(sobolev_hat_norm(s, cfg.r, cfg.s) - n0) <= 1e-10 * n0);
    }
}

TEST_CASE("linear part converges to the exact wave flow") {
    NonlinearitySpec ns;
    ns.quadratic = false;
    std::vector<double> errs;
    for (int m : {64, 128}) {
        auto cfg = config(m);
        const auto& g = cfg.grid.spatial;
        CauchyData d{bump(g, {1, 0, 0}, 0.7, 1.0), bump(g, {0, 0.5, 0}, 0.7, 0.5)};
        auto res = solve_local(to_first_order(d), ns, cfg);
        REQUIRE(res.ok);
        errs.push_back(sup_error_vs_wave(res, d, cfg));
        MESSAGE("M = " << m << ": relative error " << errs.back() << " after " << res.picard.iterations << " steps");
    }
    CHECK(errs[0] < 1e-3);
    CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("small data contract") {
    const auto cfg = config();
    NonlinearitySpec ns;
    auto res = picard_iterate(small_data(cfg.grid.spatial, 1e-2), ns, cfg);
    CHECK(res.converged);
    REQUIRE(res.steps.size() > 2);
    for (std::size_t n = 1; n < res.steps.size(); ++n) CHECK(res.steps[n].rho < 0.5);
    for (const auto& s : res.steps) CHECK(s.restricted_distance >= 0.0);

    // contraction implies a Cauchy sequence: the tail sum is finite and small
    double tail = 0.0;
    for (std::size_t n = 1; n < res.steps.size(); ++n) tail += res.steps[n].distance;
    CHECK(tail < 2.0 * res.steps[0].distance);
}

TEST_CASE("the limit does not depend on the budget") {
    const auto cfg = config();
    NonlinearitySpec ns;
    auto f = small_data(cfg.grid.spatial, 1e-2);
    auto a = solve_local(f, ns, cfg);
    REQUIRE(a.ok);
    SolveConfig more = cfg;
    more.max_iterations *= 2;
    auto b = solve_local(f, ns, more);
    CHECK(rel_diff(a.u.data, b.u.data) < cfg.tolerance);
    CHECK(a.max_jump < 0.2);
}

TEST_CASE("manufactured solution: residual and error fall with the time step") {
    std::vector<double> res_rel, err;
    for (int m : {64, 128}) {
        auto cfg = config(m);
        auto man = manufactured(cfg);
        auto res = solve_local(man.data, man.ns, cfg);
        REQUIRE(res.ok);
        res_rel.push_back(res.residual.relative);
        auto us = spatial_forward(res.u);
        const double ref = max_abs(man.exact.data);
        double e = 0.0;
        for (int n = 0; n < cfg.grid.m; ++n)
            if (std::abs(cfg.grid.time(n)) <= cfg.delta + 1e-12)
                for (std::size_t i = 0; i < us.slice_size(); ++i)
                    e = std::max(e, std::abs(us.slice(n)[i] - man.exact.slice(n)[i]) / ref);
        err.push_back(e);
        MESSAGE("M = " << m << ": residual " << res.residual.relative << ", error " << e);
    }
    CHECK(res_rel[0] / res_rel[1] == doctest::Approx(4.0).epsilon(0.25));
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("reconstruction identity") {
    // d_t u from the lattice against J (u+ - u-) / 2i
    std::vector<double> errs;
    for (int m : {64, 128}) {
        auto cfg = config(m);
        auto res = picard_iterate(small_data(cfg.grid.spatial, 1e-2), {}, cfg);
        REQUIRE(res.converged);
        auto w = reconstruct(res.u);
        const double dt = cfg.grid.dt();
        double e = 0.0;
        for (int n = 1; n + 1 < cfg.grid.m; ++n) {
            if (std::abs(cfg.grid.time(n)) > cfg.delta - dt + 1e-12) continue;
            for (std::size_t i = 0; i < w.plus.slice_size(); ++i) {
                const cplx fd = (w.plus.slice(n + 1)[i] - w.plus.slice(n - 1)[i]) / (2.0 * dt);
                e = std::max(e, std::abs(fd - w.minus.slice(n)[i]));
            }
        }
        errs.push_back(e / max_abs(w.minus.data));
    }
    CHECK(errs[0] < 1e-2);
    CHECK(errs[0] / errs[1] > 3.0);
}

TEST_CASE("k = 2 with d_t: small data contract and the Z diagnostic is finite") {
    auto cfg = config();
    cfg.s = 2.5;
    NonlinearitySpec ns;
    ns.k = 2;
    ns.derivative = Derivative::T;
    auto res = solve_local(small_data(cfg.grid.spatial, 1e-2), ns, cfg);
    CHECK(res.ok);
    for (std::size_t n = 1; n < res.picard.steps.size(); ++n) CHECK(res.picard.steps[n].rho < 1.0);
    REQUIRE(res.z_norm);
    CHECK(std::isfinite(*res.z_norm));
    CHECK(*res.z_norm > 0.0);
}

TEST_CASE("large data do not contract and are reported") {
    auto cfg = config();
    cfg.delta = 0.5;
    auto res = solve_local(small_data(cfg.grid.spatial, 256.0), {}, cfg);
    CHECK_FALSE(res.ok);
    CHECK(res.picard.diverged);
    CHECK(res.failure.find("contraction") != std::string::npos);
}

TEST_CASE("delta shrinks as the data grow") {
    const auto cfg = config();
    NonlinearitySpec ns;
    // a large c starts every search at the flat core, so only the contraction test halves delta
    double prev = INFINITY;
    for (double amp : {4.0, 16.0, 64.0}) {
        auto f = small_data(cfg.grid.spatial, amp);
        auto sel = select_delta(f, ns, cfg, 0.5, 1e9);
        REQUIRE(sel.found);
        CHECK(sel.rho1 < 0.5);
        CHECK(sel.delta < prev);
        MESSAGE("amplitude " << amp << ": delta " << sel.delta << ", rho1 " << sel.rho1);
        prev = sel.delta;
    }
    auto sel = select_delta(small_data(cfg.grid.spatial, 1e-2), ns, cfg);
    CHECK(sel.found);
    CHECK(sel.attempts == 1);
}

TEST_CASE("flow map is Lipschitz on small data") {
    const auto cfg = config();
    const auto& g = cfg.grid.spatial;
    NonlinearitySpec ns;

    auto f = small_data(g, 1e-2, 11);
    auto same = flow_lipschitz_probe({{f, f}}, ns, cfg);
    REQUIRE(same.samples.size() == 1);
    CHECK(same.samples[0].skipped);

    auto perturbed = [&](double eps) {
        std::vector<DataPair> pairs;
        for (int i = 0; i < 8; ++i) {
            auto a = small_data(g, 1e-2, 20 + 2 * i);
            auto h = small_data(g, 1e-2, 21 + 2 * i);
            FirstOrderData b{a.plus + cplx(eps) * h.plus, a.minus + cplx(eps) * h.minus};
            pairs.emplace_back(a, b);
        }
        return flow_lipschitz_probe(pairs, ns, cfg, 4);
    };
    auto coarse = perturbed(0.1), fine = perturbed(0.05);
    CHECK(coarse.excluded == 0);
    CHECK(std::isfinite(coarse.max_ratio));
    CHECK(coarse.max_ratio > 0.0);
    CHECK(fine.max_ratio == doctest::Approx(coarse.max_ratio).epsilon(0.3));
}
