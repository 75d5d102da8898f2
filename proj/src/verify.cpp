#include "qwave/verify.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>

#include "qwave/dyadic.hpp"
#include "qwave/error.hpp"
#include "qwave/parallel.hpp"
#include "qwave/propagator.hpp"
#include "qwave/quadrature.hpp"

namespace qwave {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

enum class Weight { J, JDt, JDx };

double weighted(const SpacetimeSpectrum& F, double r, double sigma, Weight w) {
    auto xi_part = [=](const Vec3& xi) {
        const double k = norm3(xi);
        return w == Weight::JDx ? std::pow(bracket(k), sigma - 1.0) * k
                                : std::pow(bracket(k), w == Weight::J ? sigma : sigma - 1.0);
    };
    auto tau_part = [=](double tau) { return w == Weight::JDt ? std::abs(tau) : 1.0; };
    return separable_lr_xt_norm(F, r, xi_part, tau_part);
}

double weighted_sum(const SpacetimeSpectrum& F, double r, double sigma, std::initializer_list<Weight> ws) {
    double acc = 0.0;
    for (auto w : ws) acc += weighted(F, r, sigma, w);
    return acc;
}

struct Scaled {
    SpacetimeGrid grid;
    Spectrum u0, v0;
};

void require_headroom(const DataFamily& f, const GridReference& g) {
    if (f.reach() >= g.band_radius())
        throw ParameterError("insufficient grid headroom: family reaches |xi|/lambda = " + std::to_string(f.reach()) +
                             " but the band limit is " + std::to_string(g.band_radius()));
}

Scaled prepare(const VerifyParams& p, double lambda) {
    Scaled s{p.grid.at(lambda), {}, {}};
    s.u0 = generate(p.u, s.grid.spatial, lambda, p.grid.band_radius());
    s.v0 = generate(p.v, s.grid.spatial, lambda, p.grid.band_radius());
    return s;
}

void require_sigma(const VerifyParams& p, const char* where) {
    require_lebesgue_index(p.r, where);
    if (!(p.sigma > 2.0 / p.r))
        throw ParameterError(std::string(where) + ": requires sigma > 2/r, got sigma = " + std::to_string(p.sigma));
}

Sample make_sample(double lambda, double lhs, double rhs) {
    return {lambda, lhs, rhs, rhs > 0.0 ? lhs / rhs : 0.0};
}

// Runs `eval` over the lambda ladder and assembles a report.
template <class Eval>
EstimateReport ladder(const VerifyParams& p, const std::string& name, Eval eval) {
    const auto start = Clock::now();
    EstimateReport rep;
    rep.name = name;
    rep.params = {{"r", p.r}, {"sigma", p.sigma}, {"b", p.b}};
    rep.samples = parallel_map(p.lambdas, eval, p.workers);
    rep.summarize();
    rep.runtime_s = seconds_since(start);
    return rep;
}

void bounded_verdict(EstimateReport& rep, double limit) {
    rep.passed = !rep.skipped && rep.spread <= limit;
    rep.criterion = "max/min ratio <= " + std::to_string(limit).substr(0, 4);
}

void attach_fit(EstimateReport& rep) {
    if (rep.skipped || rep.samples.size() < 3) return;
    std::vector<double> l, q;
    for (const auto& s : rep.samples) {
        l.push_back(s.lambda);
        q.push_back(s.ratio);
    }
    rep.growth = fit_growth(l, q);
}

SpacetimeField windowed_wave(const Spectrum& u0, const SpacetimeGrid& g, const WindowSpec& w, Sign sign) {
    return apply_window(free_spacetime(u0, g, {EvolutionKind::HalfWave, sign}), w);
}

SpacetimeSpectrum product_of(const SpacetimeField& u, const SpacetimeField& v) {
    SpacetimeField uv = u;
    for (std::size_t i = 0; i < uv.data.size(); ++i) uv.data[i] *= v.data[i];
    return forward_transform(uv);
}

}  // namespace

SpacetimeGrid GridReference::at(double lambda) const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("scale lambda must be positive");
    return SpacetimeGrid::make(SpatialGrid::make(n, half_length / lambda), m, half_time / lambda);
}

WindowSpec GridReference::window(double lambda) const {
    return WindowSpec::make(WindowSpec::Shape::RaisedCosine, flat_fraction, window_support / lambda);
}

double GridReference::band_radius() const { return (n / 4) * M_PI / half_length; }

GrowthFit fit_growth(const std::vector<double>& lambdas, const std::vector<double>& ratios) {
    if (lambdas.size() != ratios.size()) throw ParameterError("fit_growth: size mismatch");
    if (lambdas.size() < 3) throw ParameterError("fit_growth: at least 3 scale samples are required");
    const std::size_t n = lambdas.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lambdas[i] > 0.0) || !(ratios[i] > 0.0)) throw ParameterError("fit_growth: nonpositive sample");
        x[i] = std::log2(lambdas[i]);
        y[i] = std::log2(ratios[i]);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw ParameterError("fit_growth: scales must differ");
    GrowthFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - fit.intercept - fit.slope * x[i];
        ssr += e * e;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    const double se = std::sqrt(ssr / (n - 2) / sxx);
    const double t = boost::math::quantile(boost::math::students_t(static_cast<double>(n - 2)), 0.975);
    fit.ci_low = fit.slope - t * se;
    fit.ci_high = fit.slope + t * se;
    return fit;
}

void EstimateReport::summarize() {
    skipped = samples.empty() || std::any_of(samples.begin(), samples.end(), [](const Sample& s) { return s.rhs == 0.0; });
    if (skipped) {
        note = "zero data: ratio undefined";
        max_ratio = min_ratio = median_ratio = spread = 0.0;
        return;
    }
    std::vector<double> q;
    for (const auto& s : samples) q.push_back(s.ratio);
    std::sort(q.begin(), q.end());
    min_ratio = q.front();
    max_ratio = q.back();
    const std::size_t m = q.size() / 2;
    median_ratio = q.size() % 2 ? q[m] : 0.5 * (q[m - 1] + q[m]);
    spread = min_ratio > 0.0 ? max_ratio / min_ratio : INFINITY;
}

EstimateReport check_elliptic_lemma(const VerifyParams& p) {
    require_sigma(p, "check_elliptic_lemma");
    require_headroom(p.u, p.grid);
    require_headroom(p.v, p.grid);
    auto rep = ladder(p, "elliptic-lemma", [&](double lambda) {
        auto s = prepare(p, lambda);
        auto F = product_transform_direct(s.u0, s.v0, {Sign::Plus, Sign::Plus}, s.grid, p.grid.window(lambda));
        const double lhs = weighted_sum(F, p.r, p.sigma, {Weight::J, Weight::JDt});
        return make_sample(lambda, lhs, sobolev_hat_norm(s.u0, p.r, p.sigma) * sobolev_hat_norm(s.v0, p.r, p.sigma));
    });
    bounded_verdict(rep, kBoundedSpread);
    attach_fit(rep);
    return rep;
}

HyperbolicReports check_hyperbolic_lemmas(const VerifyParams& p) {
    require_sigma(p, "check_hyperbolic_lemmas");
    if (!(p.r > 1.0)) throw ParameterError("check_hyperbolic_lemmas: the Q-region estimate requires r > 1");
    require_headroom(p.u, p.grid);
    require_headroom(p.v, p.grid);
    const auto start = Clock::now();
    const SignPair sp{Sign::Plus, Sign::Minus};
    struct Row {
        Sample p, q;
        double residual = 0.0;
        bool triangle = true;
    };
    auto rows = parallel_map(p.lambdas, [&](double lambda) {
        auto s = prepare(p, lambda);
        const auto w = p.grid.window(lambda);
        auto F = product_transform_direct(s.u0, s.v0, sp, s.grid, w);
        auto FP = bilinear_symbol_product(s.u0, s.v0, sp, [](const Vec3& a, const Vec3& b) { return masks::region_p(a, b); },
                                          s.grid, w);
        auto FQ = bilinear_symbol_product(s.u0, s.v0, sp, [](const Vec3& a, const Vec3& b) { return masks::region_q(a, b); },
                                          s.grid, w);
        Row row;
        double scale = 0.0;
        for (std::size_t i = 0; i < F.data.size(); ++i) {
            scale = std::max(scale, std::abs(F.data[i]));
            row.residual = std::max(row.residual, std::abs(FP.data[i] + FQ.data[i] - F.data[i]));
        }
        row.residual = scale > 0.0 ? row.residual / scale : 0.0;
        const double full = lr_xt_norm(F, p.r), np = lr_xt_norm(FP, p.r), nq = lr_xt_norm(FQ, p.r);
        row.triangle = full <= (np + nq) * (1.0 + 1e-10);
        const double rhs = sobolev_hat_norm(s.u0, p.r, p.sigma) * sobolev_hat_norm(s.v0, p.r, p.sigma);
        row.p = make_sample(lambda, weighted_sum(FP, p.r, p.sigma, {Weight::J, Weight::JDt}), rhs);
        row.q = make_sample(lambda, weighted_sum(FQ, p.r, p.sigma, {Weight::JDx, Weight::JDt}), rhs);
        return row;
    }, p.workers);

    HyperbolicReports out;
    out.p_region.name = "hyperbolic-lemma-P";
    out.q_region.name = "hyperbolic-lemma-Q";
    out.triangle_ok = true;
    for (const auto& row : rows) {
        out.p_region.samples.push_back(row.p);
        out.q_region.samples.push_back(row.q);
        out.partition_residual = std::max(out.partition_residual, row.residual);
        out.triangle_ok = out.triangle_ok && row.triangle;
    }
    const double runtime = seconds_since(start);
    for (auto* rep : {&out.p_region, &out.q_region}) {
        rep->params = {{"r", p.r}, {"sigma", p.sigma}, {"c1", masks::kRegionConstant}};
        rep->summarize();
        bounded_verdict(*rep, kBoundedSpread);
        attach_fit(*rep);
        rep->runtime_s = runtime;
    }
    return out;
}

double q_region_share_near_zero(const VerifyParams& p, double lambda, double radius) {
    auto s = prepare(p, lambda);
    const SignPair sp{Sign::Plus, Sign::Minus};
    const auto w = p.grid.window(lambda);
    auto FP = bilinear_symbol_product(s.u0, s.v0, sp, [](const Vec3& a, const Vec3& b) { return masks::region_p(a, b); },
                                      s.grid, w);
    auto FQ = bilinear_symbol_product(s.u0, s.v0, sp, [](const Vec3& a, const Vec3& b) { return masks::region_q(a, b); },
                                      s.grid, w);
    const auto& sg = s.grid.spatial;
    const double cut = radius * sg.dxi();
    double mp = 0.0, mq = 0.0;
    for (int n = 0; n < s.grid.m; ++n)
        for (std::size_t i = 0; i < sg.size(); ++i) {
            if (norm3(sg.frequency(i)) >= cut) continue;
            mp += std::norm(FP.data[n * sg.size() + i]);
            mq += std::norm(FQ.data[n * sg.size() + i]);
        }
    return mp + mq > 0.0 ? mq / (mp + mq) : 0.0;
}

KeyEstimateReports check_key_estimate(const VerifyParams& p) {
    require_sigma(p, "check_key_estimate");
    if (!(p.b > 1.0 / p.r)) throw ParameterError("check_key_estimate: requires b > 1/r");
    require_headroom(p.u, p.grid);
    require_headroom(p.v, p.grid);
    const auto start = Clock::now();
    auto rows = parallel_map(p.lambdas, [&](double lambda) {
        auto s = prepare(p, lambda);
        const auto w = p.grid.window(lambda);
        auto F = product_transform_direct(s.u0, s.v0, p.signs, s.grid, w);
        const Sample free = make_sample(lambda, weighted_sum(F, p.r, p.sigma, {Weight::JDx, Weight::JDt}),
                                        sobolev_hat_norm(s.u0, p.r, p.sigma) * sobolev_hat_norm(s.v0, p.r, p.sigma));
        auto u = windowed_wave(s.u0, s.grid, w, p.signs.u);
        auto v = windowed_wave(s.v0, s.grid, w, p.signs.v);
        auto G = product_of(u, v);
        const double rhs = xsb_norm(u, NormParams::make(p.r, p.sigma, p.b, p.signs.u)) *
                           xsb_norm(v, NormParams::make(p.r, p.sigma, p.b, p.signs.v));
        const Sample full = make_sample(lambda, weighted_sum(G, p.r, p.sigma, {Weight::J, Weight::JDt}), rhs);
        return std::pair{free, full};
    }, p.workers);

    KeyEstimateReports out;
    out.free_form.name = "key-estimate-free";
    out.full_form.name = "key-estimate-full";
    for (const auto& [f, g] : rows) {
        out.free_form.samples.push_back(f);
        out.full_form.samples.push_back(g);
    }
    const double runtime = seconds_since(start);
    for (auto* rep : {&out.free_form, &out.full_form}) {
        rep->params = {{"r", p.r}, {"sigma", p.sigma}, {"b", p.b}};
        rep->note = std::string("signs ") + p.signs.label();
        rep->summarize();
        bounded_verdict(*rep, kBoundedSpread);
        attach_fit(*rep);
        rep->runtime_s = runtime;
    }
    return out;
}

EstimateReport growth_run(const VerifyParams& p, const std::string& name) {
    require_lebesgue_index(p.r, "growth_run");
    if (p.lambdas.size() < 3) throw ParameterError("growth_run: at least 3 scale samples are required");
    require_headroom(p.u, p.grid);
    require_headroom(p.v, p.grid);
    auto rep = ladder(p, name, [&](double lambda) {
        auto s = prepare(p, lambda);
        auto F = product_transform_direct(s.u0, s.v0, p.signs, s.grid, p.grid.window(lambda));
        return make_sample(lambda, weighted_sum(F, p.r, p.sigma, {Weight::JDx, Weight::JDt}),
                           sobolev_hat_norm(s.u0, p.r, p.sigma) * sobolev_hat_norm(s.v0, p.r, p.sigma));
    });
    attach_fit(rep);
    rep.note = std::string("signs ") + p.signs.label();
    return rep;
}

EstimateReport sharpness_probe(const VerifyParams& p) {
    require_lebesgue_index(p.r, "sharpness_probe");
    if (!(p.sigma < 2.0 / p.r)) throw ParameterError("sharpness_probe: requires sigma < 2/r");
    auto rep = growth_run(p, "sharpness");
    const double predicted = 2.0 / p.r - p.sigma;
    rep.params.emplace_back("predicted_exponent", predicted);
    rep.criterion = "fitted exponent >= 0.8 * (2/r - sigma), R^2 > 0.9";
    rep.passed = rep.growth && rep.growth->slope >= 0.8 * predicted && rep.growth->r2 > kGrowthR2;
    return rep;
}

EstimateReport check_lowfreq_young(const VerifyParams& p, const std::vector<Spectrum>& members,
                                   const SpacetimeGrid& time) {
    require_lebesgue_index(p.r, "check_lowfreq_young");
    const auto start = Clock::now();
    for (const auto& f : members) {
        require_rep(f, Representation::Frequency, "check_lowfreq_young");
        require_same_grid(f.grid, time.spatial, "check_lowfreq_young");
        for (std::size_t k = 0; k < f.data.size(); ++k)
            if (f.data[k] != cplx(0) && norm3(f.grid.frequency(k)) > 1.0)
                throw ParameterError("check_lowfreq_young: data must be supported in |xi| <= 1");
    }
    const WindowSpec w = WindowSpec::make(WindowSpec::Shape::RaisedCosine, p.grid.flat_fraction, time.half_time);
    std::vector<std::size_t> idx(members.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    EstimateReport rep;
    rep.name = "lowfreq-young";
    rep.params = {{"r", p.r}, {"sigma", p.sigma}, {"b", p.b}};
    rep.samples = parallel_map(idx, [&](std::size_t i) {
        const auto& u0 = members[i];
        const auto& v0 = members[(i + 1) % members.size()];
        auto u = windowed_wave(u0, time, w, p.signs.u);
        auto v = windowed_wave(v0, time, w, p.signs.v);
        auto G = product_of(u, v);
        const double rhs = xsb_norm(u, NormParams::make(p.r, p.sigma, p.b, p.signs.u)) *
                           xsb_norm(v, NormParams::make(p.r, p.sigma, p.b, p.signs.v));
        return make_sample(static_cast<double>(i), weighted(G, p.r, p.sigma, Weight::J), rhs);
    }, p.workers);
    rep.summarize();
    bounded_verdict(rep, 2.0);
    rep.runtime_s = seconds_since(start);
    return rep;
}

EstimateReport check_strichartz_l2(double sigma1, double sigma2, const VerifyParams& p, bool probe) {
    if (sigma1 < 0.0 || sigma2 < 0.0) throw ParameterError("check_strichartz_l2: requires sigma1, sigma2 >= 0");
    if (!probe && !(sigma1 + sigma2 > 1.0))
        throw ParameterError("check_strichartz_l2: requires sigma1 + sigma2 > 1 (use a probe run below it)");
    require_headroom(p.u, p.grid);
    require_headroom(p.v, p.grid);
    const double plancherel = std::pow(2.0 * M_PI, 2.0);
    auto rep = ladder(p, probe ? "strichartz-l2-probe" : "strichartz-l2", [&](double lambda) {
        auto s = prepare(p, lambda);
        auto F = product_transform_direct(s.u0, s.v0, {Sign::Plus, Sign::Minus}, s.grid, p.grid.window(lambda));
        const double lhs = lr_xt_norm(F, 2.0) / plancherel;
        const double rhs = sobolev_hat_norm(s.u0, 2.0, sigma1) * sobolev_hat_norm(s.v0, 2.0, sigma2) /
                           std::pow(2.0 * M_PI, 3.0);
        return make_sample(lambda, lhs, rhs);
    });
    rep.params = {{"sigma1", sigma1}, {"sigma2", sigma2}};
    attach_fit(rep);
    if (probe) {
        rep.criterion = "report only";
        rep.passed = !rep.skipped;
    } else {
        bounded_verdict(rep, kBoundedSpread);
    }
    return rep;
}

double far_region_mass(double abs_xi, double a, double r, double s1, double s2, double c1) {
    if (!(abs_xi > 0.0)) throw ParameterError("far_region_mass: |xi| must be positive");
    if (!(std::abs(a) < 1.0)) throw ParameterError("far_region_mass: requires |tau| < |xi|");
    const double cut = c1 * abs_xi;
    auto f = [=](double r1, double r2) {
        return r1 + r2 > cut ? std::pow(r1, -s1 * r) * std::pow(r2, -s2 * r) : 0.0;
    };
    SurfaceDomain dom;
    dom.rho_max = 1000.0 * abs_xi;
    return surface_mass({0, 0, abs_xi}, a * abs_xi, {Sign::Plus, Sign::Minus}, f, 0.02 * abs_xi, dom).value;
}

SurfaceCrossCheck surface_cross_check(const SurfaceCheckConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    if (!(cfg.width > 0.0)) throw ParameterError("surface_cross_check: width must be positive");
    if (cfg.tau_panels < 1) throw ParameterError("surface_cross_check: tau_panels must be positive");
    const auto& g = cfg.grid;
    const auto& sp = g.spatial;
    const auto family = DataFamily::gaussian({0.0, 0.0, 0.0}, cfg.width);
    const auto u0 = generate(family, sp, 1.0, INFINITY);
    const SignPair pp{Sign::Plus, Sign::Plus};
    const auto direct = product_transform_direct(u0, u0, pp, g, cfg.window);

    // discrete window transform, the same sum the lattice product uses in time
    auto what = [&](double tau) {
        double acc = 0.0;
        for (int j = 0; j < g.m; ++j) acc += cfg.window(g.time(j)) * std::cos(tau * g.time(j));
        return acc * g.dt();
    };
    const RadialWeight weight = [&](double r1, double r2) {
        return family.profile({r1, 0.0, 0.0}).real() * family.profile({r2, 0.0, 0.0}).real();
    };
    const auto& gl = quad::gauss_legendre(8);

    SurfaceCrossCheck out;
    for (const auto& pr : cfg.probes) {
        if (pr.tau_mode < -g.m / 2 || pr.tau_mode >= g.m / 2)
            throw ParameterError("surface_cross_check: tau mode outside the lattice");
        const auto idx = sp.index_of_modes(pr.modes[0], pr.modes[1], pr.modes[2]);
        SurfaceProbeResult res;
        res.xi = sp.frequency(idx);
        const double k = norm3(res.xi);
        if (!(k > 0.0)) throw ParameterError("surface_cross_check: probe at xi = 0");
        const int n = pr.tau_mode < 0 ? pr.tau_mode + g.m : pr.tau_mode;
        res.tau = g.tau(n);
        res.direct = direct.data[n * sp.size() + idx].real();

        // tau' runs over the ellipsoids tau' > |xi| until the gaussian tail is negligible
        const double hi = k + 8.0 * cfg.width;
        double acc = 0.0;
        for (int p = 0; p < cfg.tau_panels; ++p) {
            const double a = k + (hi - k) * p / cfg.tau_panels, b = k + (hi - k) * (p + 1) / cfg.tau_panels;
            for (auto [x, w] : gl) {
                const double t = 0.5 * (a + b) + 0.5 * (b - a) * x;
                const double h = 0.05 * std::min(k, t - k);
                acc += 0.5 * (b - a) * w * what(res.tau - t) * surface_mass(res.xi, t, pp, weight, h).value;
            }
        }
        res.surface = acc * std::pow(2.0 * M_PI, -3);
        res.rel_error = std::abs(res.direct - res.surface) / std::abs(res.surface);
        out.max_rel_error = std::max(out.max_rel_error, res.rel_error);
        out.probes.push_back(res);
    }
    out.passed = !out.probes.empty() && out.max_rel_error <= cfg.tolerance;
    out.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

namespace {

DataFamily family_at(DataFamily::Kind kind, const std::array<double, 3>& x, std::uint64_t seed) {
    DataFamily f;
    f.kind = kind;
    f.xi0 = {x[0], 0.0, 0.0};
    f.width = x[1];
    f.anisotropy = {x[2], 1.0, 1.0};
    f.seed = seed;
    return f;
}

}  // namespace

double extremizer_objective(const ExtremizerConfig& cfg, DataFamily::Kind kind, const std::array<double, 3>& point) {
    const auto& p = cfg.base;
    const auto f = family_at(kind, point, cfg.seed);
    const auto g = p.grid.at(cfg.lambda);
    auto u0 = generate(f, g.spatial, cfg.lambda, p.grid.band_radius());
    const double rhs = std::pow(sobolev_hat_norm(u0, p.r, p.sigma), 2);
    if (rhs == 0.0) return 0.0;
    auto F = product_transform_direct(u0, u0, p.signs, g, p.grid.window(cfg.lambda));
    return weighted_sum(F, p.r, p.sigma, {Weight::JDx, Weight::JDt}) / rhs;
}

ExtremizerResult extremizer_search(const ExtremizerConfig& cfg) {
    const auto& bx = cfg.box;
    const std::array<double, 3> lo{bx.xi_min, bx.width_min, bx.aniso_min};
    const std::array<double, 3> hi{bx.xi_max, bx.width_max, bx.aniso_max};
    for (int i = 0; i < 3; ++i)
        if (!(hi[i] >= lo[i])) throw ParameterError("extremizer_search: empty parameter box");

    // unit-cube coordinates, clamped
    auto to_box = [&](const std::array<double, 3>& y) {
        std::array<double, 3> x;
        for (int i = 0; i < 3; ++i) x[i] = lo[i] + std::clamp(y[i], 0.0, 1.0) * (hi[i] - lo[i]);
        return x;
    };

    ExtremizerResult res;
    res.converged = true;
    for (auto kind : cfg.kinds) {
        struct Vertex {
            std::array<double, 3> y;
            double f;
        };
        std::vector<double> trace;
        double best = -INFINITY;
        int evals = 0;
        auto eval = [&](std::array<double, 3> y) {
            for (auto& c : y) c = std::clamp(c, 0.0, 1.0);
            const auto x = to_box(y);
            const double f = extremizer_objective(cfg, kind, x);
            ++evals;
            if (f > best) {
                best = f;
                if (f > res.best_ratio) {
                    res.best_ratio = f;
                    res.best_point = x;
                    res.best_family = family_at(kind, x, cfg.seed);
                }
            }
            trace.push_back(best);
            return Vertex{y, f};
        };

        std::vector<Vertex> s;
        s.push_back(eval({0.5, 0.5, 0.5}));
        for (int i = 0; i < 3; ++i) {
            std::array<double, 3> y{0.5, 0.5, 0.5};
            y[i] += 0.25;
            s.push_back(eval(y));
        }
        bool done = false;
        while (evals < cfg.max_evaluations) {
            // maximise: best first
            std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
            if (std::abs(s.front().f - s.back().f) <= cfg.tolerance * std::max(std::abs(s.front().f), 1e-300)) {
                done = true;
                break;
            }
            std::array<double, 3> c{};
            for (int v = 0; v < 3; ++v)
                for (int i = 0; i < 3; ++i) c[i] += s[v].y[i] / 3.0;
            auto along = [&](double t) {
                std::array<double, 3> y;
                for (int i = 0; i < 3; ++i) y[i] = c[i] + t * (s[3].y[i] - c[i]);
                return y;
            };
            const Vertex refl = eval(along(-1.0));
            if (refl.f > s[0].f) {
                const Vertex exp = eval(along(-2.0));
                s[3] = exp.f > refl.f ? exp : refl;
            } else if (refl.f > s[2].f) {
                s[3] = refl;
            } else {
                const bool outside = refl.f > s[3].f;
                const Vertex con = eval(along(outside ? -0.5 : 0.5));
                if (con.f > std::max(outside ? refl.f : s[3].f, s[3].f)) {
                    s[3] = con;
                } else {
                    for (int v = 1; v < 4; ++v) {
                        std::array<double, 3> y;
                        for (int i = 0; i < 3; ++i) y[i] = s[0].y[i] + 0.5 * (s[v].y[i] - s[0].y[i]);
                        s[v] = eval(y);
                    }
                }
            }
        }
        res.converged = res.converged && done;
        res.evaluations += evals;
        res.traces.push_back(std::move(trace));
    }
    return res;
}

}  // namespace qwave
