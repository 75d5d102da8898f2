#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "qwave/dyadic.hpp"
#include "qwave/error.hpp"
#include "qwave/field_io.hpp"
#include "qwave/solver.hpp"
#include "qwave/verify.hpp"

namespace qwave::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

Sign parse_sign(char c) { return c == '-' ? Sign::Minus : Sign::Plus; }

SignPair signs_of(const RunConfig& cfg) {
    const auto& s = cfg.text("params.signs");
    return {parse_sign(s[0]), parse_sign(s[1])};
}

DataFamily family_of(const RunConfig& cfg, const std::string& which) {
    const std::string pre = "family." + which;
    DataFamily f;
    f.kind = parse_family_kind(cfg.text(pre));
    f.xi0 = cfg.vec3(pre + "_xi0");
    f.width = cfg.number(pre + "_width");
    f.anisotropy = cfg.vec3(pre + "_aniso");
    f.seed = cfg.seed(pre + "_seed");
    if (!(f.width > 0.0)) throw ConfigError(pre + "_width: must be positive");
    return f;
}

VerifyParams verify_params(const RunConfig& cfg) {
    VerifyParams p;
    p.r = cfg.number("params.r");
    require_lebesgue_index(p.r, "params.r");
    if (cfg.has("params.sigma")) p.sigma = cfg.number("params.sigma");
    if (cfg.has("params.b")) {
        p.b = cfg.number("params.b");
        if (!(p.b > 1.0 / p.r && p.b < 1.0)) throw ConfigError("params.b: must lie in (1/r, 1)");
    }
    if (cfg.has("params.signs")) p.signs = signs_of(cfg);
    if (cfg.has("family.u")) {
        p.u = family_of(cfg, "u");
        p.v = family_of(cfg, "v");
    }
    if (cfg.has("sweep.lambdas")) {
        p.lambdas = cfg.list("sweep.lambdas");
        if (p.lambdas.empty()) throw ConfigError("sweep.lambdas: at least one scale is required");
        for (double l : p.lambdas)
            if (!(l > 0.0)) throw ConfigError("sweep.lambdas: scales must be positive");
    }
    p.grid.n = cfg.integer("grid.n");
    p.grid.half_length = cfg.number("grid.L");
    p.grid.m = cfg.integer("grid.m");
    p.grid.half_time = cfg.number("grid.T");
    if (cfg.has("grid.window_support")) p.grid.window_support = cfg.number("grid.window_support");
    p.grid.flat_fraction = cfg.number("grid.flat_fraction");
    p.grid.at(1.0);
    p.grid.window(1.0);
    if (p.grid.window_support > p.grid.half_time) throw ConfigError("grid.window_support: exceeds grid.T");
    p.workers = cfg.integer("run.workers");
    return p;
}

json fit_json(const std::optional<GrowthFit>& g) {
    if (!g) return nullptr;
    return {{"slope", g->slope}, {"intercept", g->intercept}, {"r2", g->r2}, {"ci_low", g->ci_low},
            {"ci_high", g->ci_high}};
}

const std::vector<std::string> kLadderHeader{"report", "lambda", "lhs", "rhs", "ratio"};

void ladder_rows(Table& t, const EstimateReport& rep) {
    for (const auto& s : rep.samples) t.add({rep.name, fmt(s.lambda), fmt(s.lhs), fmt(s.rhs), fmt(s.ratio)});
}

Check check_of(const EstimateReport& rep) {
    return {rep.name, rep.passed, rep.criterion, rep.spread, rep.runtime_s};
}

json report_json(const EstimateReport& rep) {
    json j;
    for (const auto& [k, v] : rep.params) j["params"][k] = v;
    j["max_ratio"] = rep.max_ratio;
    j["min_ratio"] = rep.min_ratio;
    j["median_ratio"] = rep.median_ratio;
    j["spread"] = rep.spread;
    j["growth"] = fit_json(rep.growth);
    j["skipped"] = rep.skipped;
    j["passed"] = rep.passed;
    if (!rep.note.empty()) j["note"] = rep.note;
    return j;
}

void add_report(Outcome& out, const EstimateReport& rep) {
    ladder_rows(out.table, rep);
    out.checks.push_back(check_of(rep));
    out.results[rep.name] = report_json(rep);
}

// slope of the least-squares line through (x, y)
double line_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void cmd_norms(const RunConfig& cfg, Outcome& out) {
    const auto& path = cfg.text("run.input");
    if (path.empty()) throw ConfigError("run.input: a field file is required");
    const double r = cfg.number("params.r"), s = cfg.number("params.s"), b = cfg.number("params.b");
    require_lebesgue_index(r, "params.r");
    const Sign sign = parse_sign(cfg.text("params.sign")[0]);
    const auto field = load_field(path);

    out.table.header = {"quantity", "r", "s", "b", "sign", "value"};
    std::vector<std::pair<std::string, double>> values;
    if (const auto* f = std::get_if<Field>(&field)) {
        const Spectrum spec = f->rep == Representation::Frequency ? *f : forward_transform(*f);
        values.emplace_back("sobolev_hat_norm", sobolev_hat_norm(spec, r, s));
        out.results["grid"] = {{"n", f->grid.n}, {"L", f->grid.half_length}};
    } else {
        const auto& u = std::get<SpacetimeField>(field);
        const auto w = WindowSpec::make(WindowSpec::Shape::RaisedCosine, cfg.number("grid.flat_fraction"),
                                        cfg.number("grid.window_support"));
        const double delta = cfg.number("params.delta");
        const auto np = NormParams::make(r, s, b, sign);
        const auto full = u.rep == Representation::Frequency ? u
                          : u.rep == Representation::Configuration ? forward_transform(u)
                                                                    : time_forward(u);
        values.emplace_back("lr_xt_norm", lr_xt_norm(full, r));
        values.emplace_back("xsb_norm", xsb_norm(u, np));
        const auto physical = u.rep == Representation::Frequency ? time_inverse(u) : u;
        values.emplace_back("restricted_norm", restricted_norm(physical, delta, w, np));
        out.results["grid"] = {{"n", u.grid.spatial.n}, {"L", u.grid.spatial.half_length}, {"m", u.grid.m},
                               {"T", u.grid.half_time}};
    }
    out.results["representation"] = std::visit([](const auto& f) { return std::string(to_string(f.rep)); }, field);
    bool finite = true;
    for (const auto& [name, v] : values) {
        out.table.add({name, fmt(r), fmt(s), fmt(b), std::string(1, sign_char(sign)), fmt(v)});
        out.results[name] = v;
        finite = finite && std::isfinite(v);
    }
    out.checks.push_back({"finite", finite, "all norms finite", 0.0, 0.0});
}

void cmd_reduce(const RunConfig& cfg, Outcome& out) {
    const auto& region_name = cfg.text("reduce.region");
    const Region region = region_name == "elliptic"          ? Region::Elliptic
                          : region_name == "hyperbolic-near" ? Region::HyperbolicNear
                                                             : Region::HyperbolicFar;
    const double c1 = cfg.number("reduce.c1");
    const auto as = cfg.list("reduce.a");
    if (as.empty()) throw ConfigError("reduce.a: at least one value is required");

    // groups of specs sharing (p, q), ordered as listed
    std::vector<std::vector<ReductionSpec>> groups;
    const auto rs = cfg.list("reduce.r");
    if (!rs.empty()) {
        for (double r : rs) require_lebesgue_index(r, "reduce.r");
        for (double r : rs)
            for (double f : cfg.list("reduce.s1_fractions")) {
                groups.emplace_back();
                for (double a : as)
                    groups.back().push_back(ReductionSpec::from_regularity(r, f * 2.0 / r, (1.0 - f) * 2.0 / r, a, region, c1));
            }
    } else {
        for (double p : cfg.list("reduce.p"))
            for (double q : cfg.list("reduce.q")) {
                groups.emplace_back();
                for (double a : as) {
                    ReductionSpec s;
                    s.a = a;
                    s.p = p;
                    s.q = q;
                    s.region = region;
                    s.c1 = c1;
                    groups.back().push_back(s);
                }
            }
    }
    if (groups.empty()) throw ConfigError("reduce: empty parameter table");
    for (const auto& g : groups)
        for (const auto& s : g) validate(s);

    const auto start = Clock::now();
    out.table.header = {"region", "r", "s1", "s2", "p", "q", "c1", "a", "value"};
    bool finite = true;
    double limit_dev = 0.0;
    bool limit_checked = false;
    for (const auto& g : groups) {
        std::vector<double> values;
        for (const auto& s : g) {
            values.push_back(reduction_integral(s));
            finite = finite && std::isfinite(values.back());
            out.table.add({region_name, fmt(s.r), fmt(s.s1), fmt(s.s2), fmt(s.p), fmt(s.q), fmt(s.c1), fmt(s.a),
                           fmt(values.back())});
        }
        // with p + q = 0 the elliptic integral tends to 2; compare the two largest a
        if (region == Region::Elliptic && std::abs(g[0].p + g[0].q) < 1e-12 && g.size() >= 2) {
            std::vector<std::size_t> idx(g.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return g[x].a < g[y].a; });
            const double hi = values[idx.back()], lo = values[idx[idx.size() - 2]];
            limit_dev = std::max(limit_dev, std::abs(hi - lo) / std::abs(hi));
            limit_checked = true;
        }
    }
    const double runtime = seconds_since(start);
    out.checks.push_back({"finite", finite, "every table value finite", 0.0, runtime});
    if (limit_checked)
        out.checks.push_back({"large-a limit", limit_dev < 0.01, "relative change between the two largest a < 1%",
                              limit_dev, runtime});
    out.results["rows"] = out.table.rows.size();
}

void cmd_lemma(const RunConfig& cfg, Outcome& out) {
    const auto& suite = cfg.text("run.suite");
    if (suite == "shell") {
        const Vec3 xi = cfg.vec3("shell.xi");
        const double tau = cfg.number("shell.tau"), h = cfg.number("shell.h");
        const auto shells = cfg.list("shell.shells");
        if (shells.size() < 2) throw ConfigError("shell.shells: at least two shells are required");
        if (!(h > 0.0)) throw ConfigError("shell.h: must be positive");
        if (!(tau > norm3(xi))) throw ConfigError("shell.tau: must exceed |shell.xi| (elliptic surface)");
        const auto start = Clock::now();
        out.table.header = {"shell", "mass", "log2_mass", "stable"};
        std::vector<double> ks, logs;
        bool stable = true;
        for (double k : shells) {
            const auto m = shell_surface_mass(xi, tau, {Sign::Plus, Sign::Plus}, {static_cast<int>(k)}, h);
            ks.push_back(k);
            logs.push_back(std::log2(m.value));
            stable = stable && m.stable;
            out.table.add({fmt(static_cast<int>(k)), fmt(m.value), fmt(logs.back()), fmt(m.stable)});
        }
        const double slope = line_slope(ks, logs);
        const double runtime = seconds_since(start);
        out.results["slope"] = slope;
        out.checks.push_back({"shell-growth", std::abs(slope - 2.0) <= 0.1, "log2 slope = 2 +- 0.1", slope, runtime});
        out.checks.push_back({"shell-stable", stable, "quadrature reached 1% stability", 0.0, runtime});
        return;
    }
    auto p = verify_params(cfg);
    out.table.header = kLadderHeader;
    if (suite == "elliptic") {
        add_report(out, check_elliptic_lemma(p));
        return;
    }
    const auto h = check_hyperbolic_lemmas(p);
    add_report(out, h.p_region);
    add_report(out, h.q_region);
    out.results["partition_residual"] = h.partition_residual;
    out.results["triangle_ok"] = h.triangle_ok;
    out.checks.push_back({"partition", h.partition_residual < 1e-10, "|F_P + F_Q - F| / |F| < 1e-10",
                          h.partition_residual, 0.0});
    out.checks.push_back({"triangle", h.triangle_ok, "||F|| <= ||F_P|| + ||F_Q||", 0.0, 0.0});
}

void cmd_key(const RunConfig& cfg, Outcome& out) {
    auto p = verify_params(cfg);
    out.table.header = kLadderHeader;
    const auto k = check_key_estimate(p);
    add_report(out, k.free_form);
    add_report(out, k.full_form);
}

void cmd_sharpness(const RunConfig& cfg, Outcome& out) {
    auto p = verify_params(cfg);
    out.table.header = kLadderHeader;
    auto probe = sharpness_probe(p);
    add_report(out, probe);
    out.checks.back().value = probe.growth ? probe.growth->slope : 0.0;
    if (cfg.flag("params.control")) {
        p.sigma = cfg.number("params.control_sigma");
        auto control = growth_run(p, "control");
        const double slope = control.growth ? control.growth->slope : INFINITY;
        control.criterion = "fitted exponent <= 0.1";
        control.passed = slope <= 0.1;
        add_report(out, control);
        out.checks.back().value = slope;
    }
}

void cmd_lowfreq(const RunConfig& cfg, Outcome& out) {
    auto p = verify_params(cfg);
    const auto g = SpacetimeGrid::make(SpatialGrid::make(p.grid.n, p.grid.half_length), p.grid.m, p.grid.half_time);
    const int count = cfg.integer("lowfreq.members");
    if (count < 2) throw ConfigError("lowfreq.members: at least two members are required");
    const double width = cfg.number("lowfreq.width"), band = cfg.number("lowfreq.band");
    if (!(band > 0.0 && band <= 1.0)) throw ConfigError("lowfreq.band: must lie in (0, 1]");
    const auto seed = cfg.seed("run.seed");
    std::vector<Spectrum> members;
    for (int i = 0; i < count; ++i)
        members.push_back(generate(DataFamily::random({0, 0, 0}, width, seed + static_cast<std::uint64_t>(i)), g.spatial, 1.0, band));
    auto rep = check_lowfreq_young(p, members, g);
    out.table.header = {"report", "pair", "lhs", "rhs", "ratio"};
    ladder_rows(out.table, rep);
    out.checks.push_back(check_of(rep));
    out.results[rep.name] = report_json(rep);
}

void cmd_strichartz(const RunConfig& cfg, Outcome& out) {
    auto p = verify_params(cfg);
    out.table.header = kLadderHeader;
    const auto rep = check_strichartz_l2(cfg.number("params.s1"), cfg.number("params.s2"), p, cfg.flag("params.probe"));
    add_report(out, rep);
}

void cmd_extremize(const RunConfig& cfg, Outcome& out) {
    ExtremizerConfig ec;
    ec.base = verify_params(cfg);
    ec.lambda = cfg.number("extremize.lambda");
    ec.max_evaluations = cfg.integer("extremize.evaluations");
    ec.tolerance = cfg.number("extremize.tolerance");
    ec.seed = cfg.seed("run.seed");
    ec.kinds.clear();
    std::istringstream is(cfg.text("extremize.kinds"));
    std::string name;
    while (std::getline(is, name, ',')) {
        try {
            ec.kinds.push_back(parse_family_kind(name));
        } catch (const ParameterError& e) {
            throw ConfigError(std::string("extremize.kinds: ") + e.what());
        }
    }
    if (ec.kinds.empty()) throw ConfigError("extremize.kinds: at least one family is required");
    if (ec.max_evaluations < 4) throw ConfigError("extremize.evaluations: at least 4 are required");

    const auto start = Clock::now();
    const auto res = extremizer_search(ec);
    out.table.header = {"restart", "family", "step", "best_ratio"};
    for (std::size_t i = 0; i < res.traces.size(); ++i)
        for (std::size_t j = 0; j < res.traces[i].size(); ++j)
            out.table.add({fmt(static_cast<int>(i)), to_string(ec.kinds[i % ec.kinds.size()]), fmt(static_cast<int>(j)),
                           fmt(res.traces[i][j])});
    out.results["best_ratio"] = res.best_ratio;
    out.results["best_family"] = to_string(res.best_family.kind);
    out.results["best_point"] = {{"xi0", res.best_point[0]}, {"width", res.best_point[1]}, {"anisotropy", res.best_point[2]}};
    out.results["converged"] = res.converged;
    out.results["evaluations"] = res.evaluations;
    out.checks.push_back({"objective", std::isfinite(res.best_ratio) && res.best_ratio > 0.0,
                          "best ratio finite and positive", res.best_ratio, seconds_since(start)});
}

// Spectrum of a family with its spatial peak scaled to `amplitude`.
Spectrum peak_scaled(const DataFamily& f, const SpatialGrid& g, double band, double amplitude) {
    auto s = generate(f, g, 1.0, band);
    double peak = 0.0;
    for (const auto& v : inverse_transform(s).data) peak = std::max(peak, std::abs(v));
    for (auto& v : s.data) v = peak > 0.0 ? v * (amplitude / peak) : cplx(0);
    return s;
}

SolveConfig solve_config(const RunConfig& cfg) {
    SolveConfig sc;
    sc.grid = SpacetimeGrid::make(SpatialGrid::make(cfg.integer("grid.n"), cfg.number("grid.L")), cfg.integer("grid.m"),
                                  cfg.number("grid.T"));
    sc.delta = cfg.number("params.delta");
    sc.window = WindowSpec::make(WindowSpec::Shape::RaisedCosine, cfg.number("grid.flat_fraction"),
                                 cfg.number("grid.window_support"));
    sc.max_iterations = cfg.integer("solve.max_iterations");
    sc.tolerance = cfg.number("solve.tolerance");
    sc.r = cfg.number("params.r");
    sc.s = cfg.number("params.s");
    sc.b = cfg.number("params.b");
    sc.validate();
    return sc;
}

NonlinearitySpec nonlinearity(const RunConfig& cfg) {
    NonlinearitySpec ns;
    ns.k = cfg.integer("params.k");
    ns.derivative = parse_derivative(cfg.text("params.derivative"));
    validate(ns);
    return ns;
}

// Data built from the two families; `seed` replaces the family seeds when nonzero.
FirstOrderData family_data(const RunConfig& cfg, const SpatialGrid& g, double amplitude, double velocity,
                           std::uint64_t seed = 0) {
    auto u = family_of(cfg, "u"), v = family_of(cfg, "v");
    if (seed) {
        u.seed = seed;
        v.seed = seed + 1;
    }
    const double band = cfg.number("family.band");
    return to_first_order({peak_scaled(u, g, band, amplitude), peak_scaled(v, g, band, velocity)});
}

Spectrum load_spectrum(const std::string& path, const SpatialGrid& g) {
    auto f = load_spatial_field(path);
    if (!(f.grid == g)) throw ConfigError("'" + path + "': field grid does not match the [grid] section");
    return f.rep == Representation::Frequency ? f : forward_transform(f);
}

void cmd_solve(const RunConfig& cfg, Outcome& out) {
    auto sc = solve_config(cfg);
    const auto ns = nonlinearity(cfg);
    const auto& g = sc.grid.spatial;
    FirstOrderData f;
    if (!cfg.text("solve.u0").empty()) {
        const auto u0 = load_spectrum(cfg.text("solve.u0"), g);
        const auto u1 = cfg.text("solve.u1").empty() ? Spectrum(g, Representation::Frequency)
                                                      : load_spectrum(cfg.text("solve.u1"), g);
        f = to_first_order({u0, u1});
    } else {
        f = family_data(cfg, g, cfg.number("family.amplitude"), cfg.number("family.velocity_amplitude"));
    }
    const double size = data_size(f, sc.r, sc.s);
    out.results["data_size"] = size;

    const auto start = Clock::now();
    if (cfg.flag("solve.auto_delta")) {
        const auto sel = select_delta(f, ns, sc, cfg.number("solve.rho_max"), cfg.number("solve.delta_c"));
        out.results["delta_selection"] = {{"delta", sel.delta}, {"rho1", sel.rho1}, {"attempts", sel.attempts},
                                          {"found", sel.found}};
        out.checks.push_back({"delta-selection", sel.found, "rho1 < rho_max above the two-step floor", sel.rho1,
                              seconds_since(start)});
        if (!sel.found) return;
        sc.delta = sel.delta;
    }
    out.results["delta"] = sc.delta;

    const auto res = solve_local(f, ns, sc);
    out.table.header = {"step", "distance", "restricted_distance", "rho"};
    for (const auto& s : res.picard.steps)
        out.table.add({fmt(s.n), fmt(s.distance), fmt(s.restricted_distance), fmt(s.rho)});
    Table persistence{{"t", "norm_plus", "norm_minus"}, {}};
    for (std::size_t i = 0; i < res.times.size(); ++i)
        persistence.add({fmt(res.times[i]), fmt(res.persistence_plus[i]), fmt(res.persistence_minus[i])});
    out.tables.emplace_back("persistence", std::move(persistence));

    double rho_max = 0.0;
    for (std::size_t i = 1; i < res.picard.steps.size(); ++i) rho_max = std::max(rho_max, res.picard.steps[i].rho);
    out.results["converged"] = res.picard.converged;
    out.results["diverged"] = res.picard.diverged;
    out.results["iterations"] = res.picard.iterations;
    out.results["max_rho"] = rho_max;
    if (!res.failure.empty()) out.results["failure"] = res.failure;
    out.results["residual"] = {{"absolute", res.residual.absolute}, {"relative", res.residual.relative},
                               {"interior_slices", res.residual.interior_slices}};
    out.results["max_jump"] = res.max_jump;
    if (res.z_norm) out.results["z_norm"] = *res.z_norm;

    const double runtime = seconds_since(start);
    out.checks.push_back({"contraction", res.ok, "Picard iteration reaches the tolerance", rho_max, runtime});
    out.checks.push_back({"residual", std::isfinite(res.residual.relative), "residual finite", res.residual.relative,
                          runtime});
    if (res.z_norm)
        out.checks.push_back({"z-norm", std::isfinite(*res.z_norm), "Z diagnostic finite", *res.z_norm, runtime});
    if (!cfg.text("run.snapshot").empty()) save_field(cfg.text("run.snapshot"), res.u);
}

void cmd_lipschitz(const RunConfig& cfg, Outcome& out) {
    const auto sc = solve_config(cfg);
    const auto ns = nonlinearity(cfg);
    const auto& g = sc.grid.spatial;
    const int count = cfg.integer("lipschitz.pairs");
    const auto eps = cfg.list("lipschitz.eps");
    if (count < 1) throw ConfigError("lipschitz.pairs: must be positive");
    if (eps.empty()) throw ConfigError("lipschitz.eps: at least one perturbation size is required");
    const double amp = cfg.number("family.amplitude"), vel = cfg.number("family.velocity_amplitude");
    const double rho_max = cfg.number("lipschitz.rho_max"), c = cfg.number("lipschitz.delta_c");
    if (!(rho_max > 0.0 && rho_max < 1.0)) throw ConfigError("lipschitz.rho_max: must lie in (0, 1)");
    const auto seed = cfg.seed("run.seed");
    const int workers = cfg.integer("run.workers");

    std::vector<FirstOrderData> base, dir;
    for (int i = 0; i < count; ++i) {
        base.push_back(family_data(cfg, g, amp, vel, seed * 1000 + 20 + 4 * i));
        dir.push_back(family_data(cfg, g, amp, vel, seed * 1000 + 22 + 4 * i));
    }
    const auto start = Clock::now();
    out.table.header = {"eps", "pair", "data_distance", "solution_distance", "ratio", "skipped", "excluded"};
    std::vector<double> maxima;
    int excluded = 0;
    for (double e : eps) {
        std::vector<DataPair> pairs;
        for (int i = 0; i < count; ++i)
            pairs.emplace_back(base[i], FirstOrderData{base[i].plus + cplx(e) * dir[i].plus,
                                                       base[i].minus + cplx(e) * dir[i].minus});
        const auto rep = flow_lipschitz_probe(pairs, ns, sc, workers);
        for (std::size_t i = 0; i < rep.samples.size(); ++i) {
            const auto& s = rep.samples[i];
            out.table.add({fmt(e), fmt(static_cast<int>(i)), fmt(s.data_distance), fmt(s.solution_distance),
                           fmt(s.ratio), fmt(s.skipped), fmt(s.excluded)});
        }
        maxima.push_back(rep.max_ratio);
        excluded += rep.excluded;
    }
    double deviation = 0.0;
    for (std::size_t i = 1; i < maxima.size(); ++i)
        deviation = std::max(deviation, std::abs(maxima[i] / maxima[i - 1] - 1.0));
    const double runtime = seconds_since(start);
    out.results["max_ratio"] = maxima;
    out.results["excluded"] = excluded;
    out.checks.push_back({"no-exclusions", excluded == 0, "every member contracts", static_cast<double>(excluded), runtime});
    out.checks.push_back({"ratio-stability", deviation <= 0.3 && maxima.front() > 0.0,
                          "max ratio within 30% under each perturbation change", deviation, runtime});

    const auto amplitudes = cfg.list("lipschitz.amplitudes");
    if (amplitudes.empty()) return;
    const auto t0 = Clock::now();
    Table table{{"amplitude", "data_size", "delta", "rho1", "attempts", "found"}, {}};
    bool monotone = true;
    double prev = INFINITY;
    for (double a : amplitudes) {
        const auto f = family_data(cfg, g, a, a * (amp > 0.0 ? vel / amp : 0.5), seed * 1000);
        const auto sel = select_delta(f, ns, sc, rho_max, c);
        table.add({fmt(a), fmt(data_size(f, sc.r, sc.s)), fmt(sel.delta), fmt(sel.rho1), fmt(sel.attempts),
                   fmt(sel.found)});
        monotone = monotone && sel.found && sel.delta <= prev;
        prev = sel.delta;
    }
    out.tables.emplace_back("delta", std::move(table));
    out.checks.push_back({"delta-monotone", monotone, "delta found and nonincreasing in the data size", 0.0,
                          seconds_since(t0)});
}

}  // namespace

void execute(const RunConfig& cfg, Outcome& out) {
    const auto& c = cfg.command();
    if (c == "norms") return cmd_norms(cfg, out);
    if (c == "reduce") return cmd_reduce(cfg, out);
    if (c == "lemma") return cmd_lemma(cfg, out);
    if (c == "key") return cmd_key(cfg, out);
    if (c == "sharpness") return cmd_sharpness(cfg, out);
    if (c == "lowfreq") return cmd_lowfreq(cfg, out);
    if (c == "strichartz") return cmd_strichartz(cfg, out);
    if (c == "extremize") return cmd_extremize(cfg, out);
    if (c == "solve") return cmd_solve(cfg, out);
    if (c == "lipschitz") return cmd_lipschitz(cfg, out);
    throw ConfigError("unknown command '" + c + "'");
}

int run(const RunConfig& cfg, std::ostream& log) {
    Outcome out;
    const auto start = Clock::now();
    int status = kExitPass;
    try {
        execute(cfg, out);
    } catch (const ConfigError& e) {
        out.complete = false;
        out.error = e.what();
        status = kExitUsage;
    } catch (const qwave::Error& e) {
        out.complete = false;
        out.error = e.what();
        status = kExitUsage;
    }
    const double runtime = seconds_since(start);
    if (!out.complete) {
        log << "error: " << out.error << "\n";
        // nothing computed yet: leave no outputs behind
        if (out.table.rows.empty() && out.tables.empty()) return status;
        write_outputs(cfg.text("run.out"), cfg.command(), cfg.echo(), out, runtime);
        log << "partial results written to " << cfg.text("run.out") << " (flagged incomplete)\n";
        return status;
    }
    write_outputs(cfg.text("run.out"), cfg.command(), cfg.echo(), out, runtime);
    for (const auto& c : out.checks) log << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.criterion << "\n";
    return out.passed() ? kExitPass : kExitFail;
}

}  // namespace qwave::cli
