#include "qwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "qwave/error.hpp"
#include "qwave/parallel.hpp"
#include "qwave/propagator.hpp"

namespace qwave {

namespace {

constexpr cplx kI(0.0, 1.0);

SpacetimeField to_spectral(const SpacetimeField& f, const char* where) {
    if (f.rep == Representation::Configuration) return spatial_forward(f);
    require_rep(f, Representation::SpatialFrequency, where);
    return f;
}

SpacetimeField like(const SpacetimeField& f, Representation rep) {
    return rep == Representation::Configuration ? spatial_inverse(f) : f;
}

int derivative_axis(Derivative d) {
    switch (d) {
        case Derivative::X1: return 0;
        case Derivative::X2: return 1;
        case Derivative::X3: return 2;
        case Derivative::T: break;
    }
    return -1;
}

// Per-grid symbols, built once per solve.
struct Workspace {
    SpatialGrid grid;
    std::vector<cplx> j, jinv, half_j_over_i, lap;
    std::array<std::vector<cplx>, 3> d;
    std::vector<std::size_t> aliased;

    explicit Workspace(const SpatialGrid& g) : grid(g) {
        const std::size_t n3 = g.size();
        j.resize(n3);
        jinv.resize(n3);
        half_j_over_i.resize(n3);
        lap.resize(n3);
        for (auto& v : d) v.resize(n3);
        const int keep = g.n / 3;
        for (std::size_t i = 0; i < n3; ++i) {
            const Vec3 xi = g.frequency(i);
            const double b = bracket(norm3(xi));
            j[i] = b;
            jinv[i] = 1.0 / b;
            half_j_over_i[i] = b / (2.0 * kI);
            lap[i] = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            for (int a = 0; a < 3; ++a) d[a][i] = kI * xi[a];
            const auto m = g.modes(i);
            if (std::abs(m[0]) > keep || std::abs(m[1]) > keep || std::abs(m[2]) > keep) aliased.push_back(i);
        }
    }

    void multiply(SpacetimeField& f, const std::vector<cplx>& sym) const {
        const std::size_t n3 = sym.size();
        for (int n = 0; n < f.grid.m; ++n) {
            cplx* s = f.slice(n);
            for (std::size_t i = 0; i < n3; ++i) s[i] *= sym[i];
        }
    }

    void dealias(SpacetimeField& f) const {
        for (int n = 0; n < f.grid.m; ++n) {
            cplx* s = f.slice(n);
            for (auto i : aliased) s[i] = 0.0;
        }
    }

    // dealiased a * b, inputs and output SpatialFrequency
    SpacetimeField product(SpacetimeField a, SpacetimeField b) const {
        dealias(a);
        dealias(b);
        a = spatial_inverse(a);
        b = spatial_inverse(b);
        for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] *= b.data[i];
        a = spatial_forward(a);
        dealias(a);
        return a;
    }

    SpacetimeField square(SpacetimeField a) const {
        dealias(a);
        a = spatial_inverse(a);
        for (auto& v : a.data) v *= v;
        a = spatial_forward(a);
        dealias(a);
        return a;
    }

    // u = (u+ + u-)/2 and u_t = J (u+ - u-) / 2i
    std::pair<SpacetimeField, SpacetimeField> split(const SpacetimeField& up, const SpacetimeField& um,
                                                    bool with_ut) const {
        SpacetimeField u = up, ut;
        u += um;
        u *= 0.5;
        if (with_ut) {
            ut = up;
            ut -= um;
            multiply(ut, half_j_over_i);
        }
        return {std::move(u), std::move(ut)};
    }

    // B_k(u, u) from u and u_t
    SpacetimeField quadratic(const SpacetimeField& u, const SpacetimeField& ut, const NonlinearitySpec& ns) const {
        const int axis = derivative_axis(ns.derivative);
        if (ns.k == 1) {
            if (axis < 0) return cplx(2.0) * product(u, ut);
            auto out = square(u);
            multiply(out, d[axis]);
            return out;
        }
        if (axis < 0) return square(ut);
        SpacetimeField du = u;
        multiply(du, d[axis]);
        return square(std::move(du));
    }

    // h with g+ = -h, g- = h
    SpacetimeField rhs(const SpacetimeField& up, const SpacetimeField& um, const NonlinearitySpec& ns) const {
        const bool need_ut = ns.quadratic && ns.derivative == Derivative::T;
        auto [u, ut] = split(up, um, need_ut);
        SpacetimeField h = u;
        if (ns.quadratic) h += quadratic(u, ut, ns);
        if (ns.source) {
            require_same_grid(ns.source->grid, h.grid, "rhs_eval source");
            h += to_spectral(*ns.source, "rhs_eval source");
        }
        multiply(h, jinv);
        return h;
    }
};

bool inside(const SpacetimeGrid& g, int n, double delta) { return std::abs(g.time(n)) <= delta + 1e-9 * g.dt(); }

void zero_outside(SpacetimeField& f, double delta) {
    const std::size_t n3 = f.grid.spatial.size();
    for (int n = 0; n < f.grid.m; ++n)
        if (!inside(f.grid, n, delta)) std::fill(f.slice(n), f.slice(n) + n3, cplx(0));
}

// sup over |t| <= delta of the H^r_s norm of a SpatialFrequency field
double sup_norm(const SpacetimeField& f, double delta, double r, const std::vector<double>& weights) {
    double m = 0.0;
    for (int n = 0; n < f.grid.m; ++n)
        if (inside(f.grid, n, delta)) m = std::max(m, sobolev_hat_norm(f.slice(n), f.grid.spatial, r, weights));
    return m;
}

double slice_l2(const SpacetimeField& f, int n) {
    const std::size_t n3 = f.grid.spatial.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n3; ++i) acc += std::norm(f.slice(n)[i]);
    return std::sqrt(acc * std::pow(f.grid.spatial.dxi(), 3));
}

// restricted X norm of a SpatialFrequency field
double windowed_norm(const SpacetimeField& f, const WindowSpec& w, const XsbWeights& x) {
    return x(time_forward(apply_window(f, w)));
}

}  // namespace

FirstOrderData to_first_order(const CauchyData& d) {
    require_same_grid(d.u0.grid, d.u1.grid, "to_first_order");
    require_rep(d.u0, Representation::Frequency, "to_first_order");
    require_rep(d.u1, Representation::Frequency, "to_first_order");
    FirstOrderData f{d.u0, d.u0};
    for (std::size_t i = 0; i < d.u0.data.size(); ++i) {
        const cplx v = kI * d.u1.data[i] / bracket(norm3(d.u0.grid.frequency(i)));
        f.plus.data[i] += v;
        f.minus.data[i] -= v;
    }
    return f;
}

CauchyData from_first_order(const FirstOrderData& f, double r, double s) {
    require_same_grid(f.plus.grid, f.minus.grid, "from_first_order");
    require_rep(f.plus, Representation::Frequency, "from_first_order");
    require_rep(f.minus, Representation::Frequency, "from_first_order");
    CauchyData d{f.plus, f.plus, r, s};
    for (std::size_t i = 0; i < d.u0.data.size(); ++i) {
        const cplx p = f.plus.data[i], m = f.minus.data[i];
        d.u0.data[i] = 0.5 * (p + m);
        d.u1.data[i] = bracket(norm3(f.plus.grid.frequency(i))) * (p - m) / (2.0 * kI);
    }
    return d;
}

const char* to_string(Derivative d) {
    switch (d) {
        case Derivative::T: return "t";
        case Derivative::X1: return "x1";
        case Derivative::X2: return "x2";
        case Derivative::X3: return "x3";
    }
    return "?";
}

Derivative parse_derivative(const std::string& name) {
    for (auto d : {Derivative::T, Derivative::X1, Derivative::X2, Derivative::X3})
        if (name == to_string(d)) return d;
    throw ParameterError("unknown derivative '" + name + "' (expected t, x1, x2 or x3)");
}

void validate(const NonlinearitySpec& ns) {
    if (ns.k != 1 && ns.k != 2) throw ParameterError("nonlinearity: k must be 1 or 2, got " + std::to_string(ns.k));
    if (ns.source && ns.source->rep == Representation::Frequency)
        throw ParameterError("nonlinearity: source must be given per time slice");
}

void SolveConfig::validate() const {
    require_lebesgue_index(r, "solve config");
    if (!(r > 1.0)) throw ParameterError("solve config: r must exceed 1");
    if (!(b > 1.0 / r && b < 1.0)) throw ParameterError("solve config: b must lie in (1/r, 1)");
    if (!(delta > 0.0)) throw ParameterError("solve config: delta must be positive");
    if (delta > window.flat_core() + 1e-12)
        throw ParameterError("solve config: delta exceeds the flat core of the window");
    if (window.support > grid.half_time + 1e-12) throw ParameterError("solve config: window exceeds the time box");
    if (max_iterations < 1) throw ParameterError("solve config: max_iterations must be positive");
    if (!(tolerance > 0.0)) throw ParameterError("solve config: tolerance must be positive");
}

SpacetimeField dealias(const SpacetimeField& f) {
    require_rep(f, Representation::SpatialFrequency, "dealias");
    SpacetimeField out = f;
    Workspace(f.grid.spatial).dealias(out);
    return out;
}

FieldPair reconstruct(const FieldPair& u) {
    require_same_grid(u.plus.grid, u.minus.grid, "reconstruct");
    const auto rep = u.plus.rep;
    auto [v, vt] = Workspace(u.plus.grid.spatial)
                       .split(to_spectral(u.plus, "reconstruct"), to_spectral(u.minus, "reconstruct"), true);
    return {like(v, rep), like(vt, rep)};
}

SpacetimeField quadratic_term(const FieldPair& u, const NonlinearitySpec& ns) {
    validate(ns);
    require_same_grid(u.plus.grid, u.minus.grid, "quadratic_term");
    const Workspace ws(u.plus.grid.spatial);
    auto [v, vt] = ws.split(to_spectral(u.plus, "quadratic_term"), to_spectral(u.minus, "quadratic_term"), true);
    return ws.quadratic(v, vt, ns);
}

FieldPair rhs_eval(const FieldPair& u, const NonlinearitySpec& ns) {
    validate(ns);
    require_same_grid(u.plus.grid, u.minus.grid, "rhs_eval");
    const auto rep = u.plus.rep;
    auto h = Workspace(u.plus.grid.spatial).rhs(to_spectral(u.plus, "rhs_eval"), to_spectral(u.minus, "rhs_eval"), ns);
    return {like(cplx(-1.0) * h, rep), like(h, rep)};
}

double data_size(const FirstOrderData& f, double r, double s) {
    return std::max(sobolev_hat_norm(f.plus, r, s), sobolev_hat_norm(f.minus, r, s));
}

PicardResult picard_iterate(const FirstOrderData& f, const NonlinearitySpec& ns, const SolveConfig& cfg) {
    cfg.validate();
    validate(ns);
    const auto& g = cfg.grid;
    require_same_grid(f.plus.grid, g.spatial, "picard_iterate");
    require_same_grid(f.minus.grid, g.spatial, "picard_iterate");

    const FieldPair free{free_spacetime_spectral(f.plus, g, {EvolutionKind::Bessel, Sign::Plus}),
                         free_spacetime_spectral(f.minus, g, {EvolutionKind::Bessel, Sign::Minus})};
    const auto ws = bracket_weights(g.spatial, cfg.s);
    const Workspace work(g.spatial);
    const XsbWeights xplus(g, NormParams::make(cfg.r, cfg.s, cfg.b, flip(Sign::Plus)));
    const XsbWeights xminus(g, NormParams::make(cfg.r, cfg.s, cfg.b, flip(Sign::Minus)));
    PicardResult res;
    res.u = free;
    int growing = 0;
    double prev = 0.0;
    for (int n = 0; n < cfg.max_iterations; ++n) {
        auto h = work.rhs(res.u.plus, res.u.minus, ns);
        zero_outside(h, cfg.delta);
        FieldPair next{free.plus - duhamel(h, Sign::Plus), free.minus + duhamel(h, Sign::Minus)};

        PicardStep step;
        step.n = n;
        double scale = 0.0;
        for (auto [a, b, x] : {std::tuple{&next.plus, &res.u.plus, &xplus},
                               std::tuple{&next.minus, &res.u.minus, &xminus}}) {
            const auto diff = *a - *b;
            step.distance = std::max(step.distance, sup_norm(diff, cfg.delta, cfg.r, ws));
            step.restricted_distance = std::max(step.restricted_distance, windowed_norm(diff, cfg.window, *x));
            scale = std::max(scale, sup_norm(*a, cfg.delta, cfg.r, ws));
        }
        step.rho = n > 0 && prev > 0.0 ? step.distance / prev : 0.0;
        res.steps.push_back(step);
        res.u = std::move(next);
        res.iterations = n + 1;

        if (!std::isfinite(step.distance) || !std::isfinite(scale)) {
            res.diverged = true;
            res.note = "iterates became non-finite at step " + std::to_string(n);
            break;
        }
        growing = n > 0 && step.distance > prev ? growing + 1 : 0;
        if (growing >= 3) {
            res.diverged = true;
            res.note = "iterate distance grew three steps in a row (last rho " + std::to_string(step.rho) + ")";
            break;
        }
        if (step.distance <= cfg.tolerance * scale) {
            res.converged = true;
            break;
        }
        prev = step.distance;
    }
    if (!res.converged && !res.diverged) res.note = "iteration budget exhausted";
    return res;
}

ResidualReport residual(const FieldPair& u, const NonlinearitySpec& ns, const SolveConfig& cfg) {
    validate(ns);
    const auto& g = u.plus.grid;
    const std::size_t n3 = g.spatial.size();
    const double dt = g.dt();
    const Workspace work(g.spatial);
    const SpacetimeField v = work.split(to_spectral(u.plus, "residual"), to_spectral(u.minus, "residual"), false).first;

    // fourth-order central differences on slices whose stencil stays in [-delta, delta]
    std::vector<int> interior;
    for (int n = 2; n + 2 < g.m; ++n)
        if (inside(g, n - 2, cfg.delta) && inside(g, n + 2, cfg.delta)) interior.push_back(n);
    SpacetimeField vt(g, Representation::SpatialFrequency), vtt(g, Representation::SpatialFrequency);
    for (int n : interior) {
        const cplx *a = v.slice(n - 2), *b = v.slice(n - 1), *c = v.slice(n), *d = v.slice(n + 1), *e = v.slice(n + 2);
        cplx* t1 = vt.slice(n);
        cplx* t2 = vtt.slice(n);
        for (std::size_t i = 0; i < n3; ++i) {
            t1[i] = (a[i] - 8.0 * b[i] + 8.0 * d[i] - e[i]) / (12.0 * dt);
            t2[i] = (-a[i] + 16.0 * b[i] - 30.0 * c[i] + 16.0 * d[i] - e[i]) / (12.0 * dt * dt);
        }
    }
    SpacetimeField lap = v;
    work.multiply(lap, work.lap);
    SpacetimeField B(g, Representation::SpatialFrequency);
    if (ns.quadratic) B = work.quadratic(v, vt, ns);
    SpacetimeField src(g, Representation::SpatialFrequency);
    if (ns.source) src = to_spectral(*ns.source, "residual source");

    ResidualReport rep;
    rep.interior_slices = static_cast<int>(interior.size());
    double scale = 0.0;
    SpacetimeField res = vtt + lap - B - src;
    for (int n : interior) {
        rep.absolute = std::max(rep.absolute, slice_l2(res, n));
        for (const auto* f : {&vtt, &lap, &B, &src}) scale = std::max(scale, slice_l2(*f, n));
    }
    rep.relative = scale > 0.0 ? rep.absolute / scale : 0.0;
    return rep;
}

SolveResult solve_local(const FirstOrderData& f, const NonlinearitySpec& ns, const SolveConfig& cfg) {
    SolveResult out;
    out.picard = picard_iterate(f, ns, cfg);
    const auto& pu = out.picard.u;
    const auto& g = cfg.grid;
    out.u = spatial_inverse(reconstruct(pu).plus);
    out.residual = residual(pu, ns, cfg);

    const auto ws = bracket_weights(g.spatial, cfg.s);
    double peak = 0.0;
    for (int n = 0; n < g.m; ++n) {
        if (!inside(g, n, cfg.delta)) continue;
        out.times.push_back(g.time(n));
        out.persistence_plus.push_back(sobolev_hat_norm(pu.plus.slice(n), g.spatial, cfg.r, ws));
        out.persistence_minus.push_back(sobolev_hat_norm(pu.minus.slice(n), g.spatial, cfg.r, ws));
        peak = std::max({peak, out.persistence_plus.back(), out.persistence_minus.back()});
    }
    for (std::size_t i = 1; i < out.times.size(); ++i)
        for (const auto* curve : {&out.persistence_plus, &out.persistence_minus})
            out.max_jump = std::max(out.max_jump, std::abs((*curve)[i] - (*curve)[i - 1]));
    if (peak > 0.0) out.max_jump /= peak;

    if (ns.k == 2) {
        // d_t u_pm = -+ i J u_pm - i g_pm, with g as seen by the last iterate
        const Workspace work(g.spatial);
        auto h = work.rhs(pu.plus, pu.minus, ns);
        zero_outside(h, cfg.delta);
        double z = 0.0;
        for (auto [u, sign] : {std::pair{&pu.plus, Sign::Plus}, std::pair{&pu.minus, Sign::Minus}}) {
            // g+ = -h, g- = h
            SpacetimeField ut = *u;
            std::vector<cplx> j = work.j;
            for (auto& c : j) c *= -sign_value(sign) * kI;
            work.multiply(ut, j);
            ut -= (sign == Sign::Plus ? -kI : kI) * h;
            z = std::max(z, z_norm(apply_window(spatial_inverse(*u), cfg.window),
                                   apply_window(spatial_inverse(ut), cfg.window),
                                   NormParams::make(cfg.r, cfg.s, cfg.b, flip(sign))));
        }
        out.z_norm = z;
    }

    out.ok = out.picard.converged;
    if (!out.ok) out.failure = out.picard.diverged ? "no contraction: " + out.picard.note : out.picard.note;
    return out;
}

DeltaSelection select_delta(const FirstOrderData& f, const NonlinearitySpec& ns, const SolveConfig& cfg,
                            double rho_max, double c) {
    if (!(rho_max > 0.0 && rho_max < 1.0)) throw ParameterError("select_delta: rho_max must lie in (0, 1)");
    if (!(c > 0.0)) throw ParameterError("select_delta: c must be positive");
    DeltaSelection sel;
    SolveConfig trial = cfg;
    trial.max_iterations = 2;
    trial.delta = std::min({1.0, c / (1.0 + data_size(f, cfg.r, cfg.s)), cfg.window.flat_core()});
    const double floor = 2.0 * cfg.grid.dt();
    while (trial.delta >= floor) {
        ++sel.attempts;
        const auto res = picard_iterate(f, ns, trial);
        sel.delta = trial.delta;
        sel.rho1 = res.steps.size() > 1 ? res.steps[1].rho : 0.0;
        if (sel.rho1 < rho_max) {
            sel.found = true;
            return sel;
        }
        trial.delta *= 0.5;
    }
    return sel;
}

LipschitzReport flow_lipschitz_probe(const std::vector<DataPair>& pairs, const NonlinearitySpec& ns,
                                     const SolveConfig& cfg, int workers) {
    const auto ws = bracket_weights(cfg.grid.spatial, cfg.s);
    auto samples = parallel_map(pairs, [&](const DataPair& pr) {
        LipschitzSample s;
        const auto& [a, b] = pr;
        s.data_distance = std::max(sobolev_hat_norm(a.plus - b.plus, cfg.r, cfg.s),
                                   sobolev_hat_norm(a.minus - b.minus, cfg.r, cfg.s));
        if (s.data_distance == 0.0) {
            s.skipped = true;
            return s;
        }
        const auto ua = picard_iterate(a, ns, cfg);
        const auto ub = picard_iterate(b, ns, cfg);
        if (!ua.converged || !ub.converged) {
            s.excluded = true;
            return s;
        }
        s.solution_distance = std::max(sup_norm(ua.u.plus - ub.u.plus, cfg.delta, cfg.r, ws),
                                       sup_norm(ua.u.minus - ub.u.minus, cfg.delta, cfg.r, ws));
        s.ratio = s.solution_distance / s.data_distance;
        return s;
    }, workers);
    LipschitzReport rep;
    for (const auto& s : samples) {
        if (s.excluded) ++rep.excluded;
        if (!s.skipped && !s.excluded) rep.max_ratio = std::max(rep.max_ratio, s.ratio);
    }
    rep.samples = std::move(samples);
    return rep;
}

}  // namespace qwave
