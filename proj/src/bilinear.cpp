#include "qwave/bilinear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qwave/error.hpp"
#include "qwave/propagator.hpp"
#include "qwave/quadrature.hpp"

namespace qwave {

namespace {

// int_l^r (x - l)^{al} (r - x)^{ar} smooth(x) dx.
//
// The panel is halved and each half gets the substitution
// x - l = (m - l) u^{1/(1+al)} (mirrored on the right), which absorbs the
// endpoint power exactly; the remaining bounded integrand goes to tanh-sinh.
double power_panel(double l, double r, double al, double ar, const std::function<double(double)>& smooth) {
    const double m = 0.5 * (l + r);
    double total = 0.0;

    {
        const double width = m - l;
        const double beta = 1.0 / (1.0 + al);
        const double scale = std::pow(width, al + 1.0) * beta;
        auto f = [&](double u, double, double) {
            const double x = l + width * std::pow(u, beta);
            return std::pow(r - x, ar) * smooth(x);
        };
        total += scale * quad::tanh_sinh(f, 0.0, 1.0, 1e-14, 1e-300).value;
    }
    {
        const double width = r - m;
        const double beta = 1.0 / (1.0 + ar);
        const double scale = std::pow(width, ar + 1.0) * beta;
        auto f = [&](double u, double, double) {
            const double x = r - width * std::pow(u, beta);
            return std::pow(x - l, al) * smooth(x);
        };
        total += scale * quad::tanh_sinh(f, 0.0, 1.0, 1e-14, 1e-300).value;
    }
    return total;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

const char* to_string(Region region) {
    switch (region) {
        case Region::Elliptic: return "elliptic";
        case Region::HyperbolicNear: return "hyperbolic-near";
        case Region::HyperbolicFar: return "hyperbolic-far";
    }
    return "?";
}

ReductionSpec ReductionSpec::from_regularity(double r, double s1, double s2, double a, Region region, double c1) {
    ReductionSpec spec;
    spec.a = a;
    spec.p = 1.0 - s1 * r;
    spec.q = 1.0 - s2 * r;
    spec.region = region;
    spec.c1 = c1;
    spec.r = r;
    spec.s1 = s1;
    spec.s2 = s2;
    return spec;
}

void validate(const ReductionSpec& spec) {
    // the far range stays clear of x = +-a, so only decay at infinity matters there
    const bool far = spec.region == Region::HyperbolicFar;
    if (!far && !(spec.p > -1.0)) throw ParameterError("reduction: p = " + fmt(spec.p) + " violates p > -1");
    if (!far && !(spec.q > -1.0)) throw ParameterError("reduction: q = " + fmt(spec.q) + " violates q > -1");
    if (!std::isfinite(spec.a)) throw ParameterError("reduction: a must be finite");
    if (spec.region == Region::Elliptic) {
        if (!(spec.a >= 1.0)) throw ParameterError("reduction: elliptic region requires a >= 1, got " + fmt(spec.a));
        return;
    }
    if (!(std::abs(spec.a) <= 1.0))
        throw ParameterError("reduction: hyperbolic regions require |a| <= 1, got " + fmt(spec.a));
    if (!(spec.c1 > 1.0)) throw ParameterError("reduction: c1 must exceed 1, got " + fmt(spec.c1));
    if (spec.region == Region::HyperbolicFar && !(spec.p + spec.q < -1.0))
        throw DivergenceError("reduction: far-region integral diverges, p + q = " + fmt(spec.p + spec.q) +
                              " is not below -1");
}

double reduction_integral(const ReductionSpec& spec) {
    validate(spec);
    const double a = spec.a, p = spec.p, q = spec.q;

    if (spec.region == Region::HyperbolicFar) {
        // x = c1 / t:  c1^{p+q+1} t^{-(p+q)-2} |1 + a t/c1|^p |1 - a t/c1|^q dt on (0, 1]
        const double c1 = spec.c1;
        auto smooth = [=](double t) {
            return std::pow(std::abs(1.0 + a * t / c1), p) * std::pow(std::abs(1.0 - a * t / c1), q);
        };
        return std::pow(c1, p + q + 1.0) * power_panel(0.0, 1.0, -(p + q) - 2.0, 0.0, smooth);
    }

    const double lo = spec.region == Region::Elliptic ? -1.0 : 1.0;
    const double hi = spec.region == Region::Elliptic ? 1.0 : spec.c1;
    std::vector<double> cuts{lo, hi};
    for (double s : {-a, a})
        if (s > lo && s < hi) cuts.push_back(s);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // singular points: x = -a carries exponent p, x = a carries q
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double l = cuts[i], r = cuts[i + 1];
        const bool p_left = l == -a, p_right = r == -a;
        const bool q_left = l == a, q_right = r == a;
        const double al = (p_left ? p : 0.0) + (q_left ? q : 0.0);
        const double ar = (p_right ? p : 0.0) + (q_right ? q : 0.0);
        auto smooth = [=](double x) {
            double v = 1.0;
            if (!p_left && !p_right) v *= std::pow(std::abs(a + x), p);
            if (!q_left && !q_right) v *= std::pow(std::abs(a - x), q);
            return v;
        };
        total += power_panel(l, r, al, ar, smooth);
    }
    return total;
}

namespace {

constexpr double kNone = -1.0;

// z >= 0 with rho1 + rho2 = c at transverse radius rho; kNone if the
// ellipsoid does not reach rho.
double ellipsoid_z(double c, double d, double rho) {
    const double A = 0.5 * c;
    const double B2 = A * A - d * d;
    if (!(B2 > 0.0) || rho * rho >= B2) return kNone;
    return A * std::sqrt(1.0 - rho * rho / B2);
}

double ellipsoid_radius(double c, double d) {
    const double A = 0.5 * c;
    return A > d ? std::sqrt(A * A - d * d) : 0.0;
}

// z with rho1 - rho2 = c at radius rho; rho1 is measured from the focus at
// z = +d, so the difference decreases along z.
double hyperboloid_z(double c, double d, double rho) {
    if (c >= 2 * d) return -INFINITY;
    if (c <= -2 * d) return INFINITY;
    if (c == 0.0) return 0.0;
    const double A = 0.5 * std::abs(c);
    const double B2 = d * d - A * A;
    const double z = A * std::sqrt(1.0 + rho * rho / B2);
    return c > 0 ? -z : z;
}

struct Interval {
    double lo, hi;
};

// z-intervals where |P - tau| < h at radius rho.
int shell_intervals(bool elliptic, double tau, double h, double d, double rho, const SurfaceDomain& dom,
                    Interval out[2]) {
    int count = 0;
    auto push = [&](double lo, double hi) {
        lo = std::max(lo, dom.z_min);
        hi = std::min(hi, dom.z_max);
        if (hi > lo) out[count++] = {lo, hi};
    };
    if (elliptic) {
        const double outer = ellipsoid_z(tau + h, d, rho);
        if (outer == kNone) return 0;
        const double inner = ellipsoid_z(tau - h, d, rho);
        if (inner == kNone) {
            push(-outer, outer);
        } else {
            push(-outer, -inner);
            push(inner, outer);
        }
    } else {
        push(hyperboloid_z(tau + h, d, rho), hyperboloid_z(tau - h, d, rho));
    }
    return count;
}

double thickened_mass(bool elliptic, double tau, double h, double d, const RadialWeight& f, const SurfaceDomain& dom,
                      double rho_max, int panels) {
    const auto& rule = quad::gauss_legendre(4);
    auto row = [&](double rho) {
        Interval iv[2];
        const int k = shell_intervals(elliptic, tau, h, d, rho, dom, iv);
        double acc = 0.0;
        for (int j = 0; j < k; ++j) {
            const double width = (iv[j].hi - iv[j].lo) / panels;
            for (int p = 0; p < panels; ++p) {
                const double c = iv[j].lo + (p + 0.5) * width;
                for (const auto& [x, w] : rule) {
                    const double z = c + 0.5 * width * x;
                    const double r1 = std::hypot(d - z, rho);
                    const double r2 = std::hypot(d + z, rho);
                    acc += w * 0.5 * width * f(r1, r2);
                }
            }
        }
        return 2.0 * M_PI * rho * acc;
    };

    std::vector<double> cuts{0.0};
    if (elliptic) {
        const double inner = std::min(ellipsoid_radius(tau - h, d), rho_max);
        const double outer = std::min(ellipsoid_radius(tau + h, d), rho_max);
        if (inner > 0.0) cuts.push_back(inner);
        cuts.push_back(outer);
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            if (cuts[i + 1] > cuts[i]) total += quad::gauss_composite(row, cuts[i], cuts[i + 1], panels);
        return total / (2.0 * h);
    }
    // hyperbolic: uniform near the foci, geometric panels further out
    const double knee = std::min(4.0 * d, rho_max);
    double total = quad::gauss_composite(row, 0.0, knee, panels);
    if (rho_max > knee) {
        const double ratio = std::pow(rho_max / knee, 1.0 / panels);
        double a = knee;
        for (int i = 0; i < panels; ++i) {
            const double b = i + 1 == panels ? rho_max : a * ratio;
            total += quad::gauss_composite(row, a, b, 1);
            a = b;
        }
    }
    return total / (2.0 * h);
}

}  // namespace

SurfaceMass surface_mass(const Vec3& xi, double tau, const SignPair& sp, const RadialWeight& f, double h,
                         const SurfaceDomain& domain) {
    if (!(h > 0.0)) throw ParameterError("surface_mass: thickness h must be positive");
    const double k = norm3(xi);
    const double t = sp.u == Sign::Plus ? tau : -tau;
    const bool elliptic = sp.elliptic();
    SurfaceMass out;
    if (k == 0.0 || (elliptic && !(t > k)) || (!elliptic && !(std::abs(t) < k))) {
        out.empty = true;
        out.stable = true;
        return out;
    }
    const double d = 0.5 * k;
    double rho_max = domain.rho_max;
    SurfaceDomain dom = domain;
    if (rho_max <= 0.0) rho_max = elliptic ? INFINITY : 10.0 * k;
    if (!elliptic) {
        dom.z_min = std::max(dom.z_min, -rho_max - d);
        dom.z_max = std::min(dom.z_max, rho_max + d);
    }

    auto converge = [&](double hh, bool& stable, int& panels) {
        double prev = thickened_mass(elliptic, t, hh, d, f, dom, rho_max, 8);
        stable = false;
        for (int n = 16; n <= 512; n *= 2) {
            const double cur = thickened_mass(elliptic, t, hh, d, f, dom, rho_max, n);
            panels = n;
            const double change = std::abs(cur - prev);
            prev = cur;
            if (change <= 2e-3 * std::abs(cur) || cur == 0.0) {
                stable = true;
                break;
            }
            if (n == 512) stable = change <= 1e-2 * std::abs(cur);
        }
        return prev;
    };

    bool s1 = false, s2 = false;
    int p1 = 0, p2 = 0;
    out.value_h = converge(h, s1, p1);
    out.value_half = converge(0.5 * h, s2, p2);
    out.value = (4.0 * out.value_half - out.value_h) / 3.0;
    out.stable = s1 && s2;
    out.panels = std::max(p1, p2);
    return out;
}

const Calibration& surface_calibration() {
    static const Calibration cal = [] {
        Calibration c;
        const std::vector<std::pair<double, double>> probes{{1.0, 1.5}, {2.0, 2.5}, {0.5, 2.0}, {3.0, 3.3}, {1.0, 4.0}};
        for (auto [k, tau] : probes) {
            const double h = 0.05 * std::min(tau - k, k);
            auto m = surface_mass({k, 0, 0}, tau, {Sign::Plus, Sign::Plus}, [](double, double) { return 1.0; }, h);
            ReductionSpec spec;
            spec.a = tau / k;
            spec.p = spec.q = 1.0;
            c.samples.push_back(m.value / (k * k * reduction_integral(spec)));
        }
        double sum = 0.0;
        for (double v : c.samples) sum += v;
        c.c_cal = sum / c.samples.size();
        auto [lo, hi] = std::minmax_element(c.samples.begin(), c.samples.end());
        c.spread = (*hi - *lo) / c.c_cal;
        return c;
    }();
    return cal;
}

double predicted_surface_mass(double abs_xi, const ReductionSpec& spec, double c_cal) {
    const double pq = spec.p + spec.q;
    return 4.0 * c_cal * std::pow(2.0, -pq) * std::pow(abs_xi, pq) * reduction_integral(spec);
}

SpacetimeSpectrum product_transform_direct(const Spectrum& u0, const Spectrum& v0, const SignPair& sp,
                                           const SpacetimeGrid& g, const WindowSpec& w) {
    require_same_grid(u0.grid, g.spatial, "product_transform_direct");
    require_same_grid(v0.grid, g.spatial, "product_transform_direct");
    if (w.support > g.half_time) throw ParameterError("product_transform_direct: window exceeds the time box");
    auto u = free_spacetime(u0, g, {EvolutionKind::HalfWave, sp.u});
    auto v = free_spacetime(v0, g, {EvolutionKind::HalfWave, sp.v});
    for (std::size_t i = 0; i < u.data.size(); ++i) u.data[i] *= v.data[i];
    return forward_transform(apply_window(u, w));
}

SpacetimeSpectrum bilinear_symbol_product(const Spectrum& u0, const Spectrum& v0, const SignPair& sp,
                                          const PairMask& mask, const SpacetimeGrid& g, const WindowSpec& w) {
    require_same_grid(u0.grid, g.spatial, "bilinear_symbol_product");
    require_same_grid(v0.grid, g.spatial, "bilinear_symbol_product");
    require_rep(u0, Representation::Frequency, "bilinear_symbol_product");
    require_rep(v0, Representation::Frequency, "bilinear_symbol_product");
    const auto& sg = g.spatial;
    if (sg.n > kMaxMaskedN)
        throw SizeError("bilinear_symbol_product: N = " + std::to_string(sg.n) + " exceeds the O(N^6) budget N <= " +
                        std::to_string(kMaxMaskedN));
    if (w.support > g.half_time) throw ParameterError("bilinear_symbol_product: window exceeds the time box");

    std::vector<std::uint32_t> su, sv;
    for (std::size_t i = 0; i < sg.size(); ++i) {
        if (u0.data[i] != cplx(0)) su.push_back(static_cast<std::uint32_t>(i));
        if (v0.data[i] != cplx(0)) sv.push_back(static_cast<std::uint32_t>(i));
    }
    struct Pair {
        std::uint32_t out, a, b;
    };
    std::vector<Pair> pairs;
    for (auto a : su) {
        const auto ma = sg.modes(a);
        const Vec3 xa = sg.frequency(a);
        for (auto b : sv) {
            const auto mb = sg.modes(b);
            if (!mask(xa, sg.frequency(b))) continue;
            pairs.push_back({static_cast<std::uint32_t>(sg.index_of_modes(ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2])),
                             a, b});
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.out < y.out; });

    auto uf = free_spacetime_spectral(u0, g, {EvolutionKind::HalfWave, sp.u});
    auto vf = free_spacetime_spectral(v0, g, {EvolutionKind::HalfWave, sp.v});
    SpacetimeField out(g, Representation::SpatialFrequency);
    const double norm = std::pow(sg.dxi() / (2.0 * M_PI), 3);
    for (int n = 0; n < g.m; ++n) {
        const cplx* us = uf.slice(n);
        const cplx* vs = vf.slice(n);
        cplx* os = out.slice(n);
        const double scale = norm * w(g.time(n));
        if (scale == 0.0) continue;
        for (const auto& pr : pairs) os[pr.out] += us[pr.a] * vs[pr.b];
        for (std::size_t i = 0; i < sg.size(); ++i) os[i] *= scale;
    }
    return time_forward(out);
}

}  // namespace qwave
