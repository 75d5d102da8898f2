#include "qwave/dyadic.hpp"

#include <cmath>

#include "qwave/error.hpp"

namespace qwave {

double DyadicIndex::lower() const { return k == 0 ? -1.0 : std::ldexp(1.0, k - 1); }
double DyadicIndex::upper() const { return std::ldexp(1.0, k); }
bool DyadicIndex::contains(double abs_xi) const { return abs_xi > lower() && abs_xi <= upper(); }

DyadicIndex shell_of(double abs_xi) {
    if (abs_xi <= 1.0) return {0};
    int k = static_cast<int>(std::ceil(std::log2(abs_xi)));
    // guard against rounding at exact powers of two
    while (std::ldexp(1.0, k) < abs_xi) ++k;
    while (k > 1 && std::ldexp(1.0, k - 1) >= abs_xi) --k;
    return {k};
}

int nyquist_shell(const SpatialGrid& g) {
    const double corner = std::sqrt(3.0) * (g.n / 2) * g.dxi();
    return shell_of(corner).k;
}

Projection lp_projection(const Spectrum& f, DyadicIndex k) {
    require_rep(f, Representation::Frequency, "lp_projection");
    if (k.k < 0) throw ParameterError("lp_projection: shell index must be nonnegative");
    Projection out{Spectrum(f.grid, Representation::Frequency), true};
    for (std::size_t i = 0; i < f.data.size(); ++i) {
        if (!k.contains(norm3(f.grid.frequency(i)))) continue;
        out.empty = false;
        out.spectrum.data[i] = f.data[i];
    }
    return out;
}

namespace masks {

bool geq(const Vec3& xi1, const Vec3& xi2) { return norm3(xi1) >= kComparable * norm3(xi2); }
bool ll(const Vec3& xi1, const Vec3& xi2) { return !geq(xi1, xi2); }

bool region_p(const Vec3& xi1, const Vec3& xi2, double c1) {
    const Vec3 sum{xi1[0] + xi2[0], xi1[1] + xi2[1], xi1[2] + xi2[2]};
    return norm3(xi1) + norm3(xi2) <= c1 * norm3(sum);
}
bool region_q(const Vec3& xi1, const Vec3& xi2, double c1) { return !region_p(xi1, xi2, c1); }

PairMask shell_ll(DyadicIndex k) {
    return [k](const Vec3& xi1, const Vec3& xi2) {
        const double a = norm3(xi1);
        return k.contains(a) && a < kComparable * norm3(xi2);
    };
}

}  // namespace masks

std::vector<NamedMask> region_masks() {
    return {
        {"geq", masks::geq},
        {"ll", masks::ll},
        {"P", [](const Vec3& a, const Vec3& b) { return masks::region_p(a, b); }},
        {"Q", [](const Vec3& a, const Vec3& b) { return masks::region_q(a, b); }},
    };
}

SurfaceMass shell_surface_mass(const Vec3& xi, double tau, const SignPair& sp, DyadicIndex k, double h) {
    const double d = 0.5 * norm3(xi);
    const double radius = k.upper();
    SurfaceDomain dom;
    dom.rho_max = radius;
    dom.z_min = d - radius;
    dom.z_max = d + radius;
    auto f = [k](double r1, double r2) { return k.contains(r1) && r1 < masks::kComparable * r2 ? 1.0 : 0.0; };
    return surface_mass(xi, tau, sp, f, h, dom);
}

}  // namespace qwave
