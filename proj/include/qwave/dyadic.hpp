#pragma once

#include "qwave/bilinear.hpp"
#include "qwave/grid.hpp"

namespace qwave {

/// Dyadic shell index: shell 0 is |xi| <= 1, shell k >= 1 is 2^{k-1} < |xi| <= 2^k.
struct DyadicIndex {
    int k = 0;

    double lower() const;  // exclusive, -1 for shell 0
    double upper() const;  // inclusive
    bool contains(double abs_xi) const;
};

DyadicIndex shell_of(double abs_xi);

/// Index of the highest shell that meets the lattice.
int nyquist_shell(const SpatialGrid& g);

struct Projection {
    Spectrum spectrum;
    bool empty = false;  // no lattice frequency falls in the shell
};

/// Sharp cut-off to one dyadic shell.
Projection lp_projection(const Spectrum& f, DyadicIndex k);

/// Frequency-pair masks for splitting bilinear products.
namespace masks {

/// Comparability threshold in |xi1| >= |xi2| / 2.
inline constexpr double kComparable = 0.5;
/// Region constant separating P (|xi1| + |xi2| <= c1 |xi1 + xi2|) from Q.
inline constexpr double kRegionConstant = 2.0;

bool geq(const Vec3& xi1, const Vec3& xi2);
bool ll(const Vec3& xi1, const Vec3& xi2);
bool region_p(const Vec3& xi1, const Vec3& xi2, double c1 = kRegionConstant);
bool region_q(const Vec3& xi1, const Vec3& xi2, double c1 = kRegionConstant);
/// xi1 in shell k and |xi1| < |xi2| / 2.
PairMask shell_ll(DyadicIndex k);

}  // namespace masks

struct NamedMask {
    const char* name;
    PairMask mask;
};

/// geq, ll, P, Q with the default constants.
std::vector<NamedMask> region_masks();

/**
 * Surface mass of the indicator of {rho1 in shell k, rho1 < rho2 / 2}.
 * The eta-domain is clipped to the ball of radius 2^k about the focus
 * eta = xi/2, outside of which the indicator vanishes.
 */
SurfaceMass shell_surface_mass(const Vec3& xi, double tau, const SignPair& sp, DyadicIndex k, double h);

}  // namespace qwave
