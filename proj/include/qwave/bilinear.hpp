#pragma once

#include <functional>
#include <string>

#include "qwave/grid.hpp"
#include "qwave/spaces.hpp"

namespace qwave {

/// Integration range of the one-dimensional reduction in x = (rho1 - rho2)/|xi|
/// (elliptic) or x = (rho1 + rho2)/|xi| (hyperbolic).
enum class Region { Elliptic, HyperbolicNear, HyperbolicFar };

const char* to_string(Region region);

/**
 * One reduction integral  int_region |a + x|^p |a - x|^q dx.
 *
 * With p = 1 - s1 r and q = 1 - s2 r this is the collapsed surface integral
 * of rho1^{-s1 r} rho2^{-s2 r} over the interaction ellipsoid (a = tau/|xi| >= 1,
 * x in [-1, 1]) or hyperboloid (|a| <= 1, x in [1, c1] or [c1, inf)).
 */
struct ReductionSpec {
    double a = 1.0;
    double p = 0.0;
    double q = 0.0;
    Region region = Region::Elliptic;
    double c1 = 2.0;
    // reporting only
    double r = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;

    static ReductionSpec from_regularity(double r, double s1, double s2, double a, Region region, double c1 = 2.0);
};

/// Throws ParameterError naming the violated condition, DivergenceError for a
/// far-region integral with p + q >= -1.
void validate(const ReductionSpec& spec);

/// Singularity-split tanh-sinh quadrature; the far tail is mapped to (0, 1]
/// by x = c1 / t.
double reduction_integral(const ReductionSpec& spec);

/// Signs of the two free waves e^{+-itD} entering a product.
struct SignPair {
    Sign u = Sign::Plus;
    Sign v = Sign::Plus;

    bool elliptic() const { return u == v; }
    std::string label() const { return {sign_char(u), sign_char(v)}; }
};

/// Radial profile F(rho1, rho2) with rho1 = |xi/2 - eta|, rho2 = |xi/2 + eta|.
using RadialWeight = std::function<double(double rho1, double rho2)>;

/// Optional clip of the eta-integration domain, in cylindrical coordinates
/// about the xi axis (z along xi, rho the transverse radius).
struct SurfaceDomain {
    double rho_max = 0.0;  // 0: automatic
    double z_min = -INFINITY;
    double z_max = INFINITY;
};

struct SurfaceMass {
    double value = 0.0;       // Richardson-extrapolated from thicknesses h and h/2
    double value_h = 0.0;     // raw thickened estimate at h
    double value_half = 0.0;  // raw thickened estimate at h/2
    bool empty = false;       // level set does not meet the precondition region
    bool stable = false;      // quadrature refinement reached 1% relative stability
    int panels = 0;
};

/**
 * Thickened level-set estimate of  int_{P(eta) = tau} F dS / |grad P|
 * for P = rho1 + rho2 (equal signs) or rho1 - rho2 (opposite signs):
 *   (1 / 2h) int_{|P(eta) - tau| < h} F(rho1, rho2) d eta.
 * Waves with u-sign minus are mapped to the plus case by tau -> -tau.
 */
SurfaceMass surface_mass(const Vec3& xi, double tau, const SignPair& sp, const RadialWeight& f, double h,
                         const SurfaceDomain& domain = {});

/// Constant c_cal with surface_mass(F = 1) = c_cal |xi|^2 reduction(a, 1, 1)
/// on the ellipsoid. Evaluated over a fixed set of (xi, tau) samples; the
/// spread is the relative max-min deviation across them.
struct Calibration {
    double c_cal = 0.0;
    double spread = 0.0;
    std::vector<double> samples;
};
const Calibration& surface_calibration();

/// Surface mass predicted from the reduction integral for F = rho1^{p-1} rho2^{q-1}
/// (times the region indicator): 4 c_cal 2^{-(p+q)} |xi|^{p+q} reduction(a, p, q).
double predicted_surface_mass(double abs_xi, const ReductionSpec& spec, double c_cal);

/// Output of a windowed product of two free half-wave solutions.
using PairMask = std::function<bool(const Vec3& xi1, const Vec3& xi2)>;

/// Builds e^{+-itD}u0 and e^{+-itD}v0, multiplies them in configuration
/// space, applies the time window and returns the spacetime transform.
SpacetimeSpectrum product_transform_direct(const Spectrum& u0, const Spectrum& v0, const SignPair& sp,
                                           const SpacetimeGrid& g, const WindowSpec& w);

/// Largest spatial N accepted by the masked convolution.
inline constexpr int kMaxMaskedN = 24;

/// Masked discrete convolution  sum_{xi1 + xi2 = xi} mask u^(xi1, t) v^(xi2, t)
/// per time slice (cyclic on the lattice, mask evaluated on the unwrapped
/// frequencies), windowed and transformed in time.
SpacetimeSpectrum bilinear_symbol_product(const Spectrum& u0, const Spectrum& v0, const SignPair& sp,
                                          const PairMask& mask, const SpacetimeGrid& g, const WindowSpec& w);

}  // namespace qwave
