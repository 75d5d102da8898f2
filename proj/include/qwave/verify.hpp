#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qwave/bilinear.hpp"
#include "qwave/families.hpp"
#include "qwave/spaces.hpp"

namespace qwave {

/**
 * Lattice used at every frequency scale. Scale lambda is realised by
 * dilation: the spatial box becomes L / lambda and the time box T / lambda
 * with N and M fixed, so the data keep the same lattice footprint at every
 * scale. A window support of order L / pi keeps the window's frequency
 * resolution coarser than the spacing of interaction frequencies on the
 * lattice, so lattice sums stay close to the surface integrals.
 */
struct GridReference {
    int n = 16;
    double half_length = 4.0;
    int m = 32;
    double half_time = 2.0;
    double window_support = 1.0;  // zero-padded inside the time box
    double flat_fraction = 0.5;

    SpacetimeGrid at(double lambda) const;
    WindowSpec window(double lambda) const;
    /// Data are cut off at |xi| / lambda < band_radius so products never wrap.
    double band_radius() const;
};

struct VerifyParams {
    double r = 2.0;
    double sigma = 1.25;
    double b = 0.55;
    SignPair signs;
    DataFamily u = DataFamily::gaussian({1.2, 0.0, 0.0}, 0.5);
    DataFamily v = DataFamily::gaussian({0.0, 1.0, 0.0}, 0.5);
    std::vector<double> lambdas{2, 4, 8, 16};
    GridReference grid;
    int workers = 1;
};

struct Sample {
    double lambda = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

/// Least-squares line log2(ratio) = slope log2(lambda) + intercept.
struct GrowthFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double ci_low = 0.0;  // 95% interval for the slope
    double ci_high = 0.0;
};

/// Throws ParameterError for fewer than 3 points.
GrowthFit fit_growth(const std::vector<double>& lambdas, const std::vector<double>& ratios);

struct EstimateReport {
    std::string name;
    std::vector<std::pair<std::string, double>> params;
    std::vector<Sample> samples;
    double max_ratio = 0.0;
    double min_ratio = 0.0;
    double median_ratio = 0.0;
    double spread = 0.0;  // max / min
    std::optional<GrowthFit> growth;
    bool skipped = false;  // zero data: ratio undefined
    bool passed = false;
    std::string criterion;
    double runtime_s = 0.0;
    std::string note;

    /// Fills max/min/median/spread from samples.
    void summarize();
};

/// Bounded-ratio proxy: max/min over the lambda ladder.
inline constexpr double kBoundedSpread = 3.0;
/// Growth proxy: fitted slope above this with R^2 above kGrowthR2.
inline constexpr double kGrowthSlope = 0.25;
inline constexpr double kGrowthR2 = 0.9;

/// Equal-sign product bound: ||J^s(u+v+)|| + ||J^{s-1} d_t(u+v+)|| against
/// ||u0||_{H^r_s} ||v0||_{H^r_s}. Signs are forced to (+,+).
EstimateReport check_elliptic_lemma(const VerifyParams& p);

struct HyperbolicReports {
    EstimateReport p_region;  // product restricted to mask P
    EstimateReport q_region;  // mask Q, with d_x and d_t weights
    double partition_residual = 0.0;  // max |F_P + F_Q - F| / max |F|
    bool triangle_ok = false;         // ||F|| <= ||F_P|| + ||F_Q|| at every lambda
};

/// Signs are forced to (+,-). Requires r > 1 for the Q-region part.
HyperbolicReports check_hyperbolic_lemmas(const VerifyParams& p);

/// Share of the output mass near xi = 0 (|xi| below `radius` lattice
/// steps) carried by the Q-region, for the sign pair (+,-) at scale lambda.
double q_region_share_near_zero(const VerifyParams& p, double lambda, double radius = 1.5);

struct KeyEstimateReports {
    EstimateReport free_form;  // ||J^{s-1} d_x(uv)|| + ||J^{s-1} d_t(uv)|| vs data norms
    EstimateReport full_form;  // windowed waves, ||J^s(uv)|| + ||J^{s-1} d_t(uv)|| vs X^{r,+-}_{s,b} norms
};

KeyEstimateReports check_key_estimate(const VerifyParams& p);

/// Ratio growth below the threshold sigma < 2/r (free form, given signs).
/// Passes when the fitted slope reaches 0.8 of 2/r - sigma with R^2 > 0.9.
EstimateReport sharpness_probe(const VerifyParams& p);

/// Same pipeline for any sigma; reports the fit without a pass rule.
EstimateReport growth_run(const VerifyParams& p, const std::string& name);

/// Low-frequency product bound: ||J^s(uv)|| against X norms for data in
/// |xi| <= 1. Member i is paired with member i + 1 (cyclically). Passes
/// when max/min <= 2.
EstimateReport check_lowfreq_young(const VerifyParams& p, const std::vector<Spectrum>& members,
                                   const SpacetimeGrid& time);

/// ||u+ v-||_{L^2} against ||J^{s1} u0||_{L^2} ||J^{s2} v0||_{L^2} over the
/// lambda ladder. With probe = false, s1 + s2 > 1 is required and the run
/// passes when max/min <= 3; probe runs report the growth fit only.
EstimateReport check_strichartz_l2(double sigma1, double sigma2, const VerifyParams& p, bool probe = false);

/// Weighted far-region surface mass of the hyperbolic sheet:
/// surface_mass of rho1^{-s1 r} rho2^{-s2 r} on rho1 + rho2 > c1 |xi| at
/// tau = a |xi|, with a box and thickness proportional to |xi|.
double far_region_mass(double abs_xi, double a, double r, double s1, double s2, double c1 = 2.0);

/// Lattice point (xi, tau) of a spacetime spectrum, as signed modes.
struct LatticeProbe {
    std::array<int, 3> modes{1, 0, 0};
    int tau_mode = 2;
};

struct SurfaceCheckConfig {
    SpacetimeGrid grid = SpacetimeGrid::make(SpatialGrid::make(32, 8.0), 64, 4.0);
    WindowSpec window = WindowSpec::canonical(2.0);
    double width = 0.8;  // both data are radial gaussians of this width centred at 0
    std::vector<LatticeProbe> probes{{{1, 0, 0}, 2}, {{2, 0, 0}, 3}, {{2, 2, 1}, 4}};
    int tau_panels = 24;  // Gauss-Legendre panels for the tau' integral
    double tolerance = 0.05;
};

struct SurfaceProbeResult {
    Vec3 xi{};
    double tau = 0.0;
    double direct = 0.0;   // real part of the lattice product transform
    double surface = 0.0;  // (2 pi)^{-3} int w^(tau - tau') surface_mass(tau') dtau'
    double rel_error = 0.0;
};

struct SurfaceCrossCheck {
    std::vector<SurfaceProbeResult> probes;
    double max_rel_error = 0.0;
    bool passed = false;
    double runtime_s = 0.0;
};

/**
 * Compares product_transform_direct for radial gaussian data and signs (+,+)
 * with the level-set integral: for radial data the product transform is
 * (2 pi)^{-3} times the discrete window transform convolved in tau with
 * surface_mass of F(rho1, rho2) = u^(rho1) v^(rho2).
 */
SurfaceCrossCheck surface_cross_check(const SurfaceCheckConfig& cfg);

struct ExtremizerBox {
    double xi_min = 0.5, xi_max = 2.0;
    double width_min = 0.2, width_max = 0.8;
    double aniso_min = 1.0, aniso_max = 3.0;
};

struct ExtremizerConfig {
    VerifyParams base;  // r, sigma, signs, grid; families are overridden
    double lambda = 2.0;
    ExtremizerBox box;
    std::vector<DataFamily::Kind> kinds{DataFamily::Kind::GaussianBump, DataFamily::Kind::Shell,
                                        DataFamily::Kind::KnappBox, DataFamily::Kind::RandomBandlimited};
    int max_evaluations = 150;  // per restart
    double tolerance = 1e-4;    // relative simplex spread at convergence
    std::uint64_t seed = 1;
};

struct ExtremizerResult {
    double best_ratio = 0.0;
    DataFamily best_family;
    std::array<double, 3> best_point{};  // (|xi0|, width, anisotropy)
    std::vector<std::vector<double>> traces;  // best-so-far per restart
    bool converged = false;  // every restart met the tolerance within budget
    int evaluations = 0;
};

/// Free-form ratio for u0 = v0 drawn from one family at scale lambda.
double extremizer_objective(const ExtremizerConfig& cfg, DataFamily::Kind kind, const std::array<double, 3>& point);

/// Nelder-Mead over (|xi0|, width, anisotropy) clamped to the box, one
/// restart per family kind.
ExtremizerResult extremizer_search(const ExtremizerConfig& cfg);

}  // namespace qwave
