#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qwave/grid.hpp"
#include "qwave/spaces.hpp"

namespace qwave {

/// Position and velocity data (u0, u1) of the wave equation, both as spectra.
struct CauchyData {
    Spectrum u0;
    Spectrum u1;
    double r = 2.0;
    double s = 1.5;  // u0 in H^r_s, u1 in H^r_{s-1}
};

/// Initial values of the first-order components u_pm.
struct FirstOrderData {
    Spectrum plus;
    Spectrum minus;
};

/// f_pm = u0 pm i J^{-1} u1. Throws ContractError when u0 and u1 live on different grids.
FirstOrderData to_first_order(const CauchyData& d);
/// Inverse: u0 = (f+ + f-)/2, u1 = J (f+ - f-) / 2i.
CauchyData from_first_order(const FirstOrderData& f, double r = 2.0, double s = 1.5);

enum class Derivative { T, X1, X2, X3 };

const char* to_string(Derivative d);
Derivative parse_derivative(const std::string& name);

/**
 * Right side of  box u = B_k(u, u) + source.
 * k = 1: B(u, v) = d(uv);  k = 2: B(u, v) = du dv.
 */
struct NonlinearitySpec {
    int k = 1;
    Derivative derivative = Derivative::X1;
    bool quadratic = true;  // false drops B_k, leaving the linear part of the system
    /// Optional forcing in configuration representation, sampled on the solve grid.
    std::shared_ptr<const SpacetimeField> source;
};

/// Checks k and the source grid. Throws ParameterError.
void validate(const NonlinearitySpec& ns);

struct SolveConfig {
    SpacetimeGrid grid = SpacetimeGrid::make(SpatialGrid::make(16, 2.0 * M_PI), 64, 1.0);
    double delta = 0.25;
    WindowSpec window = WindowSpec::canonical(1.0);
    int max_iterations = 60;
    double tolerance = 1e-10;  // relative sup-in-t distance between iterates
    double r = 2.0;
    double s = 1.5;
    double b = 0.55;

    /// delta <= flat core <= support <= T, b in (1/r, 1), r in (1, 2].
    void validate() const;
};

/// Pair of spacetime fields, one per sign.
struct FieldPair {
    SpacetimeField plus;
    SpacetimeField minus;
};

/// 2/3-rule truncation in space: modes with |m_axis| > N/3 are zeroed.
SpacetimeField dealias(const SpacetimeField& f);

/// u = (u+ + u-)/2 and u_t = J (u+ - u-) / 2i, in the representation of the input.
FieldPair reconstruct(const FieldPair& u);

/// B_k(u, u) for u = (u+ + u-)/2, dealiased, in SpatialFrequency representation.
SpacetimeField quadratic_term(const FieldPair& u, const NonlinearitySpec& ns);

/**
 * g_pm = -+ J^{-1} (B_k(u, u) + source) -+ J^{-1} u  with u = (u+ + u-)/2,
 * so that (i d_t -+ J) u_pm = g_pm. Time derivatives come from u_t above.
 * Output is in the representation of the input.
 */
FieldPair rhs_eval(const FieldPair& u, const NonlinearitySpec& ns);

struct PicardStep {
    int n = 0;
    double distance = 0.0;             // sup over |t| <= delta of the data-space norm of u^{n+1} - u^n
    double restricted_distance = 0.0;  // restricted X norm of the same difference
    double rho = 0.0;                  // distance_n / distance_{n-1}; 0 for n = 0
};

struct PicardResult {
    FieldPair u;  // last iterate, SpatialFrequency
    std::vector<PicardStep> steps;
    int iterations = 0;
    bool converged = false;
    bool diverged = false;  // distance grew three steps in a row, or went non-finite
    std::string note;
};

/**
 * u^{(0)} = e^{-+itJ} f_pm,  u^{(n+1)} = e^{-+itJ} f_pm + duhamel(chi g_pm(u^{(n)})),
 * chi the indicator of |t| <= delta. Outside [-delta, delta] the iterates
 * continue as free waves.
 */
PicardResult picard_iterate(const FirstOrderData& f, const NonlinearitySpec& ns, const SolveConfig& cfg);

struct ResidualReport {
    double absolute = 0.0;  // sup over interior times of || box u - B - source ||_{L^2_x}
    double relative = 0.0;  // absolute / sup of the largest term
    int interior_slices = 0;
};

struct SolveResult {
    PicardResult picard;
    SpacetimeField u;  // (u+ + u-)/2, configuration
    ResidualReport residual;
    std::vector<double> times;
    std::vector<double> persistence_plus;  // sobolev_hat_norm(u+(t), r, s), |t| <= delta
    std::vector<double> persistence_minus;
    double max_jump = 0.0;  // largest relative change between adjacent persistence samples
    std::optional<double> z_norm;  // max over signs of the windowed Z norm, k = 2 only
    bool ok = false;
    std::string failure;
};

SolveResult solve_local(const FirstOrderData& f, const NonlinearitySpec& ns, const SolveConfig& cfg);

/// box u - B_k(u, u) - source on the interior of [-delta, delta]; d_t^2 by
/// fourth-order central differences, the Laplacian spectrally.
ResidualReport residual(const FieldPair& u, const NonlinearitySpec& ns, const SolveConfig& cfg);

/// Data-space size max(||f+||, ||f-||) in H^r_s.
double data_size(const FirstOrderData& f, double r, double s);

struct DeltaSelection {
    double delta = 0.0;
    double rho1 = 0.0;
    int attempts = 0;
    bool found = false;
};

/**
 * delta_0 = min(1, c / (1 + data size), flat core), halved until the first
 * contraction factor drops below rho_max. Gives up below two time steps.
 */
DeltaSelection select_delta(const FirstOrderData& f, const NonlinearitySpec& ns, const SolveConfig& cfg,
                            double rho_max = 0.9, double c = 0.5);

struct LipschitzSample {
    double data_distance = 0.0;
    double solution_distance = 0.0;
    double ratio = 0.0;
    bool skipped = false;   // identical data
    bool excluded = false;  // a member failed to converge
};

struct LipschitzReport {
    std::vector<LipschitzSample> samples;
    double max_ratio = 0.0;
    int excluded = 0;
};

using DataPair = std::pair<FirstOrderData, FirstOrderData>;

LipschitzReport flow_lipschitz_probe(const std::vector<DataPair>& pairs, const NonlinearitySpec& ns,
                                     const SolveConfig& cfg, int workers = 1);

}  // namespace qwave
