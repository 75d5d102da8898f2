#pragma once

#include <functional>

#include "qwave/grid.hpp"

namespace qwave {

enum class Sign { Plus = 1, Minus = -1 };

inline double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }
inline Sign flip(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
inline char sign_char(Sign s) { return s == Sign::Plus ? '+' : '-'; }

/// r' with 1/r + 1/r' = 1.
double dual_exponent(double r);

/// Throws ParameterError unless 1 < r <= 2.
void require_lebesgue_index(double r, const char* where);

/**
 * Exponents of the Fourier-Lebesgue Bourgain norm
 *   ||u|| = ( sum <xi>^{s r'} <tau - sign |xi|>^{b r'} |Fu|^{r'} dxi^3 dtau )^{1/r'}.
 *
 * The modulation weight is centred on tau = sign*|xi|, which is where the
 * transform of e^{sign*itD}u0 lives under the e^{-it tau} convention.
 */
struct NormParams {
    double r = 2.0;
    double rprime = 2.0;
    double s = 0.0;
    double b = 0.0;
    Sign sign = Sign::Plus;

    static NormParams make(double r, double s, double b, Sign sign = Sign::Plus);
};

/// Time cut-off used to turn global norms into restriction-norm upper bounds.
struct WindowSpec {
    enum class Shape { Rectangular, RaisedCosine };
    Shape shape = Shape::RaisedCosine;
    double flat_fraction = 0.5;
    double support = 1.0;

    static WindowSpec make(Shape shape, double flat_fraction, double support);
    /// Canonical window: raised cosine, flat on half of its support.
    static WindowSpec canonical(double support) { return make(Shape::RaisedCosine, 0.5, support); }

    double flat_core() const { return shape == Shape::Rectangular ? support : flat_fraction * support; }
    double operator()(double t) const;
};

/// w(t) * u(t) on every time slice; u is in configuration or SpatialFrequency representation.
SpacetimeField apply_window(const SpacetimeField& u, const WindowSpec& w);

/// ( sum <xi>^{s r'} |F|^{r'} dxi^3 )^{1/r'}
double sobolev_hat_norm(const Spectrum& f, double r, double s);

/// <xi>^s at every lattice frequency, for repeated norm evaluations.
std::vector<double> bracket_weights(const SpatialGrid& g, double s);
/// Same norm on raw spectral samples with precomputed weights.
double sobolev_hat_norm(const cplx* data, const SpatialGrid& g, double r, const std::vector<double>& weights);

/// L^{r'} norm of the spacetime transform with unit weight.
double lr_xt_norm(const SpacetimeSpectrum& f, double r);

/// L^{r'} norm of weight(xi, tau) * F(xi, tau) over the spacetime lattice.
double weighted_lr_xt_norm(const SpacetimeSpectrum& f, double r,
                           const std::function<double(const Vec3&, double)>& weight);

/// Same for a product weight xi_weight(xi) * tau_weight(tau), each factor
/// evaluated once per lattice line.
double separable_lr_xt_norm(const SpacetimeSpectrum& f, double r, const std::function<double(const Vec3&)>& xi_weight,
                            const std::function<double(double)>& tau_weight);

/// Bourgain norm weights on one grid, for repeated evaluations.
class XsbWeights {
public:
    XsbWeights(const SpacetimeGrid& g, const NormParams& p);
    /// Norm of a spacetime spectrum on the same grid.
    double operator()(const SpacetimeSpectrum& f) const;

private:
    SpacetimeGrid grid_;
    double rprime_;
    double measure_;
    std::vector<double> weights_;
};

/// Bourgain norm; configuration and SpatialFrequency input are transformed first.
double xsb_norm(const SpacetimeField& u, const NormParams& p);

/// ||u||_{X_{s,b}} + ||u_t||_{X_{s-1,b}}.
double z_norm(const SpacetimeField& u, const SpacetimeField& ut, const NormParams& p);

/// Upper bound for the restriction norm on [-delta, delta]: xsb_norm(w * u).
/// Requires delta <= flat core of w <= support of w <= T.
double restricted_norm(const SpacetimeField& u, double delta, const WindowSpec& w, const NormParams& p);

/// Default modulation exponents for experiments: {1/r + 0.05, 0.55, 0.75}
/// clipped into (1/r, 1), duplicates removed.
std::vector<double> default_b_values(double r);

}  // namespace qwave
