#include "qwave/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qwave/error.hpp"

namespace qwave {

namespace {

// ( sum_i (w_i |F_i|)^p * measure )^{1/p}, rescaled by the largest term so
// large exponents cannot overflow.
template <class WeightAt>
double lebesgue_sum(std::size_t count, const cplx* values, double p, double measure, WeightAt weight_at) {
    double peak = 0.0;
    for (std::size_t i = 0; i < count; ++i) peak = std::max(peak, weight_at(i) * std::abs(values[i]));
    if (peak == 0.0) return 0.0;
    double acc = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < count; ++i) {
            const double v = weight_at(i) * std::abs(values[i]) / peak;
            acc += v * v;
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const double v = weight_at(i) * std::abs(values[i]) / peak;
            if (v > 0.0) acc += std::pow(v, p);
        }
    }
    return peak * std::pow(acc * measure, 1.0 / p);
}

}  // namespace

double dual_exponent(double r) {
    if (!(r > 1.0)) throw ParameterError("dual_exponent: r must exceed 1");
    return r / (r - 1.0);
}

void require_lebesgue_index(double r, const char* where) {
    if (!(r > 1.0 && r <= 2.0))
        throw ParameterError(std::string(where) + ": r = " + std::to_string(r) + " outside (1, 2]");
}

NormParams NormParams::make(double r, double s, double b, Sign sign) {
    require_lebesgue_index(r, "NormParams");
    if (!std::isfinite(s) || !std::isfinite(b)) throw ParameterError("NormParams: s and b must be finite");
    return NormParams{r, dual_exponent(r), s, b, sign};
}

WindowSpec WindowSpec::make(Shape shape, double flat_fraction, double support) {
    if (!(flat_fraction >= 0.0 && flat_fraction <= 1.0))
        throw ParameterError("WindowSpec: flat fraction must lie in [0, 1]");
    if (!(support > 0.0)) throw ParameterError("WindowSpec: support must be positive");
    return WindowSpec{shape, flat_fraction, support};
}

double WindowSpec::operator()(double t) const {
    const double a = std::abs(t);
    if (a > support) return 0.0;
    if (shape == Shape::Rectangular) return 1.0;
    const double core = flat_core();
    if (a <= core) return 1.0;
    const double phase = M_PI * (a - core) / (support - core);
    return 0.5 * (1.0 + std::cos(phase));
}

SpacetimeField apply_window(const SpacetimeField& u, const WindowSpec& w) {
    if (u.rep == Representation::Frequency) throw ContractError("apply_window: needs a field per time slice");
    SpacetimeField out = u;
    for (int n = 0; n < u.grid.m; ++n) {
        const double wv = w(u.grid.time(n));
        cplx* s = out.slice(n);
        for (std::size_t i = 0; i < out.slice_size(); ++i) s[i] *= wv;
    }
    return out;
}

std::vector<double> bracket_weights(const SpatialGrid& g, double s) {
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(bracket(norm3(g.frequency(i))), s);
    return w;
}

double sobolev_hat_norm(const cplx* data, const SpatialGrid& g, double r, const std::vector<double>& weights) {
    return lebesgue_sum(g.size(), data, dual_exponent(r), std::pow(g.dxi(), 3),
                        [&](std::size_t i) { return weights[i]; });
}

double sobolev_hat_norm(const Spectrum& f, double r, double s) {
    require_lebesgue_index(r, "sobolev_hat_norm");
    require_rep(f, Representation::Frequency, "sobolev_hat_norm");
    return sobolev_hat_norm(f.data.data(), f.grid, r, bracket_weights(f.grid, s));
}

double weighted_lr_xt_norm(const SpacetimeSpectrum& f, double r,
                           const std::function<double(const Vec3&, double)>& weight) {
    require_lebesgue_index(r, "weighted_lr_xt_norm");
    require_rep(f, Representation::Frequency, "weighted_lr_xt_norm");
    const auto& g = f.grid;
    const std::size_t n3 = g.spatial.size();
    std::vector<Vec3> freqs(n3);
    for (std::size_t s = 0; s < n3; ++s) freqs[s] = g.spatial.frequency(s);
    std::vector<double> w(f.data.size());
    for (int n = 0; n < g.m; ++n) {
        const double tau = g.tau(n);
        for (std::size_t s = 0; s < n3; ++s) w[n * n3 + s] = weight(freqs[s], tau);
    }
    return lebesgue_sum(f.data.size(), f.data.data(), dual_exponent(r),
                        std::pow(g.spatial.dxi(), 3) * g.dtau(), [&](std::size_t i) { return w[i]; });
}

double separable_lr_xt_norm(const SpacetimeSpectrum& f, double r, const std::function<double(const Vec3&)>& xi_weight,
                            const std::function<double(double)>& tau_weight) {
    require_lebesgue_index(r, "separable_lr_xt_norm");
    require_rep(f, Representation::Frequency, "separable_lr_xt_norm");
    const auto& g = f.grid;
    const std::size_t n3 = g.spatial.size();
    std::vector<double> wx(n3), wt(g.m);
    for (std::size_t s = 0; s < n3; ++s) wx[s] = xi_weight(g.spatial.frequency(s));
    for (int n = 0; n < g.m; ++n) wt[n] = tau_weight(g.tau(n));
    return lebesgue_sum(f.data.size(), f.data.data(), dual_exponent(r), std::pow(g.spatial.dxi(), 3) * g.dtau(),
                        [&](std::size_t i) { return wt[i / n3] * wx[i % n3]; });
}

double lr_xt_norm(const SpacetimeSpectrum& f, double r) {
    require_lebesgue_index(r, "lr_xt_norm");
    require_rep(f, Representation::Frequency, "lr_xt_norm");
    const auto& g = f.grid;
    return lebesgue_sum(f.data.size(), f.data.data(), dual_exponent(r),
                        std::pow(g.spatial.dxi(), 3) * g.dtau(), [](std::size_t) { return 1.0; });
}

XsbWeights::XsbWeights(const SpacetimeGrid& g, const NormParams& p) : grid_(g), rprime_(p.rprime) {
    require_lebesgue_index(p.r, "xsb_norm");
    const std::size_t n3 = g.spatial.size();
    const double sg = sign_value(p.sign);
    const auto ws = bracket_weights(g.spatial, p.s);
    std::vector<double> k(n3);
    for (std::size_t i = 0; i < n3; ++i) k[i] = sg * norm3(g.spatial.frequency(i));
    weights_.resize(g.size());
    for (int n = 0; n < g.m; ++n) {
        const double tau = g.tau(n);
        double* row = weights_.data() + n * n3;
        for (std::size_t i = 0; i < n3; ++i) {
            const double m = tau - k[i];
            row[i] = ws[i] * std::pow(1.0 + m * m, 0.5 * p.b);
        }
    }
    measure_ = std::pow(g.spatial.dxi(), 3) * g.dtau();
}

double XsbWeights::operator()(const SpacetimeSpectrum& f) const {
    require_rep(f, Representation::Frequency, "xsb_norm");
    require_same_grid(f.grid, grid_, "xsb_norm");
    return lebesgue_sum(f.data.size(), f.data.data(), rprime_, measure_, [&](std::size_t i) { return weights_[i]; });
}

double xsb_norm(const SpacetimeField& u, const NormParams& p) {
    require_lebesgue_index(p.r, "xsb_norm");
    if (u.rep == Representation::Configuration) return xsb_norm(forward_transform(u), p);
    if (u.rep == Representation::SpatialFrequency) return xsb_norm(time_forward(u), p);
    return XsbWeights(u.grid, p)(u);
}

double z_norm(const SpacetimeField& u, const SpacetimeField& ut, const NormParams& p) {
    require_same_grid(u.grid, ut.grid, "z_norm");
    NormParams lower = p;
    lower.s = p.s - 1.0;
    return xsb_norm(u, p) + xsb_norm(ut, lower);
}

double restricted_norm(const SpacetimeField& u, double delta, const WindowSpec& w, const NormParams& p) {
    if (w.support > u.grid.half_time)
        throw ParameterError("restricted_norm: window support " + std::to_string(w.support) +
                             " exceeds the time box " + std::to_string(u.grid.half_time));
    if (!(delta > 0.0) || delta > w.flat_core() + 1e-12)
        throw ParameterError("restricted_norm: delta must lie in (0, flat core of the window]");
    const SpacetimeField slices = u.rep == Representation::Frequency ? time_inverse(u) : u;
    return xsb_norm(apply_window(slices, w), p);
}

std::vector<double> default_b_values(double r) {
    require_lebesgue_index(r, "default_b_values");
    const double lo = 1.0 / r;
    std::vector<double> out;
    for (double b : {lo + 0.05, 0.55, 0.75}) {
        const double clipped = std::clamp(b, lo + 0.01, 0.99);
        if (std::find_if(out.begin(), out.end(), [&](double v) { return std::abs(v - clipped) < 1e-12; }) ==
            out.end())
            out.push_back(clipped);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace qwave
