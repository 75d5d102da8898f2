#include "qwave/propagator.hpp"

#include "qwave/error.hpp"

namespace qwave {

cplx evolution_symbol(EvolutionKind kind, Sign sign, double t, double abs_xi) {
    const double sg = sign_value(sign);
    if (kind == EvolutionKind::HalfWave) return std::polar(1.0, sg * t * abs_xi);
    return std::polar(1.0, -sg * t * bracket(abs_xi));
}

Spectrum evolve(const Spectrum& f, const EvolutionSpec& e) {
    require_rep(f, Representation::Frequency, "evolve");
    Spectrum out = f;
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] *= evolution_symbol(e.kind, e.sign, e.t, norm3(f.grid.frequency(i)));
    return out;
}

SpacetimeField free_spacetime_spectral(const Spectrum& u0, const SpacetimeGrid& g, const EvolutionSpec& e) {
    require_rep(u0, Representation::Frequency, "free_spacetime");
    require_same_grid(u0.grid, g.spatial, "free_spacetime");
    SpacetimeField out(g, Representation::SpatialFrequency);
    const std::size_t n3 = g.spatial.size();
    // phase recurrence in time, re-anchored every 64 steps to bound rounding drift
    std::vector<cplx> phase(n3), step(n3);
    std::vector<double> k(n3);
    for (std::size_t s = 0; s < n3; ++s) {
        k[s] = norm3(g.spatial.frequency(s));
        step[s] = evolution_symbol(e.kind, e.sign, g.dt(), k[s]);
    }
    for (int n = 0; n < g.m; ++n) {
        cplx* slice = out.slice(n);
        if (n % 64 == 0) {
            const double t = g.time(n);
            for (std::size_t s = 0; s < n3; ++s) phase[s] = evolution_symbol(e.kind, e.sign, t, k[s]);
        } else {
            for (std::size_t s = 0; s < n3; ++s) phase[s] *= step[s];
        }
        for (std::size_t s = 0; s < n3; ++s) slice[s] = u0.data[s] * phase[s];
    }
    return out;
}

SpacetimeField free_spacetime(const Spectrum& u0, const SpacetimeGrid& g, const EvolutionSpec& e) {
    return spatial_inverse(free_spacetime_spectral(u0, g, e));
}

SpacetimeField duhamel(const SpacetimeField& g, Sign sign) {
    if (g.rep == Representation::Configuration) return spatial_inverse(duhamel(spatial_forward(g), sign));
    require_rep(g, Representation::SpatialFrequency, "duhamel");

    const auto& grid = g.grid;
    const std::size_t n3 = grid.spatial.size();
    const double dt = grid.dt();
    std::vector<cplx> step(n3), back(n3);
    for (std::size_t s = 0; s < n3; ++s) {
        const double k = norm3(grid.spatial.frequency(s));
        step[s] = evolution_symbol(EvolutionKind::Bessel, sign, dt, k);
        back[s] = std::conj(step[s]);
    }

    SpacetimeField w(grid, Representation::SpatialFrequency);
    const cplx half(0.0, 0.5 * dt);
    const int origin = grid.origin();
    for (int n = origin; n + 1 < grid.m; ++n) {
        const cplx* wn = w.slice(n);
        const cplx* gn = g.slice(n);
        const cplx* gn1 = g.slice(n + 1);
        cplx* out = w.slice(n + 1);
        for (std::size_t s = 0; s < n3; ++s) out[s] = step[s] * wn[s] - half * (step[s] * gn[s] + gn1[s]);
    }
    for (int n = origin; n > 0; --n) {
        const cplx* wn = w.slice(n);
        const cplx* gn = g.slice(n);
        const cplx* gm = g.slice(n - 1);
        cplx* out = w.slice(n - 1);
        for (std::size_t s = 0; s < n3; ++s) out[s] = back[s] * wn[s] + half * (back[s] * gn[s] + gm[s]);
    }
    return w;
}

}  // namespace qwave
