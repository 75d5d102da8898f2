#pragma once

#include "qwave/grid.hpp"
#include "qwave/spaces.hpp"

namespace qwave {

enum class EvolutionKind {
    HalfWave,  // e^{sign * i t |xi|}
    Bessel,    // e^{-sign * i t <xi>}, the flow of (i d_t - sign J) u = 0
};

struct EvolutionSpec {
    EvolutionKind kind = EvolutionKind::HalfWave;
    Sign sign = Sign::Plus;
    double t = 0.0;
};

/// Unit-modulus symbol of the evolution at frequency magnitude |xi|.
cplx evolution_symbol(EvolutionKind kind, Sign sign, double t, double abs_xi);

Spectrum evolve(const Spectrum& f, const EvolutionSpec& e);

/// Free solution sampled on every lattice time of g, in SpatialFrequency
/// representation. e.t is ignored.
SpacetimeField free_spacetime_spectral(const Spectrum& u0, const SpacetimeGrid& g, const EvolutionSpec& e);

/// Free solution in configuration representation. e.t is ignored.
SpacetimeField free_spacetime(const Spectrum& u0, const SpacetimeGrid& g, const EvolutionSpec& e);

/**
 * Duhamel term w(t) = -i int_0^t e^{-sign i (t-s) J} g(s) ds, the solution of
 * (i d_t - sign J) w = g with w(0) = 0, by the integrating-factor trapezoidal
 * rule swept forward and backward from the lattice origin.
 *
 * Accepts Configuration or SpatialFrequency input and returns the same
 * representation.
 */
SpacetimeField duhamel(const SpacetimeField& g, Sign sign);

}  // namespace qwave
