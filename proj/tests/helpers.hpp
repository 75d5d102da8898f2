#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "qwave/grid.hpp"

namespace qwave::testing {

inline Field random_field(const SpatialGrid& g, Representation rep, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Field f(g, rep);
    for (auto& v : f.data) v = {nd(rng), nd(rng)};
    return f;
}

inline SpacetimeField random_field(const SpacetimeGrid& g, Representation rep, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    SpacetimeField f(g, rep);
    for (auto& v : f.data) v = {nd(rng), nd(rng)};
    return f;
}

template <class V>
double max_abs_diff(const V& a, const V& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

template <class V>
double max_abs(const V& a) {
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
}

template <class V>
double rel_diff(const V& a, const V& b) {
    const double scale = std::max(max_abs(a), max_abs(b));
    return scale == 0.0 ? 0.0 : max_abs_diff(a, b) / scale;
}

}  // namespace qwave::testing
