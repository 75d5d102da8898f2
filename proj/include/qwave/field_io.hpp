#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "qwave/grid.hpp"

namespace qwave {

/**
 * Binary field container, all values little-endian:
 *   magic "QWAVEFLD" (8 bytes), version (u64),
 *   N (i64), L (f64), M (i64), T (f64), representation (u64),
 *   then interleaved (re, im) f64 samples in storage order.
 * M = 0 and T = 0 mark a spatial field.
 */
inline constexpr char kFieldMagic[8] = {'Q', 'W', 'A', 'V', 'E', 'F', 'L', 'D'};
inline constexpr std::uint64_t kFieldVersion = 1;
inline constexpr std::size_t kFieldHeaderBytes = 8 * 7;

using StoredField = std::variant<Field, SpacetimeField>;

void save_field(const std::string& path, const Field& f);
void save_field(const std::string& path, const SpacetimeField& f);

/// Throws LoadError on a bad magic, unknown version, invalid grid or a payload
/// whose byte count does not match the header.
StoredField load_field(const std::string& path);
Field load_spatial_field(const std::string& path);
SpacetimeField load_spacetime_field(const std::string& path);

}  // namespace qwave
