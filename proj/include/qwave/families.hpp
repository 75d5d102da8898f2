#pragma once

#include <cstdint>
#include <string>

#include "qwave/grid.hpp"

namespace qwave {

/**
 * Frequency-side test data, described in base units (scale lambda = 1).
 *
 * At scale lambda the profile is evaluated at xi / lambda, so the data is
 * concentrated at frequencies of size ~lambda |xi0|. Anisotropy multiplies
 * the width per axis of a frame whose first axis points along xi0.
 */
struct DataFamily {
    enum class Kind { GaussianBump, Shell, KnappBox, RandomBandlimited };

    Kind kind = Kind::GaussianBump;
    Vec3 xi0{1.0, 0.0, 0.0};
    double width = 0.5;
    Vec3 anisotropy{1.0, 1.0, 1.0};
    double amplitude = 1.0;
    std::uint64_t seed = 1;

    static DataFamily gaussian(const Vec3& xi0, double width);
    static DataFamily shell(double radius, double width);
    static DataFamily knapp(const Vec3& xi0, double width, const Vec3& anisotropy);
    static DataFamily random(const Vec3& xi0, double width, std::uint64_t seed);

    /// Profile at a base-unit frequency, before band limiting.
    cplx profile(const Vec3& xi) const;
    /// Radius (base units) beyond which the profile is negligible.
    double reach() const;
};

const char* to_string(DataFamily::Kind kind);
DataFamily::Kind parse_family_kind(const std::string& name);

/// Samples the family at scale lambda on g. Frequencies with
/// |xi| / lambda >= band_radius are zeroed; for random data the draws are
/// made in a fixed lattice order, so equal seeds give equal spectra.
Spectrum generate(const DataFamily& family, const SpatialGrid& g, double lambda, double band_radius);

}  // namespace qwave
