#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace qwave {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

/// Japanese bracket <x> = (1 + x^2)^{1/2}.
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

/**
 * Periodic box [-L, L)^3 sampled with N points per axis, paired with the
 * frequency lattice xi_j = j*pi/L, j in {-N/2, ..., N/2-1}.
 *
 * Samples are stored row-major (axis 0 slowest). Frequency data is kept in
 * FFT order: storage index i holds lattice mode i for i < N/2 and i - N
 * otherwise.
 */
struct SpatialGrid {
    int n = 0;
    double half_length = 0.0;

    static SpatialGrid make(int n, double half_length);

    double dx() const { return 2.0 * half_length / n; }
    double dxi() const { return M_PI / half_length; }
    std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }

    double position(int i) const { return -half_length + i * dx(); }
    int mode(int i) const { return i < n / 2 ? i : i - n; }
    int storage(int mode) const { return mode >= 0 ? mode : mode + n; }

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n + j) * n + k;
    }
    std::array<int, 3> unflatten(std::size_t flat) const {
        const auto nn = static_cast<std::size_t>(n);
        return {static_cast<int>(flat / (nn * nn)), static_cast<int>((flat / nn) % nn),
                static_cast<int>(flat % nn)};
    }
    std::array<int, 3> modes(std::size_t flat) const {
        auto ijk = unflatten(flat);
        return {mode(ijk[0]), mode(ijk[1]), mode(ijk[2])};
    }
    Vec3 frequency(std::size_t flat) const {
        auto m = modes(flat);
        const double d = dxi();
        return {m[0] * d, m[1] * d, m[2] * d};
    }
    Vec3 point(std::size_t flat) const {
        auto ijk = unflatten(flat);
        return {position(ijk[0]), position(ijk[1]), position(ijk[2])};
    }
    // Storage index of a signed mode triple; modes are taken modulo N.
    std::size_t index_of_modes(int m0, int m1, int m2) const;

    bool operator==(const SpatialGrid&) const = default;
};

/// Spatial grid times the periodic time window [-T, T) with M samples; t = 0
/// sits at sample M/2.
struct SpacetimeGrid {
    SpatialGrid spatial;
    int m = 0;
    double half_time = 0.0;

    static SpacetimeGrid make(const SpatialGrid& spatial, int m, double half_time);

    double dt() const { return 2.0 * half_time / m; }
    double dtau() const { return M_PI / half_time; }
    std::size_t size() const { return spatial.size() * static_cast<std::size_t>(m); }
    double time(int n) const { return -half_time + n * dt(); }
    int origin() const { return m / 2; }
    int tau_mode(int n) const { return n < m / 2 ? n : n - m; }
    double tau(int n) const { return tau_mode(n) * dtau(); }

    bool operator==(const SpacetimeGrid&) const = default;
};

enum class Representation {
    Configuration,     // samples in x (and t)
    Frequency,         // samples in xi (and tau)
    SpatialFrequency,  // spacetime only: xi per time slice
};

const char* to_string(Representation rep);

/// Complex samples on a spatial lattice, either in x or in xi.
struct Field {
    SpatialGrid grid;
    Representation rep = Representation::Configuration;
    std::vector<cplx> data;

    Field() = default;
    Field(const SpatialGrid& g, Representation r) : grid(g), rep(r), data(g.size()) {}

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(cplx alpha);
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx alpha, Field a);

/// Frequency-side spatial field.
using Spectrum = Field;

/// Complex samples on a spacetime lattice; storage is time-major
/// (index = n * N^3 + spatial index).
struct SpacetimeField {
    SpacetimeGrid grid;
    Representation rep = Representation::Configuration;
    std::vector<cplx> data;

    SpacetimeField() = default;
    SpacetimeField(const SpacetimeGrid& g, Representation r) : grid(g), rep(r), data(g.size()) {}

    std::size_t slice_size() const { return grid.spatial.size(); }
    cplx* slice(int n) { return data.data() + n * slice_size(); }
    const cplx* slice(int n) const { return data.data() + n * slice_size(); }
    Field slice_field(int n) const;
    void set_slice(int n, const Field& f);

    SpacetimeField& operator+=(const SpacetimeField& other);
    SpacetimeField& operator-=(const SpacetimeField& other);
    SpacetimeField& operator*=(cplx alpha);
};

SpacetimeField operator+(SpacetimeField a, const SpacetimeField& b);
SpacetimeField operator-(SpacetimeField a, const SpacetimeField& b);
SpacetimeField operator*(cplx alpha, SpacetimeField a);

using SpacetimeSpectrum = SpacetimeField;

// Continuum-normalised transforms:
//   F(xi) = dx^3 sum_x f(x) e^{-i<x,xi>},  F(tau) = dt sum_t u(t) e^{-i t tau}
// with exact inverses (2 pi)^{-3} dxi^3 sum e^{+i<x,xi>} and (2 pi)^{-1} dtau sum e^{+i t tau}.
Spectrum forward_transform(const Field& f);
Field inverse_transform(const Spectrum& f);
SpacetimeSpectrum forward_transform(const SpacetimeField& f);
SpacetimeField inverse_transform(const SpacetimeSpectrum& f);
// Spatial transform of every time slice: Configuration <-> SpatialFrequency.
SpacetimeField spatial_forward(const SpacetimeField& f);
SpacetimeField spatial_inverse(const SpacetimeField& f);
// Time transform of every spatial frequency: SpatialFrequency <-> Frequency.
SpacetimeField time_forward(const SpacetimeField& f);
SpacetimeField time_inverse(const SpacetimeField& f);

using Multiplier = std::function<cplx(const Vec3& xi)>;
using SpacetimeMultiplier = std::function<cplx(const Vec3& xi, double tau)>;

/// Pointwise m(xi) * F(xi). Throws ParameterError naming the first lattice
/// frequency where m is not finite.
Spectrum apply_multiplier(const Spectrum& f, const Multiplier& m);
/// Same for spacetime data in Frequency or SpatialFrequency representation
/// (tau is ignored for the latter).
SpacetimeSpectrum apply_multiplier(const SpacetimeSpectrum& f, const SpacetimeMultiplier& m);

namespace multipliers {
Multiplier bessel(double power);       // <xi>^power, J_x^power
Multiplier half_derivative(double power);  // |xi|^power, D_x^power; 0 at xi = 0 for power > 0
Multiplier partial(int axis);           // i xi_axis
}  // namespace multipliers

void require_rep(const Field& f, Representation rep, const char* where);
void require_rep(const SpacetimeField& f, Representation rep, const char* where);
void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* where);
void require_same_grid(const SpacetimeGrid& a, const SpacetimeGrid& b, const char* where);

}  // namespace qwave
