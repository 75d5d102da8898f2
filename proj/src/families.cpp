#include "qwave/families.hpp"

#include <cmath>
#include <random>

#include "qwave/error.hpp"

namespace qwave {

namespace {

// Orthonormal frame with e0 along v (e0 = x-axis when v = 0).
std::array<Vec3, 3> frame(const Vec3& v) {
    const double n = norm3(v);
    Vec3 e0 = n > 0 ? Vec3{v[0] / n, v[1] / n, v[2] / n} : Vec3{1, 0, 0};
    Vec3 helper = std::abs(e0[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 e1{e0[1] * helper[2] - e0[2] * helper[1], e0[2] * helper[0] - e0[0] * helper[2],
            e0[0] * helper[1] - e0[1] * helper[0]};
    const double n1 = norm3(e1);
    for (auto& c : e1) c /= n1;
    Vec3 e2{e0[1] * e1[2] - e0[2] * e1[1], e0[2] * e1[0] - e0[0] * e1[2], e0[0] * e1[1] - e0[1] * e1[0]};
    return {e0, e1, e2};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

DataFamily DataFamily::gaussian(const Vec3& xi0, double width) {
    DataFamily f;
    f.kind = Kind::GaussianBump;
    f.xi0 = xi0;
    f.width = width;
    return f;
}

DataFamily DataFamily::shell(double radius, double width) {
    DataFamily f;
    f.kind = Kind::Shell;
    f.xi0 = {radius, 0, 0};
    f.width = width;
    return f;
}

DataFamily DataFamily::knapp(const Vec3& xi0, double width, const Vec3& anisotropy) {
    DataFamily f;
    f.kind = Kind::KnappBox;
    f.xi0 = xi0;
    f.width = width;
    f.anisotropy = anisotropy;
    return f;
}

DataFamily DataFamily::random(const Vec3& xi0, double width, std::uint64_t seed) {
    DataFamily f;
    f.kind = Kind::RandomBandlimited;
    f.xi0 = xi0;
    f.width = width;
    f.seed = seed;
    return f;
}

cplx DataFamily::profile(const Vec3& xi) const {
    if (kind == Kind::Shell) {
        const double d = (norm3(xi) - norm3(xi0)) / width;
        return amplitude * std::exp(-0.5 * d * d);
    }
    const auto e = frame(xi0);
    const Vec3 rel{xi[0] - xi0[0], xi[1] - xi0[1], xi[2] - xi0[2]};
    double q = 0.0;
    bool inside = true;
    for (int a = 0; a < 3; ++a) {
        const double c = dot(rel, e[a]) / (width * anisotropy[a]);
        q += c * c;
        inside = inside && std::abs(c) <= 1.0;
    }
    if (kind == Kind::KnappBox) return inside ? cplx(amplitude) : cplx(0.0);
    return amplitude * std::exp(-0.5 * q);
}

double DataFamily::reach() const {
    const double spread = width * std::max({anisotropy[0], anisotropy[1], anisotropy[2]});
    if (kind == Kind::KnappBox) return norm3(xi0) + std::sqrt(3.0) * spread;
    return norm3(xi0) + 3.0 * spread;
}

const char* to_string(DataFamily::Kind kind) {
    switch (kind) {
        case DataFamily::Kind::GaussianBump: return "gaussian-bump";
        case DataFamily::Kind::Shell: return "shell";
        case DataFamily::Kind::KnappBox: return "knapp-box";
        case DataFamily::Kind::RandomBandlimited: return "random-bandlimited";
    }
    return "?";
}

DataFamily::Kind parse_family_kind(const std::string& name) {
    for (auto k : {DataFamily::Kind::GaussianBump, DataFamily::Kind::Shell, DataFamily::Kind::KnappBox,
                   DataFamily::Kind::RandomBandlimited})
        if (name == to_string(k)) return k;
    throw ParameterError("unknown data family '" + name + "'");
}

Spectrum generate(const DataFamily& family, const SpatialGrid& g, double lambda, double band_radius) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("generate: scale must be positive");
    if (!(family.width > 0.0)) throw ParameterError("generate: family width must be positive");
    Spectrum out(g, Representation::Frequency);
    std::mt19937_64 rng(family.seed);
    std::normal_distribution<double> normal;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 xi = g.frequency(i);
        const Vec3 base{xi[0] / lambda, xi[1] / lambda, xi[2] / lambda};
        cplx noise = 1.0;
        if (family.kind == DataFamily::Kind::RandomBandlimited) {
            const double re = normal(rng), im = normal(rng);
            noise = {re, im};
        }
        if (norm3(base) >= band_radius) continue;
        out.data[i] = noise * family.profile(base);
    }
    return out;
}

}  // namespace qwave
