#include "qwave/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "qwave/error.hpp"

namespace qwave {

namespace {

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

void put_f64(std::vector<unsigned char>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

void write_all(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw LoadError("cannot open '" + path + "' for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw LoadError("write to '" + path + "' failed");
}

std::vector<unsigned char> encode(const SpatialGrid& g, int m, double t, Representation rep,
                                  const std::vector<cplx>& data) {
    std::vector<unsigned char> out;
    out.reserve(kFieldHeaderBytes + 16 * data.size());
    out.insert(out.end(), std::begin(kFieldMagic), std::end(kFieldMagic));
    put_u64(out, kFieldVersion);
    put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(g.n)));
    put_f64(out, g.half_length);
    put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(m)));
    put_f64(out, t);
    put_u64(out, static_cast<std::uint64_t>(rep));
    for (const auto& c : data) {
        put_f64(out, c.real());
        put_f64(out, c.imag());
    }
    return out;
}

}  // namespace

void save_field(const std::string& path, const Field& f) {
    write_all(path, encode(f.grid, 0, 0.0, f.rep, f.data));
}

void save_field(const std::string& path, const SpacetimeField& f) {
    write_all(path, encode(f.grid.spatial, f.grid.m, f.grid.half_time, f.rep, f.data));
}

StoredField load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw LoadError("cannot open '" + path + "'");
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    const std::string where = "'" + path + "': ";
    if (bytes.size() < kFieldHeaderBytes)
        throw LoadError(where + "header truncated (" + std::to_string(bytes.size()) + " of " +
                        std::to_string(kFieldHeaderBytes) + " bytes)");
    if (std::memcmp(bytes.data(), kFieldMagic, 8) != 0) throw LoadError(where + "bad magic");
    const auto version = get_u64(bytes.data() + 8);
    if (version != kFieldVersion) throw LoadError(where + "unsupported version " + std::to_string(version));

    const auto n = static_cast<std::int64_t>(get_u64(bytes.data() + 16));
    const double l = get_f64(bytes.data() + 24);
    const auto m = static_cast<std::int64_t>(get_u64(bytes.data() + 32));
    const double t = get_f64(bytes.data() + 40);
    const auto rep_flag = get_u64(bytes.data() + 48);
    if (rep_flag > static_cast<std::uint64_t>(Representation::SpatialFrequency))
        throw LoadError(where + "unknown representation flag " + std::to_string(rep_flag));
    const auto rep = static_cast<Representation>(rep_flag);
    if (n < 4 || n > 4096 || m < 0 || m > (1 << 20)) throw LoadError(where + "grid descriptor out of range");

    StoredField out;
    try {
        const auto spatial = SpatialGrid::make(static_cast<int>(n), l);
        if (m == 0) {
            if (rep == Representation::SpatialFrequency)
                throw LoadError(where + "spatial field cannot be in SpatialFrequency representation");
            out = Field(spatial, rep);
        } else {
            out = SpacetimeField(SpacetimeGrid::make(spatial, static_cast<int>(m), t), rep);
        }
    } catch (const ParameterError& e) {
        throw LoadError(where + "invalid grid: " + e.what());
    }

    auto& data = std::visit([](auto& f) -> std::vector<cplx>& { return f.data; }, out);
    const std::size_t expected = kFieldHeaderBytes + 16 * data.size();
    if (bytes.size() != expected)
        throw LoadError(where + "payload has " + std::to_string(bytes.size() - kFieldHeaderBytes) + " bytes, expected " +
                        std::to_string(expected - kFieldHeaderBytes));
    const unsigned char* p = bytes.data() + kFieldHeaderBytes;
    for (auto& c : data) {
        c = {get_f64(p), get_f64(p + 8)};
        p += 16;
    }
    return out;
}

Field load_spatial_field(const std::string& path) {
    auto f = load_field(path);
    if (!std::holds_alternative<Field>(f)) throw LoadError("'" + path + "': expected a spatial field");
    return std::get<Field>(std::move(f));
}

SpacetimeField load_spacetime_field(const std::string& path) {
    auto f = load_field(path);
    if (!std::holds_alternative<SpacetimeField>(f)) throw LoadError("'" + path + "': expected a spacetime field");
    return std::get<SpacetimeField>(std::move(f));
}

}  // namespace qwave
