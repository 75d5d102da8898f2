#include "qwave/grid.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "qwave/error.hpp"

namespace qwave {

namespace {

// FFTW planning is not thread safe; execution of an existing plan on new
// arrays is. Plans are created once per layout and reused.
struct PlanKey {
    std::vector<int> dims;
    int howmany;
    int stride;
    int dist;
    int sign;
    auto tie() const { return std::tie(dims, howmany, stride, dist, sign); }
    bool operator<(const PlanKey& o) const { return tie() < o.tie(); }
};

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(const PlanKey& key) {
        std::lock_guard<std::mutex> lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::size_t total = 1;
        for (int d : key.dims) total *= static_cast<std::size_t>(d);
        const std::size_t span =
            (total - 1) * static_cast<std::size_t>(key.stride) +
            static_cast<std::size_t>(key.howmany - 1) * key.dist + 1;
        auto* scratch = fftw_alloc_complex(span);
        fftw_plan plan = fftw_plan_many_dft(
            static_cast<int>(key.dims.size()), key.dims.data(), key.howmany, scratch, nullptr,
            key.stride, key.dist, scratch, nullptr, key.stride, key.dist, key.sign,
            FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

void run_fft(std::vector<cplx>& data, const PlanKey& key) {
    fftw_plan plan = plan_cache().get(key);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
}

inline double parity(int i) { return (i & 1) ? -1.0 : 1.0; }

// (-1)^{i+j+k} for a flat spatial index.
double spatial_parity(const SpatialGrid& g, std::size_t flat) {
    auto ijk = g.unflatten(flat);
    return parity(ijk[0] + ijk[1] + ijk[2]);
}

std::vector<double> spatial_parity_table(const SpatialGrid& g) {
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = spatial_parity(g, i);
    return out;
}

PlanKey spatial_key(const SpatialGrid& g, int howmany, int sign) {
    const int n3 = static_cast<int>(g.size());
    return {{g.n, g.n, g.n}, howmany, 1, n3, sign};
}

PlanKey time_key(const SpacetimeGrid& g, int sign) {
    const int n3 = static_cast<int>(g.spatial.size());
    return {{g.m}, n3, n3, 1, sign};
}

void spatial_pass(std::vector<cplx>& data, const SpatialGrid& g, int howmany, bool forward) {
    const auto par = spatial_parity_table(g);
    const std::size_t n3 = g.size();
    if (forward) {
        run_fft(data, spatial_key(g, howmany, FFTW_FORWARD));
        const double w = g.dx() * g.dx() * g.dx();
        for (std::size_t i = 0; i < data.size(); ++i) data[i] *= w * par[i % n3];
    } else {
        for (std::size_t i = 0; i < data.size(); ++i) data[i] *= par[i % n3];
        run_fft(data, spatial_key(g, howmany, FFTW_BACKWARD));
        const double w = 1.0 / (static_cast<double>(n3) * g.dx() * g.dx() * g.dx());
        for (auto& v : data) v *= w;
    }
}

void time_pass(std::vector<cplx>& data, const SpacetimeGrid& g, bool forward) {
    const std::size_t n3 = g.spatial.size();
    if (forward) {
        run_fft(data, time_key(g, FFTW_FORWARD));
        for (int n = 0; n < g.m; ++n) {
            const double w = g.dt() * parity(n);
            for (std::size_t s = 0; s < n3; ++s) data[n * n3 + s] *= w;
        }
    } else {
        for (int n = 0; n < g.m; ++n) {
            const double w = parity(n) / (g.m * g.dt());
            for (std::size_t s = 0; s < n3; ++s) data[n * n3 + s] *= w;
        }
        run_fft(data, time_key(g, FFTW_BACKWARD));
    }
}

std::string describe(const Vec3& xi) {
    std::ostringstream os;
    os << "(" << xi[0] << ", " << xi[1] << ", " << xi[2] << ")";
    return os.str();
}

}  // namespace

SpatialGrid SpatialGrid::make(int n, double half_length) {
    if (n < 4 || n % 2 != 0) throw ParameterError("grid: N must be even and >= 4");
    if (!(half_length > 0.0)) throw ParameterError("grid: L must be positive");
    return SpatialGrid{n, half_length};
}

std::size_t SpatialGrid::index_of_modes(int m0, int m1, int m2) const {
    auto wrap = [this](int m) { return ((m % n) + n) % n; };
    return index(wrap(m0), wrap(m1), wrap(m2));
}

SpacetimeGrid SpacetimeGrid::make(const SpatialGrid& spatial, int m, double half_time) {
    if (m < 2 || m % 2 != 0) throw ParameterError("grid: M must be even and >= 2");
    if (!(half_time > 0.0)) throw ParameterError("grid: T must be positive");
    return SpacetimeGrid{spatial, m, half_time};
}

const char* to_string(Representation rep) {
    switch (rep) {
        case Representation::Configuration: return "configuration";
        case Representation::Frequency: return "frequency";
        case Representation::SpatialFrequency: return "spatial-frequency";
    }
    return "?";
}

void require_rep(const Field& f, Representation rep, const char* where) {
    if (f.rep != rep)
        throw ContractError(std::string(where) + ": expected " + to_string(rep) +
                            " representation, got " + to_string(f.rep));
    if (f.data.size() != f.grid.size()) throw ContractError(std::string(where) + ": sample count mismatch");
}

void require_rep(const SpacetimeField& f, Representation rep, const char* where) {
    if (f.rep != rep)
        throw ContractError(std::string(where) + ": expected " + to_string(rep) +
                            " representation, got " + to_string(f.rep));
    if (f.data.size() != f.grid.size()) throw ContractError(std::string(where) + ": sample count mismatch");
}

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* where) {
    if (!(a == b)) throw ContractError(std::string(where) + ": grid mismatch");
}

void require_same_grid(const SpacetimeGrid& a, const SpacetimeGrid& b, const char* where) {
    if (!(a == b)) throw ContractError(std::string(where) + ": grid mismatch");
}

Field& Field::operator+=(const Field& other) {
    require_same_grid(grid, other.grid, "Field::+=");
    if (rep != other.rep) throw ContractError("Field::+=: representation mismatch");
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += other.data[i];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require_same_grid(grid, other.grid, "Field::-=");
    if (rep != other.rep) throw ContractError("Field::-=: representation mismatch");
    for (std::size_t i = 0; i < data.size(); ++i) data[i] -= other.data[i];
    return *this;
}

Field& Field::operator*=(cplx alpha) {
    for (auto& v : data) v *= alpha;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx alpha, Field a) { return a *= alpha; }

Field SpacetimeField::slice_field(int n) const {
    Field f(grid.spatial, rep == Representation::Configuration ? Representation::Configuration
                                                                 : Representation::Frequency);
    std::copy(slice(n), slice(n) + slice_size(), f.data.begin());
    return f;
}

void SpacetimeField::set_slice(int n, const Field& f) {
    require_same_grid(grid.spatial, f.grid, "SpacetimeField::set_slice");
    std::copy(f.data.begin(), f.data.end(), slice(n));
}

SpacetimeField& SpacetimeField::operator+=(const SpacetimeField& other) {
    require_same_grid(grid, other.grid, "SpacetimeField::+=");
    if (rep != other.rep) throw ContractError("SpacetimeField::+=: representation mismatch");
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += other.data[i];
    return *this;
}

SpacetimeField& SpacetimeField::operator-=(const SpacetimeField& other) {
    require_same_grid(grid, other.grid, "SpacetimeField::-=");
    if (rep != other.rep) throw ContractError("SpacetimeField::-=: representation mismatch");
    for (std::size_t i = 0; i < data.size(); ++i) data[i] -= other.data[i];
    return *this;
}

SpacetimeField& SpacetimeField::operator*=(cplx alpha) {
    for (auto& v : data) v *= alpha;
    return *this;
}

SpacetimeField operator+(SpacetimeField a, const SpacetimeField& b) { return a += b; }
SpacetimeField operator-(SpacetimeField a, const SpacetimeField& b) { return a -= b; }
SpacetimeField operator*(cplx alpha, SpacetimeField a) { return a *= alpha; }

Spectrum forward_transform(const Field& f) {
    require_rep(f, Representation::Configuration, "forward_transform");
    Field out = f;
    out.rep = Representation::Frequency;
    spatial_pass(out.data, f.grid, 1, true);
    return out;
}

Field inverse_transform(const Spectrum& f) {
    require_rep(f, Representation::Frequency, "inverse_transform");
    Field out = f;
    out.rep = Representation::Configuration;
    spatial_pass(out.data, f.grid, 1, false);
    return out;
}

SpacetimeField spatial_forward(const SpacetimeField& f) {
    require_rep(f, Representation::Configuration, "spatial_forward");
    SpacetimeField out = f;
    out.rep = Representation::SpatialFrequency;
    spatial_pass(out.data, f.grid.spatial, f.grid.m, true);
    return out;
}

SpacetimeField spatial_inverse(const SpacetimeField& f) {
    require_rep(f, Representation::SpatialFrequency, "spatial_inverse");
    SpacetimeField out = f;
    out.rep = Representation::Configuration;
    spatial_pass(out.data, f.grid.spatial, f.grid.m, false);
    return out;
}

SpacetimeField time_forward(const SpacetimeField& f) {
    require_rep(f, Representation::SpatialFrequency, "time_forward");
    SpacetimeField out = f;
    out.rep = Representation::Frequency;
    time_pass(out.data, f.grid, true);
    return out;
}

SpacetimeField time_inverse(const SpacetimeField& f) {
    require_rep(f, Representation::Frequency, "time_inverse");
    SpacetimeField out = f;
    out.rep = Representation::SpatialFrequency;
    time_pass(out.data, f.grid, false);
    return out;
}

SpacetimeSpectrum forward_transform(const SpacetimeField& f) {
    require_rep(f, Representation::Configuration, "forward_transform");
    return time_forward(spatial_forward(f));
}

SpacetimeField inverse_transform(const SpacetimeSpectrum& f) {
    require_rep(f, Representation::Frequency, "inverse_transform");
    return spatial_inverse(time_inverse(f));
}

Spectrum apply_multiplier(const Spectrum& f, const Multiplier& m) {
    require_rep(f, Representation::Frequency, "apply_multiplier");
    Spectrum out = f;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const Vec3 xi = f.grid.frequency(i);
        const cplx w = m(xi);
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
            throw ParameterError("apply_multiplier: non-finite multiplier at xi = " + describe(xi));
        out.data[i] *= w;
    }
    return out;
}

SpacetimeSpectrum apply_multiplier(const SpacetimeSpectrum& f, const SpacetimeMultiplier& m) {
    if (f.rep == Representation::Configuration)
        throw ContractError("apply_multiplier: spacetime data must be in a frequency representation");
    const bool with_tau = f.rep == Representation::Frequency;
    SpacetimeSpectrum out = f;
    const std::size_t n3 = f.slice_size();
    std::vector<Vec3> freqs(n3);
    for (std::size_t s = 0; s < n3; ++s) freqs[s] = f.grid.spatial.frequency(s);
    for (int n = 0; n < f.grid.m; ++n) {
        const double tau = with_tau ? f.grid.tau(n) : 0.0;
        for (std::size_t s = 0; s < n3; ++s) {
            const cplx w = m(freqs[s], tau);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
                throw ParameterError("apply_multiplier: non-finite multiplier at xi = " +
                                     describe(freqs[s]) + ", tau = " + std::to_string(tau));
            out.data[n * n3 + s] *= w;
        }
    }
    return out;
}

namespace multipliers {

Multiplier bessel(double power) {
    return [power](const Vec3& xi) { return cplx(std::pow(bracket(norm3(xi)), power), 0.0); };
}

Multiplier half_derivative(double power) {
    return [power](const Vec3& xi) { return cplx(std::pow(norm3(xi), power), 0.0); };
}

Multiplier partial(int axis) {
    if (axis < 0 || axis > 2) throw ParameterError("partial: axis must be 0, 1 or 2");
    return [axis](const Vec3& xi) { return cplx(0.0, xi[axis]); };
}

}  // namespace multipliers

}  // namespace qwave
