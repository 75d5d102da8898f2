#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "qwave/dyadic.hpp"

using namespace qwave;
using namespace qwave::testing;

namespace {

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("dyadic shells") {
    CHECK(shell_of(0.0).k == 0);
    CHECK(shell_of(1.0).k == 0);
    CHECK(shell_of(1.0001).k == 1);
    CHECK(shell_of(2.0).k == 1);
    CHECK(shell_of(3.0).k == 2);
    CHECK(shell_of(4.0).k == 2);
    CHECK(shell_of(1024.0).k == 10);
    for (double v : {0.3, 1.7, 5.5, 33.0, 1000.0}) CHECK(shell_of(v).contains(v));
}

TEST_CASE("lp_projection: partition, single mode, idempotence") {
    auto g = SpatialGrid::make(16, 2.0);
    auto f = random_field(g, Representation::Frequency, 3);
    Spectrum sum(g, Representation::Frequency);
    for (int k = 0; k <= nyquist_shell(g); ++k) sum += lp_projection(f, {k}).spectrum;
    CHECK(max_abs_diff(sum.data, f.data) == 0.0);

    // dxi = pi/2: mode (2, 0, 0) sits at |xi| = pi, mode (1,1,0) at 2.22
    Spectrum m(g, Representation::Frequency);
    const auto at = g.index_of_modes(2, 0, 0);
    m.data[at] = 1.0;
    for (int k = 0; k <= nyquist_shell(g); ++k) {
        auto p = lp_projection(m, {k}).spectrum;
        CHECK(max_abs(p.data) == (k == 2 ? 1.0 : 0.0));
    }
    for (int k = 0; k < 5; ++k) {
        auto once = lp_projection(f, {k}).spectrum;
        CHECK(max_abs_diff(lp_projection(once, {k}).spectrum.data, once.data) == 0.0);
    }
    auto far = lp_projection(f, {nyquist_shell(g) + 1});
    CHECK(far.empty);
    CHECK(max_abs(far.spectrum.data) == 0.0);
    // shell 1 on this lattice: 1 < |xi| <= 2 contains pi/2
    CHECK(!lp_projection(f, {1}).empty);
}

TEST_CASE("region masks") {
    const Vec3 a{1, 0, 0}, b{0, 3, 0}, c{-1, 0, 0};
    CHECK(masks::geq(a, b) != masks::ll(a, b));
    CHECK(masks::ll(a, b));
    CHECK(masks::geq(b, a));
    CHECK(masks::region_p(a, a));
    CHECK(masks::region_q(a, c));
    CHECK(masks::region_p(a, c) == false);
    auto sk = masks::shell_ll({1});
    CHECK(sk({1.5, 0, 0}, {0, 4, 0}));
    CHECK(!sk({1.5, 0, 0}, {0, 2, 0}));
    CHECK(!sk({0.5, 0, 0}, {0, 4, 0}));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    auto named = region_masks();
    REQUIRE(named.size() == 4);
    for (int i = 0; i < 2000; ++i) {
        Vec3 x{u(rng), u(rng), u(rng)}, y{u(rng), u(rng), u(rng)};
        CHECK(named[0].mask(x, y) + named[1].mask(x, y) == 1);
        CHECK(named[2].mask(x, y) + named[3].mask(x, y) == 1);
    }
}

TEST_CASE("shell surface mass grows like 2^{2k}") {
    const Vec3 xi{0, 0, 1000};
    std::vector<double> ks, logs;
    for (int k = 2; k <= 6; ++k) {
        auto m = shell_surface_mass(xi, 1002.0, {Sign::Plus, Sign::Plus}, {k}, 0.1);
        CHECK(m.stable);
        ks.push_back(k);
        logs.push_back(std::log2(m.value));
    }
    CHECK(fitted_slope(ks, logs) == doctest::Approx(2.0).epsilon(0.05));

    // mirrored sign pair gives the same ellipsoid
    auto a = shell_surface_mass(xi, 1002.0, {Sign::Plus, Sign::Plus}, {3}, 0.1);
    auto b = shell_surface_mass(xi, -1002.0, {Sign::Minus, Sign::Minus}, {3}, 0.1);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
    // shell empty on the surface: rho1 >= (tau - |xi|)/2 = 10 misses shell 2
    CHECK(shell_surface_mass(xi, 1020.0, {Sign::Plus, Sign::Plus}, {2}, 0.1).value == 0.0);
}

TEST_CASE("dyadic Hoelder summation constant is stable") {
    auto g = SpatialGrid::make(16, 2.0);
    for (auto [r, sigma] : {std::pair{2.0, 1.2}, std::pair{1.5, 1.5}}) {
        std::vector<double> ratio;
        for (std::uint64_t seed = 1; seed <= 12; ++seed) {
            auto f = random_field(g, Representation::Frequency, seed);
            double lhs = 0.0;
            for (int k = 0; k <= nyquist_shell(g); ++k)
                lhs += std::pow(2.0, 2.0 * k / r) * sobolev_hat_norm(lp_projection(f, {k}).spectrum, r, 0.0);
            ratio.push_back(lhs / sobolev_hat_norm(f, r, sigma));
        }
        const double c = *std::max_element(ratio.begin(), ratio.begin() + 6);
        for (std::size_t i = 6; i < ratio.size(); ++i) CHECK(ratio[i] <= 1.2 * c);
    }
}
