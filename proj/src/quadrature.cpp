#include "qwave/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "qwave/error.hpp"

namespace qwave::quad {

namespace {

constexpr double kHalfPi = M_PI / 2;
constexpr double kTMax = 3.5;  // weights below ~1e-40 beyond this

struct Node {
    double x, from_lo, to_hi, weight;
    bool usable;
};

// Abscissa data for parameter t on the panel centre c, half-width h.
Node node_at(double t, double c, double h) {
    const double u = kHalfPi * std::sinh(t);
    const double ch = std::cosh(u);
    const double w = h * kHalfPi * std::cosh(t) / (ch * ch);
    // 1 + tanh(u) and 1 - tanh(u) without cancellation
    const double from_lo = 2.0 * h / (1.0 + std::exp(-2.0 * u));
    const double to_hi = 2.0 * h / (1.0 + std::exp(2.0 * u));
    const double x = t < 0 ? (c - h) + from_lo : (c + h) - to_hi;
    const bool usable = from_lo > 0.0 && to_hi > 0.0 && std::isfinite(w) && w > 0.0;
    return {x, from_lo, to_hi, w, usable};
}

}  // namespace

Result tanh_sinh(const EndpointIntegrand& f, double lo, double hi, double rel_tol, double abs_tol, int max_level) {
    if (!(hi > lo)) {
        if (hi == lo) return {0.0, 0.0, 0, true};
        throw ParameterError("tanh_sinh: empty interval");
    }
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);

    auto eval = [&](double t) {
        const Node nd = node_at(t, c, h);
        if (!nd.usable) return 0.0;
        const double v = f(nd.x, nd.from_lo, nd.to_hi);
        return std::isfinite(v) ? v * nd.weight : 0.0;
    };

    double step = 0.5;
    double sum = eval(0.0);
    for (double t = step; t <= kTMax; t += step) sum += eval(t) + eval(-t);
    double estimate = sum * step;
    Result res{estimate, 0.0, 0, false};
    for (int level = 1; level <= max_level; ++level) {
        step *= 0.5;
        for (double t = step; t <= kTMax; t += 2 * step) sum += eval(t) + eval(-t);
        const double next = sum * step;
        res.error = std::abs(next - estimate);
        res.value = next;
        res.levels = level;
        estimate = next;
        if (level >= 3 && res.error <= std::max(abs_tol, rel_tol * std::abs(next))) {
            res.converged = true;
            break;
        }
    }
    return res;
}

const std::vector<std::pair<double, double>>& gauss_legendre(int order) {
    static std::mutex mutex;
    static std::map<int, std::vector<std::pair<double, double>>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    if (order < 1) throw ParameterError("gauss_legendre: order must be positive");
    std::vector<std::pair<double, double>> rule(order);
    for (int i = 0; i < order; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double pk = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

double gauss_composite(const std::function<double(double)>& f, double a, double b, int panels, int order) {
    const auto& rule = gauss_legendre(order);
    const double width = (b - a) / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * width;
        for (const auto& [x, w] : rule) acc += w * f(c + 0.5 * width * x);
    }
    return acc * 0.5 * width;
}

}  // namespace qwave::quad
