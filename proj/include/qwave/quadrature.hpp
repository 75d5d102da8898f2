#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace qwave::quad {

/// Integrand evaluated at x together with the exact distances x - lo and
/// hi - x, so that factors like |x - lo|^p stay accurate near the ends.
using EndpointIntegrand = std::function<double(double x, double from_lo, double to_hi)>;

struct Result {
    double value = 0.0;
    double error = 0.0;  // difference between the last two refinement levels
    int levels = 0;
    bool converged = false;
};

/// Double-exponential (tanh-sinh) rule on [lo, hi]; clusters nodes at both
/// ends and tolerates integrable endpoint singularities.
Result tanh_sinh(const EndpointIntegrand& f, double lo, double hi, double rel_tol = 1e-13,
                 double abs_tol = 1e-15, int max_level = 12);

/// Gauss-Legendre nodes and weights on [-1, 1].
const std::vector<std::pair<double, double>>& gauss_legendre(int order);

/// Composite Gauss-Legendre over `panels` equal panels of [a, b].
double gauss_composite(const std::function<double(double)>& f, double a, double b, int panels, int order = 4);

}  // namespace qwave::quad
