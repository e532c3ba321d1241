#include "rabi/oscillator.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <stdexcept>

namespace rabi {

QuadratureGrid make_grid(int npoints, double half_width) {
    if (npoints < 64) throw std::invalid_argument("make_grid: npoints must be >= 64");
    if (!(half_width > 0.0)) throw std::invalid_argument("make_grid: half_width must be > 0");
    gsl_integration_glfixed_table* t =
        gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(npoints));
    QuadratureGrid grid;
    grid.half_width = half_width;
    grid.nodes.resize(npoints);
    grid.weights.resize(npoints);
    for (int i = 0; i < npoints; ++i) {
        double x, w;
        gsl_integration_glfixed_point(-half_width, half_width, static_cast<std::size_t>(i), &x, &w, t);
        grid.nodes[i] = x;
        grid.weights[i] = w;
    }
    gsl_integration_glfixed_table_free(t);
    return grid;
}

void require_support(const QuadratureGrid& grid, double max_abs_center, double min_xi) {
    const double needed = max_abs_center + 8.0 / std::sqrt(min_xi);
    if (needed > grid.half_width)
        throw std::invalid_argument("quadrature grid too narrow for requested state support");
}

double hermite_fn(int n, double x) {
    if (n < 0) throw std::invalid_argument("hermite_fn: n must be >= 0");
    if (n > 100000) throw std::invalid_argument("hermite_fn: n exceeds configured maximum");
    double prev = 0.0;
    double cur = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    for (int k = 0; k < n; ++k) {
        const double next =
            std::sqrt(2.0 / (k + 1.0)) * x * cur - std::sqrt(k / (k + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

void hermite_all(int nmax, double x, double* out) {
    out[0] = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (nmax == 0) return;
    out[1] = std::sqrt(2.0) * x * out[0];
    for (int k = 1; k < nmax; ++k)
        out[k + 1] = std::sqrt(2.0 / (k + 1.0)) * x * out[k] - std::sqrt(k / (k + 1.0)) * out[k - 1];
}

double inner(const std::vector<double>& f, const std::vector<double>& g,
             const QuadratureGrid& grid) {
    if (f.size() != grid.size() || g.size() != grid.size())
        throw std::invalid_argument("inner: sampled function size does not match grid");
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) acc += grid.weights[i] * f[i] * g[i];
    return acc;
}

QuadratureGrid default_grid(double gp, int npoints) {
    return make_grid(npoints, std::max(12.0, 2.0 * gp + 12.0));
}

}  // namespace rabi
