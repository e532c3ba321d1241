#pragma once
#include <cstddef>
#include <vector>

namespace rabi {

struct QuadratureGrid {
    std::vector<double> nodes;    // strictly increasing
    std::vector<double> weights;
    double half_width = 0.0;

    std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre grid on [-half_width, half_width].
QuadratureGrid make_grid(int npoints, double half_width);

// Checks that states supported on |x - center| <~ 8/sqrt(xi) fit on the grid.
void require_support(const QuadratureGrid& grid, double max_abs_center, double min_xi);

// n-th normalized harmonic-oscillator eigenfunction (unit frequency) at x.
double hermite_fn(int n, double x);

// Fills out[0..nmax] with hermite_fn(0..nmax, x) in one upward recurrence.
void hermite_all(int nmax, double x, double* out);

double inner(const std::vector<double>& f, const std::vector<double>& g,
             const QuadratureGrid& grid);

// Default production grid sized for deep-strong-coupling displacements.
QuadratureGrid default_grid(double gp, int npoints = 2001);

}  // namespace rabi
