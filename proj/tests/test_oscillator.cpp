#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rabi/oscillator.hpp"

using namespace rabi;

namespace {

std::vector<double> sample(const QuadratureGrid& grid, double (*f)(double)) {
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = f(grid.nodes[k]);
    return out;
}

}  // namespace

TEST_CASE("grid construction and basic quadrature") {
    QuadratureGrid grid = make_grid(801, 12.0);
    REQUIRE(grid.size() == 801);
    CHECK(grid.half_width == 12.0);
    for (std::size_t k = 1; k < grid.size(); ++k) CHECK(grid.nodes[k] > grid.nodes[k - 1]);

    auto phi0 = sample(grid, [](double x) { return hermite_fn(0, x); });
    CHECK(inner(phi0, phi0, grid) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> xphi(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) xphi[k] = grid.nodes[k] * phi0[k];
    CHECK(inner(xphi, xphi, grid) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("grid preconditions") {
    CHECK_THROWS_AS(make_grid(32, 12.0), std::invalid_argument);
    QuadratureGrid grid = make_grid(401, 10.0);
    CHECK_NOTHROW(require_support(grid, 1.0, 1.0));
    // center 5 with xi = 1 needs half_width >= 13
    CHECK_THROWS_AS(require_support(grid, 5.0, 1.0), std::invalid_argument);
    // broad packet: xi = 0.04 needs 8/sqrt(0.04) = 40
    CHECK_THROWS_AS(require_support(grid, 0.0, 0.04), std::invalid_argument);
}

TEST_CASE("hermite function values and orthonormality") {
    CHECK(hermite_fn(0, 0.0) == doctest::Approx(std::pow(M_PI, -0.25)).epsilon(1e-14));
    CHECK(hermite_fn(1, 0.0) == 0.0);

    QuadratureGrid grid = make_grid(2001, 16.0);
    const int nmax = 60;
    std::vector<std::vector<double>> fn(nmax + 1, std::vector<double>(grid.size()));
    std::vector<double> buf(nmax + 1);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        hermite_all(nmax, grid.nodes[k], buf.data());
        for (int n = 0; n <= nmax; ++n) fn[n][k] = buf[n];
    }
    double worst = 0.0;
    for (int m = 0; m <= nmax; m += 6)
        for (int n = m; n <= nmax; n += 6) {
            const double want = m == n ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(inner(fn[m], fn[n], grid) - want));
        }
    CHECK(worst < 1e-10);

    // hermite_all matches hermite_fn entry by entry
    hermite_all(nmax, 0.73, buf.data());
    for (int n : {0, 1, 7, 33, 60})
        CHECK(buf[n] == doctest::Approx(hermite_fn(n, 0.73)).epsilon(1e-12));
}

TEST_CASE("scaled Gaussian second moment") {
    QuadratureGrid grid = make_grid(1201, 14.0);
    const double xi = 0.37;
    std::vector<double> g(grid.size()), xg(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = grid.nodes[k];
        g[k] = std::pow(xi / M_PI, 0.25) * std::exp(-0.5 * xi * x * x);
        xg[k] = x * g[k];
    }
    CHECK(inner(g, g, grid) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(inner(xg, xg, grid) == doctest::Approx(1.0 / (2.0 * xi)).epsilon(1e-12));
}

TEST_CASE("displaced Gaussian overlap") {
    QuadratureGrid grid = make_grid(1201, 14.0);
    const double d = 1.3;
    std::vector<double> a(grid.size()), b(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = grid.nodes[k];
        a[k] = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
        b[k] = std::pow(M_PI, -0.25) * std::exp(-0.5 * (x - d) * (x - d));
    }
    CHECK(inner(a, b, grid) == doctest::Approx(std::exp(-d * d / 4.0)).epsilon(1e-12));
}

TEST_CASE("grid refinement stability") {
    const double d = 2.1, xi = 0.6;
    auto integral = [&](int npoints) {
        QuadratureGrid grid = make_grid(npoints, 16.0);
        std::vector<double> a(grid.size()), b(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double x = grid.nodes[k];
            a[k] = std::pow(xi / M_PI, 0.25) * std::exp(-0.5 * xi * x * x);
            b[k] = std::pow(M_PI, -0.25) * std::exp(-0.5 * (x - d) * (x - d)) * (1.0 + 0.3 * x);
        }
        return inner(a, b, grid);
    };
    CHECK(std::abs(integral(1001) - integral(2001)) < 1e-10);
}

TEST_CASE("default production grid") {
    QuadratureGrid small = default_grid(0.0);
    CHECK(small.half_width == 12.0);
    CHECK(small.size() == 2001);
    QuadratureGrid big = default_grid(10.0);
    CHECK(big.half_width == doctest::Approx(32.0));
    CHECK_NOTHROW(require_support(big, 10.0, 0.45));
}
