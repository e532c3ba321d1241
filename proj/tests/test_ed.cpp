#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rabi/ed.hpp"
#include "rabi/model.hpp"
#include "rabi/oscillator.hpp"

using namespace rabi;

TEST_CASE("hamiltonian structure") {
    ModelParams p{0.5, 1.0, 0.3};
    Eigen::MatrixXd H = build_hamiltonian(p, 7);
    REQUIRE(H.rows() == 16);
    CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);

    // photon diagonal, spin-flip blocks, spin-signed ladder entries
    CHECK(H(0, 0) == 0.0);
    CHECK(H(3, 3) == doctest::Approx(3 * 0.5));
    CHECK(H(0, 8) == doctest::Approx(0.5));  // Omega/2 between |up,0> and |down,0>
    CHECK(H(0, 1) == doctest::Approx(0.3));
    CHECK(H(1, 2) == doctest::Approx(0.3 * std::sqrt(2.0)));
    CHECK(H(8, 9) == doctest::Approx(-0.3));
}

TEST_CASE("uncoupled spectrum") {
    ModelParams p{0.5, 1.0, 0.0};
    EDResult r = diagonalize(p, 12);
    std::vector<double> expect;
    for (int n = 0; n <= 12; ++n) {
        expect.push_back(-0.5 + 0.5 * n);
        expect.push_back(0.5 + 0.5 * n);
    }
    std::sort(expect.begin(), expect.end());
    for (int k = 0; k < 8; ++k)
        CHECK(r.eigenvalues[k] == doctest::Approx(expect[k]).epsilon(1e-12));
}

TEST_CASE("small-cutoff eigenvalues match an independent 4x4 solve") {
    const double omega = 0.5, Omega = 1.0, g = 0.3;
    Eigen::Matrix4d h4;  // basis |up,0>, |up,1>, |down,0>, |down,1>
    h4 << 0.0, g, Omega / 2, 0.0,
          g, omega, 0.0, Omega / 2,
          Omega / 2, 0.0, 0.0, -g,
          0.0, Omega / 2, -g, omega;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> ref(h4);

    EDResult r = diagonalize({omega, Omega, g}, 1);
    for (int k = 0; k < 4; ++k)
        CHECK(r.eigenvalues[k] == doctest::Approx(ref.eigenvalues()[k]).epsilon(1e-12));
}

TEST_CASE("parity labels and orthonormality") {
    ModelParams p{0.15, 1.0, gc(0.15)};
    EDResult r = diagonalize(p, converged_cutoff(p));
    CHECK(r.parity_labels[0] == -1);
    CHECK(r.parity_labels[1] == +1);

    const int dim = 2 * (r.cutoff + 1);
    Eigen::MatrixXd gram =
        r.eigenvectors.leftCols(8).transpose() * r.eigenvectors.leftCols(8);
    CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(dim >= 8);

    CHECK(state_index(r, Parity::Negative, 0) == 0);
    CHECK(state_index(r, Parity::Positive, 0) == 1);
    CHECK(r.parity_labels[state_index(r, Parity::Positive, 1)] == +1);
}

TEST_CASE("deep-strong ground energy approaches the displaced-oscillator value") {
    ModelParams p{0.5, 1.0, 3.0 * gc(0.5)};
    EDResult r = diagonalize(p, converged_cutoff(p));
    CHECK(std::abs(r.eigenvalues[0] + p.g * p.g / p.omega) < 0.05);

    // the lowest pair is degenerate beyond solver resolution; the parity
    // labels survive as one of each sign even though their order may not
    CHECK(r.parity_labels[0] * r.parity_labels[1] == -1);
    CHECK(std::abs(r.eigenvalues[1] - r.eigenvalues[0]) < 1e-6);
}

TEST_CASE("cutoff convergence policy") {
    CHECK(converged_cutoff({0.15, 1.0, 0.0}) == 24);
    CHECK(converged_cutoff({0.15, 1.0, 2 * gc(0.15)}) == 48);
    CHECK(converged_cutoff({0.5, 1.0, 3 * gc(0.5)}) == 96);

    // ground energy is nonincreasing in the cutoff
    ModelParams p{0.15, 1.0, 2 * gc(0.15)};
    double prev = 1e300;
    for (int N : {12, 24, 48, 96}) {
        EDResult r = diagonalize(p, N);
        CHECK(r.eigenvalues[0] <= prev + 1e-14);
        prev = r.eigenvalues[0];
    }
}

TEST_CASE("position-space wavefunctions") {
    QuadratureGrid grid = default_grid(1.0);

    // zero coupling: ground state is the bare oscillator vacuum
    EDResult r0 = diagonalize({0.5, 1.0, 0.0}, 24);
    EdWavefunction wf0 = wavefunction(r0, 0, grid);
    const double scale = wf0.psi_plus[grid.size() / 2] / hermite_fn(0, grid.nodes[grid.size() / 2]);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        worst = std::max(worst,
                         std::abs(wf0.psi_plus[k] - scale * hermite_fn(0, grid.nodes[k])));
        worst = std::max(worst,
                         std::abs(wf0.psi_minus[k] + scale * hermite_fn(0, grid.nodes[k])));
    }
    CHECK(worst < 1e-8);

    // spinor normalization and parity relation at finite coupling
    ModelParams p{0.15, 1.0, gc(0.15)};
    EDResult r = diagonalize(p, converged_cutoff(p));
    QuadratureGrid wide = default_grid(gprime(p));
    for (int state : {0, 1}) {
        EdWavefunction wf = wavefunction(r, state, wide);
        const double norm = inner(wf.psi_plus, wf.psi_plus, wide) +
                            inner(wf.psi_minus, wf.psi_minus, wide);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-8));

        // psi-(x) = P psi+(-x): the grid is symmetric, compare mirrored samples
        const int P = r.parity_labels[state];
        double pworst = 0.0;
        for (std::size_t k = 0; k < wide.size(); ++k) {
            const std::size_t m = wide.size() - 1 - k;
            pworst = std::max(pworst, std::abs(wf.psi_minus[k] - P * wf.psi_plus[m]));
        }
        CHECK(pworst < 1e-8);

        // sign gauge: positive at the spin-up main peak
        double peak = 0.0;
        for (std::size_t k = 0; k < wide.size(); ++k)
            if (std::abs(wf.psi_plus[k]) > std::abs(peak)) peak = wf.psi_plus[k];
        CHECK(peak > 0.0);
    }
}

TEST_CASE("fock-basis observables") {
    EDResult r0 = diagonalize({0.5, 1.0, 0.0}, 24);
    EdObservables o0 = observables_ed(r0, 0);
    CHECK(std::abs(o0.photon) < 1e-12);
    CHECK(o0.sigma_x == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(o0.coupling_corr) < 1e-12);
    CHECK(o0.energy == doctest::Approx(-0.5).epsilon(1e-12));

    // cross-representation check of the coupling correlation
    ModelParams p{0.5, 1.0, 0.5};
    EDResult r = diagonalize(p, converged_cutoff(p));
    EdObservables obs = observables_ed(r, 0);
    QuadratureGrid grid = default_grid(gprime(p));
    EdWavefunction wf = wavefunction(r, 0, grid);
    double sz_x = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        sz_x += grid.weights[k] * grid.nodes[k] *
                (wf.psi_plus[k] * wf.psi_plus[k] - wf.psi_minus[k] * wf.psi_minus[k]);
    CHECK(obs.coupling_corr == doctest::Approx(std::sqrt(2.0) * sz_x).epsilon(1e-8));

    // Hellmann-Feynman: dE0/dg equals the coupling correlation
    const double dg = 1e-5;
    EDResult rp = diagonalize({0.5, 1.0, 0.5 + dg}, r.cutoff);
    EDResult rm = diagonalize({0.5, 1.0, 0.5 - dg}, r.cutoff);
    const double dE = (rp.eigenvalues[0] - rm.eigenvalues[0]) / (2 * dg);
    CHECK(obs.coupling_corr == doctest::Approx(dE).epsilon(1e-6));
}

TEST_CASE("ground-state QFI") {
    ModelParams p{0.3, 1.0, 1.2 * gc0(0.3)};
    const double f = qfi_ed(p, 0);
    CHECK(f >= 0.0);

    // fidelity form converges onto the derivative form as the step shrinks;
    // its one-sided truncation error is first order in dg
    const int N = converged_cutoff(p);
    EDResult c = diagonalize(p, N);
    auto fidelity_form = [&](double dg) {
        EDResult fwd = diagonalize({0.3, 1.0, p.g + dg}, N);
        const double ov = std::abs(c.eigenvectors.col(0).dot(fwd.eigenvectors.col(0)));
        return 8.0 * (1.0 - ov) / (dg * dg);
    };
    const double err1 = std::abs(fidelity_form(1e-3) - f) / f;
    const double err2 = std::abs(fidelity_form(5e-4) - f) / f;
    CHECK(err1 < 1e-2);
    CHECK(err2 < err1);
    CHECK(err1 / err2 > 1.5);

    // cutoff doubling leaves the QFI unchanged at the converged N
    const double f2 = qfi_ed(p, 0, 1e-4, 2 * N);
    CHECK(std::abs(f2 - f) / f < 1e-6);

    // excessive steps are rejected rather than silently misaligned
    CHECK_THROWS_AS(qfi_ed({0.1, 1.0, 0.2}, 0, 0.3), StepTooLargeError);
}
