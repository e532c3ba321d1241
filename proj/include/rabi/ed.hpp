#pragma once
#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

#include "rabi/model.hpp"
#include "rabi/oscillator.hpp"

namespace rabi {

struct CutoffTooSmallError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepTooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Truncated-Fock-basis spectrum.  Basis ordering: |up,n> for n = 0..N, then
// |down,n>.  Eigenvectors are columns; quasi-degenerate pairs are rotated to
// definite parity inside their eigenspace before labeling.
struct EDResult {
    int cutoff = 0;  // Fock truncation N (photon numbers 0..N)
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    std::vector<int> parity_labels;  // +-1 per state
    ModelParams params;
};

// Dense symmetric 2(N+1) matrix: omega*n diagonal, Omega/2 spin-flip blocks,
// +-g*sqrt(n+1) photon ladder entries with the sign set by the spin.
Eigen::MatrixXd build_hamiltonian(const ModelParams& p, int cutoff);

EDResult diagonalize(const ModelParams& p, int cutoff);

// Smallest N in the doubling sequence 24, 48, ... whose lowest two energies
// agree with those at 2N within tol.
int converged_cutoff(const ModelParams& p, double tol = 1e-10);

// Index (into the ascending spectrum) of the k-th state with the given parity.
int state_index(const EDResult& r, Parity parity, int k = 0);

// Position-space components on a grid.  Spinor normalization:
// <psi+|psi+> + <psi-|psi-> = 1, each component integrating to 1/2 for a
// parity eigenstate; scale psi_plus by sqrt(2) to compare against the
// unit-normalized trial spin-up component.  Sign gauge: psi_plus positive at
// its main peak.
struct EdWavefunction {
    std::vector<double> psi_plus, psi_minus;
};
EdWavefunction wavefunction(const EDResult& r, int state, const QuadratureGrid& grid);

struct EdObservables {
    double energy = 0.0;
    double photon = 0.0;
    double sigma_x = 0.0;
    double coupling_corr = 0.0;  // <sigma_z (a^dag + a)>
};
// Exact ladder algebra on the coefficient vectors; no quadrature.
EdObservables observables_ed(const EDResult& r, int state);

// 4<psi'|psi'> - 4<psi'|psi>^2 from sign-aligned central differences of the
// coefficient vector, Richardson-extrapolated over dg and dg/2.  cutoff = 0
// picks the converged cutoff automatically.  Throws StepTooLargeError when a
// neighbor overlap drops below 0.9.
double qfi_ed(const ModelParams& p, int state, double dg = 1e-4, int cutoff = 0);

}  // namespace rabi
