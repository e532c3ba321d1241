#pragma once
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rabi/model.hpp"
#include "rabi/polaron.hpp"

namespace rabi {

struct DegenerateInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Mode { Symmetric, Asymmetric };

struct EnergySolution {
    double energy = 0.0;
    PolaronWeights weights;
};

// Lowest generalized Rayleigh quotient of the two-packet problem plus the
// constant offset; weights normalized so <psi_+|psi_+> = 1.
// Throws DegenerateInputError when the packet overlap matrix is not usable.
EnergySolution solve_energy(const PolaronShape& s, const ModelParams& p, Parity parity);

struct OptimizeOptions {
    int starts = 8;
    long max_evals = 200000;          // per start
    double simplex_tol = 1e-10;       // NM size target while iterating
    double converged_size = 1e-9;     // reported convergence: final simplex size
    double converged_stall = 1e-12;   // reported convergence: energy stall
    double delta_box_div = 2.0;       // |delta| <= 0.95*sqrt(xi)/div
    std::uint64_t seed = 0;           // jitter stream for extra starts
    int polish_rounds = 3;
};

struct VariationalResult {
    PolaronShape shape;
    PolaronWeights weights;
    double energy = 0.0;
    Parity parity = Parity::Negative;
    Mode mode = Mode::Asymmetric;
    bool converged = false;
    long n_evals = 0;
    int restarts_used = 0;
};

// Derivative-free minimization over the shape parameters (6, or 4 with the
// slopes pinned at zero in Symmetric mode).  Deterministic given options.seed.
VariationalResult optimize(const ModelParams& p, Parity parity, Mode mode,
                           const std::optional<PolaronShape>& warm = std::nullopt,
                           const OptimizeOptions& opt = {});

struct ScanRow {
    double g = 0.0;
    VariationalResult result;
    bool jump = false;              // normalized parameter step > 0.2 vs previous row
    double discarded_energy = 0.0;  // energy of the losing sweep direction
    bool has_discarded = false;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    double omega = 0.0;
    double Omega = 1.0;
    Parity parity = Parity::Negative;
    Mode mode = Mode::Asymmetric;
};

// Warm-started continuation over g in both sweep directions, keeping the
// lower-energy branch per point.  Asymmetric scans also seed every point from
// the symmetric-mode row so the mode-nesting inequality holds row-wise.
ScanResult scan_g(double omega, double Omega, const std::vector<double>& g_list,
                  Parity parity, Mode mode, const OptimizeOptions& opt = {});

}  // namespace rabi
