#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rabi/ed.hpp"
#include "rabi/polaron.hpp"
#include "rabi/variational.hpp"

namespace rabi {

struct AmbiguousPeakError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class BoundaryKind {
    MinXiBeta,
    MaxDeltaAlpha,
    MinDeltaBeta,
    ImbalanceZero,
    ZetaAlphaOne,
    WeightEqual,
    DeltaAlphaZero,
    MainPeakZetaMin,
    MainPeakZetaOne,
};

const char* boundary_kind_name(BoundaryKind kind);

struct PhaseBoundary {
    BoundaryKind kind;
    std::vector<std::pair<double, double>> points;  // (omega, g), sorted by omega
};

// Roots of a sampled series by bracketing + linear interpolation; when an
// evaluator is supplied each root is tightened by `rounds` bisection steps
// (re-optimization happens inside the evaluator).
std::vector<double> detect_sign_change(const std::vector<std::pair<double, double>>& series,
                                       const std::function<double(double)>& eval = {},
                                       int rounds = 3);

struct Extremum {
    double g = 0.0;
    double value = 0.0;
    bool maximum = false;
};

// Interior extrema of a sampled series, parabolic refinement per hit.
std::vector<Extremum> detect_extremum(const std::vector<std::pair<double, double>>& series);

std::vector<double> log_spaced(double lo, double hi, int n);
std::vector<double> lin_spaced(double lo, double hi, int n);

struct PhaseDiagramOptions {
    int n_g = 81;
    double g_lo_frac = 0.2;  // in units of gc(omega)
    double g_hi_frac = 2.0;
    OptimizeOptions opt;
};

struct PhaseDiagramResult {
    std::vector<PhaseBoundary> boundaries;
    std::vector<std::string> omitted;  // per-(kind, omega) log of absent features
};

// Runs a scan per omega and applies the kind-specific detectors; boundaries
// may terminate where a feature disappears (logged, not fatal).
PhaseDiagramResult phase_diagram(const std::vector<double>& omega_list, Parity parity, Mode mode,
                                 const PhaseDiagramOptions& opt = {});

// Displacement fraction |x_peak|/g' of the main |psi_+| peak.
double main_peak_zeta(const TrialState& st, const QuadratureGrid& grid);

// Asymmetry of a sampled wavefunction about its main peak x_m:
// integral over t > 0 of [psi^2(x_m+t) - psi^2(x_m-t)] * exp(-t^2/2).
// Throws AmbiguousPeakError when the two tallest peaks are within 1%.
double asymmetry_Q(const std::vector<double>& psi, const QuadratureGrid& grid);

struct FitResult {
    PolaronShape shape;
    PolaronWeights weights;
    double residual = 0.0;       // L2 misfit integral
    double delta_alpha_N = 0.0;  // fitted polaron slope
    bool poor_fit = false;       // residual above 5% of the norm integral
};

// Least-squares two-packet decomposition of a sampled wavefunction: simplex
// over the 6 shape parameters with the weights solved exactly per step.
FitResult fit_polaron_to_ed(const std::vector<double>& psi, const QuadratureGrid& grid,
                            const ModelParams& params, Parity parity,
                            const std::optional<PolaronShape>& warm = std::nullopt,
                            std::uint64_t seed = 0, bool pin_slopes = false);

// psi_alpha(x_m - x) - psi_alpha(x_m + x) at the requested distances, where
// psi_alpha = psi - beta*phi_beta and x_m is the peak of psi_alpha.
std::vector<double> peak_residual_asymmetry(const FitResult& fit, const std::vector<double>& psi,
                                            const QuadratureGrid& grid, const ModelParams& params,
                                            const std::vector<double>& distances);

struct AccuracyQuad {
    double energy = 0.0;
    double photon = 0.0;
    double sigma_x = 0.0;
    double coupling_corr = 0.0;
};

struct AccuracyRow {
    double g = 0.0;
    AccuracyQuad ed, sym, asym;
    int cutoff = 0;
};

// Joint ED / symmetric / asymmetric observable table over a g list.
std::vector<AccuracyRow> accuracy_table(double omega, double Omega, Parity parity,
                                        const std::vector<double>& g_list,
                                        const OptimizeOptions& opt = {});

}  // namespace rabi
