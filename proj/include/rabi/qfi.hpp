#pragma once
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rabi/polaron.hpp"
#include "rabi/variational.hpp"

namespace rabi {

struct WindowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ten-way split of the trial-state QFI by parameter resource: packet centers
// (x), widths (xi), slopes (d), and superposition weights (r), plus the six
// cross terms.  total is computed from the assembled derivative function, so
// the component sum rule is a real consistency check, not an identity.
struct QfiBreakdown {
    double g = 0.0;
    double xx = 0.0, xixi = 0.0, dd = 0.0, rr = 0.0;
    double xxi = 0.0, xrho = 0.0, xd = 0.0, rhoxi = 0.0, rhod = 0.0, xid = 0.0;
    double total = 0.0;

    double component_sum() const {
        return xx + xixi + dd + rr + xxi + xrho + xd + rhoxi + rhod + xid;
    }
};

struct DerivRow {
    double g = 0.0;
    PolaronShape dshape;      // d(shape)/dg
    PolaronWeights dweights;  // d(alpha,beta)/dg
    bool valid = false;
    // Relative disagreement of the two stencil spacings feeding a Richardson
    // pass; its magnitude exposes sub-threshold branch hops that the scan's
    // 0.2-step jump flag cannot see.  0 for single-pass differencing.
    double consistency = 0.0;
};

struct ParamDerivatives {
    std::vector<DerivRow> rows;  // aligned with the source scan rows
};

// Central differences over the scan's g grid, optionally with a wider stencil
// (stride > 1 differences rows k-stride and k+stride).  Rows whose stencil
// touches a grid edge, a jump flag, or an unconverged neighbor are marked
// invalid.
ParamDerivatives param_derivatives(const ScanResult& scan, int stride = 1);

// Richardson extrapolation (4*half - full)/3 of two differencing passes over
// the same scan, one at half the stencil spacing of the other.
ParamDerivatives richardson(const ParamDerivatives& half, const ParamDerivatives& full);

inline TrialState make_state(const ModelParams& p, const VariationalResult& r) {
    return TrialState{r.shape, r.weights, p, r.parity};
}

QfiBreakdown qfi_decompose(const TrialState& st, const PolaronShape& dshape,
                           const PolaronWeights& dweights, const QuadratureGrid& grid);

// Row adapter over a scan and its differenced parameters.
QfiBreakdown qfi_decompose(const ScanResult& scan, const ParamDerivatives& derivs,
                           std::size_t row, const QuadratureGrid& grid);

// Independent whole-function oracle: finite-differences the sampled spin-up
// component of two neighboring optimized states.
double qfi_whole_fd(const TrialState& center, const TrialState& plus, const TrialState& minus,
                    double h, const QuadratureGrid& grid);

// Alternative reading of the slope-weight cross term that reuses the
// center-derivative kernel in place of the slope-derivative kernel; kept so
// tests can show it disagrees with the whole-function oracle.
double qfi_rhod_center_kernel(const TrialState& st, const PolaronShape& dshape,
                              const PolaronWeights& dweights, const QuadratureGrid& grid);

struct QfiPoint {
    VariationalResult center;
    QfiBreakdown breakdown;
    double total_oracle = 0.0;
    double h = 0.0;
};

// Full pipeline at one coupling: optimize at g, warm-started re-optimizations
// at g +- h, parameter central differences, decomposition, and the
// whole-function oracle on the same stencil.
QfiPoint qfi_variational_point(double omega, double Omega, double g, Parity parity, Mode mode,
                               double h = 1.5e-4, const OptimizeOptions& opt = {});

struct QfiPeak {
    double g_peak = 0.0;
    double f_peak = 0.0;
};

// Parabolic refinement of the maximum of a sampled curve; the three highest
// samples of a unimodal curve are the argmax and its two neighbors.
// Throws WindowError when the maximum sits on the window boundary.
QfiPeak find_qfi_peak(const std::vector<std::pair<double, double>>& curve);

}  // namespace rabi
