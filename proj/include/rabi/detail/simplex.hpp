#pragma once
#include <functional>
#include <vector>

namespace rabi::detail {

struct SimplexOptions {
    long max_evals = 200000;
    double tol = 1e-10;          // simplex-size stop while iterating
    int polish_rounds = 3;       // restarts at shrunken steps
    double polish_scale = 0.03;  // step multiplier per restart
    double stop_size = 1e-9;     // early-exit thresholds between rounds
    double stop_stall = 1e-12;
    double fatol = 1e-13;        // minimum f progress that resets patience
    int patience = 600;          // iterations without progress before a round yields
};

struct SimplexOutcome {
    std::vector<double> x;
    double f = 0.0;
    double final_size = 0.0;  // last simplex size
    double stall = 0.0;       // |f change| across the last restart
    long evals = 0;
};

// Derivative-free descent: one simplex run plus polish restarts from the
// incumbent at geometrically shrinking steps.  Deterministic.
SimplexOutcome minimize_simplex(const std::function<double(const double*)>& fn,
                                const std::vector<double>& x0, const std::vector<double>& steps,
                                const SimplexOptions& opt);

}  // namespace rabi::detail
