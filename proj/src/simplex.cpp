#include "rabi/detail/simplex.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>

namespace rabi::detail {
namespace {

struct CallCtx {
    const std::function<double(const double*)>* fn;
    long evals;
};

double trampoline(const gsl_vector* v, void* raw) {
    CallCtx& ctx = *static_cast<CallCtx*>(raw);
    ++ctx.evals;
    double buf[16];
    for (std::size_t i = 0; i < v->size && i < 16; ++i) buf[i] = gsl_vector_get(v, i);
    return (*ctx.fn)(buf);
}

}  // namespace

SimplexOutcome minimize_simplex(const std::function<double(const double*)>& fn,
                                const std::vector<double>& x0, const std::vector<double>& steps,
                                const SimplexOptions& opt) {
    const std::size_t dim = x0.size();
    CallCtx ctx{&fn, 0};
    gsl_multimin_function func;
    func.n = dim;
    func.f = &trampoline;
    func.params = &ctx;

    gsl_vector* x = gsl_vector_alloc(dim);
    gsl_vector* st = gsl_vector_alloc(dim);
    gsl_multimin_fminimizer* fmin =
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);

    SimplexOutcome best;
    best.x = x0;
    best.f = fn(x0.data());
    ++ctx.evals;

    // Exploration rounds restart at geometrically shrunken steps and may escape
    // shallow traps; collapse rounds then contract the simplex around the
    // incumbent until the diameter certifies the minimum.
    const int max_rounds = opt.polish_rounds + 50;
    double scale = 1.0;
    double prev_round = best.f;
    double last_size = 0.0;
    for (int round = 0; round <= max_rounds; ++round) {
        const bool collapse = round > opt.polish_rounds;
        for (std::size_t i = 0; i < dim; ++i) {
            gsl_vector_set(x, i, best.x[i]);
            const double step = collapse ? std::max(last_size / 3.0, opt.tol * 0.03)
                                         : steps[i] * scale;
            gsl_vector_set(st, i, step);
        }
        if (gsl_multimin_fminimizer_set(fmin, &func, x, st) != GSL_SUCCESS) break;
        double size = gsl_multimin_fminimizer_size(fmin);
        double round_best = fmin->fval;
        const int patience = collapse ? opt.patience / 4 : opt.patience;
        int idle = 0;
        while (ctx.evals < opt.max_evals) {
            if (gsl_multimin_fminimizer_iterate(fmin)) break;
            size = gsl_multimin_fminimizer_size(fmin);
            if (size < opt.tol) break;
            if (fmin->fval < round_best - opt.fatol) {
                round_best = fmin->fval;
                idle = 0;
            } else if (++idle >= patience) {
                break;  // flat-valley wander: yield to the next restart
            }
        }
        if (fmin->fval < best.f) {
            best.f = fmin->fval;
            for (std::size_t i = 0; i < dim; ++i) best.x[i] = gsl_vector_get(fmin->x, i);
        }
        best.final_size = size;
        best.stall = std::abs(prev_round - best.f);
        if (round > 0 && best.stall < opt.stop_stall && size < opt.stop_size) break;
        prev_round = best.f;
        if (!collapse) scale *= opt.polish_scale;
        last_size = size;
        if (ctx.evals >= opt.max_evals) break;
    }
    best.evals = ctx.evals;
    gsl_multimin_fminimizer_free(fmin);
    gsl_vector_free(st);
    gsl_vector_free(x);
    return best;
}

}  // namespace rabi::detail
