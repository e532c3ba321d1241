#include "rabi/variational.hpp"

#include <gsl/gsl_errno.h>

#include "rabi/detail/simplex.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace rabi {
namespace {

constexpr double kCoalesceTol = 1e-6;
constexpr double kPenalty = 1e6;

const std::array<std::pair<double, double>, 4> kShapeBounds = {{
    {-0.5, 2.0},  // zeta_a
    {-0.5, 2.0},  // zeta_b
    {0.05, 5.0},  // xi_a
    {0.05, 5.0},  // xi_b
}};

struct Solve22 {
    double lambda;
    double w0, w1;
};

// Generalized 2x2 eigenproblem M w = lambda S w via an S-orthonormal basis of
// the normalized packets' sum/difference directions.  Near packet coalescence
// the difference direction is discarded; the surviving direction still yields
// a valid Rayleigh quotient, so the result stays variational.
Solve22 solve22(const double M[3], const double S[3]) {
    const double s00 = S[0], s11 = S[2];
    if (!(s00 > 0.0) || !(s11 > 0.0) || !std::isfinite(S[1]))
        throw DegenerateInputError("overlap matrix not positive definite");
    const double n0 = std::sqrt(s00), n1 = std::sqrt(s11);
    double s = S[1] / (n0 * n1);
    double flip = 1.0;
    if (s < 0.0) {
        s = -s;
        flip = -1.0;
    }
    if (s >= 1.0) {
        if (s > 1.0 + 1e-10) throw DegenerateInputError("packet overlap exceeds 1");
        s = 1.0;
    }
    const double m00 = M[0] / (s00);
    const double m11 = M[2] / (s11);
    const double m01 = flip * M[1] / (n0 * n1);
    const double one_m = 1.0 - s, one_p = 1.0 + s;
    const double muu = (m00 + 2.0 * m01 + m11) / (2.0 * one_p);

    double y0, y1, lambda;
    if (one_m < kCoalesceTol) {
        lambda = muu;
        y0 = 1.0;
        y1 = 0.0;
    } else {
        const double mvv = (m00 - 2.0 * m01 + m11) / (2.0 * one_m);
        const double muv = (m00 - m11) / (2.0 * std::sqrt(one_m * one_p));
        const double tr = muu + mvv;
        const double disc = std::sqrt((muu - mvv) * (muu - mvv) + 4.0 * muv * muv);
        lambda = 0.5 * (tr - disc);
        // eigenvector from the numerically larger residual row
        const double r0 = muu - lambda, r1 = mvv - lambda;
        if (std::abs(r0) > std::abs(r1)) {
            y0 = -muv;
            y1 = r0;
        } else {
            y0 = r1;
            y1 = -muv;
        }
        const double ny = std::hypot(y0, y1);
        if (ny == 0.0) {
            y0 = 1.0;
            y1 = 0.0;
        } else {
            y0 /= ny;
            y1 /= ny;
        }
    }
    const double cu = y0 / std::sqrt(2.0 * one_p);
    const double cv = one_m < kCoalesceTol ? 0.0 : y1 / std::sqrt(2.0 * one_m);
    Solve22 out;
    out.lambda = lambda;
    out.w0 = (cu + cv) / n0;
    out.w1 = flip * (cu - cv) / n1;
    if (out.w0 < 0.0 || (out.w0 == 0.0 && out.w1 < 0.0)) {
        out.w0 = -out.w0;
        out.w1 = -out.w1;
    }
    return out;
}

}  // namespace

EnergySolution solve_energy(const PolaronShape& sh, const ModelParams& p, Parity parity) {
    const double P = parity_sign(parity);
    const double haa = hplus_element(Packet::Polaron, Packet::Polaron, sh, p);
    const double hbb = hplus_element(Packet::Antipolaron, Packet::Antipolaron, sh, p);
    const double hab = hplus_element(Packet::Polaron, Packet::Antipolaron, sh, p);
    const double faa = overlap_flip(Packet::Polaron, Packet::Polaron, sh, p);
    const double fbb = overlap_flip(Packet::Antipolaron, Packet::Antipolaron, sh, p);
    const double fab = overlap_flip(Packet::Polaron, Packet::Antipolaron, sh, p);
    const double tun = 0.5 * p.Omega * P;
    const double M[3] = {haa + tun * faa, hab + tun * fab, hbb + tun * fbb};
    const double S[3] = {overlap_same(Packet::Polaron, Packet::Polaron, sh, p),
                         overlap_same(Packet::Polaron, Packet::Antipolaron, sh, p),
                         overlap_same(Packet::Antipolaron, Packet::Antipolaron, sh, p)};
    for (int i = 0; i < 3; ++i)
        if (!std::isfinite(M[i]) || !std::isfinite(S[i]))
            throw DegenerateInputError("non-finite matrix element");
    const Solve22 sol = solve22(M, S);
    EnergySolution out;
    out.energy = sol.lambda + epsilon0(p);
    out.weights = {sol.w0, sol.w1};
    return out;
}

namespace {

struct ObjectiveCtx {
    ModelParams params;
    Parity parity;
    Mode mode;
    double box_div;
    long evals = 0;
};

PolaronShape unpack(const double* v, const ObjectiveCtx& ctx) {
    PolaronShape s;
    s.zeta_a = v[0];
    s.zeta_b = v[1];
    s.xi_a = v[2];
    s.xi_b = v[3];
    if (ctx.mode == Mode::Asymmetric) {
        s.delta_a = v[4];
        s.delta_b = v[5];
    }
    return s;
}

double objective(const double* v, ObjectiveCtx& ctx) {
    ++ctx.evals;
    const PolaronShape s = unpack(v, ctx);
    const double shape_vals[4] = {s.zeta_a, s.zeta_b, s.xi_a, s.xi_b};
    double pen = 0.0;
    for (int i = 0; i < 4; ++i) {
        if (shape_vals[i] < kShapeBounds[i].first)
            pen += kShapeBounds[i].first - shape_vals[i];
        else if (shape_vals[i] > kShapeBounds[i].second)
            pen += shape_vals[i] - kShapeBounds[i].second;
    }
    if (pen > 0.0) return kPenalty + pen;
    const double boxa = delta_box_limit(s.xi_a, ctx.box_div);
    const double boxb = delta_box_limit(s.xi_b, ctx.box_div);
    if (std::abs(s.delta_a) > boxa) pen += std::abs(s.delta_a) - boxa;
    if (std::abs(s.delta_b) > boxb) pen += std::abs(s.delta_b) - boxb;
    if (pen > 0.0) return kPenalty + pen;
    try {
        const double e = solve_energy(s, ctx.params, ctx.parity).energy;
        return std::isfinite(e) ? e : kPenalty;
    } catch (const DegenerateInputError&) {
        return kPenalty;
    }
}

struct NmOutcome {
    PolaronShape shape;
    double energy = 0.0;
    double final_size = 0.0;
    double stall = 0.0;
};

// One simplex descent with polish restarts at shrinking step sizes.
NmOutcome run_simplex(const PolaronShape& start, ObjectiveCtx& ctx, const OptimizeOptions& opt) {
    const std::size_t dim = ctx.mode == Mode::Asymmetric ? 6 : 4;
    std::vector<double> x0 = {start.zeta_a, start.zeta_b, start.xi_a, start.xi_b};
    std::vector<double> steps = {0.15, 0.15, 0.20, 0.20};
    if (dim == 6) {
        x0.push_back(start.delta_a);
        x0.push_back(start.delta_b);
        steps.push_back(0.08);
        steps.push_back(0.08);
    }
    detail::SimplexOptions sopt;
    sopt.max_evals = opt.max_evals;
    sopt.tol = opt.simplex_tol;
    sopt.polish_rounds = opt.polish_rounds;
    sopt.stop_size = opt.converged_size;
    sopt.stop_stall = opt.converged_stall;
    const detail::SimplexOutcome out = detail::minimize_simplex(
        [&ctx](const double* v) { return objective(v, ctx); }, x0, steps, sopt);
    NmOutcome best;
    best.shape = unpack(out.x.data(), ctx);
    best.energy = out.f;
    best.final_size = out.final_size;
    best.stall = out.stall;
    return best;
}

void sanitize(PolaronShape& s, const ModelParams& p) {
    const double gp = gprime(p);
    const double sep = std::abs((-s.zeta_a * gp) - (s.zeta_b * gp));
    if (sep < 1e-7 && std::abs(s.xi_a - s.xi_b) < 1e-7 &&
        std::abs(s.delta_a - s.delta_b) < 1e-7)
        s.zeta_b += 1e-5;  // split collinear packets
    s.xi_a = std::clamp(s.xi_a, kShapeBounds[2].first, kShapeBounds[2].second);
    s.xi_b = std::clamp(s.xi_b, kShapeBounds[3].first, kShapeBounds[3].second);
    s.zeta_a = std::clamp(s.zeta_a, kShapeBounds[0].first, kShapeBounds[0].second);
    s.zeta_b = std::clamp(s.zeta_b, kShapeBounds[1].first, kShapeBounds[1].second);
}

bool shape_less(const PolaronShape& a, const PolaronShape& b) {
    const double pa[6] = {a.zeta_a, a.zeta_b, a.xi_a, a.xi_b, a.delta_a, a.delta_b};
    const double pb[6] = {b.zeta_a, b.zeta_b, b.xi_a, b.xi_b, b.delta_a, b.delta_b};
    for (int i = 0; i < 6; ++i) {
        if (pa[i] < pb[i]) return true;
        if (pa[i] > pb[i]) return false;
    }
    return false;
}

std::vector<PolaronShape> start_list(const ModelParams& p, Mode mode,
                                     const std::vector<PolaronShape>& warm,
                                     const OptimizeOptions& opt,
                                     const std::optional<PolaronShape>& sym_stage) {
    std::vector<PolaronShape> starts;
    for (const auto& w : warm) starts.push_back(w);
    if (sym_stage) {
        PolaronShape s = *sym_stage;
        s.delta_a = s.delta_b = 0.0;
        starts.push_back(s);  // exact symmetric optimum: keeps mode nesting
        if (mode == Mode::Asymmetric) {
            PolaronShape sp = s;
            sp.delta_a = 0.1;
            sp.delta_b = -0.1;
            starts.push_back(sp);
            sp.delta_a = -0.1;
            sp.delta_b = 0.1;
            starts.push_back(sp);
        }
    }
    PolaronShape unit;  // zeta near the adiabatic displacement
    starts.push_back(unit);
    PolaronShape zero;
    zero.zeta_a = zero.zeta_b = 0.1;
    starts.push_back(zero);
    PolaronShape mixed;
    mixed.zeta_b = 0.4;
    mixed.xi_b = 0.8;
    starts.push_back(mixed);
    if (mode == Mode::Asymmetric) {
        PolaronShape d1;
        d1.delta_a = 0.1;
        d1.delta_b = -0.1;
        starts.push_back(d1);
        PolaronShape d2;
        d2.delta_a = -0.1;
        d2.delta_b = 0.1;
        starts.push_back(d2);
    }
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> uz(-0.2, 1.4), ux(0.3, 1.8), ud(-0.25, 0.25);
    while (starts.size() < static_cast<std::size_t>(opt.starts)) {
        PolaronShape s;
        s.zeta_a = uz(rng);
        s.zeta_b = uz(rng);
        s.xi_a = ux(rng);
        s.xi_b = ux(rng);
        if (mode == Mode::Asymmetric) {
            s.delta_a = ud(rng);
            s.delta_b = ud(rng);
        }
        starts.push_back(s);
    }
    for (auto& s : starts) sanitize(s, p);
    return starts;
}

VariationalResult optimize_multi(const ModelParams& p, Parity parity, Mode mode,
                                 const std::vector<PolaronShape>& warm,
                                 const OptimizeOptions& opt, bool run_sym_stage) {
    std::optional<PolaronShape> sym_shape;
    if (mode == Mode::Asymmetric && run_sym_stage) {
        const VariationalResult sym = optimize_multi(p, parity, Mode::Symmetric, {}, opt, false);
        sym_shape = sym.shape;
    }
    ObjectiveCtx ctx{p, parity, mode, opt.delta_box_div};
    const auto starts = start_list(p, mode, warm, opt, sym_shape);

    NmOutcome best;
    best.energy = kPenalty;
    int used = 0;
    for (const auto& s : starts) {
        const NmOutcome out = run_simplex(s, ctx, opt);
        ++used;
        if (out.energy < best.energy - 1e-14 ||
            (std::abs(out.energy - best.energy) <= 1e-14 && shape_less(out.shape, best.shape)))
            best = out;
    }
    VariationalResult res;
    res.shape = best.shape;
    if (mode == Mode::Symmetric) {
        res.shape.delta_a = 0.0;
        res.shape.delta_b = 0.0;
    }
    const EnergySolution es = solve_energy(res.shape, p, parity);
    res.weights = es.weights;
    res.energy = es.energy;
    res.parity = parity;
    res.mode = mode;
    res.converged = best.final_size < opt.converged_size && best.stall < opt.converged_stall;
    res.n_evals = ctx.evals;
    res.restarts_used = used;
    return res;
}

}  // namespace

VariationalResult optimize(const ModelParams& p, Parity parity, Mode mode,
                           const std::optional<PolaronShape>& warm, const OptimizeOptions& opt) {
    gsl_set_error_handler_off();
    std::vector<PolaronShape> seeds;
    if (warm) seeds.push_back(*warm);
    return optimize_multi(p, parity, mode, seeds, opt, true);
}

namespace {

bool row_jump(const PolaronShape& a, const PolaronShape& b) {
    const double pa[6] = {a.zeta_a, a.zeta_b, a.xi_a, a.xi_b, a.delta_a, a.delta_b};
    const double pb[6] = {b.zeta_a, b.zeta_b, b.xi_a, b.xi_b, b.delta_a, b.delta_b};
    for (int i = 0; i < 6; ++i)
        if (std::abs(pb[i] - pa[i]) / std::max(1.0, std::abs(pa[i])) > 0.2) return true;
    return false;
}

std::vector<VariationalResult> sweep_direction(double omega, double Omega,
                                               const std::vector<double>& gs, Parity parity,
                                               Mode mode, const OptimizeOptions& opt,
                                               const std::vector<PolaronShape>* sym_rows,
                                               bool reversed) {
    gsl_set_error_handler_off();
    std::vector<VariationalResult> out(gs.size());
    std::optional<PolaronShape> prev;
    for (std::size_t k = 0; k < gs.size(); ++k) {
        const std::size_t idx = reversed ? gs.size() - 1 - k : k;
        ModelParams p{omega, Omega, gs[idx]};
        std::vector<PolaronShape> seeds;
        if (prev) seeds.push_back(*prev);
        if (sym_rows) {
            PolaronShape s = (*sym_rows)[idx];
            s.delta_a = s.delta_b = 0.0;
            seeds.push_back(s);
        }
        OptimizeOptions scan_opt = opt;
        scan_opt.starts = prev ? std::max(4, opt.starts / 2) : opt.starts;
        out[idx] = optimize_multi(p, parity, mode, seeds, scan_opt,
                                  /*run_sym_stage=*/mode == Mode::Asymmetric && !sym_rows);
        prev = out[idx].shape;
    }
    return out;
}

}  // namespace

ScanResult scan_g(double omega, double Omega, const std::vector<double>& g_list, Parity parity,
                  Mode mode, const OptimizeOptions& opt) {
    ScanResult sc;
    sc.omega = omega;
    sc.Omega = Omega;
    sc.parity = parity;
    sc.mode = mode;

    std::vector<PolaronShape> sym_rows;
    const std::vector<PolaronShape>* sym_ptr = nullptr;
    if (mode == Mode::Asymmetric) {
        const ScanResult sym_scan = scan_g(omega, Omega, g_list, parity, Mode::Symmetric, opt);
        sym_rows.reserve(sym_scan.rows.size());
        for (const auto& r : sym_scan.rows) sym_rows.push_back(r.result.shape);
        sym_ptr = &sym_rows;
    }

    const auto fwd = sweep_direction(omega, Omega, g_list, parity, mode, opt, sym_ptr, false);
    const auto bwd = sweep_direction(omega, Omega, g_list, parity, mode, opt, sym_ptr, true);

    sc.rows.resize(g_list.size());
    for (std::size_t k = 0; k < g_list.size(); ++k) {
        ScanRow& row = sc.rows[k];
        row.g = g_list[k];
        const bool take_fwd = fwd[k].energy <= bwd[k].energy;
        row.result = take_fwd ? fwd[k] : bwd[k];
        const double other = take_fwd ? bwd[k].energy : fwd[k].energy;
        if (other - row.result.energy > 1e-10) {
            row.discarded_energy = other;
            row.has_discarded = true;
        }
    }
    for (std::size_t k = 1; k < sc.rows.size(); ++k)
        sc.rows[k].jump = row_jump(sc.rows[k - 1].result.shape, sc.rows[k].result.shape);
    return sc;
}

}  // namespace rabi
