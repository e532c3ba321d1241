#include "rabi/analysis.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_interp.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rabi/detail/simplex.hpp"

namespace rabi {

const char* boundary_kind_name(BoundaryKind kind) {
    switch (kind) {
        case BoundaryKind::MinXiBeta: return "min_xi_beta";
        case BoundaryKind::MaxDeltaAlpha: return "max_delta_alpha";
        case BoundaryKind::MinDeltaBeta: return "min_delta_beta";
        case BoundaryKind::ImbalanceZero: return "imbalance_zero";
        case BoundaryKind::ZetaAlphaOne: return "zeta_alpha_one";
        case BoundaryKind::WeightEqual: return "weight_equal";
        case BoundaryKind::DeltaAlphaZero: return "delta_alpha_zero";
        case BoundaryKind::MainPeakZetaMin: return "main_peak_zeta_min";
        case BoundaryKind::MainPeakZetaOne: return "main_peak_zeta_one";
    }
    return "unknown";
}

std::vector<double> detect_sign_change(const std::vector<std::pair<double, double>>& series,
                                       const std::function<double(double)>& eval, int rounds) {
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        double lo = series[i].first, hi = series[i + 1].first;
        double ylo = series[i].second, yhi = series[i + 1].second;
        if (!std::isfinite(ylo) || !std::isfinite(yhi)) continue;
        if (!(ylo * yhi < 0.0)) continue;
        if (eval) {
            for (int r = 0; r < rounds; ++r) {
                const double mid = 0.5 * (lo + hi);
                const double ym = eval(mid);
                if (!std::isfinite(ym)) break;
                if (ym * ylo <= 0.0) {
                    hi = mid;
                    yhi = ym;
                } else {
                    lo = mid;
                    ylo = ym;
                }
            }
        }
        roots.push_back(lo - ylo * (hi - lo) / (yhi - ylo));
    }
    return roots;
}

std::vector<Extremum> detect_extremum(const std::vector<std::pair<double, double>>& series) {
    std::vector<Extremum> out;
    for (std::size_t i = 1; i + 1 < series.size(); ++i) {
        const double x1 = series[i - 1].first, y1 = series[i - 1].second;
        const double x2 = series[i].first, y2 = series[i].second;
        const double x3 = series[i + 1].first, y3 = series[i + 1].second;
        const double d1 = y2 - y1, d2 = y3 - y2;
        if (!(d1 * d2 < 0.0)) continue;
        Extremum e;
        e.maximum = d1 > 0.0;
        const double num = (x2 - x1) * (x2 - x1) * (y2 - y3) - (x2 - x3) * (x2 - x3) * (y2 - y1);
        const double den = (x2 - x1) * (y2 - y3) - (x2 - x3) * (y2 - y1);
        e.g = std::abs(den) > 1e-300 ? x2 - 0.5 * num / den : x2;
        const double a = ((y1 - y2) / (x1 - x2) - (y2 - y3) / (x2 - x3)) / (x1 - x3);
        const double b = (y1 - y2) / (x1 - x2) - a * (x1 + x2);
        const double c = y2 - a * x2 * x2 - b * x2;
        e.value = a * e.g * e.g + b * e.g + c;
        out.push_back(e);
    }
    return out;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    if (n < 1 || !(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("bad log grid");
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) v[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
    v.front() = lo;
    v.back() = hi;
    return v;
}

std::vector<double> lin_spaced(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("bad linear grid");
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

namespace {

// parabola vertex through three (x, y) samples; falls back to the middle
void parabola_vertex(double x1, double y1, double x2, double y2, double x3, double y3,
                     double& xv, double& yv) {
    const double num = (x2 - x1) * (x2 - x1) * (y2 - y3) - (x2 - x3) * (x2 - x3) * (y2 - y1);
    const double den = (x2 - x1) * (y2 - y3) - (x2 - x3) * (y2 - y1);
    if (std::abs(den) < 1e-300) {
        xv = x2;
        yv = y2;
        return;
    }
    xv = x2 - 0.5 * num / den;
    const double a = ((y1 - y2) / (x1 - x2) - (y2 - y3) / (x2 - x3)) / (x1 - x3);
    const double b = (y1 - y2) / (x1 - x2) - a * (x1 + x2);
    const double c = y2 - a * x2 * x2 - b * x2;
    yv = a * xv * xv + b * xv + c;
}

double refined_abs_peak(const std::vector<double>& y2vals, const QuadratureGrid& grid,
                        std::size_t i0) {
    if (i0 == 0 || i0 + 1 >= grid.size()) return grid.nodes[i0];
    double xv, yv;
    parabola_vertex(grid.nodes[i0 - 1], y2vals[i0 - 1], grid.nodes[i0], y2vals[i0],
                    grid.nodes[i0 + 1], y2vals[i0 + 1], xv, yv);
    return xv;
}

}  // namespace

double main_peak_zeta(const TrialState& st, const QuadratureGrid& grid) {
    const double gp = gprime(st.params);
    if (gp < 1e-12) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> y2(grid.size());
    std::size_t i0 = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = psi_plus(st, grid.nodes[i]);
        y2[i] = v * v;
        if (y2[i] > y2[i0]) i0 = i;
    }
    const double xp = refined_abs_peak(y2, grid, i0);
    return std::abs(xp) / gp;
}

namespace {

double series_value(BoundaryKind kind, const VariationalResult& r, const ModelParams& p,
                    const QuadratureGrid& grid) {
    const PolaronShape& s = r.shape;
    switch (kind) {
        case BoundaryKind::MinXiBeta: return s.xi_b;
        case BoundaryKind::MaxDeltaAlpha: return s.delta_a;
        case BoundaryKind::MinDeltaBeta: return s.delta_b;
        case BoundaryKind::ImbalanceZero: return s.delta_a + s.delta_b;
        case BoundaryKind::ZetaAlphaOne: return s.zeta_a - 1.0;
        case BoundaryKind::WeightEqual: {
            const double saa = overlap_same(Packet::Polaron, Packet::Polaron, s, p);
            const double sbb = overlap_same(Packet::Antipolaron, Packet::Antipolaron, s, p);
            return r.weights.alpha * r.weights.alpha * saa -
                   r.weights.beta * r.weights.beta * sbb;
        }
        case BoundaryKind::DeltaAlphaZero: return s.delta_a;
        case BoundaryKind::MainPeakZetaMin:
        case BoundaryKind::MainPeakZetaOne: {
            TrialState st{s, r.weights, p, r.parity};
            const double z = main_peak_zeta(st, grid);
            return kind == BoundaryKind::MainPeakZetaOne ? z - 1.0 : z;
        }
    }
    return 0.0;
}

constexpr BoundaryKind kRootKinds[] = {BoundaryKind::ImbalanceZero, BoundaryKind::ZetaAlphaOne,
                                       BoundaryKind::WeightEqual, BoundaryKind::DeltaAlphaZero,
                                       BoundaryKind::MainPeakZetaOne};
constexpr BoundaryKind kExtremumKinds[] = {BoundaryKind::MinXiBeta, BoundaryKind::MaxDeltaAlpha,
                                           BoundaryKind::MinDeltaBeta,
                                           BoundaryKind::MainPeakZetaMin};

}  // namespace

PhaseDiagramResult phase_diagram(const std::vector<double>& omega_list, Parity parity, Mode mode,
                                 const PhaseDiagramOptions& opt) {
    PhaseDiagramResult out;
    for (BoundaryKind k : kRootKinds) out.boundaries.push_back({k, {}});
    for (BoundaryKind k : kExtremumKinds) out.boundaries.push_back({k, {}});
    auto boundary = [&out](BoundaryKind k) -> PhaseBoundary& {
        for (auto& b : out.boundaries)
            if (b.kind == k) return b;
        throw std::logic_error("missing boundary bucket");
    };

    for (double omega : omega_list) {
        const double gc_val = gc(omega);
        const auto g_list = lin_spaced(opt.g_lo_frac * gc_val, opt.g_hi_frac * gc_val, opt.n_g);
        const ScanResult scan = scan_g(omega, 1.0, g_list, parity, mode, opt.opt);
        const double gp_max = gprime(ModelParams{omega, 1.0, g_list.back()});
        const QuadratureGrid grid = default_grid(gp_max);

        OptimizeOptions ropt = opt.opt;
        ropt.starts = std::max(4, opt.opt.starts / 2);
        auto reopt_value = [&](BoundaryKind kind, double g_val) {
            // warm from the nearest scan row
            std::size_t near = 0;
            for (std::size_t i = 1; i < scan.rows.size(); ++i)
                if (std::abs(scan.rows[i].g - g_val) < std::abs(scan.rows[near].g - g_val))
                    near = i;
            ModelParams p{omega, 1.0, g_val};
            const VariationalResult r =
                optimize(p, parity, mode, scan.rows[near].result.shape, ropt);
            return series_value(kind, r, p, grid);
        };

        for (BoundaryKind kind : kRootKinds) {
            if (mode == Mode::Symmetric &&
                (kind == BoundaryKind::ImbalanceZero || kind == BoundaryKind::DeltaAlphaZero))
                continue;  // slope series pinned at zero
            std::vector<std::pair<double, double>> series;
            for (const auto& row : scan.rows) {
                ModelParams p{omega, 1.0, row.g};
                series.emplace_back(row.g, series_value(kind, row.result, p, grid));
            }
            const auto roots = detect_sign_change(
                series, [&](double g_val) { return reopt_value(kind, g_val); }, 3);
            if (roots.empty())
                out.omitted.push_back(std::string(boundary_kind_name(kind)) + " omega=" +
                                      std::to_string(omega) + ": no sign change in window");
            for (double r : roots) boundary(kind).points.emplace_back(omega, r);
        }

        for (BoundaryKind kind : kExtremumKinds) {
            if (mode == Mode::Symmetric &&
                (kind == BoundaryKind::MaxDeltaAlpha || kind == BoundaryKind::MinDeltaBeta))
                continue;
            std::vector<std::pair<double, double>> series;
            for (const auto& row : scan.rows) {
                ModelParams p{omega, 1.0, row.g};
                series.emplace_back(row.g, series_value(kind, row.result, p, grid));
            }
            auto exts = detect_extremum(series);
            const bool want_max = kind == BoundaryKind::MaxDeltaAlpha;
            exts.erase(std::remove_if(exts.begin(), exts.end(),
                                      [&](const Extremum& e) { return e.maximum != want_max; }),
                       exts.end());
            if (exts.empty()) {
                out.omitted.push_back(std::string(boundary_kind_name(kind)) + " omega=" +
                                      std::to_string(omega) + ": no interior extremum");
                continue;
            }
            const auto pick = std::min_element(
                exts.begin(), exts.end(), [&](const Extremum& a, const Extremum& b) {
                    return want_max ? a.value > b.value : a.value < b.value;
                });
            boundary(kind).points.emplace_back(omega, pick->g);
        }
    }
    for (auto& b : out.boundaries)
        std::stable_sort(b.points.begin(), b.points.end(),
                         [](const auto& a, const auto& c) { return a.first < c.first; });
    return out;
}

namespace {

struct Spline {
    gsl_interp_accel* acc;
    gsl_spline* sp;
    double lo, hi;

    Spline(const std::vector<double>& x, const std::vector<double>& y) {
        acc = gsl_interp_accel_alloc();
        sp = gsl_spline_alloc(gsl_interp_cspline, x.size());
        gsl_spline_init(sp, x.data(), y.data(), x.size());
        lo = x.front();
        hi = x.back();
    }
    ~Spline() {
        gsl_spline_free(sp);
        gsl_interp_accel_free(acc);
    }
    double operator()(double x) const {
        if (x < lo) x = lo;
        if (x > hi) x = hi;
        return gsl_spline_eval(sp, x, acc);
    }
};

}  // namespace

double asymmetry_Q(const std::vector<double>& psi, const QuadratureGrid& grid) {
    if (psi.size() != grid.size() || psi.size() < 5)
        throw std::invalid_argument("sampled wavefunction does not match grid");
    const std::size_t n = psi.size();
    std::vector<double> y2(n);
    std::size_t i0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        y2[i] = psi[i] * psi[i];
        if (y2[i] > y2[i0]) i0 = i;
    }
    if (i0 == 0 || i0 + 1 >= n)
        throw AmbiguousPeakError("main peak unresolved at the grid boundary");

    // two tallest interior local maxima must be separated by more than 1%
    double h1 = 0.0, h2 = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(y2[i] >= y2[i - 1] && y2[i] >= y2[i + 1])) continue;
        const double h = std::sqrt(y2[i]);
        if (h > h1) {
            h2 = h1;
            h1 = h;
        } else if (h > h2) {
            h2 = h;
        }
    }
    if (h1 > 0.0 && h2 > 0.99 * h1)
        throw AmbiguousPeakError("two main peaks within 1% in height");

    const double xm = refined_abs_peak(y2, grid, i0);
    const Spline s(grid.nodes, psi);
    const double T = std::min(8.0, grid.half_width - std::abs(xm));
    if (!(T > 0.0)) throw AmbiguousPeakError("main peak too close to the grid boundary");

    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(160);
    double q = 0.0;
    for (std::size_t k = 0; k < 160; ++k) {
        double tk, wk;
        gsl_integration_glfixed_point(0.0, T, k, &tk, &wk, t);
        const double fp = s(xm + tk), fm = s(xm - tk);
        q += wk * std::exp(-0.5 * tk * tk) * (fp * fp - fm * fm);
    }
    gsl_integration_glfixed_table_free(t);
    return q;
}

namespace {

struct FitEval {
    const std::vector<double>* psi;
    const QuadratureGrid* grid;
    ModelParams params;
    double norm_psi;
    bool pin_slopes;

    // residual of the best linear weight combination for a given shape
    double operator()(const double* v, PolaronWeights* w_out = nullptr) const {
        PolaronShape s;
        s.zeta_a = v[0];
        s.zeta_b = v[1];
        s.xi_a = v[2];
        s.xi_b = v[3];
        if (!pin_slopes) {
            s.delta_a = v[4];
            s.delta_b = v[5];
        }
        const double big = 10.0 * (1.0 + norm_psi);
        double pen = 0.0;
        auto box = [&pen](double val, double lo, double hi) {
            if (val < lo) pen += lo - val;
            if (val > hi) pen += val - hi;
        };
        box(s.zeta_a, -0.5, 2.0);
        box(s.zeta_b, -0.5, 2.0);
        box(s.xi_a, 0.05, 5.0);
        box(s.xi_b, 0.05, 5.0);
        if (pen > 0.0) return big + pen;
        const double ba = delta_box_limit(s.xi_a, 2.0);
        const double bb = delta_box_limit(s.xi_b, 2.0);
        if (std::abs(s.delta_a) > ba) pen += std::abs(s.delta_a) - ba;
        if (std::abs(s.delta_b) > bb) pen += std::abs(s.delta_b) - bb;
        if (pen > 0.0) return big + pen;

        const std::size_t n = grid->size();
        double saa = 0.0, sab = 0.0, sbb = 0.0, ra = 0.0, rb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid->nodes[i];
            const double w = grid->weights[i];
            const double fa = eval_packet(Packet::Polaron, s, params, x);
            const double fb = eval_packet(Packet::Antipolaron, s, params, x);
            saa += w * fa * fa;
            sab += w * fa * fb;
            sbb += w * fb * fb;
            ra += w * fa * (*psi)[i];
            rb += w * fb * (*psi)[i];
        }
        double alpha, beta;
        const double det = saa * sbb - sab * sab;
        if (!(det > 1e-13 * saa * sbb) || !std::isfinite(det)) {
            alpha = saa > 0.0 ? ra / saa : 0.0;  // coalesced packets: single-packet fit
            beta = 0.0;
        } else {
            alpha = (sbb * ra - sab * rb) / det;
            beta = (saa * rb - sab * ra) / det;
        }
        if (w_out) *w_out = {alpha, beta};
        const double resid = norm_psi - (alpha * ra + beta * rb);
        return std::max(resid, 0.0);
    }
};

}  // namespace

FitResult fit_polaron_to_ed(const std::vector<double>& psi, const QuadratureGrid& grid,
                            const ModelParams& params, Parity parity,
                            const std::optional<PolaronShape>& warm, std::uint64_t seed,
                            bool pin_slopes) {
    (void)parity;  // the fit acts on the spin-up component only
    if (psi.size() != grid.size()) throw std::invalid_argument("samples do not match grid");
    FitEval ev;
    ev.psi = &psi;
    ev.grid = &grid;
    ev.params = params;
    ev.norm_psi = inner(psi, psi, grid);
    ev.pin_slopes = pin_slopes;

    const std::size_t dim = pin_slopes ? 4 : 6;
    std::vector<std::vector<double>> starts;
    auto push_shape = [&](const PolaronShape& s) {
        std::vector<double> v = {s.zeta_a, s.zeta_b, s.xi_a, s.xi_b};
        if (!pin_slopes) {
            v.push_back(s.delta_a);
            v.push_back(s.delta_b);
        }
        starts.push_back(std::move(v));
    };
    if (warm) push_shape(*warm);
    PolaronShape base;
    push_shape(base);
    PolaronShape tilted;
    tilted.delta_a = 0.15;
    tilted.delta_b = -0.15;
    push_shape(tilted);
    PolaronShape tilted2;
    tilted2.delta_a = -0.15;
    tilted2.delta_b = 0.15;
    push_shape(tilted2);
    std::mt19937_64 rng(seed ^ 0x2545f4914f6cdd1dull);
    std::uniform_real_distribution<double> uz(0.0, 1.3), ux(0.4, 1.6), ud(-0.2, 0.2);
    while (starts.size() < 8) {
        PolaronShape s;
        s.zeta_a = uz(rng);
        s.zeta_b = uz(rng);
        s.xi_a = ux(rng);
        s.xi_b = ux(rng);
        if (!pin_slopes) {
            s.delta_a = ud(rng);
            s.delta_b = ud(rng);
        }
        push_shape(s);
    }

    std::vector<double> steps = {0.1, 0.1, 0.15, 0.15};
    if (!pin_slopes) {
        steps.push_back(0.05);
        steps.push_back(0.05);
    }
    detail::SimplexOptions sopt;
    sopt.max_evals = 120000;
    sopt.tol = 1e-12;
    sopt.polish_rounds = 4;
    sopt.polish_scale = 0.05;
    sopt.stop_size = 1e-11;
    sopt.stop_stall = 1e-16;

    std::vector<double> best_x;
    double best_f = std::numeric_limits<double>::infinity();
    for (const auto& x0 : starts) {
        const auto out = detail::minimize_simplex(
            [&ev](const double* v) { return ev(v); }, x0, steps, sopt);
        if (out.f < best_f) {
            best_f = out.f;
            best_x = out.x;
        }
    }

    FitResult fr;
    PolaronWeights w;
    fr.residual = ev(best_x.data(), &w);
    fr.weights = w;
    fr.shape.zeta_a = best_x[0];
    fr.shape.zeta_b = best_x[1];
    fr.shape.xi_a = best_x[2];
    fr.shape.xi_b = best_x[3];
    if (dim == 6) {
        fr.shape.delta_a = best_x[4];
        fr.shape.delta_b = best_x[5];
    }
    fr.delta_alpha_N = fr.shape.delta_a;
    fr.poor_fit = fr.residual > 0.05 * ev.norm_psi;
    return fr;
}

std::vector<double> peak_residual_asymmetry(const FitResult& fit, const std::vector<double>& psi,
                                            const QuadratureGrid& grid, const ModelParams& params,
                                            const std::vector<double>& distances) {
    if (psi.size() != grid.size()) throw std::invalid_argument("samples do not match grid");
    const std::size_t n = psi.size();
    std::vector<double> iso(n), y2(n);
    std::size_t i0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        iso[i] = psi[i] -
                 fit.weights.beta * eval_packet(Packet::Antipolaron, fit.shape, params, grid.nodes[i]);
        y2[i] = iso[i] * iso[i];
        if (y2[i] > y2[i0]) i0 = i;
    }
    const double xm = refined_abs_peak(y2, grid, i0);
    const Spline s(grid.nodes, iso);
    std::vector<double> out(distances.size());
    for (std::size_t k = 0; k < distances.size(); ++k)
        out[k] = s(xm - distances[k]) - s(xm + distances[k]);
    return out;
}

std::vector<AccuracyRow> accuracy_table(double omega, double Omega, Parity parity,
                                        const std::vector<double>& g_list,
                                        const OptimizeOptions& opt) {
    const ScanResult sym = scan_g(omega, Omega, g_list, parity, Mode::Symmetric, opt);
    const ScanResult asym = scan_g(omega, Omega, g_list, parity, Mode::Asymmetric, opt);
    std::vector<AccuracyRow> rows(g_list.size());
    for (std::size_t k = 0; k < g_list.size(); ++k) {
        AccuracyRow& row = rows[k];
        row.g = g_list[k];
        ModelParams p{omega, Omega, g_list[k]};
        row.cutoff = converged_cutoff(p);
        const EDResult ed = diagonalize(p, row.cutoff);
        const int idx = state_index(ed, parity, 0);
        const EdObservables eo = observables_ed(ed, idx);
        row.ed = {eo.energy, eo.photon, eo.sigma_x, eo.coupling_corr};

        const QuadratureGrid grid = default_grid(gprime(p));
        auto fill = [&](const VariationalResult& r, AccuracyQuad& q) {
            TrialState st{r.shape, r.weights, p, r.parity};
            const Observables ob = observables(st, grid);
            q = {r.energy, ob.photon, ob.sigma_x, ob.coupling_corr};
        };
        fill(sym.rows[k].result, row.sym);
        fill(asym.rows[k].result, row.asym);
    }
    return rows;
}

}  // namespace rabi
