#include "rabi/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>

#include "rabi/analysis.hpp"
#include "rabi/ed.hpp"
#include "rabi/model.hpp"
#include "rabi/oscillator.hpp"
#include "rabi/polaron.hpp"
#include "rabi/qfi.hpp"
#include "rabi/runio.hpp"
#include "rabi/variational.hpp"

namespace rabi {
namespace {

using nlohmann::json;

json base_point_defaults() {
    return json{{"omega", 0.15}, {"Omega", 1.0}, {"parity", "negative"}};
}

double getd(const json& cfg, const char* key) {
    try {
        return cfg.at(key).get<double>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad or missing numeric key: ") + key);
    }
}

long geti(const json& cfg, const char* key) {
    try {
        return cfg.at(key).get<long>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad or missing integer key: ") + key);
    }
}

std::string gets(const json& cfg, const char* key) {
    try {
        return cfg.at(key).get<std::string>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad or missing string key: ") + key);
    }
}

bool getb(const json& cfg, const char* key) {
    try {
        return cfg.at(key).get<bool>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad or missing boolean key: ") + key);
    }
}

Parity parity_from(const json& cfg) {
    const std::string s = gets(cfg, "parity");
    if (s == "negative") return Parity::Negative;
    if (s == "positive") return Parity::Positive;
    throw ConfigError("parity must be 'negative' or 'positive'");
}

Mode mode_from(const json& cfg) {
    const std::string s = gets(cfg, "mode");
    if (s == "symmetric") return Mode::Symmetric;
    if (s == "asymmetric") return Mode::Asymmetric;
    throw ConfigError("mode must be 'symmetric' or 'asymmetric'");
}

double g_unit_scale(const std::string& units, double omega, double Omega) {
    if (units == "absolute") return 1.0;
    if (units == "gc") return gc(omega, Omega);
    if (units == "gc0") return gc0(omega, Omega);
    throw ConfigError("g_units must be 'absolute', 'gc', or 'gc0'");
}

std::vector<double> g_list_from(const json& cfg, double omega, double Omega) {
    const double s = g_unit_scale(gets(cfg, "g_units"), omega, Omega);
    const int n = static_cast<int>(geti(cfg, "n_g"));
    if (n < 1) throw ConfigError("n_g must be >= 1");
    return lin_spaced(getd(cfg, "g_min") * s, getd(cfg, "g_max") * s, n);
}

OptimizeOptions opt_from(const json& cfg) {
    OptimizeOptions opt;
    if (cfg.contains("starts")) opt.starts = static_cast<int>(geti(cfg, "starts"));
    if (cfg.contains("seed")) opt.seed = static_cast<std::uint64_t>(geti(cfg, "seed"));
    if (opt.starts < 1) throw ConfigError("starts must be >= 1");
    return opt;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void finish(const std::string& command, const json& cfg, const std::string& output,
            const std::vector<std::string>& extra_outputs, const Stopwatch& sw) {
    std::vector<std::string> outs = {output};
    outs.insert(outs.end(), extra_outputs.begin(), extra_outputs.end());
    write_manifest(output + ".manifest.json", command, cfg, outs, sw.seconds());
}

std::string fmt_flag(bool b) { return b ? "1" : "0"; }

}  // namespace

std::vector<std::string> command_names() {
    return {"ed-sweep", "variational", "scan", "qfi", "phase-diagram", "fit-ed", "validate"};
}

json default_config(const std::string& command) {
    if (command == "ed-sweep") {
        json j = base_point_defaults();
        j.update(json{{"g_min", 0.2},
                      {"g_max", 2.0},
                      {"n_g", 10},
                      {"g_units", "gc"},
                      {"rank", 0},
                      {"dg", 1e-4},
                      {"cutoff", 0},
                      {"with_qfi", true},
                      {"threads", 1},
                      {"output", "ed_sweep.csv"}});
        return j;
    }
    if (command == "variational") {
        json j = base_point_defaults();
        j.update(json{{"g", 1.0},
                      {"g_units", "gc"},
                      {"mode", "asymmetric"},
                      {"seed", 0},
                      {"starts", 8},
                      {"output", "variational.json"}});
        return j;
    }
    if (command == "scan") {
        json j = base_point_defaults();
        j.update(json{{"g_min", 0.2},
                      {"g_max", 2.0},
                      {"n_g", 81},
                      {"g_units", "gc"},
                      {"mode", "asymmetric"},
                      {"seed", 0},
                      {"starts", 8},
                      {"output", "scan.csv"}});
        return j;
    }
    if (command == "qfi") {
        json j = base_point_defaults();
        j["omega"] = 0.1;
        j.update(json{{"g_min", 0.6},
                      {"g_max", 2.0},
                      {"n_g", 57},
                      {"g_units", "gc0"},
                      {"mode", "asymmetric"},
                      {"seed", 0},
                      {"starts", 8},
                      {"threads", 1},
                      {"output", "qfi.csv"}});
        return j;
    }
    if (command == "phase-diagram") {
        return json{{"omega_min", 0.05}, {"omega_max", 1.0}, {"n_omega", 24},
                    {"parity", "negative"}, {"mode", "asymmetric"}, {"n_g", 81},
                    {"g_lo_frac", 0.2},   {"g_hi_frac", 2.0},     {"seed", 0},
                    {"starts", 8},        {"output", "phase_diagram.csv"}};
    }
    if (command == "fit-ed") {
        json j = base_point_defaults();
        j["omega"] = 0.5;
        j["parity"] = "positive";
        j.update(json{{"g_min", 0.5},
                      {"g_max", 1.5},
                      {"n_g", 11},
                      {"g_units", "gc"},
                      {"rank", 0},
                      {"cutoff", 0},
                      {"seed", 0},
                      {"starts", 8},
                      {"threads", 1},
                      {"output", "fit_ed.csv"}});
        return j;
    }
    if (command == "validate") {
        return json{{"draws", 200}, {"tol", 1e-9}, {"seed", 12345}, {"output", "validate.json"}};
    }
    throw ConfigError("unknown command: " + command);
}

int cmd_ed_sweep(const json& cfg) {
    Stopwatch sw;
    const double omega = getd(cfg, "omega"), Omega = getd(cfg, "Omega");
    const Parity parity = parity_from(cfg);
    const int rank = static_cast<int>(geti(cfg, "rank"));
    const double dg = getd(cfg, "dg");
    const int cutoff_cfg = static_cast<int>(geti(cfg, "cutoff"));
    const bool with_qfi = getb(cfg, "with_qfi");
    const auto gs = g_list_from(cfg, omega, Omega);

    std::vector<std::vector<std::string>> rows(gs.size());
    parallel_for(static_cast<int>(gs.size()), static_cast<int>(geti(cfg, "threads")), [&](int i) {
        ModelParams p{omega, Omega, gs[i]};
        const int cut = cutoff_cfg > 0 ? cutoff_cfg : converged_cutoff(p);
        const EDResult r = diagonalize(p, cut);
        const int idx = state_index(r, parity, rank);
        const EdObservables o = observables_ed(r, idx);
        const double fq = with_qfi ? qfi_ed(p, idx, dg, cut)
                                   : std::numeric_limits<double>::quiet_NaN();
        rows[i] = {fmt17(gs[i]),
                   fmt17(r.eigenvalues[0]),
                   fmt17(r.eigenvalues[1]),
                   std::to_string(r.parity_labels[0]),
                   std::to_string(r.parity_labels[1]),
                   fmt17(o.photon),
                   fmt17(o.sigma_x),
                   fmt17(o.coupling_corr),
                   fmt17(fq),
                   std::to_string(cut)};
    });

    CsvTable csv;
    csv.header = {"g",      "E0",      "E1",           "parity0", "parity1",
                  "photon", "sigma_x", "coupling_corr", "qfi",     "cutoff"};
    for (auto& r : rows) csv.add_row(std::move(r));
    const std::string output = gets(cfg, "output");
    csv.write(output);
    finish("ed-sweep", cfg, output, {}, sw);
    return 0;
}

int cmd_variational(const json& cfg) {
    Stopwatch sw;
    const double omega = getd(cfg, "omega"), Omega = getd(cfg, "Omega");
    const double g = getd(cfg, "g") * g_unit_scale(gets(cfg, "g_units"), omega, Omega);
    ModelParams p{omega, Omega, g};
    const Parity parity = parity_from(cfg);
    const Mode mode = mode_from(cfg);
    const VariationalResult r = optimize(p, parity, mode, std::nullopt, opt_from(cfg));

    const QuadratureGrid grid = default_grid(gprime(p));
    TrialState st{r.shape, r.weights, p, parity};
    const Observables ob = observables(st, grid);
    const ChannelEnergies ch = channel_energies(st);

    json out;
    out["omega"] = omega;
    out["Omega"] = Omega;
    out["g"] = g;
    out["g_over_gc"] = g / gc(omega, Omega);
    out["parity"] = gets(cfg, "parity");
    out["mode"] = gets(cfg, "mode");
    out["energy"] = r.energy;
    out["alpha"] = r.weights.alpha;
    out["beta"] = r.weights.beta;
    out["zeta_a"] = r.shape.zeta_a;
    out["zeta_b"] = r.shape.zeta_b;
    out["xi_a"] = r.shape.xi_a;
    out["xi_b"] = r.shape.xi_b;
    out["delta_a"] = r.shape.delta_a;
    out["delta_b"] = r.shape.delta_b;
    out["photon"] = ob.photon;
    out["sigma_x"] = ob.sigma_x;
    out["coupling_corr"] = ob.coupling_corr;
    out["tunneling_aa"] = ch.omega_aa;
    out["tunneling_bb"] = ch.omega_bb;
    out["tunneling_ab"] = ch.omega_ab;
    out["converged"] = r.converged;
    out["n_evals"] = r.n_evals;
    out["restarts_used"] = r.restarts_used;

    const std::string output = gets(cfg, "output");
    std::ofstream f(output, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + output);
    f << out.dump(2) << "\n";
    f.close();
    finish("variational", cfg, output, {}, sw);
    return 0;
}

int cmd_scan(const json& cfg) {
    Stopwatch sw;
    const double omega = getd(cfg, "omega"), Omega = getd(cfg, "Omega");
    const Parity parity = parity_from(cfg);
    const Mode mode = mode_from(cfg);
    const auto gs = g_list_from(cfg, omega, Omega);
    const ScanResult sc = scan_g(omega, Omega, gs, parity, mode, opt_from(cfg));

    const double gc_val = gc(omega, Omega);
    const QuadratureGrid grid = default_grid(gprime(ModelParams{omega, Omega, gs.back()}));
    CsvTable csv;
    csv.header = {"g",      "g_over_gc", "energy",  "alpha",   "beta",
                  "zeta_a", "zeta_b",    "xi_a",    "xi_b",    "delta_a",
                  "delta_b", "photon",   "sigma_x", "coupling_corr", "converged"};
    for (const auto& row : sc.rows) {
        ModelParams p{omega, Omega, row.g};
        TrialState st{row.result.shape, row.result.weights, p, parity};
        const Observables ob = observables(st, grid);
        csv.add_row({fmt17(row.g), fmt17(row.g / gc_val), fmt17(row.result.energy),
                     fmt17(row.result.weights.alpha), fmt17(row.result.weights.beta),
                     fmt17(row.result.shape.zeta_a), fmt17(row.result.shape.zeta_b),
                     fmt17(row.result.shape.xi_a), fmt17(row.result.shape.xi_b),
                     fmt17(row.result.shape.delta_a), fmt17(row.result.shape.delta_b),
                     fmt17(ob.photon), fmt17(ob.sigma_x), fmt17(ob.coupling_corr),
                     fmt_flag(row.result.converged)});
    }
    const std::string output = gets(cfg, "output");
    csv.write(output);
    finish("scan", cfg, output, {}, sw);
    return 0;
}

int cmd_qfi(const json& cfg) {
    Stopwatch sw;
    const double omega = getd(cfg, "omega"), Omega = getd(cfg, "Omega");
    const Parity parity = parity_from(cfg);
    const Mode mode = mode_from(cfg);
    const auto gs = g_list_from(cfg, omega, Omega);
    const OptimizeOptions opt = opt_from(cfg);

    // Continuation scan on a half-step grid: stride-1 and stride-2 central
    // differences give the Richardson-extrapolated parameter derivatives, and
    // the same stencils feed the whole-function oracle.
    std::vector<double> fine;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        fine.push_back(gs[i]);
        if (i + 1 < gs.size()) fine.push_back(0.5 * (gs[i] + gs[i + 1]));
    }
    const ScanResult scan = scan_g(omega, Omega, fine, parity, mode, opt);
    const ParamDerivatives d_half = param_derivatives(scan, 1);
    const ParamDerivatives d_full = param_derivatives(scan, 2);
    const ParamDerivatives d_rich = richardson(d_half, d_full);

    double g_abs_max = 0.0;
    for (double g : fine) g_abs_max = std::max(g_abs_max, std::abs(g));
    const QuadratureGrid grid = default_grid(gprime({omega, Omega, g_abs_max}));

    // Rows where the two stencil spacings disagree carry sub-threshold branch
    // hops; their differenced parameter velocities are not trustworthy.  Hops
    // cluster in the overlapping-packet regime, so the exclusion is dilated to
    // the neighbors of every flagged row.
    constexpr double kDerivConsistencyTol = 1e-2;
    constexpr int kExcludeDilation = 3;
    std::vector<bool> bad(gs.size(), false);
    for (std::size_t i = 0; i < gs.size(); ++i)
        bad[i] = !d_rich.rows[2 * i].valid ||
                 d_rich.rows[2 * i].consistency >= kDerivConsistencyTol;
    std::vector<bool> excl = bad;
    for (std::size_t i = 0; i < gs.size(); ++i)
        if (bad[i])
            for (int r = -kExcludeDilation; r <= kExcludeDilation; ++r) {
                const long k = static_cast<long>(i) + r;
                if (k >= 0 && k < static_cast<long>(gs.size())) excl[k] = true;
            }
    std::vector<std::size_t> keep;  // indices into gs with a trustworthy stencil
    for (std::size_t i = 0; i < gs.size(); ++i)
        if (!excl[i]) keep.push_back(i);

    auto state_at = [&](std::size_t j) {
        ModelParams p{omega, Omega, scan.rows[j].g};
        return make_state(p, scan.rows[j].result);
    };
    std::vector<QfiBreakdown> bds(keep.size());
    std::vector<double> oracle(keep.size());
    parallel_for(static_cast<int>(keep.size()), static_cast<int>(geti(cfg, "threads")),
                 [&](int n) {
                     const std::size_t j = 2 * keep[n];
                     bds[n] = qfi_decompose(scan, d_rich, j, grid);
                     const double hstep = scan.rows[j].g - scan.rows[j - 1].g;
                     const double f_h = qfi_whole_fd(state_at(j), state_at(j + 1),
                                                     state_at(j - 1), hstep, grid);
                     const double f_2h = qfi_whole_fd(state_at(j), state_at(j + 2),
                                                      state_at(j - 2), 2.0 * hstep, grid);
                     oracle[n] = (4.0 * f_h - f_2h) / 3.0;
                 });

    std::vector<std::pair<double, double>> curve;
    for (std::size_t n = 0; n < keep.size(); ++n)
        curve.emplace_back(gs[keep[n]], bds[n].total);
    const QfiPeak pk = find_qfi_peak(curve);
    std::size_t peak_row = 0;
    for (std::size_t n = 1; n < keep.size(); ++n)
        if (std::abs(curve[n].first - pk.g_peak) < std::abs(curve[peak_row].first - pk.g_peak))
            peak_row = n;

    const double gc0_val = gc0(omega, Omega);
    CsvTable csv;
    csv.header = {"g",  "g_over_gc0", "xx",    "xixi", "dd",  "rr",   "xxi",
                  "xrho", "xd",       "rhoxi", "rhod", "xid", "total", "total_oracle",
                  "peak"};
    for (std::size_t n = 0; n < keep.size(); ++n) {
        const double g = curve[n].first;
        const QfiBreakdown& b = bds[n];
        csv.add_row({fmt17(g), fmt17(g / gc0_val), fmt17(b.xx), fmt17(b.xixi),
                     fmt17(b.dd), fmt17(b.rr), fmt17(b.xxi), fmt17(b.xrho), fmt17(b.xd),
                     fmt17(b.rhoxi), fmt17(b.rhod), fmt17(b.xid), fmt17(b.total),
                     fmt17(oracle[n]), fmt_flag(n == peak_row)});
    }
    const std::string output = gets(cfg, "output");
    csv.write(output);

    std::string warn;
    const double gcf = gcF(omega, Omega, GcfVariant::FullRange, &warn);
    json summary;
    summary["g_peak"] = pk.g_peak;
    summary["f_peak"] = pk.f_peak;
    summary["g_peak_over_gc0"] = pk.g_peak / gc0_val;
    summary["gcF_fullrange"] = gcf;
    summary["g_peak_rel_dev_vs_gcF"] = (pk.g_peak - gcf) / gcf;
    if (!warn.empty()) summary["gcF_warning"] = warn;
    const std::string spath = output + ".summary.json";
    std::ofstream f(spath, std::ios::binary);
    f << summary.dump(2) << "\n";
    f.close();
    finish("qfi", cfg, output, {spath}, sw);
    return 0;
}

int cmd_phase_diagram(const json& cfg) {
    Stopwatch sw;
    const Parity parity = parity_from(cfg);
    const Mode mode = mode_from(cfg);
    const auto omegas =
        log_spaced(getd(cfg, "omega_min"), getd(cfg, "omega_max"),
                   static_cast<int>(geti(cfg, "n_omega")));
    PhaseDiagramOptions pd;
    pd.n_g = static_cast<int>(geti(cfg, "n_g"));
    pd.g_lo_frac = getd(cfg, "g_lo_frac");
    pd.g_hi_frac = getd(cfg, "g_hi_frac");
    pd.opt = opt_from(cfg);
    const PhaseDiagramResult res = phase_diagram(omegas, parity, mode, pd);

    CsvTable csv;
    csv.header = {"kind", "omega", "g", "g_over_gc"};
    json counts;
    for (const auto& b : res.boundaries) {
        counts[boundary_kind_name(b.kind)] = b.points.size();
        for (const auto& [om, g] : b.points)
            csv.add_row({boundary_kind_name(b.kind), fmt17(om), fmt17(g), fmt17(g / gc(om))});
    }
    const std::string output = gets(cfg, "output");
    csv.write(output);

    json summary;
    summary["point_counts"] = counts;
    summary["omitted"] = res.omitted;
    const std::string spath = output + ".summary.json";
    std::ofstream f(spath, std::ios::binary);
    f << summary.dump(2) << "\n";
    f.close();
    finish("phase-diagram", cfg, output, {spath}, sw);
    return 0;
}

int cmd_fit_ed(const json& cfg) {
    Stopwatch sw;
    const double omega = getd(cfg, "omega"), Omega = getd(cfg, "Omega");
    const Parity parity = parity_from(cfg);
    const int rank = static_cast<int>(geti(cfg, "rank"));
    const int cutoff_cfg = static_cast<int>(geti(cfg, "cutoff"));
    const auto gs = g_list_from(cfg, omega, Omega);
    const OptimizeOptions opt = opt_from(cfg);
    const std::uint64_t seed = static_cast<std::uint64_t>(geti(cfg, "seed"));

    // variational warm starts for the fit, one continuation pass
    const ScanResult warm = scan_g(omega, Omega, gs, parity, Mode::Asymmetric, opt);
    const QuadratureGrid grid = default_grid(gprime(ModelParams{omega, Omega, gs.back()}));

    std::vector<std::vector<std::string>> rows(gs.size());
    const double gc_val = gc(omega, Omega);
    parallel_for(static_cast<int>(gs.size()), static_cast<int>(geti(cfg, "threads")), [&](int i) {
        ModelParams p{omega, Omega, gs[i]};
        const int cut = cutoff_cfg > 0 ? cutoff_cfg : converged_cutoff(p);
        const EDResult r = diagonalize(p, cut);
        const int idx = state_index(r, parity, rank);
        EdWavefunction wf = wavefunction(r, idx, grid);
        std::vector<double> psi_up(wf.psi_plus.size());
        for (std::size_t k = 0; k < psi_up.size(); ++k)
            psi_up[k] = std::sqrt(2.0) * wf.psi_plus[k];
        const FitResult fit =
            fit_polaron_to_ed(psi_up, grid, p, parity, warm.rows[i].result.shape, seed);
        rows[i] = {fmt17(gs[i]),
                   fmt17(gs[i] / gc_val),
                   fmt17(fit.weights.alpha),
                   fmt17(fit.weights.beta),
                   fmt17(fit.shape.zeta_a),
                   fmt17(fit.shape.zeta_b),
                   fmt17(fit.shape.xi_a),
                   fmt17(fit.shape.xi_b),
                   fmt17(fit.shape.delta_a),
                   fmt17(fit.shape.delta_b),
                   fmt17(fit.residual),
                   fmt17(fit.delta_alpha_N),
                   fmt_flag(fit.poor_fit)};
    });

    CsvTable csv;
    csv.header = {"g",      "g_over_gc", "alpha",   "beta",    "zeta_a",
                  "zeta_b", "xi_a",      "xi_b",    "delta_a", "delta_b",
                  "residual", "delta_alpha_N", "poor_fit"};
    for (auto& r : rows) csv.add_row(std::move(r));
    const std::string output = gets(cfg, "output");
    csv.write(output);
    finish("fit-ed", cfg, output, {}, sw);
    return 0;
}

namespace {

struct DrawCheck {
    double worst_same = 0.0, worst_flip = 0.0, worst_hplus = 0.0;
};

DrawCheck run_draw_checks(int draws, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uxi(0.2, 2.0), uz(-1.5, 1.5), ud(-1.0, 1.0),
        ugp(0.05, 6.0), uom(0.2, 1.2);
    const QuadratureGrid grid = default_grid(6.0);
    const std::size_t n = grid.size();
    std::vector<double> fa(n), fb(n), fam(n), fbm(n), dfa(n), dfb(n);

    DrawCheck dc;
    for (int t = 0; t < draws; ++t) {
        PolaronShape s;
        s.zeta_a = uz(rng);
        s.zeta_b = uz(rng);
        s.xi_a = uxi(rng);
        s.xi_b = uxi(rng);
        s.delta_a = ud(rng);
        s.delta_b = ud(rng);
        const double gp = ugp(rng);
        const double omega = uom(rng);
        ModelParams p{omega, 1.0, gp * omega / std::sqrt(2.0)};

        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid.nodes[i];
            fa[i] = eval_packet(Packet::Polaron, s, p, x);
            fb[i] = eval_packet(Packet::Antipolaron, s, p, x);
            fam[i] = eval_packet(Packet::Polaron, s, p, -x);
            fbm[i] = eval_packet(Packet::Antipolaron, s, p, -x);
            dfa[i] = eval_packet_deriv(Packet::Polaron, s, p, x, PacketDeriv::Position);
            dfb[i] = eval_packet_deriv(Packet::Antipolaron, s, p, x, PacketDeriv::Position);
        }
        auto hq = [&](const std::vector<double>& f, const std::vector<double>& df,
                      const std::vector<double>& h, const std::vector<double>& dh) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double xs = grid.nodes[i] + gp;
                acc += grid.weights[i] * (df[i] * dh[i] + xs * xs * f[i] * h[i]);
            }
            return 0.5 * omega * acc;
        };
        const struct {
            Packet a, b;
            const std::vector<double>*f, *df, *h, *dh, *hm;
        } pairs[3] = {
            {Packet::Polaron, Packet::Polaron, &fa, &dfa, &fa, &dfa, &fam},
            {Packet::Antipolaron, Packet::Antipolaron, &fb, &dfb, &fb, &dfb, &fbm},
            {Packet::Polaron, Packet::Antipolaron, &fa, &dfa, &fb, &dfb, &fbm},
        };
        for (const auto& pr : pairs) {
            const double q_same = inner(*pr.f, *pr.h, grid);
            const double q_flip = inner(*pr.f, *pr.hm, grid);
            const double q_h = hq(*pr.f, *pr.df, *pr.h, *pr.dh);
            dc.worst_same = std::max(dc.worst_same,
                                     std::abs(q_same - overlap_same(pr.a, pr.b, s, p)));
            dc.worst_flip = std::max(dc.worst_flip,
                                     std::abs(q_flip - overlap_flip(pr.a, pr.b, s, p)));
            dc.worst_hplus = std::max(dc.worst_hplus,
                                      std::abs(q_h - hplus_element(pr.a, pr.b, s, p)));
        }
    }
    return dc;
}

}  // namespace

int cmd_validate(const json& cfg) {
    Stopwatch sw;
    const int draws = static_cast<int>(geti(cfg, "draws"));
    const double tol = getd(cfg, "tol");
    const std::uint64_t seed = static_cast<std::uint64_t>(geti(cfg, "seed"));

    json report;
    bool ok = true;
    auto note = [&](const std::string& name, bool pass, double value) {
        report[name] = {{"pass", pass}, {"value", value}};
        ok = ok && pass;
        std::cout << (pass ? "PASS " : "FAIL ") << name << " = " << value << "\n";
    };

    const DrawCheck dc = run_draw_checks(draws, seed);
    note("closed_form_overlap_vs_quadrature", dc.worst_same < tol, dc.worst_same);
    note("closed_form_flip_vs_quadrature", dc.worst_flip < tol, dc.worst_flip);
    note("closed_form_hplus_vs_quadrature", dc.worst_hplus < tol, dc.worst_hplus);

    {
        const double omega = 0.5;
        const double g = 0.9 * gc(omega);
        const QfiPoint qp =
            qfi_variational_point(omega, 1.0, g, Parity::Negative, Mode::Asymmetric);
        const double rel_sum =
            std::abs(qp.breakdown.component_sum() - qp.breakdown.total) /
            std::max(1e-300, std::abs(qp.breakdown.total));
        const double rel_oracle = std::abs(qp.breakdown.total - qp.total_oracle) /
                                  std::max(1e-300, std::abs(qp.total_oracle));
        note("qfi_component_sum_rule_rel", rel_sum < 1e-6, rel_sum);
        note("qfi_total_vs_whole_function_rel", rel_oracle < 1e-4, rel_oracle);
    }

    {
        ModelParams p{0.15, 1.0, 2.0 * gc(0.15)};
        const int cut = converged_cutoff(p);
        const EDResult r = diagonalize(p, cut);
        double worst_orth = 0.0;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j <= i; ++j) {
                const double d = r.eigenvectors.col(i).dot(r.eigenvectors.col(j));
                worst_orth = std::max(worst_orth, std::abs(d - (i == j ? 1.0 : 0.0)));
            }
        note("ed_eigenvector_orthonormality", worst_orth < 1e-10, worst_orth);
        note("ed_ground_parity_negative", r.parity_labels[0] == -1,
             static_cast<double>(r.parity_labels[0]));
        note("ed_converged_cutoff", cut >= 24, static_cast<double>(cut));
    }

    report["draws"] = draws;
    report["tol"] = tol;
    report["pass"] = ok;
    const std::string output = gets(cfg, "output");
    std::ofstream f(output, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + output);
    f << report.dump(2) << "\n";
    f.close();
    finish("validate", cfg, output, {}, sw);
    return ok ? 0 : 4;
}

int run_command(const std::string& command, const json& cfg) {
    if (command == "ed-sweep") return cmd_ed_sweep(cfg);
    if (command == "variational") return cmd_variational(cfg);
    if (command == "scan") return cmd_scan(cfg);
    if (command == "qfi") return cmd_qfi(cfg);
    if (command == "phase-diagram") return cmd_phase_diagram(cfg);
    if (command == "fit-ed") return cmd_fit_ed(cfg);
    if (command == "validate") return cmd_validate(cfg);
    throw ConfigError("unknown command: " + command);
}

}  // namespace rabi
