#include "rabi/qfi.hpp"

#include <algorithm>
#include <cmath>

namespace rabi {

ParamDerivatives param_derivatives(const ScanResult& scan, int stride) {
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    const std::size_t s = static_cast<std::size_t>(stride);
    ParamDerivatives out;
    out.rows.resize(scan.rows.size());
    auto pack = [](const ScanRow& r, double* v) {
        const PolaronShape& sh = r.result.shape;
        v[0] = sh.zeta_a;
        v[1] = sh.zeta_b;
        v[2] = sh.xi_a;
        v[3] = sh.xi_b;
        v[4] = sh.delta_a;
        v[5] = sh.delta_b;
        v[6] = r.result.weights.alpha;
        v[7] = r.result.weights.beta;
    };
    for (std::size_t k = 0; k < scan.rows.size(); ++k) {
        DerivRow& d = out.rows[k];
        d.g = scan.rows[k].g;
        if (k < s || k + s >= scan.rows.size()) continue;
        bool crossed = false;  // any branch change inside the stencil
        for (std::size_t j = k - s + 1; j <= k + s; ++j)
            if (scan.rows[j].jump) crossed = true;
        if (crossed) continue;
        const ScanRow& lo = scan.rows[k - s];
        const ScanRow& hi = scan.rows[k + s];
        if (!lo.result.converged || !scan.rows[k].result.converged || !hi.result.converged)
            continue;
        double a[8], b[8];
        pack(lo, a);
        pack(hi, b);
        const double dg = hi.g - lo.g;
        if (!(dg > 0.0)) continue;
        double v[8];
        for (int i = 0; i < 8; ++i) v[i] = (b[i] - a[i]) / dg;
        d.dshape = {v[0], v[1], v[2], v[3], v[4], v[5]};
        d.dweights = {v[6], v[7]};
        d.valid = true;
    }
    return out;
}

ParamDerivatives richardson(const ParamDerivatives& half, const ParamDerivatives& full) {
    if (half.rows.size() != full.rows.size())
        throw std::invalid_argument("derivative passes cover different grids");
    ParamDerivatives out;
    out.rows.resize(half.rows.size());
    for (std::size_t k = 0; k < half.rows.size(); ++k) {
        const DerivRow& h = half.rows[k];
        const DerivRow& f = full.rows[k];
        DerivRow& d = out.rows[k];
        d.g = h.g;
        if (!h.valid || !f.valid) continue;
        auto mix = [](double a, double b) { return (4.0 * a - b) / 3.0; };
        d.dshape.zeta_a = mix(h.dshape.zeta_a, f.dshape.zeta_a);
        d.dshape.zeta_b = mix(h.dshape.zeta_b, f.dshape.zeta_b);
        d.dshape.xi_a = mix(h.dshape.xi_a, f.dshape.xi_a);
        d.dshape.xi_b = mix(h.dshape.xi_b, f.dshape.xi_b);
        d.dshape.delta_a = mix(h.dshape.delta_a, f.dshape.delta_a);
        d.dshape.delta_b = mix(h.dshape.delta_b, f.dshape.delta_b);
        d.dweights.alpha = mix(h.dweights.alpha, f.dweights.alpha);
        d.dweights.beta = mix(h.dweights.beta, f.dweights.beta);
        d.valid = true;
        auto packv = [](const DerivRow& r, double* v) {
            v[0] = r.dshape.zeta_a;
            v[1] = r.dshape.zeta_b;
            v[2] = r.dshape.xi_a;
            v[3] = r.dshape.xi_b;
            v[4] = r.dshape.delta_a;
            v[5] = r.dshape.delta_b;
            v[6] = r.dweights.alpha;
            v[7] = r.dweights.beta;
        };
        double vh[8], vf[8], vr[8];
        packv(h, vh);
        packv(f, vf);
        packv(d, vr);
        double diff2 = 0.0, norm2 = 0.0;
        for (int i = 0; i < 8; ++i) {
            diff2 += (vh[i] - vf[i]) * (vh[i] - vf[i]);
            norm2 += vr[i] * vr[i];
        }
        d.consistency = std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-6);
    }
    return out;
}

namespace {

struct DerivFields {
    // sampled derivative directions of the spin-up component
    std::vector<double> dx, dxi, dd, dr, psi;
};

DerivFields sample_fields(const TrialState& st, const PolaronShape& ds,
                          const PolaronWeights& dw, const QuadratureGrid& grid) {
    const ModelParams& p = st.params;
    const double gp = gprime(p);
    const double dgp = std::sqrt(2.0) / p.omega;  // d(g')/dg
    const PolaronShape& s = st.shape;
    // chain rule for the packet centers m_a = -zeta_a*g', m_b = +zeta_b*g'
    const double dm_a = -(ds.zeta_a * gp + s.zeta_a * dgp);
    const double dm_b = +(ds.zeta_b * gp + s.zeta_b * dgp);

    const double max_center =
        std::max(std::abs(packet_center(Packet::Polaron, s, p)),
                 std::abs(packet_center(Packet::Antipolaron, s, p)));
    require_support(grid, max_center, std::min(s.xi_a, s.xi_b));

    DerivFields f;
    const std::size_t n = grid.size();
    f.dx.resize(n);
    f.dxi.resize(n);
    f.dd.resize(n);
    f.dr.resize(n);
    f.psi.resize(n);
    const double wa = st.weights.alpha, wb = st.weights.beta;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.nodes[i];
        const double pa = eval_packet(Packet::Polaron, s, p, x);
        const double pb = eval_packet(Packet::Antipolaron, s, p, x);
        const double ca = eval_packet_deriv(Packet::Polaron, s, p, x, PacketDeriv::Center);
        const double cb = eval_packet_deriv(Packet::Antipolaron, s, p, x, PacketDeriv::Center);
        const double xa = eval_packet_deriv(Packet::Polaron, s, p, x, PacketDeriv::Width);
        const double xb = eval_packet_deriv(Packet::Antipolaron, s, p, x, PacketDeriv::Width);
        const double da = eval_packet_deriv(Packet::Polaron, s, p, x, PacketDeriv::Slope);
        const double db = eval_packet_deriv(Packet::Antipolaron, s, p, x, PacketDeriv::Slope);
        f.psi[i] = wa * pa + wb * pb;
        f.dx[i] = wa * ca * dm_a + wb * cb * dm_b;
        f.dxi[i] = wa * xa * ds.xi_a + wb * xb * ds.xi_b;
        f.dd[i] = wa * da * ds.delta_a + wb * db * ds.delta_b;
        f.dr[i] = dw.alpha * pa + dw.beta * pb;
    }
    return f;
}

double intra(const std::vector<double>& d, const std::vector<double>& psi,
             const QuadratureGrid& grid) {
    const double dd = inner(d, d, grid);
    const double dp = inner(d, psi, grid);
    return 4.0 * (dd - dp * dp);
}

double cross(const std::vector<double>& a, const std::vector<double>& b,
             const std::vector<double>& psi, const QuadratureGrid& grid) {
    const double ab = inner(a, b, grid);
    const double ap = inner(a, psi, grid);
    const double bp = inner(b, psi, grid);
    return 8.0 * (ab - ap * bp);
}

}  // namespace

QfiBreakdown qfi_decompose(const TrialState& st, const PolaronShape& dshape,
                           const PolaronWeights& dweights, const QuadratureGrid& grid) {
    const DerivFields f = sample_fields(st, dshape, dweights, grid);
    QfiBreakdown out;
    out.g = st.params.g;
    out.xx = intra(f.dx, f.psi, grid);
    out.xixi = intra(f.dxi, f.psi, grid);
    out.dd = intra(f.dd, f.psi, grid);
    out.rr = intra(f.dr, f.psi, grid);
    out.xxi = cross(f.dx, f.dxi, f.psi, grid);
    out.xrho = cross(f.dx, f.dr, f.psi, grid);
    out.xd = cross(f.dx, f.dd, f.psi, grid);
    out.rhoxi = cross(f.dr, f.dxi, f.psi, grid);
    out.rhod = cross(f.dr, f.dd, f.psi, grid);
    out.xid = cross(f.dxi, f.dd, f.psi, grid);
    std::vector<double> whole(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        whole[i] = f.dx[i] + f.dxi[i] + f.dd[i] + f.dr[i];
    out.total = intra(whole, f.psi, grid);
    return out;
}

QfiBreakdown qfi_decompose(const ScanResult& scan, const ParamDerivatives& derivs,
                           std::size_t row, const QuadratureGrid& grid) {
    if (row >= scan.rows.size() || row >= derivs.rows.size())
        throw std::out_of_range("row outside scan");
    const DerivRow& d = derivs.rows[row];
    if (!d.valid) throw std::invalid_argument("derivative row excluded (edge or jump)");
    ModelParams p{scan.omega, scan.Omega, scan.rows[row].g};
    const TrialState st = make_state(p, scan.rows[row].result);
    return qfi_decompose(st, d.dshape, d.dweights, grid);
}

double qfi_whole_fd(const TrialState& center, const TrialState& plus, const TrialState& minus,
                    double h, const QuadratureGrid& grid) {
    std::vector<double> dpsi(grid.size()), psi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.nodes[i];
        dpsi[i] = (psi_plus(plus, x) - psi_plus(minus, x)) / (2.0 * h);
        psi[i] = psi_plus(center, x);
    }
    const double dd = inner(dpsi, dpsi, grid);
    const double dp = inner(dpsi, psi, grid);
    return 4.0 * (dd - dp * dp);
}

double qfi_rhod_center_kernel(const TrialState& st, const PolaronShape& dshape,
                              const PolaronWeights& dweights, const QuadratureGrid& grid) {
    const DerivFields f = sample_fields(st, dshape, dweights, grid);
    const ModelParams& p = st.params;
    const PolaronShape& s = st.shape;
    // slope-direction field rebuilt with the center kernel instead of the
    // slope kernel (the variant under comparison)
    std::vector<double> alt(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.nodes[i];
        const double ca = eval_packet_deriv(Packet::Polaron, s, p, x, PacketDeriv::Center);
        const double cb = eval_packet_deriv(Packet::Antipolaron, s, p, x, PacketDeriv::Center);
        alt[i] = st.weights.alpha * ca * dshape.delta_a + st.weights.beta * cb * dshape.delta_b;
    }
    const double ab = inner(f.dr, alt, grid);
    const double ap = inner(f.dr, f.psi, grid);
    const double bp = inner(alt, f.psi, grid);
    return 8.0 * (ab - ap * bp);
}

QfiPoint qfi_variational_point(double omega, double Omega, double g, Parity parity, Mode mode,
                               double h, const OptimizeOptions& opt) {
    if (!(h > 0.0)) throw std::invalid_argument("h must be > 0");
    ModelParams pc{omega, Omega, g};
    pc.validate();
    QfiPoint out;
    out.h = h;
    out.center = optimize(pc, parity, mode, std::nullopt, opt);

    OptimizeOptions side = opt;
    side.starts = std::max(3, opt.starts / 2);
    ModelParams pp{omega, Omega, g + h}, pm{omega, Omega, g - h};
    const VariationalResult rp = optimize(pp, parity, mode, out.center.shape, side);
    const VariationalResult rm = optimize(pm, parity, mode, out.center.shape, side);

    PolaronShape ds;
    ds.zeta_a = (rp.shape.zeta_a - rm.shape.zeta_a) / (2.0 * h);
    ds.zeta_b = (rp.shape.zeta_b - rm.shape.zeta_b) / (2.0 * h);
    ds.xi_a = (rp.shape.xi_a - rm.shape.xi_a) / (2.0 * h);
    ds.xi_b = (rp.shape.xi_b - rm.shape.xi_b) / (2.0 * h);
    ds.delta_a = (rp.shape.delta_a - rm.shape.delta_a) / (2.0 * h);
    ds.delta_b = (rp.shape.delta_b - rm.shape.delta_b) / (2.0 * h);
    PolaronWeights dw;
    dw.alpha = (rp.weights.alpha - rm.weights.alpha) / (2.0 * h);
    dw.beta = (rp.weights.beta - rm.weights.beta) / (2.0 * h);

    const double gp_max = std::max(gprime(pp), gprime(pc));
    const QuadratureGrid grid = default_grid(gp_max);
    const TrialState stc = make_state(pc, out.center);
    out.breakdown = qfi_decompose(stc, ds, dw, grid);
    out.total_oracle =
        qfi_whole_fd(stc, make_state(pp, rp), make_state(pm, rm), h, grid);
    return out;
}

QfiPeak find_qfi_peak(const std::vector<std::pair<double, double>>& curve) {
    if (curve.size() < 3) throw std::invalid_argument("need at least 3 samples");
    std::size_t k = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].second > curve[k].second) k = i;
    if (k == 0 || k + 1 >= curve.size())
        throw WindowError("maximum lies on the boundary of the scanned window");
    const double x1 = curve[k - 1].first, y1 = curve[k - 1].second;
    const double x2 = curve[k].first, y2 = curve[k].second;
    const double x3 = curve[k + 1].first, y3 = curve[k + 1].second;
    const double num = (x2 - x1) * (x2 - x1) * (y2 - y3) - (x2 - x3) * (x2 - x3) * (y2 - y1);
    const double den = (x2 - x1) * (y2 - y3) - (x2 - x3) * (y2 - y1);
    QfiPeak pk;
    if (std::abs(den) < 1e-300) {
        pk.g_peak = x2;
        pk.f_peak = y2;
        return pk;
    }
    pk.g_peak = x2 - 0.5 * num / den;
    const double a = ((y1 - y2) / (x1 - x2) - (y2 - y3) / (x2 - x3)) / (x1 - x3);
    const double b = (y1 - y2) / (x1 - x2) - a * (x1 + x2);
    const double c = y2 - a * x2 * x2 - b * x2;
    pk.f_peak = a * pk.g_peak * pk.g_peak + b * pk.g_peak + c;
    return pk;
}

}  // namespace rabi
