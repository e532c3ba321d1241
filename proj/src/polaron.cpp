#include "rabi/polaron.hpp"

#include <cmath>

namespace rabi {
namespace {

struct Raw {
    double za, zb, xia, xib, da, db, gp, w;
};

Raw raw(const PolaronShape& s, const ModelParams& p) {
    return {s.zeta_a, s.zeta_b, s.xi_a, s.xi_b, s.delta_a, s.delta_b, gprime(p), p.omega};
}

double intra_polaron_hplus(const Raw& r) {
    const double z = r.za, xi = r.xia, d = r.da, gp = r.gp;
    return (r.w / (8.0 * xi * xi)) *
           (d * d * (2.0 * (z - 1.0) * (z - 1.0) * xi * gp * gp + 3.0 * xi * xi + 3.0) +
            2.0 * xi * (2.0 * (z - 1.0) * (z - 1.0) * xi * gp * gp + xi * xi + 1.0) -
            8.0 * d * (z - 1.0) * xi * gp);
}

double intra_antipolaron_hplus(const Raw& r) {
    const double z = r.zb, xi = r.xib, d = r.db, gp = r.gp;
    return (r.w / (8.0 * xi * xi)) *
           (d * d * (2.0 * (z + 1.0) * (z + 1.0) * xi * gp * gp + 3.0 * xi * xi + 3.0) +
            2.0 * xi * (2.0 * (z + 1.0) * (z + 1.0) * xi * gp * gp + xi * xi + 1.0) +
            8.0 * d * (z + 1.0) * xi * gp);
}

// Cross matrix element of h+, grouped by powers of xi_a.  The final pure
// slope_a block restores the part that is linear in delta_a alone; it was
// reconstructed symbolically and is pinned against quadrature in the tests.
double inter_hplus(const Raw& r) {
    const double za = r.za, zb = r.zb, xia = r.xia, xib = r.xib;
    const double da = r.da, db = r.db, gp = r.gp;
    const double S = xia + xib;
    const double E = std::exp(-xia * xib * gp * gp * (za + zb) * (za + zb) / (2.0 * S));
    const double f1 = r.w * std::pow(xia * xib, 0.25) / (std::sqrt(2.0) * std::pow(S, 3.5)) * E;
    const double f2 = r.w * da * std::pow(xia * xib, 0.25) / (std::sqrt(2.0) * std::pow(S, 4.5)) * E;
    const double g2 = gp * gp, g3 = g2 * gp, g4 = g2 * g2;
    const double zs = za + zb;
    const double poly = za * za * (xib * xib - 1.0) + 2.0 * za * (zb * xib * xib + 1.0) +
                        zb * zb * xib * xib - 1.0;

    double t = f1 * (xia * xib *
                         (xib * xib - db * (zb + 1.0) * (zb + 1.0) * xib * g3 * zs +
                          db * gp * (-3.0 * za + zb + 4.0) -
                          (zb + 1.0) * xib * g2 * (2.0 * za - zb - 3.0) + 2.0) +
                     xib * xib *
                         (2.0 * db * (zb + 1.0) * gp + (zb + 1.0) * (zb + 1.0) * xib * g2 + 1.0));

    t += f1 * xia * xia * xia *
         (xib + db * g3 * zs * poly - 3.0 * db * xib * gp * zs - g2 * poly);

    t += f1 * xia * xia *
         (2.0 * xib * xib + 2.0 * (za - 1.0) * db * (zb + 1.0) * xib * g3 * zs -
          db * gp * (3.0 * za * (xib * xib + 1.0) + 3.0 * zb * xib * xib + zb - 2.0) -
          xib * g2 *
              (za * za * (xib * xib - 1.0) + 2.0 * za * (zb * xib * xib + zb + 2.0) +
               zb * zb * xib * xib - 2.0 * zb - 3.0) +
          1.0);

    t += f2 * db *
         (xib * xib * ((zb + 1.0) * xib * g2 * (2.0 * za + 3.0 * zb + 1.0) + 3.0) -
          xia * xib *
              (-3.0 * (xib * xib + 2.0) +
               (zb + 1.0) * (zb + 1.0) * xib * xib * g4 * zs * zs +
               3.0 * (za - 1.0) * xib * g2 * (za + 2.0 * zb + 1.0)));

    t += f2 * db * xia * xia *
         (6.0 * xib * xib + 2.0 * (za - 1.0) * (zb + 1.0) * xib * xib * g4 * zs * zs -
          3.0 * xib * g2 *
              (2.0 * za * za * xib * xib + 2.0 * za * (2.0 * zb * xib * xib + zb + 1.0) +
               zb * zb * (2.0 * xib * xib + 1.0) - 1.0) +
          3.0);

    t += f2 * db * xia * xia * xia *
         (3.0 * xib + xib * g4 * zs * zs * poly -
          g2 * (za * za * (6.0 * xib * xib - 3.0) + 2.0 * za * zb * (6.0 * xib * xib - 1.0) +
                4.0 * za + 6.0 * zb * zb * xib * xib + 2.0 * zb - 1.0));

    const double slope_a_block =
        gp * (xib * xib * xib * (g2 * xib * (zb + 1.0) * (zb + 1.0) * zs + za + 3.0 * zb + 2.0) +
              xia * (g2 * xib * xib * xib * (zb + 1.0) * zs * (zb - 2.0 * za + 3.0) +
                     3.0 * xib * xib * xib * xib * zs + 6.0 * xib * xib * (zb + 1.0)) +
              xia * xia *
                  (g2 * xib * xib * zs *
                       (za * za - 2.0 * za * (zb + 2.0) + 2.0 * zb + 3.0 - xib * xib * zs * zs) +
                   3.0 * xib * (2.0 * xib * xib * zs + zb - za + 2.0)) +
              xia * xia * xia *
                  (g2 * xib * zs * ((za - 1.0) * (za - 1.0) - xib * xib * zs * zs) +
                   3.0 * xib * xib * zs - 2.0 * (za - 1.0)));
    t += f2 * slope_a_block;
    return t;
}

double flip_polaron_polaron(const Raw& r) {
    const double z = r.za, xi = r.xia, d = r.da, gp = r.gp;
    const double q = d * z * gp + 1.0;
    return std::exp(-z * z * xi * gp * gp) / (2.0 * xi) * (2.0 * xi * q * q - d * d);
}

double flip_anti_anti(const Raw& r) {
    const double z = r.zb, xi = r.xib, d = r.db, gp = r.gp;
    const double q = d * z * gp - 1.0;
    return std::exp(-z * z * xi * gp * gp) / (2.0 * xi) * (2.0 * xi * q * q - d * d);
}

double flip_polaron_anti(const Raw& r) {
    const double za = r.za, zb = r.zb, xia = r.xia, xib = r.xib;
    const double da = r.da, db = r.db, gp = r.gp;
    const double S = xia + xib;
    const double zd = za - zb;
    const double E = std::exp(-xia * xib * gp * gp * zd * zd / (2.0 * S));
    const double f3 = std::sqrt(2.0) * std::pow(xia * xib, 0.25) * E / std::pow(S, 1.5);
    const double f4 = std::sqrt(2.0) * da * std::pow(xia * xib, 0.25) * E / std::pow(S, 2.5);
    return f3 * (xia + xib + xia * db * gp * zd) +
           f4 * (-xia * db + db * xib * (xia * gp * gp * zd * zd - 1.0) +
                 xib * gp * zd * (xia + xib));
}

struct PacketDef {
    double m, xi, d;
};

PacketDef packet_def(Packet which, const Raw& r) {
    if (which == Packet::Polaron) return {-r.za * r.gp, r.xia, r.da};
    return {r.zb * r.gp, r.xib, r.db};
}

// <P1|P2> for two Gaussian-times-linear packets on the same axis.
double pair_overlap(const PacketDef& p1, const PacketDef& p2) {
    const double S = p1.xi + p2.xi;
    const double d12 = p1.m - p2.m;
    const double K = std::pow(p1.xi * p2.xi, 0.25) * std::sqrt(2.0 / S) *
                     std::exp(-p1.xi * p2.xi * d12 * d12 / (2.0 * S));
    const double A1 = 1.0 - p1.d * p2.xi * d12 / S;
    const double A2 = 1.0 + p2.d * p1.xi * d12 / S;
    return K * (A1 * A2 + p1.d * p2.d / S);
}

}  // namespace

double delta_box_limit(double xi, double div) { return 0.95 * std::sqrt(xi) / div; }

double packet_center(Packet which, const PolaronShape& s, const ModelParams& p) {
    const double gp = gprime(p);
    return which == Packet::Polaron ? -s.zeta_a * gp : s.zeta_b * gp;
}

double eval_packet(Packet which, const PolaronShape& s, const ModelParams& p, double x) {
    const PacketDef pd = packet_def(which, raw(s, p));
    const double u = x - pd.m;
    return (1.0 + pd.d * u) * std::pow(pd.xi / M_PI, 0.25) * std::exp(-0.5 * pd.xi * u * u);
}

double eval_packet_deriv(Packet which, const PolaronShape& s, const ModelParams& p,
                         double x, PacketDeriv kind) {
    const PacketDef pd = packet_def(which, raw(s, p));
    const double u = x - pd.m;
    const double G = std::pow(pd.xi / M_PI, 0.25) * std::exp(-0.5 * pd.xi * u * u);
    switch (kind) {
        case PacketDeriv::Position:
            return (pd.d - pd.xi * u * (1.0 + pd.d * u)) * G;
        case PacketDeriv::Center:
            return -(pd.d - pd.xi * u * (1.0 + pd.d * u)) * G;
        case PacketDeriv::Width:
            return (1.0 + pd.d * u) * (0.25 / pd.xi - 0.5 * u * u) * G;
        case PacketDeriv::Slope:
            return u * G;
    }
    return 0.0;
}

double overlap_same(Packet a, Packet b, const PolaronShape& s, const ModelParams& p) {
    const Raw r = raw(s, p);
    return pair_overlap(packet_def(a, r), packet_def(b, r));
}

double overlap_flip(Packet a, Packet b, const PolaronShape& s, const ModelParams& p) {
    const Raw r = raw(s, p);
    if (a == Packet::Polaron && b == Packet::Polaron) return flip_polaron_polaron(r);
    if (a == Packet::Antipolaron && b == Packet::Antipolaron) return flip_anti_anti(r);
    return flip_polaron_anti(r);
}

double hplus_element(Packet a, Packet b, const PolaronShape& s, const ModelParams& p) {
    const Raw r = raw(s, p);
    if (a == Packet::Polaron && b == Packet::Polaron) return intra_polaron_hplus(r);
    if (a == Packet::Antipolaron && b == Packet::Antipolaron) return intra_antipolaron_hplus(r);
    return inter_hplus(r);
}

double peak_position(Packet which, const PolaronShape& s, const ModelParams& p) {
    const PacketDef pd = packet_def(which, raw(s, p));
    if (pd.d == 0.0) return pd.m;
    // interior maximum of (1+d*u)^2 exp(-xi u^2):  xi*d*u^2 + xi*u - d = 0
    const double up = (std::sqrt(pd.xi + 4.0 * pd.d * pd.d) - std::sqrt(pd.xi)) /
                      (2.0 * pd.d * std::sqrt(pd.xi));
    return pd.m + up;
}

double zeta_delta(Packet which, const PolaronShape& s, const ModelParams& p) {
    const double gp = gprime(p);
    const double shift = peak_position(which, s, p) - packet_center(which, s, p);
    return which == Packet::Polaron ? -shift / gp : shift / gp;
}

double zeta_peak(Packet which, const PolaronShape& s, const ModelParams& p) {
    const double base = which == Packet::Polaron ? s.zeta_a : s.zeta_b;
    return base + zeta_delta(which, s, p);
}

double psi_plus(const TrialState& st, double x) {
    return st.weights.alpha * eval_packet(Packet::Polaron, st.shape, st.params, x) +
           st.weights.beta * eval_packet(Packet::Antipolaron, st.shape, st.params, x);
}

double psi_minus(const TrialState& st, double x) {
    return parity_sign(st.parity) * psi_plus(st, -x);
}

double psi_plus_dx(const TrialState& st, double x) {
    return st.weights.alpha *
               eval_packet_deriv(Packet::Polaron, st.shape, st.params, x, PacketDeriv::Position) +
           st.weights.beta * eval_packet_deriv(Packet::Antipolaron, st.shape, st.params, x,
                                               PacketDeriv::Position);
}

Observables observables(const TrialState& st, const QuadratureGrid& grid) {
    const double gp = gprime(st.params);
    const double max_center = std::max(std::abs(st.shape.zeta_a), std::abs(st.shape.zeta_b)) * gp;
    require_support(grid, max_center, std::min(st.shape.xi_a, st.shape.xi_b));
    double x2 = 0.0, p2 = 0.0, norm = 0.0, x1 = 0.0, sx = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.nodes[i], w = grid.weights[i];
        const double v = psi_plus(st, x);
        const double dv = psi_plus_dx(st, x);
        norm += w * v * v;
        x1 += w * x * v * v;
        x2 += w * x * x * v * v;
        p2 += w * dv * dv;
        sx += w * v * psi_plus(st, -x);
    }
    Observables obs;
    obs.photon = 0.5 * (x2 + p2 - norm);
    obs.sigma_x = parity_sign(st.parity) * sx;
    obs.coupling_corr = std::sqrt(2.0) * x1;
    return obs;
}

InducedPotential induced_potential(const TrialState& st, double x, double psi_plus_max) {
    InducedPotential out;
    const double vplus = psi_plus(st, x);
    if (std::abs(vplus) < 1e-8 * std::abs(psi_plus_max)) return out;
    out.value = (st.params.Omega / st.params.omega) * psi_minus(st, x) / vplus;
    out.defined = true;
    return out;
}

ChannelEnergies channel_energies(const TrialState& st) {
    const double pref = 0.5 * st.params.Omega * parity_sign(st.parity);
    const double a = st.weights.alpha, b = st.weights.beta;
    ChannelEnergies ch;
    ch.omega_aa = pref * a * a * overlap_flip(Packet::Polaron, Packet::Polaron, st.shape, st.params);
    ch.omega_bb =
        pref * b * b * overlap_flip(Packet::Antipolaron, Packet::Antipolaron, st.shape, st.params);
    ch.omega_ab =
        pref * a * b * overlap_flip(Packet::Polaron, Packet::Antipolaron, st.shape, st.params);
    return ch;
}

}  // namespace rabi
