#pragma once
#include "rabi/model.hpp"
#include "rabi/oscillator.hpp"

namespace rabi {

// Shape of the two-packet trial state: displacement renormalizations zeta,
// width renormalizations xi, and linear asymmetry slopes delta.
struct PolaronShape {
    double zeta_a = 1.0, zeta_b = 1.0;
    double xi_a = 1.0, xi_b = 1.0;
    double delta_a = 0.0, delta_b = 0.0;
};

struct PolaronWeights {
    double alpha = 1.0;
    double beta = 0.0;
};

struct TrialState {
    PolaronShape shape;
    PolaronWeights weights;
    ModelParams params;
    Parity parity = Parity::Negative;
};

enum class Packet { Polaron, Antipolaron };

// Optimizer box on |delta|: keeps the linear prefactor positive around the
// packet center. `div` selects how many width scales the guard covers.
double delta_box_limit(double xi, double div);

// Gaussian center of a packet on the spin-up axis (Polaron: -zeta_a*g').
double packet_center(Packet which, const PolaronShape& s, const ModelParams& p);

// (1 + delta*(x-center)) * (xi/pi)^(1/4) * exp(-xi*(x-center)^2/2)
double eval_packet(Packet which, const PolaronShape& s, const ModelParams& p, double x);

enum class PacketDeriv { Position, Center, Width, Slope };

// Analytic partial derivatives of eval_packet (d/dx, d/dcenter, d/dxi, d/ddelta).
double eval_packet_deriv(Packet which, const PolaronShape& s, const ModelParams& p,
                         double x, PacketDeriv kind);

// <phi_a | phi_b> with both packets on the same spin axis; closed form.
double overlap_same(Packet a, Packet b, const PolaronShape& s, const ModelParams& p);

// <phi_a | phi_b(-x)> against the space-inverted partner packet; closed form.
double overlap_flip(Packet a, Packet b, const PolaronShape& s, const ModelParams& p);

// <phi_a | h+ | phi_b> with h+ = omega*(p^2 + (x+g')^2)/2; closed form.
double hplus_element(Packet a, Packet b, const PolaronShape& s, const ModelParams& p);

// Peak of |eval_packet| and the asymmetry-shifted displacement factors.
double peak_position(Packet which, const PolaronShape& s, const ModelParams& p);
double zeta_delta(Packet which, const PolaronShape& s, const ModelParams& p);
double zeta_peak(Packet which, const PolaronShape& s, const ModelParams& p);

// Spin-up component  alpha*phi_a(x) + beta*phi_b(x)  (normalized to 1 when the
// weights came from the energy solver), and its parity partner.
double psi_plus(const TrialState& st, double x);
double psi_minus(const TrialState& st, double x);
double psi_plus_dx(const TrialState& st, double x);

struct Observables {
    double photon = 0.0;
    double sigma_x = 0.0;
    double coupling_corr = 0.0;
};

// Quadrature expectations on the spin-up component; p^2 via analytic d/dx.
Observables observables(const TrialState& st, const QuadratureGrid& grid);

struct InducedPotential {
    double value = 0.0;
    bool defined = false;  // false inside node-guard neighborhoods
};

// (Omega/omega) * psi_-(x)/psi_+(x) diagnostic.
InducedPotential induced_potential(const TrialState& st, double x, double psi_plus_max);

struct ChannelEnergies {
    double omega_aa = 0.0;
    double omega_bb = 0.0;
    double omega_ab = 0.0;  // one of the two equal cross channels
};

// Tunneling energy split into packet channels; aa + bb + 2*ab is the total.
ChannelEnergies channel_energies(const TrialState& st);

}  // namespace rabi
