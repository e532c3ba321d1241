#include "rabi/model.hpp"

#include <cmath>

namespace rabi {

double gprime(const ModelParams& p) {
    p.validate();
    return std::sqrt(2.0) * p.g / p.omega;
}

double epsilon0(const ModelParams& p) {
    const double gp = gprime(p);
    return -0.5 * p.omega * (gp * gp + 1.0);
}

double gc0(double omega, double Omega) {
    return 0.5 * std::sqrt(omega * Omega);
}

double gc(double omega, double Omega) {
    const double a = gc0(omega, Omega);
    return std::sqrt(omega * omega + std::sqrt(omega * omega * omega * omega + a * a * a * a));
}

double gcF(double omega, double Omega, GcfVariant variant, std::string* warning) {
    const double r = omega / Omega;
    const double r23 = std::cbrt(r * r);
    const double r43 = r23 * r23;
    if (variant == GcfVariant::LowFreq) {
        if (warning && r > 0.5)
            *warning = "LowFreq fit evaluated outside its omega/Omega <= 0.5 window";
        return gc0(omega, Omega) * (1.0 + (137.0 / 100.0) * r23 - r43 / 8.0);
    }
    if (warning && r > 3.0)
        *warning = "FullRange fit evaluated outside its omega/Omega <= 3 window";
    return gc0(omega, Omega) * (1.0 + 1.3715 * r23 - 0.1311 * r43 + 0.0184 * r * r);
}

}  // namespace rabi
