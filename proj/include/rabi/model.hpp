#pragma once
#include <stdexcept>
#include <string>

namespace rabi {

// Couplings and frequencies are expressed in units of the qubit splitting
// Omega; Omega itself is kept as a field so formulas stay explicit.
struct ModelParams {
    double omega = 1.0;
    double Omega = 1.0;
    double g = 0.0;

    void validate() const {
        if (!(omega > 0.0)) throw std::domain_error("omega must be > 0");
        if (!(Omega > 0.0)) throw std::domain_error("Omega must be > 0");
        if (!(g >= 0.0)) throw std::domain_error("g must be >= 0");
    }
};

enum class Parity : int { Negative = -1, Positive = +1 };

inline int parity_sign(Parity p) { return static_cast<int>(p); }

// Dimensionless displacement of the spin-dependent oscillator potential.
double gprime(const ModelParams& p);

// Constant energy offset of the single-well reduction.
double epsilon0(const ModelParams& p);

// Low-frequency critical coupling sqrt(omega*Omega)/2.
double gc0(double omega, double Omega = 1.0);

// Finite-frequency closed-form critical coupling scale.
double gc(double omega, double Omega = 1.0);

enum class GcfVariant { LowFreq, FullRange };

// Fractional-power fits of the QFI-peak coupling; `warning` (optional) is set
// when omega/Omega falls outside the variant's fitted validity window.
double gcF(double omega, double Omega, GcfVariant variant,
           std::string* warning = nullptr);

}  // namespace rabi
