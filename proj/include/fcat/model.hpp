#pragma once

#include <complex>
#include <string>
#include <vector>

#include "fcat/errors.hpp"

namespace fcat {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
// omega/2pi in GHz -> rad/ns, and MHz -> rad/ns
constexpr double kGHz = kTwoPi;
constexpr double kMHz = kTwoPi * 1e-3;

// Lab-frame constants, angular frequencies and rates in rad/ns.
struct SystemParams {
    double omega_q1 = 0.0, omega_q2 = 0.0;
    double omega_c = 0.0;
    double omega_m = 0.0;
    double g1 = 0.0, g2 = 0.0, g3 = 0.0;
    double Omega_f1 = 0.0, Omega_f2 = 0.0;
    double omega_f1 = 0.0, omega_f2 = 0.0;
    double phi = 0.0;
    double gamma_q1 = 0.0, gamma_q2 = 0.0;
    double kappa_m = 0.0;
    double kappa_a = 0.0;
    int n_cavity = 8;
    int n_magnon = 25;

    void validate() const;
};

enum class DetuningSign { Signed, Magnitude };   // Delta_cm = omega_c - omega_m, or its magnitude
enum class AlphaScaling { Eta, OneMinusI };      // reported |alpha| = |eta1| or |(1-i) eta1|

struct Conventions {
    DetuningSign delta_cm = DetuningSign::Signed;
    AlphaScaling alpha = AlphaScaling::Eta;
};

std::string to_string(DetuningSign s);
std::string to_string(AlphaScaling s);
DetuningSign parse_detuning_sign(const std::string& s);
AlphaScaling parse_alpha_scaling(const std::string& s);

struct DerivedParams {
    double mu1 = 0.0, mu2 = 0.0;
    int n0 = 1;
    double delta = 0.0;     // omega_c - (2 n0 - 1) omega_f
    double delta_cm = 0.0;
    double G = 0.0;
    double G1 = 0.0, G2 = 0.0;
    double Phi = 0.0;
    double Gamma1 = 0.0;
    std::complex<double> Gamma2;
    double Gamma3 = 0.0;
    double xi = 0.0;
    Conventions conventions;

    int harmonic() const { return 2 * n0 - 1; }
};

struct RegimeCheck {
    std::string name;
    double ratio;
    double threshold;
    bool satisfied;
};

struct RegimeReport {
    std::vector<RegimeCheck> checks;
    // |delta| compared with g*J and with G = g*J/2; the stated condition is ambiguous by a factor 2
    double delta_over_gJ = 0.0;
    double delta_over_G = 0.0;
    bool all_satisfied() const;
};

double bessel_j(int order, double x);

int select_sideband(const SystemParams& params, double delta_guess = 0.0);

DerivedParams derive_params(const SystemParams& params, Conventions conventions = {},
                            Diagnostics* diag = nullptr);

RegimeReport regime_report(const SystemParams& params, const DerivedParams& dp, double threshold = 5.0);

// Bundled presets "paper-set-1" and "paper-set-2"
SystemParams paper_set_1();
SystemParams paper_set_2();

} // namespace fcat
