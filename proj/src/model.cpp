#include "fcat/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fcat {

void SystemParams::validate() const {
    const double values[] = {omega_q1, omega_q2, omega_c, omega_m, g1, g2, g3, Omega_f1, Omega_f2,
                             omega_f1, omega_f2, gamma_q1, gamma_q2, kappa_m, kappa_a};
    const char* names[] = {"omega_q1", "omega_q2", "omega_c", "omega_m", "g1", "g2", "g3", "Omega_f1",
                           "Omega_f2", "omega_f1", "omega_f2", "gamma_q1", "gamma_q2", "kappa_m", "kappa_a"};
    for (std::size_t i = 0; i < std::size(values); ++i) {
        if (!std::isfinite(values[i])) throw ModelError(std::string(names[i]) + " is not finite");
        if (values[i] < 0.0) throw ModelError(std::string(names[i]) + " must be >= 0");
    }
    if (!std::isfinite(phi)) throw ModelError("phi is not finite");
    if (n_cavity < 2 || n_magnon < 2) throw ModelError("Fock truncations must be >= 2");
}

std::string to_string(DetuningSign s) { return s == DetuningSign::Signed ? "signed" : "magnitude"; }

std::string to_string(AlphaScaling s) { return s == AlphaScaling::Eta ? "eta" : "one_minus_i"; }

DetuningSign parse_detuning_sign(const std::string& s) {
    if (s == "signed") return DetuningSign::Signed;
    if (s == "magnitude") return DetuningSign::Magnitude;
    throw std::invalid_argument("unknown delta_cm convention '" + s + "' (signed|magnitude)");
}

AlphaScaling parse_alpha_scaling(const std::string& s) {
    if (s == "eta") return AlphaScaling::Eta;
    if (s == "one_minus_i") return AlphaScaling::OneMinusI;
    throw std::invalid_argument("unknown alpha scaling '" + s + "' (eta|one_minus_i)");
}

bool RegimeReport::all_satisfied() const {
    return std::all_of(checks.begin(), checks.end(), [](const RegimeCheck& c) { return c.satisfied; });
}

namespace {

double bessel_series(int n, double x) {
    const double h = 0.5 * x;
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= h / k;
    double sum = term;
    for (int k = 0; k < 200; ++k) {
        term *= -h * h / ((k + 1.0) * (k + 1.0 + n));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Miller's backward recurrence normalized by J0 + 2 sum J_2k = 1
double bessel_backward(int n, double x) {
    const int top = std::max(n, int(x));
    int start = top + 30 + int(std::sqrt(40.0 * top));
    if (start % 2) ++start;
    double next = 0.0, cur = 1e-30, result = 0.0, even_sum = 0.0;
    for (int j = start; j > 0; --j) {
        const double prev = 2.0 * j / x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{j-1}
        if (j - 1 == n) result = cur;
        if ((j - 1) % 2 == 0 && j - 1 > 0) even_sum += cur;
        if (std::abs(cur) > 1e200) {
            cur *= 1e-200;
            next *= 1e-200;
            result *= 1e-200;
            even_sum *= 1e-200;
        }
    }
    const double norm = cur + 2.0 * even_sum;
    return result / norm;
}

} // namespace

double bessel_j(int order, double x) {
    if (order < 0 || order > 64) throw std::out_of_range("bessel_j order must be in [0, 64]");
    if (!(std::abs(x) <= 50.0)) throw std::out_of_range("bessel_j argument must satisfy |x| <= 50");
    const double sign = (x < 0.0 && order % 2 == 1) ? -1.0 : 1.0;
    const double ax = std::abs(x);
    if (ax == 0.0) return order == 0 ? 1.0 : 0.0;
    return sign * (ax <= 1.0 ? bessel_series(order, ax) : bessel_backward(order, ax));
}

int select_sideband(const SystemParams& params, double delta_guess) {
    auto one = [&](double omega_f) {
        if (!(omega_f > 0.0)) throw ModelError("drive frequency must be positive");
        const double ratio = (params.omega_c - delta_guess) / omega_f;
        // nearest odd harmonic 2 n0 - 1, ties resolved upward
        const double n0 = std::floor((ratio + 1.0) / 2.0 + 0.5);
        if (n0 < 1.0) throw ModelError("no valid sideband: rounding rule gives n0 < 1");
        return int(n0);
    };
    const int n1 = one(params.omega_f1);
    const int n2 = one(params.omega_f2);
    if (n1 != n2) throw ModelError("drives select different sideband orders");
    return n1;
}

DerivedParams derive_params(const SystemParams& p, Conventions conventions, Diagnostics* diag) {
    p.validate();
    DerivedParams d;
    d.conventions = conventions;
    if (!(p.omega_f1 > 0.0) || !(p.omega_f2 > 0.0)) throw ModelError("drive frequencies must be positive");
    if (std::abs(p.omega_f1 - p.omega_f2) > 1e-9 * std::max(p.omega_f1, p.omega_f2))
        throw ModelError("the effective model needs equal drive frequencies");
    d.mu1 = 2.0 * p.Omega_f1 / p.omega_f1;
    d.mu2 = 2.0 * p.Omega_f2 / p.omega_f2;
    d.n0 = select_sideband(p, 0.0);
    const int k = d.harmonic();
    d.delta = p.omega_c - k * p.omega_f1;
    const double dcm = p.omega_c - p.omega_m;
    d.delta_cm = conventions.delta_cm == DetuningSign::Signed ? dcm : std::abs(dcm);
    d.G1 = p.g1 * bessel_j(k, d.mu1) / 2.0;
    d.G2 = p.g2 * bessel_j(k, d.mu2) / 2.0;
    const double scale = std::max(std::abs(d.G1), std::abs(d.G2));
    if (std::abs(d.G1 - d.G2) > 1e-9 * scale)
        throw ModelError("asymmetric effective couplings: G1 = " + std::to_string(d.G1) +
                         ", G2 = " + std::to_string(d.G2));
    d.G = d.G1;
    d.Phi = k * p.phi;
    if (d.delta == 0.0) throw ModelError("sideband detuning delta is zero");
    if (d.delta_cm == 0.0) throw ModelError("cavity-magnon detuning is zero");
    d.Gamma1 = 0.5 * (p.g3 * d.G / d.delta_cm + p.g3 * d.G / d.delta);
    d.Gamma2 = d.Gamma1 * std::polar(1.0, d.Phi);
    d.Gamma3 = -2.0 * d.G * d.G * std::cos(d.Phi) / d.delta;
    if (std::abs(std::cos(d.Phi)) < 1e-15) d.Gamma3 = 0.0;
    d.xi = d.delta - d.delta_cm - p.g3 * p.g3 / d.delta_cm;

    const RegimeReport report = regime_report(p, d);
    for (const auto& c : report.checks)
        if (!c.satisfied)
            emit(diag, "regime", c.name + " ratio " + std::to_string(c.ratio) + " below " +
                                     std::to_string(c.threshold));
    return d;
}

RegimeReport regime_report(const SystemParams& p, const DerivedParams& d, double threshold) {
    RegimeReport r;
    const double inf = std::numeric_limits<double>::infinity();
    auto ratio = [&](double big, double small) { return small == 0.0 ? inf : std::abs(big) / std::abs(small); };
    auto add = [&](std::string name, double value) {
        r.checks.push_back({std::move(name), value, threshold, value >= threshold});
    };
    const double gmax = std::max(p.g1, p.g2);
    add("omega_c / g", ratio(p.omega_c, gmax));
    add("omega_c / (g J0/2)", ratio(p.omega_c, gmax * std::max(std::abs(bessel_j(0, d.mu1)), std::abs(bessel_j(0, d.mu2))) / 2));
    double jmax = 0.0;
    for (int l = 1; l <= 20; ++l) jmax = std::max({jmax, std::abs(bessel_j(l, d.mu1)), std::abs(bessel_j(l, d.mu2))});
    add("omega_f / (omega_q J/2)", ratio(p.omega_f1, std::max(p.omega_q1, p.omega_q2) * jmax / 2));
    for (int n = 1; n <= 3; ++n) {
        const double j2n = std::max(std::abs(bessel_j(2 * n, d.mu1)), std::abs(bessel_j(2 * n, d.mu2)));
        add("|" + std::to_string(2 * n) + " omega_f - omega_c| / (g J" + std::to_string(2 * n) + "/2)",
            ratio(2 * n * p.omega_f1 - p.omega_c, gmax * j2n / 2));
    }
    for (int n = 1; n <= 3; ++n) {
        const int l = 2 * n - 1;
        if (l == d.harmonic()) continue;
        const double jl = std::max(std::abs(bessel_j(l, d.mu1)), std::abs(bessel_j(l, d.mu2)));
        add("|" + std::to_string(l) + " omega_f - omega_c| / (g J" + std::to_string(l) + "/2)",
            ratio(l * p.omega_f1 - p.omega_c, gmax * jl / 2));
    }
    add("|delta| / G", ratio(d.delta, d.G));
    add("|Delta_cm| / g3", ratio(d.delta_cm, p.g3));
    const double gj = gmax * std::abs(bessel_j(d.harmonic(), d.mu1));
    r.delta_over_gJ = ratio(d.delta, gj);
    r.delta_over_G = ratio(d.delta, d.G);
    return r;
}

namespace {

SystemParams paper_common(double f_ghz, double c_ghz, double m_ghz) {
    SystemParams p;
    p.omega_f1 = p.omega_f2 = f_ghz * kGHz;
    p.Omega_f1 = p.Omega_f2 = 0.92 * f_ghz * kGHz;
    p.omega_c = c_ghz * kGHz;
    p.omega_m = m_ghz * kGHz;
    p.omega_q1 = p.omega_q2 = 0.0;
    p.g1 = p.g2 = 120.0 * kMHz;
    p.g3 = 20.0 * kMHz;
    p.phi = kPi / 2.0;
    p.n_cavity = 8;
    p.n_magnon = 25;
    return p;
}

} // namespace

SystemParams paper_set_1() { return paper_common(5.0023, 4.827, 5.0); }

SystemParams paper_set_2() { return paper_common(8.0023, 7.827, 8.0); }

} // namespace fcat
