#pragma once

#include <array>
#include <string>
#include <vector>

#include "fcat/operator_core.hpp"

namespace fcat {

enum class CatBranch { PP, PM, MP, MM };
enum class QubitOutcome { Plus, Minus };

std::string to_string(CatBranch b);
CatBranch branch_from_outcomes(QubitOutcome q1, QubitOutcome q2);
std::array<CatBranch, 4> all_branches();

struct CatState {
    cplx alpha;
    CatBranch branch;
    double norm_constant = 0.0;         // numeric, applied to the state
    double closed_form_constant = 0.0;  // printed normalization formula, kept for comparison
    int dim = 0;
    QuantumState state;

    double closed_form_relative_difference() const;
};

QuantumState coherent(cplx alpha, int dim, Diagnostics* diag = nullptr);
CatState cat4(cplx alpha, CatBranch branch, int dim, Diagnostics* diag = nullptr);
// normalized |alpha> + |-alpha>
QuantumState cat2_even(cplx alpha, int dim);

struct ConditionedState {
    QuantumState state;
    double probability = 0.0;
};

// Projects the two leading qubit factors onto sigma_x eigenstates and keeps the remaining factors.
ConditionedState project_qubits(const QuantumState& state, QubitOutcome q1, QubitOutcome q2);

double fidelity(const QuantumState& rho, const QuantumState& target);

// rotates a single-mode state by exp(i phase n)
QuantumState rotate_phase(const QuantumState& state, double phase);

struct GridSpec {
    double re_min = -3.5, re_max = 3.5;
    double im_min = -3.5, im_max = 3.5;
    int n_re = 101, n_im = 101;

    static GridSpec square(double extent, int points);
    std::vector<double> re_axis() const;
    std::vector<double> im_axis() const;
    double step_re() const;
    double step_im() const;
};

enum class WignerMethod { Laguerre, DisplacedParity };

struct WignerGrid {
    std::vector<double> re_axis;
    std::vector<double> im_axis;
    Eigen::MatrixXd values;  // rows follow im_axis, columns follow re_axis
    std::string label;
    int truncation = 0;
    double step_re = 0.0, step_im = 0.0;
    double max_imag_residue = 0.0;

    double integral() const;
    double min_value() const;
};

WignerGrid wigner(const QuantumState& rho_m, const GridSpec& grid, WignerMethod method = WignerMethod::Laguerre,
                  Diagnostics* diag = nullptr, int workers = 1);
double wigner_at(const QuantumState& rho_m, cplx alpha, WignerMethod method = WignerMethod::Laguerre);

struct LobePeak {
    double re, im, value;
};

// Off-origin local maxima, refined by quadratic interpolation, strongest first.
std::vector<LobePeak> find_lobe_peaks(const WignerGrid& grid, std::size_t count = 4, double exclude_radius = 0.0);

struct CatAmplitudeEstimate {
    double lobe_radius = 0.0;  // |<m^4>|^{1/4}
    double orientation = 0.0;  // arg<m^4> / 4, radians
    double peak_radius = 0.0;  // mean radius of the four strongest Wigner maxima, 0 if unavailable
};

CatAmplitudeEstimate estimate_cat_amplitude(const QuantumState& rho_m);

double fock_population_outside(const QuantumState& rho_m, int modulus, const std::vector<int>& residues);

} // namespace fcat
