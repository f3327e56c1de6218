#pragma once

#include "fcat/model.hpp"
#include "fcat/operator_core.hpp"
#include "fcat/term_sum.hpp"

namespace fcat {

enum class Frame { Lab, Floquet, Sideband, Effective, EffectiveRotating };

struct HamiltonianSpec {
    Frame frame = Frame::Lab;
    SystemParams params;
    DerivedParams derived;
    int harmonic_cutoff = 20;

    static HamiltonianSpec make(Frame frame, const SystemParams& params, Conventions conventions = {},
                                int harmonic_cutoff = 20);
    bool is_effective() const { return frame == Frame::Effective || frame == Frame::EffectiveRotating; }
    SpaceLayout layout() const;
    void validate() const;
};

enum class FrameKind { U1, U2, Uaux, ExpS, Utot };

// Layout sites
constexpr std::size_t kQubit1 = 0;
constexpr std::size_t kQubit2 = 1;
constexpr std::size_t kCavity = 2;
constexpr std::size_t kMagnonFull = 3;
constexpr std::size_t kMagnonEff = 2;

Operator h_total(const HamiltonianSpec& spec, double t);
Operator h_fram(const HamiltonianSpec& spec, double t);
Operator h_sideband(const HamiltonianSpec& spec, double t);
Operator h_eff(const HamiltonianSpec& spec);
Operator h_eff_rotating(const HamiltonianSpec& spec, double t);

TermSum h_total_terms(const HamiltonianSpec& spec);
TermSum h_fram_terms(const HamiltonianSpec& spec);
TermSum h_sideband_terms(const HamiltonianSpec& spec);
TermSum h_eff_rotating_terms(const HamiltonianSpec& spec);

// pieces of the cavity elimination on the 4-factor layout
Operator free_hamiltonian_h0(const HamiltonianSpec& spec);
Operator coupling_v(const HamiltonianSpec& spec);
Operator generator_s(const HamiltonianSpec& spec);

// joint qubit operator A = Z1 + Z2 e^{i Phi} on the 3-factor layout
Operator joint_operator_a(const HamiltonianSpec& spec);

// drive phases theta_j(t) = (Omega_fj / omega_fj) sin(omega_fj t + phase_j)
double drive_theta(const SystemParams& p, int qubit, double t);

Operator frame_unitary(FrameKind kind, const HamiltonianSpec& spec, double t);

// Maps a full-model state from the U1 U2 frame into the effective frame: e^{S} U_aux^dag... applied as
// psi_eff = e^{S} exp(-i H0 t) psi_fram, with e^{S} precomputed once.
class EffectiveFrameMap {
public:
    explicit EffectiveFrameMap(const HamiltonianSpec& spec);
    VectorXcd from_floquet(const VectorXcd& psi_fram, double t) const;
    VectorXcd from_lab(const VectorXcd& psi_lab, double t) const;
    MatrixXcd density_from_floquet(const MatrixXcd& rho_fram, double t) const;
    const MatrixXcd& exp_s() const { return exp_s_; }

private:
    HamiltonianSpec spec_;
    MatrixXcd exp_s_;
    Eigen::VectorXd h0_diag_;
};

} // namespace fcat
