#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fcat/hamiltonians.hpp"
#include "fcat/operator_core.hpp"
#include "fcat/term_sum.hpp"

namespace fcat {

enum class Stepping { Adaptive, FixedRK4 };

struct IntegratorOptions {
    Stepping stepping = Stepping::Adaptive;
    double rtol = 1e-9;
    double atol = 1e-12;
    double fixed_step = 1e-3;   // ns, FixedRK4 only
    double initial_step = 0.0;  // 0: automatic
    double max_step = 0.0;      // 0: unbounded
    double min_step = 1e-13;
    long max_steps = 200'000'000;
};

struct IntegratorStats {
    std::string method;
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
    double smallest_step = 0.0;
    double largest_step = 0.0;
    double max_norm_drift = 0.0;   // | ||psi|| - 1 | or | Tr rho - 1 |
    double min_eigenvalue = 0.0;   // density-matrix runs only
};

struct CollapseChannel {
    Operator op;  // carries sqrt(rate)
    std::string label;
};

struct TimeDependentChannel {
    TermSum op;
    std::string label;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<QuantumState> states;
    IntegratorStats stats;
};

using RhsFunction = std::function<void(double t, const MatrixXcd& y, MatrixXcd& dy)>;
using Observer = std::function<void(std::size_t index, double t, const MatrixXcd& y)>;

// Integrates dy/dt = f(t, y) from times.front(), landing exactly on every output time.
IntegratorStats integrate(const RhsFunction& f, MatrixXcd y, const std::vector<double>& times,
                          const IntegratorOptions& options, const Observer& observe);

Trajectory evolve_schrodinger(const TermSum& h, const QuantumState& psi0, const std::vector<double>& times,
                              const IntegratorOptions& options = {});
Trajectory evolve_schrodinger(const std::function<Operator(double)>& h, const QuantumState& psi0,
                              const std::vector<double>& times, const IntegratorOptions& options = {});
// Streams states to an observer instead of storing them.
IntegratorStats evolve_schrodinger_stream(const TermSum& h, const QuantumState& psi0, const std::vector<double>& times,
                                          const IntegratorOptions& options, const Observer& observe);

Trajectory evolve_lindblad(const TermSum& h, const std::vector<CollapseChannel>& channels, const QuantumState& rho0,
                           const std::vector<double>& times, const IntegratorOptions& options = {});
Trajectory evolve_lindblad(const std::function<Operator(double)>& h, const std::vector<CollapseChannel>& channels,
                           const QuantumState& rho0, const std::vector<double>& times,
                           const IntegratorOptions& options = {});
Trajectory evolve_lindblad(const TermSum& h, const std::vector<TimeDependentChannel>& channels,
                           const QuantumState& rho0, const std::vector<double>& times,
                           const IntegratorOptions& options = {});

struct PropagatorParams {
    double Theta = 0.0;
    cplx eta1;
    double eta2 = 0.0;
    cplx alpha;
};

PropagatorParams analytic_propagator(const DerivedParams& dp, double t);
// U(t) = e^{i Theta} exp[eta1 m^dag A^dag - eta1^* m A + i eta2 Z1 Z2] on the 3-factor layout
Operator analytic_propagator_operator(const HamiltonianSpec& spec, double t);

std::vector<CollapseChannel> lab_collapse_channels(const SystemParams& params);
std::vector<CollapseChannel> effective_collapse_channels(const SystemParams& params, const DerivedParams& dp);
// Lab channels expressed in the U1 U2 frame (qubit lowering operators become time dependent).
std::vector<TimeDependentChannel> floquet_frame_collapse_channels(const HamiltonianSpec& spec);

std::vector<double> linspace(double start, double stop, std::size_t count);

} // namespace fcat
