#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcat/config.hpp"
#include "fcat/dynamics.hpp"
#include "fcat/measures.hpp"

namespace fcat {

constexpr const char* kToolVersion = "1.0.0";

struct BranchResult {
    CatBranch branch = CatBranch::PP;
    double probability = 0.0;
    double fidelity = 0.0;  // against cat4((1-i) eta1, branch)
    QuantumState state;     // conditioned magnon state in the rotating frame of the effective model
    CatAmplitudeEstimate amplitude;
};

struct EffectiveRun {
    double t = 0.0;
    PropagatorParams propagator;
    std::array<BranchResult, 4> branches;  // order pp, pm, mp, mm
    IntegratorStats stats;
    double probability_sum = 0.0;
};

// Evolves |+,+,0> under the rotating-frame effective Hamiltonian and conditions on all four qubit outcomes.
EffectiveRun run_effective(const SystemParams& params, Conventions conventions, double t,
                           const IntegratorOptions& options = {});

// Lindblad evolution in the auxiliary frame with the effective channel set; results rotated into the
// effective-model rotating frame before conditioning.
EffectiveRun run_effective_dissipative(const SystemParams& params, Conventions conventions, double t,
                                       const IntegratorOptions& options = {});

struct ScanPoint {
    double gamma_q_mhz = 0.0, kappa_m_mhz = 0.0, kappa_a_mhz = 0.0;
    std::array<double, 4> fidelity{};  // indexed by CatBranch
    IntegratorStats stats;
};

struct ScanResult {
    std::vector<double> rates_mhz;
    std::vector<ScanPoint> points;  // gamma_q outer, kappa_m, kappa_a inner
    std::array<double, 4> unitary_fidelity{};

    const ScanPoint& at(std::size_t i_gamma, std::size_t i_kappa_m, std::size_t i_kappa_a) const;
};

ScanResult run_dissipation_scan(const SystemParams& base, Conventions conventions, double t,
                                const std::vector<double>& rates_mhz, const IntegratorOptions& options = {},
                                int workers = 1);

struct TraceResult {
    std::string initial_kind;  // "coherent" or "vacuum"
    std::vector<double> times;
    std::vector<double> fidelity;
    IntegratorStats stats;
};

// Full model integrated in the drive frame (exact transformation of the total Hamiltonian), mapped into the
// effective frame and compared with the effective dynamics at every output time.
TraceResult run_fidelity_trace(const SystemParams& params, Conventions conventions, double t_final, double dt,
                               const std::string& initial_kind, const IntegratorOptions& options = {},
                               int harmonic_cutoff = 20);

struct SpectrumPeak {
    double angular_frequency = 0.0;  // rad/ns
    double resolution = 0.0;         // rad/ns, bin spacing
    double amplitude = 0.0;
};

// Dominant non-DC component of a uniformly sampled real signal (mean removed).
SpectrumPeak dominant_frequency(const std::vector<double>& samples, double dt);

struct LabRun {
    SystemParams params;
    double t = 0.0;
    VectorXcd psi;  // lab-frame state on (qubit1, qubit2, cavity, magnon)
    IntegratorStats stats;
};

// Literal fixed-step integration of the total Hamiltonian from |+,+> with vacuum cavity and magnon.
LabRun run_lab_frame(const SystemParams& params, double t, double step);

struct MappedRun {
    Conventions conventions;
    PropagatorParams propagator;
    std::array<BranchResult, 4> branches;
    double predicted_lobe_radius = 0.0;  // sqrt(2) |eta1|
};

// Maps a lab-frame state into the effective frame with the given conventions, traces out the cavity and
// conditions on every qubit outcome.
MappedRun map_lab_state(const LabRun& run, Conventions conventions);

double reported_amplitude(double lobe_radius, AlphaScaling scaling);

struct PinningRow {
    Conventions conventions;
    double measured_lobe_radius = 0.0;
    double predicted_lobe_radius = 0.0;
    double reported_amplitude = 0.0;
    bool lobe_match = false;
    bool amplitude_match = false;
    bool pass() const { return lobe_match && amplitude_match; }
};

struct PinningResult {
    double target_amplitude = 0.0;
    double tolerance = 0.05;
    std::vector<PinningRow> rows;
    std::optional<Conventions> pinned;  // set only when exactly one pair passes
    std::size_t passing = 0;
};

PinningResult pin_conventions(const LabRun& run, double target_amplitude, double tolerance = 0.05);

// Caption amplitudes of the bundled presets.
std::optional<double> caption_amplitude(const std::string& preset);

nlohmann::json derived_to_json(const DerivedParams& d);
nlohmann::json stats_to_json(const IntegratorStats& s);
nlohmann::json base_metadata(const ScenarioConfig& cfg, const std::string& hash, const Diagnostics& diag);

struct RunOptions {
    std::string output_dir;
    int workers = 1;
    bool oracle_lab_frame = false;
};

// Runs the configured scenario, writes its outputs and metadata.json, and returns the metadata.
nlohmann::json run_scenario(const ScenarioConfig& cfg, const RunOptions& options);

} // namespace fcat
