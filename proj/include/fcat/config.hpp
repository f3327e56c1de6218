#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fcat/measures.hpp"
#include "fcat/model.hpp"

namespace fcat {

// Minimal TOML subset: [section] headers, key = value with numbers, strings, booleans and
// single-line arrays of numbers or strings, '#' comments.
struct ConfigValue {
    std::variant<double, std::string, bool, std::vector<double>, std::vector<std::string>> value;
    int line = 0;
    bool is_integer = false;
};

using ConfigSection = std::map<std::string, ConfigValue>;
using ConfigDocument = std::map<std::string, ConfigSection>;  // "" holds top-level keys

ConfigDocument parse_toml_subset(const std::string& text);

enum class Scenario { Fig2Wigner, Fig3DissipationScan, Fig4FidelityTrace, Fig5FullmodelWigner, Custom };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& s);

// Parameters in the units used by config files: frequencies as omega/2pi in GHz, couplings and rates
// as value/2pi in MHz, phase in units of pi, drive strength as Omega_f / omega_f.
struct HumanParams {
    double omega_q1_ghz = 0.0, omega_q2_ghz = 0.0;
    double omega_c_ghz = 0.0, omega_m_ghz = 0.0;
    double omega_f1_ghz = 0.0, omega_f2_ghz = 0.0;
    double drive_ratio1 = 0.0, drive_ratio2 = 0.0;
    double g1_mhz = 0.0, g2_mhz = 0.0, g3_mhz = 0.0;
    double phi_pi = 0.0;
    double gamma_q1_mhz = 0.0, gamma_q2_mhz = 0.0;
    double kappa_m_mhz = 0.0, kappa_a_mhz = 0.0;
    int n_cavity = 8, n_magnon = 25;

    SystemParams to_system() const;
    static HumanParams from_system(const SystemParams& p);
};

struct ScanSettings {
    std::vector<double> rates_mhz = {0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<CatBranch> branches = {CatBranch::PP, CatBranch::MM};
};

struct Fig4Settings {
    double dt_ns = 0.05;
    std::vector<std::string> initial_kinds = {"coherent", "vacuum"};
};

struct IntegratorSettings {
    double rtol = 1e-9;
    double atol = 1e-12;
    double lab_step_ns = 2.5e-5;
    int harmonic_cutoff = 20;
};

struct WignerSettings {
    double extent = 4.0;
    int points = 101;
    WignerMethod method = WignerMethod::Laguerre;
};

struct ScenarioConfig {
    Scenario scenario = Scenario::Fig2Wigner;
    std::string preset;  // empty when parameters come only from the file
    HumanParams human;
    SystemParams params;
    double t_final_ns = 40.0;
    int time_points = 2;
    WignerSettings wigner;
    ScanSettings scan;
    Fig4Settings fig4;
    IntegratorSettings integrator;
    Conventions conventions;
    std::string output_dir = "out";

    GridSpec grid() const { return GridSpec::square(wigner.extent, wigner.points); }
};

std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);

// Non-empty fields replace the file's top-level keys; [params] keys still apply on top of a preset.
struct ConfigOverrides {
    std::string scenario;
    std::string preset;
};

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin = "<string>",
                                 const ConfigOverrides& overrides = {});
ScenarioConfig parse_config(const std::string& path, const ConfigOverrides& overrides = {});

nlohmann::json config_to_json(const ScenarioConfig& cfg);
// SHA-256 over the canonical JSON of the resolved config, output directory excluded.
std::string config_hash(const ScenarioConfig& cfg);
std::string sha256_hex(const std::string& data);

} // namespace fcat
