#include "fcat/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/sha.h>

namespace fcat {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool is_bare_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

// removes a trailing comment, respecting double-quoted strings
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_str && c == '\\') {
            ++i;
            continue;
        }
        if (c == '"') in_str = !in_str;
        if (c == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

struct Scalar {
    std::variant<double, std::string, bool> v;
    bool is_integer = false;
};

std::string parse_string(const std::string& s, int line) {
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') throw ConfigError("malformed string " + s, line);
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        char c = s[i];
        if (c == '"') throw ConfigError("unescaped quote in string", line);
        if (c == '\\') {
            if (i + 2 >= s.size()) throw ConfigError("dangling escape in string", line);
            const char n = s[++i];
            switch (n) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            default: throw ConfigError(std::string("unsupported escape \\") + n, line);
            }
            continue;
        }
        out += c;
    }
    return out;
}

Scalar parse_scalar(const std::string& raw, int line) {
    const std::string s = trim(raw);
    if (s.empty()) throw ConfigError("missing value", line);
    if (s.front() == '"') return {parse_string(s, line), false};
    if (s == "true") return {true, false};
    if (s == "false") return {false, false};
    std::string num;
    for (char c : s)
        if (c != '_') num += c;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(num, &used);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse value '" + s + "'", line);
    }
    if (used != num.size()) throw ConfigError("cannot parse value '" + s + "'", line);
    if (!std::isfinite(v)) throw ConfigError("non-finite number '" + s + "'", line);
    const bool integer = num.find_first_of(".eE") == std::string::npos;
    return {v, integer};
}

std::vector<std::string> split_array_items(const std::string& body, int line) {
    std::vector<std::string> items;
    std::string cur;
    bool in_str = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
        const char c = body[i];
        if (in_str && c == '\\') {
            cur += c;
            if (i + 1 < body.size()) cur += body[++i];
            continue;
        }
        if (c == '"') in_str = !in_str;
        if (c == ',' && !in_str) {
            items.push_back(trim(cur));
            cur.clear();
            continue;
        }
        if ((c == '[' || c == ']') && !in_str) throw ConfigError("nested arrays are not supported", line);
        cur += c;
    }
    if (in_str) throw ConfigError("unterminated string in array", line);
    cur = trim(cur);
    if (!cur.empty()) items.push_back(cur);
    for (const auto& it : items)
        if (it.empty()) throw ConfigError("empty array element", line);
    return items;
}

ConfigValue parse_value(const std::string& raw, int line) {
    const std::string s = trim(raw);
    ConfigValue out;
    out.line = line;
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') throw ConfigError("unterminated array (arrays must fit on one line)", line);
        const auto items = split_array_items(s.substr(1, s.size() - 2), line);
        std::vector<double> nums;
        std::vector<std::string> strs;
        for (const auto& it : items) {
            const Scalar sc = parse_scalar(it, line);
            if (auto d = std::get_if<double>(&sc.v)) nums.push_back(*d);
            else if (auto st = std::get_if<std::string>(&sc.v)) strs.push_back(*st);
            else throw ConfigError("boolean arrays are not supported", line);
        }
        if (!nums.empty() && !strs.empty()) throw ConfigError("mixed-type array", line);
        if (!strs.empty()) out.value = strs;
        else out.value = nums;
        return out;
    }
    const Scalar sc = parse_scalar(s, line);
    std::visit([&](const auto& v) { out.value = v; }, sc.v);
    out.is_integer = sc.is_integer;
    return out;
}

} // namespace

ConfigDocument parse_toml_subset(const std::string& text) {
    ConfigDocument doc;
    doc[""];
    std::string section;
    std::set<std::string> seen_sections;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("malformed section header", line);
            section = trim(s.substr(1, s.size() - 2));
            if (!is_bare_key(section)) throw ConfigError("invalid section name '" + section + "'", line);
            if (!seen_sections.insert(section).second) throw ConfigError("duplicate section [" + section + "]", line);
            doc[section];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line);
        const std::string key = trim(s.substr(0, eq));
        if (!is_bare_key(key)) throw ConfigError("invalid key '" + key + "'", line);
        auto& sec = doc[section];
        if (sec.count(key)) throw ConfigError("duplicate key '" + key + "'", line);
        sec[key] = parse_value(s.substr(eq + 1), line);
    }
    return doc;
}

std::string to_string(Scenario s) {
    switch (s) {
    case Scenario::Fig2Wigner: return "fig2_wigner";
    case Scenario::Fig3DissipationScan: return "fig3_dissipation_scan";
    case Scenario::Fig4FidelityTrace: return "fig4_fidelity_trace";
    case Scenario::Fig5FullmodelWigner: return "fig5_fullmodel_wigner";
    case Scenario::Custom: return "custom";
    }
    return "?";
}

Scenario parse_scenario(const std::string& s) {
    for (Scenario sc : {Scenario::Fig2Wigner, Scenario::Fig3DissipationScan, Scenario::Fig4FidelityTrace,
                        Scenario::Fig5FullmodelWigner, Scenario::Custom})
        if (to_string(sc) == s) return sc;
    if (s.empty()) throw ConfigError("scenario is empty");
    throw ConfigError("unknown scenario '" + s + "'");
}

SystemParams HumanParams::to_system() const {
    SystemParams p;
    p.omega_q1 = omega_q1_ghz * kGHz;
    p.omega_q2 = omega_q2_ghz * kGHz;
    p.omega_c = omega_c_ghz * kGHz;
    p.omega_m = omega_m_ghz * kGHz;
    p.omega_f1 = omega_f1_ghz * kGHz;
    p.omega_f2 = omega_f2_ghz * kGHz;
    p.Omega_f1 = drive_ratio1 * p.omega_f1;
    p.Omega_f2 = drive_ratio2 * p.omega_f2;
    p.g1 = g1_mhz * kMHz;
    p.g2 = g2_mhz * kMHz;
    p.g3 = g3_mhz * kMHz;
    p.phi = phi_pi * kPi;
    p.gamma_q1 = gamma_q1_mhz * kMHz;
    p.gamma_q2 = gamma_q2_mhz * kMHz;
    p.kappa_m = kappa_m_mhz * kMHz;
    p.kappa_a = kappa_a_mhz * kMHz;
    p.n_cavity = n_cavity;
    p.n_magnon = n_magnon;
    return p;
}

HumanParams HumanParams::from_system(const SystemParams& p) {
    HumanParams h;
    h.omega_q1_ghz = p.omega_q1 / kGHz;
    h.omega_q2_ghz = p.omega_q2 / kGHz;
    h.omega_c_ghz = p.omega_c / kGHz;
    h.omega_m_ghz = p.omega_m / kGHz;
    h.omega_f1_ghz = p.omega_f1 / kGHz;
    h.omega_f2_ghz = p.omega_f2 / kGHz;
    h.drive_ratio1 = p.omega_f1 > 0.0 ? p.Omega_f1 / p.omega_f1 : 0.0;
    h.drive_ratio2 = p.omega_f2 > 0.0 ? p.Omega_f2 / p.omega_f2 : 0.0;
    h.g1_mhz = p.g1 / kMHz;
    h.g2_mhz = p.g2 / kMHz;
    h.g3_mhz = p.g3 / kMHz;
    h.phi_pi = p.phi / kPi;
    h.gamma_q1_mhz = p.gamma_q1 / kMHz;
    h.gamma_q2_mhz = p.gamma_q2 / kMHz;
    h.kappa_m_mhz = p.kappa_m / kMHz;
    h.kappa_a_mhz = p.kappa_a / kMHz;
    h.n_cavity = p.n_cavity;
    h.n_magnon = p.n_magnon;
    return h;
}

std::vector<std::string> preset_names() { return {"paper-set-1", "paper-set-2"}; }

std::string preset_text(const std::string& name) {
    auto body = [](const char* f, const char* c, const char* m) {
        return std::string("[params]\n") + "omega_f_ghz = " + f + "\n" + "drive_ratio = 0.92\n" +
               "omega_c_ghz = " + c + "\n" + "omega_m_ghz = " + m + "\n" +
               "omega_q_ghz = 0.0\n"
               "g_mhz = 120.0\n"
               "g3_mhz = 20.0\n"
               "phi_pi = 0.5\n"
               "gamma_q_mhz = 0.0\n"
               "kappa_m_mhz = 0.0\n"
               "kappa_a_mhz = 0.0\n"
               "n_cavity = 8\n"
               "n_magnon = 25\n";
    };
    if (name == "paper-set-1") return body("5.0023", "4.827", "5.0");
    if (name == "paper-set-2") return body("8.0023", "7.827", "8.0");
    throw ConfigError("unknown preset '" + name + "' (paper-set-1|paper-set-2)");
}

namespace {

double preset_time(const std::string& preset) { return preset == "paper-set-2" ? 50.0 : 40.0; }

class SectionReader {
public:
    SectionReader(const ConfigDocument& doc, const std::string& name) : name_(name) {
        auto it = doc.find(name);
        if (it != doc.end()) sec_ = &it->second;
    }

    const ConfigValue* find(const std::string& key) {
        if (!sec_) return nullptr;
        auto it = sec_->find(key);
        if (it == sec_->end()) return nullptr;
        used_.insert(key);
        return &it->second;
    }

    bool has(const std::string& key) const { return sec_ && sec_->count(key); }

    bool number(const std::string& key, double& out) {
        const ConfigValue* v = find(key);
        if (!v) return false;
        const double* d = std::get_if<double>(&v->value);
        if (!d) throw ConfigError(where(key) + " must be a number", v->line);
        out = *d;
        return true;
    }

    bool integer(const std::string& key, int& out) {
        const ConfigValue* v = find(key);
        if (!v) return false;
        const double* d = std::get_if<double>(&v->value);
        if (!d || !v->is_integer || std::abs(*d) > 1e9) throw ConfigError(where(key) + " must be an integer", v->line);
        out = int(*d);
        return true;
    }

    bool string(const std::string& key, std::string& out) {
        const ConfigValue* v = find(key);
        if (!v) return false;
        const std::string* s = std::get_if<std::string>(&v->value);
        if (!s) throw ConfigError(where(key) + " must be a string", v->line);
        out = *s;
        return true;
    }

    bool numbers(const std::string& key, std::vector<double>& out) {
        const ConfigValue* v = find(key);
        if (!v) return false;
        if (auto a = std::get_if<std::vector<double>>(&v->value)) out = *a;
        else throw ConfigError(where(key) + " must be an array of numbers", v->line);
        return true;
    }

    bool strings(const std::string& key, std::vector<std::string>& out) {
        const ConfigValue* v = find(key);
        if (!v) return false;
        if (auto a = std::get_if<std::vector<std::string>>(&v->value)) out = *a;
        else if (auto a2 = std::get_if<std::vector<double>>(&v->value); a2 && a2->empty()) out.clear();
        else throw ConfigError(where(key) + " must be an array of strings", v->line);
        return true;
    }

    int line(const std::string& key) const {
        if (!sec_) return 0;
        auto it = sec_->find(key);
        return it == sec_->end() ? 0 : it->second.line;
    }

    // shared key sets both members, individual keys set one; giving both forms is an error
    void pair(const std::string& shared, const std::string& k1, const std::string& k2, double& v1, double& v2) {
        if (has(shared) && (has(k1) || has(k2)))
            throw ConfigError(where(shared) + " conflicts with " + k1 + "/" + k2, line(shared));
        double s = 0.0;
        if (number(shared, s)) v1 = v2 = s;
        number(k1, v1);
        number(k2, v2);
    }

    void reject_unknown() const {
        if (!sec_) return;
        for (const auto& [k, v] : *sec_)
            if (!used_.count(k)) throw ConfigError("unknown key '" + k + "' in " + label(), v.line);
    }

    std::string where(const std::string& key) const { return label() + "." + key; }

private:
    std::string label() const { return name_.empty() ? "top level" : "[" + name_ + "]"; }

    std::string name_;
    const ConfigSection* sec_ = nullptr;
    std::set<std::string> used_;
};

void read_params(SectionReader& r, HumanParams& h) {
    r.pair("omega_q_ghz", "omega_q1_ghz", "omega_q2_ghz", h.omega_q1_ghz, h.omega_q2_ghz);
    r.pair("omega_f_ghz", "omega_f1_ghz", "omega_f2_ghz", h.omega_f1_ghz, h.omega_f2_ghz);
    r.pair("drive_ratio", "drive_ratio1", "drive_ratio2", h.drive_ratio1, h.drive_ratio2);
    r.pair("g_mhz", "g1_mhz", "g2_mhz", h.g1_mhz, h.g2_mhz);
    r.pair("gamma_q_mhz", "gamma_q1_mhz", "gamma_q2_mhz", h.gamma_q1_mhz, h.gamma_q2_mhz);
    r.number("omega_c_ghz", h.omega_c_ghz);
    r.number("omega_m_ghz", h.omega_m_ghz);
    r.number("g3_mhz", h.g3_mhz);
    r.number("phi_pi", h.phi_pi);
    r.number("kappa_m_mhz", h.kappa_m_mhz);
    if (r.has("kappa_a_mhz") && r.has("kappa_c_mhz"))
        throw ConfigError("kappa_a_mhz and kappa_c_mhz name the same rate; give one", r.line("kappa_c_mhz"));
    r.number("kappa_a_mhz", h.kappa_a_mhz);
    r.number("kappa_c_mhz", h.kappa_a_mhz);
    r.integer("n_cavity", h.n_cavity);
    r.integer("n_magnon", h.n_magnon);
}

void check_range(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void validate_config(const ScenarioConfig& c) {
    const HumanParams& h = c.human;
    const double nonneg[] = {h.omega_q1_ghz, h.omega_q2_ghz, h.omega_c_ghz, h.omega_m_ghz, h.g1_mhz, h.g2_mhz,
                             h.g3_mhz, h.drive_ratio1, h.drive_ratio2, h.gamma_q1_mhz, h.gamma_q2_mhz,
                             h.kappa_m_mhz, h.kappa_a_mhz};
    for (double v : nonneg) check_range(v >= 0.0, "frequencies, couplings and rates must be >= 0");
    check_range(h.omega_f1_ghz > 0.0 && h.omega_f2_ghz > 0.0, "drive frequencies omega_f_ghz must be > 0");
    check_range(h.omega_c_ghz > 0.0 && h.omega_m_ghz > 0.0, "omega_c_ghz and omega_m_ghz must be > 0");
    check_range(h.omega_c_ghz < 1000.0 && h.omega_m_ghz < 1000.0 && h.omega_f1_ghz < 1000.0 && h.omega_f2_ghz < 1000.0,
                "frequencies above 1000 GHz look like a unit mistake (values are omega/2pi in GHz)");
    check_range(h.g1_mhz < 1e5 && h.g2_mhz < 1e5 && h.g3_mhz < 1e5, "couplings above 1e5 MHz look like a unit mistake");
    check_range(h.drive_ratio1 < 10.0 && h.drive_ratio2 < 10.0, "drive_ratio must be < 10");
    check_range(h.n_cavity >= 2 && h.n_cavity <= 64, "n_cavity must be in [2, 64]");
    check_range(h.n_magnon >= 2 && h.n_magnon <= 128, "n_magnon must be in [2, 128]");
    check_range(c.t_final_ns > 0.0 && c.t_final_ns <= 1e4, "t_final_ns must be in (0, 1e4]");
    check_range(c.time_points >= 2 && c.time_points <= 100000, "time_points must be in [2, 100000]");
    check_range(c.wigner.extent > 0.0 && c.wigner.extent <= 20.0, "wigner extent must be in (0, 20]");
    check_range(c.wigner.points >= 3 && c.wigner.points <= 1001, "wigner points must be in [3, 1001]");
    check_range(!c.scan.rates_mhz.empty(), "scan rates_mhz must not be empty");
    for (double r : c.scan.rates_mhz) check_range(r >= 0.0 && r < 1e4, "scan rates must be in [0, 1e4) MHz");
    check_range(!c.scan.branches.empty(), "scan branches must not be empty");
    check_range(c.fig4.dt_ns > 0.0 && c.fig4.dt_ns <= c.t_final_ns, "fig4 dt_ns must be in (0, t_final_ns]");
    check_range(!c.fig4.initial_kinds.empty(), "fig4 initial_kinds must not be empty");
    for (const auto& k : c.fig4.initial_kinds)
        check_range(k == "coherent" || k == "vacuum", "fig4 initial_kinds entries must be coherent|vacuum");
    check_range(c.integrator.rtol > 0.0 && c.integrator.rtol < 1.0, "rtol must be in (0, 1)");
    check_range(c.integrator.atol > 0.0 && c.integrator.atol < 1.0, "atol must be in (0, 1)");
    check_range(c.integrator.lab_step_ns > 0.0 && c.integrator.lab_step_ns <= 1e-2, "lab_step_ns must be in (0, 0.01]");
    check_range(c.integrator.harmonic_cutoff >= 1 && c.integrator.harmonic_cutoff <= 64,
                "harmonic_cutoff must be in [1, 64]");
    check_range(!c.output_dir.empty(), "output dir must not be empty");
}

CatBranch parse_branch(const std::string& s) {
    for (CatBranch b : all_branches())
        if (to_string(b) == s) return b;
    throw ConfigError("unknown branch '" + s + "' (pp|pm|mp|mm)");
}

} // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin,
                                 const ConfigOverrides& overrides) {
    const ConfigDocument doc = parse_toml_subset(text);
    for (const auto& [name, sec] : doc) {
        static const std::set<std::string> known = {"", "params", "time", "wigner", "scan", "fig4",
                                                    "integrator", "conventions", "output"};
        if (!known.count(name)) {
            const int line = sec.empty() ? 0 : sec.begin()->second.line;
            throw ConfigError(origin + ": unknown section [" + name + "]", line);
        }
    }
    ScenarioConfig c;
    try {
        SectionReader top(doc, "");
        std::string scenario;
        const bool has_scenario = top.string("scenario", scenario);
        if (!overrides.scenario.empty()) scenario = overrides.scenario;
        else if (!has_scenario) throw ConfigError("missing required key 'scenario'");
        c.scenario = parse_scenario(scenario);
        top.string("preset", c.preset);
        if (!overrides.preset.empty()) c.preset = overrides.preset;
        if (!c.preset.empty()) {
            const ConfigDocument pdoc = parse_toml_subset(preset_text(c.preset));
            SectionReader pr(pdoc, "params");
            read_params(pr, c.human);
        }
        top.reject_unknown();

        SectionReader params(doc, "params");
        read_params(params, c.human);
        params.reject_unknown();

        SectionReader time(doc, "time");
        c.t_final_ns = c.scenario == Scenario::Fig4FidelityTrace ? 60.0 : preset_time(c.preset);
        time.number("t_final_ns", c.t_final_ns);
        time.integer("time_points", c.time_points);
        time.reject_unknown();

        SectionReader wig(doc, "wigner");
        wig.number("extent", c.wigner.extent);
        wig.integer("points", c.wigner.points);
        std::string method;
        if (wig.string("method", method)) {
            if (method == "laguerre") c.wigner.method = WignerMethod::Laguerre;
            else if (method == "displaced_parity") c.wigner.method = WignerMethod::DisplacedParity;
            else throw ConfigError("wigner.method must be laguerre|displaced_parity", wig.line("method"));
        }
        wig.reject_unknown();

        SectionReader scan(doc, "scan");
        scan.numbers("rates_mhz", c.scan.rates_mhz);
        std::vector<std::string> branches;
        if (scan.strings("branches", branches)) {
            c.scan.branches.clear();
            for (const auto& b : branches) c.scan.branches.push_back(parse_branch(b));
        }
        scan.reject_unknown();

        SectionReader f4(doc, "fig4");
        f4.number("dt_ns", c.fig4.dt_ns);
        f4.strings("initial_kinds", c.fig4.initial_kinds);
        f4.reject_unknown();

        SectionReader integ(doc, "integrator");
        integ.number("rtol", c.integrator.rtol);
        integ.number("atol", c.integrator.atol);
        integ.number("lab_step_ns", c.integrator.lab_step_ns);
        integ.integer("harmonic_cutoff", c.integrator.harmonic_cutoff);
        integ.reject_unknown();

        SectionReader conv(doc, "conventions");
        std::string s;
        if (conv.string("delta_cm", s)) {
            try {
                c.conventions.delta_cm = parse_detuning_sign(s);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what(), conv.line("delta_cm"));
            }
        }
        if (conv.string("alpha_scaling", s)) {
            try {
                c.conventions.alpha = parse_alpha_scaling(s);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what(), conv.line("alpha_scaling"));
            }
        }
        conv.reject_unknown();

        SectionReader out(doc, "output");
        out.string("dir", c.output_dir);
        out.reject_unknown();
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    validate_config(c);
    c.params = c.human.to_system();
    try {
        c.params.validate();
    } catch (const ModelError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return c;
}

ScenarioConfig parse_config(const std::string& path, const ConfigOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path, overrides);
}

nlohmann::json config_to_json(const ScenarioConfig& c) {
    using nlohmann::json;
    const HumanParams& h = c.human;
    json j;
    j["scenario"] = to_string(c.scenario);
    j["preset"] = c.preset;
    j["params"] = {{"omega_q1_ghz", h.omega_q1_ghz}, {"omega_q2_ghz", h.omega_q2_ghz},
                   {"omega_c_ghz", h.omega_c_ghz},   {"omega_m_ghz", h.omega_m_ghz},
                   {"omega_f1_ghz", h.omega_f1_ghz}, {"omega_f2_ghz", h.omega_f2_ghz},
                   {"drive_ratio1", h.drive_ratio1}, {"drive_ratio2", h.drive_ratio2},
                   {"g1_mhz", h.g1_mhz},             {"g2_mhz", h.g2_mhz},
                   {"g3_mhz", h.g3_mhz},             {"phi_pi", h.phi_pi},
                   {"gamma_q1_mhz", h.gamma_q1_mhz}, {"gamma_q2_mhz", h.gamma_q2_mhz},
                   {"kappa_m_mhz", h.kappa_m_mhz},   {"kappa_a_mhz", h.kappa_a_mhz},
                   {"n_cavity", h.n_cavity},         {"n_magnon", h.n_magnon}};
    j["time"] = {{"t_final_ns", c.t_final_ns}, {"time_points", c.time_points}};
    j["wigner"] = {{"extent", c.wigner.extent},
                   {"points", c.wigner.points},
                   {"method", c.wigner.method == WignerMethod::Laguerre ? "laguerre" : "displaced_parity"}};
    std::vector<std::string> branches;
    for (CatBranch b : c.scan.branches) branches.push_back(to_string(b));
    j["scan"] = {{"rates_mhz", c.scan.rates_mhz}, {"branches", branches}};
    j["fig4"] = {{"dt_ns", c.fig4.dt_ns}, {"initial_kinds", c.fig4.initial_kinds}};
    j["integrator"] = {{"rtol", c.integrator.rtol},
                       {"atol", c.integrator.atol},
                       {"lab_step_ns", c.integrator.lab_step_ns},
                       {"harmonic_cutoff", c.integrator.harmonic_cutoff}};
    j["conventions"] = {{"delta_cm", to_string(c.conventions.delta_cm)},
                        {"alpha_scaling", to_string(c.conventions.alpha)}};
    return j;
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
    std::ostringstream os;
    for (unsigned char b : digest) os << std::hex << std::setw(2) << std::setfill('0') << int(b);
    return os.str();
}

std::string config_hash(const ScenarioConfig& cfg) { return sha256_hex(config_to_json(cfg).dump()); }

} // namespace fcat
