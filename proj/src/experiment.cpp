#include "fcat/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <thread>

#include <fftw3.h>
#include <Eigen/Eigenvalues>

#include "fcat/hamiltonians.hpp"
#include "fcat/io.hpp"

namespace fcat {

namespace {

const cplx I(0.0, 1.0);

constexpr std::array<std::pair<QubitOutcome, QubitOutcome>, 4> kOutcomes = {{
    {QubitOutcome::Plus, QubitOutcome::Plus},
    {QubitOutcome::Plus, QubitOutcome::Minus},
    {QubitOutcome::Minus, QubitOutcome::Plus},
    {QubitOutcome::Minus, QubitOutcome::Minus},
}};

std::size_t branch_index(CatBranch b) { return static_cast<std::size_t>(b); }

// |+,+> tensor |0> on the leading two qubits of a layout whose remaining factors are bosons
VectorXcd plus_plus_vacuum(const SpaceLayout& layout) {
    const Eigen::Index rest = layout.dim() / 4;
    VectorXcd v = VectorXcd::Zero(layout.dim());
    for (int q = 0; q < 4; ++q) v(q * rest) = 0.5;
    return v;
}

IntegratorOptions with_defaults(IntegratorOptions o) {
    o.stepping = Stepping::Adaptive;
    return o;
}

std::vector<double> output_times(double t) {
    if (t < 0.0) throw std::invalid_argument("evolution time must be >= 0");
    return t > 0.0 ? std::vector<double>{0.0, t} : std::vector<double>{0.0};
}

// conditions a state whose leading factors are the two qubits and whose last factor is the magnon
BranchResult condition(const QuantumState& state, std::size_t outcome, const PropagatorParams& prop, double rotate,
                       bool estimate) {
    BranchResult b;
    const auto [q1, q2] = kOutcomes[outcome];
    b.branch = branch_from_outcomes(q1, q2);
    ConditionedState c = project_qubits(state, q1, q2);
    b.probability = c.probability;
    QuantumState m = c.state;
    if (m.layout().size() > 1) m = partial_trace(m, {m.layout().size() - 1});
    if (rotate != 0.0) m = rotate_phase(m, rotate);
    b.state = m;
    const int dim = int(m.dim());
    b.fidelity = fidelity(m, cat4(prop.alpha, b.branch, dim).state);
    if (estimate) b.amplitude = estimate_cat_amplitude(m);
    return b;
}

template <class F>
void parallel_for(std::size_t n, int workers, F&& body) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < n; i = next++) body(i);
            } catch (...) {
                errors[std::size_t(w)] = std::current_exception();
                next = n;
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

EffectiveRun run_effective(const SystemParams& params, Conventions conventions, double t,
                           const IntegratorOptions& options) {
    const HamiltonianSpec spec = HamiltonianSpec::make(Frame::EffectiveRotating, params, conventions);
    const SpaceLayout layout = spec.layout();
    const QuantumState psi0 = QuantumState::pure(layout, plus_plus_vacuum(layout));
    const Trajectory traj = evolve_schrodinger(h_eff_rotating_terms(spec), psi0, output_times(t), with_defaults(options));
    EffectiveRun run;
    run.t = t;
    run.stats = traj.stats;
    run.propagator = analytic_propagator(spec.derived, t);
    for (std::size_t k = 0; k < 4; ++k) {
        run.branches[k] = condition(traj.states.back(), k, run.propagator, 0.0, true);
        run.probability_sum += run.branches[k].probability;
    }
    return run;
}

EffectiveRun run_effective_dissipative(const SystemParams& params, Conventions conventions, double t,
                                       const IntegratorOptions& options) {
    const HamiltonianSpec spec = HamiltonianSpec::make(Frame::Effective, params, conventions);
    const SpaceLayout layout = spec.layout();
    TermSum h(layout);
    h.add(h_eff(spec));
    const auto channels = effective_collapse_channels(params, spec.derived);
    const QuantumState rho0 = QuantumState::pure(layout, plus_plus_vacuum(layout)).as_mixed();
    const Trajectory traj = evolve_lindblad(h, channels, rho0, output_times(t), with_defaults(options));
    EffectiveRun run;
    run.t = t;
    run.stats = traj.stats;
    run.propagator = analytic_propagator(spec.derived, t);
    for (std::size_t k = 0; k < 4; ++k) {
        run.branches[k] = condition(traj.states.back(), k, run.propagator, spec.derived.xi * t, false);
        run.probability_sum += run.branches[k].probability;
    }
    return run;
}

const ScanPoint& ScanResult::at(std::size_t ig, std::size_t im, std::size_t ia) const {
    const std::size_t n = rates_mhz.size();
    return points.at((ig * n + im) * n + ia);
}

ScanResult run_dissipation_scan(const SystemParams& base, Conventions conventions, double t,
                                const std::vector<double>& rates_mhz, const IntegratorOptions& options, int workers) {
    ScanResult res;
    res.rates_mhz = rates_mhz;
    const std::size_t n = rates_mhz.size();
    res.points.resize(n * n * n);
    SystemParams clean = base;
    clean.gamma_q1 = clean.gamma_q2 = clean.kappa_m = clean.kappa_a = 0.0;
    const EffectiveRun unitary = run_effective(clean, conventions, t, options);
    for (std::size_t k = 0; k < 4; ++k) res.unitary_fidelity[branch_index(unitary.branches[k].branch)] = unitary.branches[k].fidelity;
    parallel_for(res.points.size(), workers, [&](std::size_t i) {
        ScanPoint& pt = res.points[i];
        pt.gamma_q_mhz = rates_mhz[i / (n * n)];
        pt.kappa_m_mhz = rates_mhz[(i / n) % n];
        pt.kappa_a_mhz = rates_mhz[i % n];
        SystemParams p = clean;
        p.gamma_q1 = p.gamma_q2 = pt.gamma_q_mhz * kMHz;
        p.kappa_m = pt.kappa_m_mhz * kMHz;
        p.kappa_a = pt.kappa_a_mhz * kMHz;
        const EffectiveRun run = run_effective_dissipative(p, conventions, t, options);
        for (std::size_t k = 0; k < 4; ++k) pt.fidelity[branch_index(run.branches[k].branch)] = run.branches[k].fidelity;
        pt.stats = run.stats;
    });
    return res;
}

TraceResult run_fidelity_trace(const SystemParams& params, Conventions conventions, double t_final, double dt,
                               const std::string& initial_kind, const IntegratorOptions& options, int harmonic_cutoff) {
    if (initial_kind != "coherent" && initial_kind != "vacuum")
        throw std::invalid_argument("initial kind must be coherent or vacuum");
    if (!(dt > 0.0) || !(t_final > 0.0)) throw std::invalid_argument("trace needs t_final > 0 and dt > 0");
    const HamiltonianSpec full = HamiltonianSpec::make(Frame::Floquet, params, conventions, harmonic_cutoff);
    const HamiltonianSpec eff = HamiltonianSpec::make(Frame::Effective, params, conventions);
    const SpaceLayout fl = full.layout();
    const EffectiveFrameMap map(full);

    const VectorXcd lab0 = plus_plus_vacuum(fl);
    VectorXcd fram0;
    if (initial_kind == "coherent") fram0 = map.exp_s().adjoint() * lab0;  // e^{-S} |+,+,0,0>
    else fram0 = frame_unitary(FrameKind::U1, full, 0.0).matrix().adjoint() * lab0;

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h_eff(eff).matrix());
    const VectorXcd coeff = es.eigenvectors().adjoint() * plus_plus_vacuum(eff.layout());

    const std::size_t n = std::size_t(std::llround(t_final / dt)) + 1;
    TraceResult tr;
    tr.initial_kind = initial_kind;
    tr.times = linspace(0.0, dt * double(n - 1), n);
    tr.fidelity.resize(n);
    const int nc = params.n_cavity, nm = params.n_magnon;
    tr.stats = evolve_schrodinger_stream(
        h_fram_terms(full), QuantumState::pure(fl, fram0), tr.times, with_defaults(options),
        [&](std::size_t i, double t, const MatrixXcd& y) {
            const VectorXcd psi = map.from_floquet(y.col(0), t);
            VectorXcd phase(coeff.size());
            for (Eigen::Index k = 0; k < coeff.size(); ++k) phase(k) = std::polar(1.0, -es.eigenvalues()(k) * t) * coeff(k);
            const VectorXcd target = es.eigenvectors() * phase;
            double f = 0.0;
            for (int c = 0; c < nc; ++c) {
                cplx ov = 0.0;
                for (int q = 0; q < 4; ++q)
                    for (int m = 0; m < nm; ++m) ov += std::conj(target(q * nm + m)) * psi((q * nc + c) * nm + m);
                f += std::norm(ov);
            }
            tr.fidelity[i] = f;
        });
    return tr;
}

SpectrumPeak dominant_frequency(const std::vector<double>& samples, double dt) {
    const int n = int(samples.size());
    if (n < 4) throw std::invalid_argument("spectrum needs at least 4 samples");
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= n;
    double* in = fftw_alloc_real(std::size_t(n));
    fftw_complex* out = fftw_alloc_complex(std::size_t(n / 2 + 1));
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    for (int i = 0; i < n; ++i) in[i] = samples[std::size_t(i)] - mean;
    fftw_execute(plan);
    std::vector<double> mag(std::size_t(n / 2 + 1));
    for (int k = 0; k <= n / 2; ++k) mag[std::size_t(k)] = std::hypot(out[k][0], out[k][1]);
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
    std::size_t best = 1;
    for (std::size_t k = 1; k < mag.size(); ++k)
        if (mag[k] > mag[best]) best = k;
    double shift = 0.0;
    if (best > 1 && best + 1 < mag.size()) {
        const double a = mag[best - 1], b = mag[best], c = mag[best + 1];
        const double den = a - 2 * b + c;
        if (den != 0.0) shift = std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
    }
    SpectrumPeak p;
    p.resolution = kTwoPi / (n * dt);
    p.angular_frequency = (double(best) + shift) * p.resolution;
    p.amplitude = 2.0 * mag[best] / n;
    return p;
}

LabRun run_lab_frame(const SystemParams& params, double t, double step) {
    const HamiltonianSpec spec = HamiltonianSpec::make(Frame::Lab, params);
    const SpaceLayout layout = spec.layout();
    IntegratorOptions opt;
    opt.stepping = Stepping::FixedRK4;
    opt.fixed_step = step;
    LabRun run;
    run.params = params;
    run.t = t;
    run.stats = evolve_schrodinger_stream(h_total_terms(spec), QuantumState::pure(layout, plus_plus_vacuum(layout)),
                                          output_times(t), opt,
                                          [&](std::size_t, double, const MatrixXcd& y) { run.psi = y.col(0); });
    return run;
}

MappedRun map_lab_state(const LabRun& run, Conventions conventions) {
    const HamiltonianSpec spec = HamiltonianSpec::make(Frame::Floquet, run.params, conventions);
    const EffectiveFrameMap map(spec);
    VectorXcd psi = map.from_lab(run.psi, run.t);
    psi /= psi.norm();
    const QuantumState state = QuantumState::pure(spec.layout(), psi);
    MappedRun m;
    m.conventions = conventions;
    m.propagator = analytic_propagator(spec.derived, run.t);
    m.predicted_lobe_radius = std::sqrt(2.0) * std::abs(m.propagator.eta1);
    for (std::size_t k = 0; k < 4; ++k) m.branches[k] = condition(state, k, m.propagator, spec.derived.xi * run.t, true);
    return m;
}

double reported_amplitude(double lobe_radius, AlphaScaling scaling) {
    return scaling == AlphaScaling::Eta ? lobe_radius / std::sqrt(2.0) : lobe_radius;
}

PinningResult pin_conventions(const LabRun& run, double target, double tol) {
    PinningResult res;
    res.target_amplitude = target;
    res.tolerance = tol;
    for (DetuningSign sign : {DetuningSign::Signed, DetuningSign::Magnitude}) {
        Conventions c;
        c.delta_cm = sign;
        const MappedRun mapped = map_lab_state(run, c);
        const double measured = mapped.branches[0].amplitude.lobe_radius;
        for (AlphaScaling scaling : {AlphaScaling::Eta, AlphaScaling::OneMinusI}) {
            PinningRow row;
            row.conventions = {sign, scaling};
            row.measured_lobe_radius = measured;
            row.predicted_lobe_radius = mapped.predicted_lobe_radius;
            row.reported_amplitude = reported_amplitude(measured, scaling);
            row.lobe_match = mapped.predicted_lobe_radius > 0.0 &&
                             std::abs(measured - mapped.predicted_lobe_radius) <= tol * mapped.predicted_lobe_radius;
            row.amplitude_match = std::abs(row.reported_amplitude - target) <= tol * target;
            res.rows.push_back(row);
        }
    }
    for (const auto& r : res.rows)
        if (r.pass()) ++res.passing;
    if (res.passing == 1)
        for (const auto& r : res.rows)
            if (r.pass()) res.pinned = r.conventions;
    return res;
}

std::optional<double> caption_amplitude(const std::string& preset) {
    if (preset == "paper-set-1") return 1.007;
    if (preset == "paper-set-2") return 1.2596;
    return std::nullopt;
}

nlohmann::json derived_to_json(const DerivedParams& d) {
    auto mhz = [](double w) { return w / kMHz; };
    return {{"mu1", d.mu1},
            {"mu2", d.mu2},
            {"n0", d.n0},
            {"delta_rad_per_ns", d.delta},
            {"delta_mhz", mhz(d.delta)},
            {"delta_cm_mhz", mhz(d.delta_cm)},
            {"G_mhz", mhz(d.G)},
            {"G1_mhz", mhz(d.G1)},
            {"G2_mhz", mhz(d.G2)},
            {"Phi_rad", d.Phi},
            {"Gamma1_mhz", mhz(d.Gamma1)},
            {"Gamma2_mhz", {mhz(d.Gamma2.real()), mhz(d.Gamma2.imag())}},
            {"Gamma3_mhz", mhz(d.Gamma3)},
            {"xi_mhz", mhz(d.xi)},
            {"xi_rad_per_ns", d.xi}};
}

nlohmann::json stats_to_json(const IntegratorStats& s) {
    return {{"method", s.method},
            {"accepted_steps", s.accepted},
            {"rejected_steps", s.rejected},
            {"rhs_evaluations", s.rhs_evals},
            {"smallest_step_ns", std::isfinite(s.smallest_step) ? s.smallest_step : 0.0},
            {"largest_step_ns", s.largest_step},
            {"max_norm_drift", s.max_norm_drift},
            {"min_eigenvalue", s.min_eigenvalue}};
}

namespace {

nlohmann::json system_to_json(const SystemParams& p) {
    return {{"omega_q1", p.omega_q1}, {"omega_q2", p.omega_q2}, {"omega_c", p.omega_c},   {"omega_m", p.omega_m},
            {"g1", p.g1},             {"g2", p.g2},             {"g3", p.g3},             {"Omega_f1", p.Omega_f1},
            {"Omega_f2", p.Omega_f2}, {"omega_f1", p.omega_f1}, {"omega_f2", p.omega_f2}, {"phi", p.phi},
            {"gamma_q1", p.gamma_q1}, {"gamma_q2", p.gamma_q2}, {"kappa_m", p.kappa_m},   {"kappa_a", p.kappa_a},
            {"n_cavity", p.n_cavity}, {"n_magnon", p.n_magnon}};
}

nlohmann::json propagator_to_json(const PropagatorParams& p, AlphaScaling scaling) {
    return {{"Theta", p.Theta},
            {"eta1", {p.eta1.real(), p.eta1.imag()}},
            {"eta2", p.eta2},
            {"alpha", {p.alpha.real(), p.alpha.imag()}},
            {"lobe_radius", std::abs(p.alpha)},
            {"reported_amplitude", reported_amplitude(std::abs(p.alpha), scaling)}};
}

nlohmann::json branch_to_json(const BranchResult& b, AlphaScaling scaling) {
    nlohmann::json j = {{"branch", to_string(b.branch)},
                        {"probability", b.probability},
                        {"fidelity", b.fidelity},
                        {"purity", b.state.purity()}};
    if (b.amplitude.lobe_radius > 0.0) {
        j["lobe_radius"] = b.amplitude.lobe_radius;
        j["reported_amplitude"] = reported_amplitude(b.amplitude.lobe_radius, scaling);
        j["orientation_deg"] = b.amplitude.orientation * 180.0 / kPi;
        j["peak_radius"] = b.amplitude.peak_radius;
    }
    return j;
}

void write_branch_outputs(const std::filesystem::path& dir, const std::array<BranchResult, 4>& branches,
                          const ScenarioConfig& cfg, const std::string& hash, int workers, Diagnostics& diag,
                          nlohmann::json& meta) {
    CsvWriter table((dir / "branches.csv").string(), hash,
                    {"branch", "probability", "fidelity", "lobe_radius", "reported_amplitude", "orientation_deg"});
    nlohmann::json grids = nlohmann::json::array();
    for (const auto& b : branches) {
        if (b.state.dim() == 0) continue;
        const std::string name = to_string(b.branch);
        WignerGrid g = wigner(b.state, cfg.grid(), cfg.wigner.method, &diag, workers);
        g.label = name;
        write_wigner_csv((dir / ("wigner_" + name + ".csv")).string(), g, hash);
        write_fock_csv((dir / ("fock_" + name + ".csv")).string(), b.state, hash);
        table.cell(name).cell(b.probability).cell(b.fidelity).cell(b.amplitude.lobe_radius);
        table.cell(reported_amplitude(b.amplitude.lobe_radius, cfg.conventions.alpha));
        table.cell(b.amplitude.orientation * 180.0 / kPi);
        table.end_row();
        grids.push_back({{"branch", name},
                         {"file", "wigner_" + name + ".csv"},
                         {"integral", g.integral()},
                         {"min", g.min_value()},
                         {"max_imag_residue", g.max_imag_residue}});
    }
    meta["wigner_grids"] = grids;
}

nlohmann::json diagnostics_to_json(const Diagnostics& diag) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& d : diag) j.push_back({{"code", d.code}, {"message", d.message}});
    return j;
}

} // namespace

nlohmann::json base_metadata(const ScenarioConfig& cfg, const std::string& hash, const Diagnostics& diag) {
    nlohmann::json j;
    j["tool"] = "floquet-cat";
    j["version"] = kToolVersion;
    j["config_hash"] = hash;
    j["scenario"] = to_string(cfg.scenario);
    j["config"] = config_to_json(cfg);
    j["units"] = {{"internal", "angular frequencies and rates in rad/ns, times in ns"},
                  {"ghz_to_rad_per_ns", kGHz},
                  {"mhz_to_rad_per_ns", kMHz},
                  {"phi_pi_to_rad", kPi}};
    j["system_params_rad_per_ns"] = system_to_json(cfg.params);
    const DerivedParams d = derive_params(cfg.params, cfg.conventions);
    j["derived"] = derived_to_json(d);
    const RegimeReport rr = regime_report(cfg.params, d);
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rr.checks)
        checks.push_back({{"name", c.name}, {"ratio", c.ratio}, {"threshold", c.threshold}, {"satisfied", c.satisfied}});
    j["regime"] = {{"checks", checks},
                   {"all_satisfied", rr.all_satisfied()},
                   {"delta_over_gJ", rr.delta_over_gJ},
                   {"delta_over_G", rr.delta_over_G}};
    j["conventions"] = {{"delta_cm", to_string(cfg.conventions.delta_cm)},
                        {"alpha_scaling", to_string(cfg.conventions.alpha)},
                        {"delta_definition", "delta = omega_c - (2 n0 - 1) omega_f"},
                        {"qubit_basis", "(g, e), sigma_z = diag(-1, +1)"},
                        {"layout", "full: (qubit1, qubit2, cavity, magnon); effective: (qubit1, qubit2, magnon)"},
                        {"wigner_grid", "values[row][col] with rows along Im(alpha), columns along Re(alpha); CSV rows "
                                        "ordered with Im outer and Re inner"},
                        {"fidelity", "squared overlap <target|rho|target>"}};
    j["diagnostics"] = diagnostics_to_json(diag);
    return j;
}

nlohmann::json run_scenario(const ScenarioConfig& cfg, const RunOptions& ro) {
    namespace fs = std::filesystem;
    const fs::path dir = ro.output_dir.empty() ? fs::path(cfg.output_dir) : fs::path(ro.output_dir);
    fs::create_directories(dir);
    const std::string hash = config_hash(cfg);
    Diagnostics diag;
    derive_params(cfg.params, cfg.conventions, &diag);
    IntegratorOptions opt;
    opt.rtol = cfg.integrator.rtol;
    opt.atol = cfg.integrator.atol;
    nlohmann::json meta;
    const AlphaScaling scaling = cfg.conventions.alpha;

    switch (cfg.scenario) {
    case Scenario::Fig2Wigner: {
        const EffectiveRun run = run_effective(cfg.params, cfg.conventions, cfg.t_final_ns, opt);
        write_branch_outputs(dir, run.branches, cfg, hash, ro.workers, diag, meta);
        meta["propagator"] = propagator_to_json(run.propagator, scaling);
        nlohmann::json br = nlohmann::json::array();
        for (const auto& b : run.branches) br.push_back(branch_to_json(b, scaling));
        meta["branches"] = br;
        meta["probability_sum"] = run.probability_sum;
        meta["integrator"] = stats_to_json(run.stats);
        break;
    }
    case Scenario::Fig3DissipationScan: {
        const ScanResult scan =
            run_dissipation_scan(cfg.params, cfg.conventions, cfg.t_final_ns, cfg.scan.rates_mhz, opt, ro.workers);
        CsvWriter w((dir / "dissipation_scan.csv").string(), hash,
                    {"scan_var", "scan_val_mhz", "curve_var", "curve_val_mhz", "fixed_val_mhz", "branch", "fidelity"});
        const char* names[3] = {"gamma_q", "kappa_m", "kappa_c"};
        const std::size_t n = scan.rates_mhz.size();
        for (int sv = 0; sv < 3; ++sv)
            for (int cv = 0; cv < 3; ++cv) {
                if (sv == cv) continue;
                const int fv = 3 - sv - cv;
                for (CatBranch b : cfg.scan.branches)
                    for (std::size_t ic = 0; ic < n; ++ic)
                        for (std::size_t is = 0; is < n; ++is)
                            for (std::size_t ifx = 0; ifx < n; ++ifx) {
                                std::size_t idx[3];
                                idx[sv] = is;
                                idx[cv] = ic;
                                idx[fv] = ifx;
                                const ScanPoint& p = scan.at(idx[0], idx[1], idx[2]);
                                w.cell(names[sv]).cell(scan.rates_mhz[is]).cell(names[cv]).cell(scan.rates_mhz[ic]);
                                w.cell(scan.rates_mhz[ifx]).cell(to_string(b)).cell(p.fidelity[branch_index(b)]);
                                w.end_row();
                            }
            }
        double drift = 0.0, min_eig = std::numeric_limits<double>::infinity();
        for (const auto& p : scan.points) {
            drift = std::max(drift, p.stats.max_norm_drift);
            min_eig = std::min(min_eig, p.stats.min_eigenvalue);
        }
        meta["scan"] = {{"runs", scan.points.size()},
                        {"max_trace_drift", drift},
                        {"min_eigenvalue", min_eig},
                        {"unitary_fidelity_pp", scan.unitary_fidelity[branch_index(CatBranch::PP)]},
                        {"unitary_fidelity_mm", scan.unitary_fidelity[branch_index(CatBranch::MM)]},
                        {"layout", "scan_var on the x axis, curve_var across curves, fixed_val_mhz for the third rate"}};
        if (ro.oracle_lab_frame) {
            CsvWriter ow((dir / "oracle_lab_frame.csv").string(), hash,
                         {"gamma_q_mhz", "kappa_m_mhz", "kappa_a_mhz", "branch", "fidelity_effective", "fidelity_full_model"});
            SystemParams small = cfg.params;
            small.n_cavity = 4;
            small.n_magnon = 12;
            const std::array<std::array<double, 3>, 3> points = {{{0.0, 0.0, 0.0}, {0.5, 0.5, 0.5}, {1.0, 1.0, 1.0}}};
            nlohmann::json orows = nlohmann::json::array();
            for (const auto& r : points) {
                SystemParams p = small;
                p.gamma_q1 = p.gamma_q2 = r[0] * kMHz;
                p.kappa_m = r[1] * kMHz;
                p.kappa_a = r[2] * kMHz;
                const EffectiveRun eff = run_effective_dissipative(p, cfg.conventions, cfg.t_final_ns, opt);
                const HamiltonianSpec spec =
                    HamiltonianSpec::make(Frame::Floquet, p, cfg.conventions, cfg.integrator.harmonic_cutoff);
                const EffectiveFrameMap map(spec);
                const VectorXcd psi0 = map.exp_s().adjoint() * plus_plus_vacuum(spec.layout());
                const Trajectory tr = evolve_lindblad(h_fram_terms(spec), floquet_frame_collapse_channels(spec),
                                                      QuantumState::pure(spec.layout(), psi0).as_mixed(),
                                                      output_times(cfg.t_final_ns), opt);
                MatrixXcd rho = map.density_from_floquet(tr.states.back().density(), cfg.t_final_ns);
                rho = 0.5 * (rho + rho.adjoint()).eval();
                const QuantumState full = QuantumState::mixed(spec.layout(), rho);
                for (CatBranch b : cfg.scan.branches) {
                    const std::size_t k = branch_index(b);
                    const BranchResult fb = condition(full, k, eff.propagator, spec.derived.xi * cfg.t_final_ns, false);
                    const double fe = eff.branches[k].fidelity;
                    ow.cell(r[0]).cell(r[1]).cell(r[2]).cell(to_string(b)).cell(fe).cell(fb.fidelity);
                    ow.end_row();
                    orows.push_back({{"rates_mhz", r}, {"branch", to_string(b)}, {"fidelity_effective", fe},
                                     {"fidelity_full_model", fb.fidelity}});
                }
            }
            meta["oracle_lab_frame"] = {{"n_cavity", small.n_cavity}, {"n_magnon", small.n_magnon}, {"rows", orows},
                                        {"grade", "oracle: reduced truncation"}};
        }
        break;
    }
    case Scenario::Fig4FidelityTrace: {
        CsvWriter w((dir / "fidelity_trace.csv").string(), hash, {"t_ns", "fidelity", "initial_kind"});
        const DerivedParams d = derive_params(cfg.params, cfg.conventions);
        nlohmann::json traces = nlohmann::json::array();
        for (const auto& kind : cfg.fig4.initial_kinds) {
            const TraceResult tr = run_fidelity_trace(cfg.params, cfg.conventions, cfg.t_final_ns, cfg.fig4.dt_ns, kind,
                                                      opt, cfg.integrator.harmonic_cutoff);
            for (std::size_t i = 0; i < tr.times.size(); ++i) {
                w.cell(tr.times[i]).cell(tr.fidelity[i]).cell(kind);
                w.end_row();
            }
            const SpectrumPeak peak = dominant_frequency(tr.fidelity, cfg.fig4.dt_ns);
            traces.push_back({{"initial_kind", kind},
                              {"fidelity_at_0", tr.fidelity.front()},
                              {"fidelity_min", *std::min_element(tr.fidelity.begin(), tr.fidelity.end())},
                              {"fidelity_final", tr.fidelity.back()},
                              {"dominant_angular_frequency", peak.angular_frequency},
                              {"dominant_frequency_mhz", peak.angular_frequency / kMHz},
                              {"frequency_resolution_mhz", peak.resolution / kMHz},
                              {"xi_mhz", d.xi / kMHz},
                              {"integrator", stats_to_json(tr.stats)}});
        }
        meta["traces"] = traces;
        break;
    }
    case Scenario::Fig5FullmodelWigner: {
        const LabRun lab = run_lab_frame(cfg.params, cfg.t_final_ns, cfg.integrator.lab_step_ns);
        if (lab.stats.max_norm_drift > 1e-6)
            emit(&diag, "norm-drift", "lab-frame norm drift " + std::to_string(lab.stats.max_norm_drift));
        Conventions used = cfg.conventions;
        std::string resolution = "configured";
        if (auto target = caption_amplitude(cfg.preset)) {
            const PinningResult pin = pin_conventions(lab, *target);
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& r : pin.rows)
                rows.push_back({{"delta_cm", to_string(r.conventions.delta_cm)},
                                {"alpha_scaling", to_string(r.conventions.alpha)},
                                {"measured_lobe_radius", r.measured_lobe_radius},
                                {"predicted_lobe_radius", r.predicted_lobe_radius},
                                {"reported_amplitude", r.reported_amplitude},
                                {"pass", r.pass()}});
            meta["pinning"] = {{"target_amplitude", *target}, {"tolerance", pin.tolerance}, {"rows", rows},
                               {"passing_pairs", pin.passing}};
            if (pin.pinned) {
                used = *pin.pinned;
                resolution = "pinned by the full-model amplitude oracle";
            } else {
                emit(&diag, "pinning", std::to_string(pin.passing) + " convention pairs matched the caption amplitude");
            }
        }
        const MappedRun mapped = map_lab_state(lab, used);
        ScenarioConfig out_cfg = cfg;
        out_cfg.conventions = used;
        write_branch_outputs(dir, mapped.branches, out_cfg, hash, ro.workers, diag, meta);
        nlohmann::json br = nlohmann::json::array();
        for (const auto& b : mapped.branches) br.push_back(branch_to_json(b, used.alpha));
        meta["branches"] = br;
        meta["propagator"] = propagator_to_json(mapped.propagator, used.alpha);
        meta["extracted_amplitude"] = reported_amplitude(mapped.branches[0].amplitude.lobe_radius, used.alpha);
        meta["resolved_conventions"] = {{"delta_cm", to_string(used.delta_cm)},
                                        {"alpha_scaling", to_string(used.alpha)},
                                        {"resolution", resolution}};
        meta["integrator"] = stats_to_json(lab.stats);
        break;
    }
    case Scenario::Custom: {
        const bool dissipative = cfg.params.gamma_q1 > 0 || cfg.params.gamma_q2 > 0 || cfg.params.kappa_m > 0 ||
                                 cfg.params.kappa_a > 0;
        const HamiltonianSpec spec = HamiltonianSpec::make(dissipative ? Frame::Effective : Frame::EffectiveRotating,
                                                           cfg.params, cfg.conventions);
        const SpaceLayout layout = spec.layout();
        const std::vector<double> times = linspace(0.0, cfg.t_final_ns, std::size_t(cfg.time_points));
        const QuantumState psi0 = QuantumState::pure(layout, plus_plus_vacuum(layout));
        Trajectory tr;
        if (dissipative) {
            TermSum h(layout);
            h.add(h_eff(spec));
            tr = evolve_lindblad(h, effective_collapse_channels(cfg.params, spec.derived), psi0.as_mixed(), times, opt);
        } else {
            tr = evolve_schrodinger(h_eff_rotating_terms(spec), psi0, times, opt);
        }
        CsvWriter w((dir / "branch_trace.csv").string(), hash, {"t_ns", "branch", "probability", "fidelity"});
        std::array<BranchResult, 4> last;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const PropagatorParams prop = analytic_propagator(spec.derived, times[i]);
            const double rot = dissipative ? spec.derived.xi * times[i] : 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                BranchResult b;
                try {
                    b = condition(tr.states[i], k, prop, rot, i + 1 == times.size());
                } catch (const std::domain_error&) {
                    continue;  // outcome with zero probability at this time
                }
                w.cell(times[i]).cell(to_string(b.branch)).cell(b.probability).cell(b.fidelity);
                w.end_row();
                if (i + 1 == times.size()) last[k] = b;
            }
        }
        write_branch_outputs(dir, last, cfg, hash, ro.workers, diag, meta);
        meta["dissipative"] = dissipative;
        meta["propagator"] = propagator_to_json(analytic_propagator(spec.derived, cfg.t_final_ns), scaling);
        meta["integrator"] = stats_to_json(tr.stats);
        break;
    }
    }
    nlohmann::json base = base_metadata(cfg, hash, diag);
    base.update(meta);
    write_json((dir / "metadata.json").string(), base);
    return base;
}

} // namespace fcat
