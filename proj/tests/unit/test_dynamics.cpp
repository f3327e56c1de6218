#include <doctest.h>

#include <cmath>
#include <random>

#include "fcat/dynamics.hpp"
#include "fcat/measures.hpp"
#include "helpers.hpp"

using namespace fcat;
using fcat::test::max_abs;

namespace {

const cplx I(0.0, 1.0);

VectorXcd plus_plus_vacuum(const SpaceLayout& layout) {
    VectorXcd v = VectorXcd::Zero(layout.dim());
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            std::vector<int> levels(layout.size(), 0);
            levels[0] = a;
            levels[1] = b;
            v += 0.5 * basis_state(layout, levels).vector();
        }
    return v;
}

double overlap2(const VectorXcd& a, const VectorXcd& b) { return std::norm(a.dot(b)); }

SystemParams effective_params(int nm) {
    SystemParams p = paper_set_1();
    p.n_magnon = nm;
    return p;
}

} // namespace

TEST_CASE("zero hamiltonian leaves the state unchanged") {
    const SpaceLayout l = SpaceLayout::boson(6);
    std::mt19937 rng(1);
    const QuantumState psi = QuantumState::pure(l, test::random_unit_vector(6, rng));
    const Trajectory tr = evolve_schrodinger(TermSum(l), psi, linspace(0.0, 10.0, 5));
    REQUIRE(tr.states.size() == 5);
    for (const auto& s : tr.states) CHECK(max_abs(s.vector() - psi.vector()) < 1e-14);
}

TEST_CASE("harmonic oscillator rotates a coherent state") {
    const int dim = 40;
    const double w = 1.3;
    const cplx alpha = std::polar(1.2, 0.4);
    TermSum h(SpaceLayout::boson(dim));
    h.add(number_operator(dim), w);
    const std::vector<double> times = linspace(0.0, 5.0, 6);
    const Trajectory tr = evolve_schrodinger(h, coherent(alpha, dim), times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const QuantumState expected = coherent(alpha * std::polar(1.0, -w * times[k]), dim);
        CHECK(fidelity(tr.states[k], expected) >= 1.0 - 1e-8);
    }
    CHECK(tr.stats.max_norm_drift < 1e-8);
    const Trajectory rk = evolve_schrodinger(h, coherent(alpha, dim), times,
                                             IntegratorOptions{Stepping::FixedRK4, 0, 0, 1e-3});
    CHECK(fidelity(rk.states.back(), tr.states.back()) >= 1.0 - 1e-10);
}

TEST_CASE("time-dependent operator callback matches the term sum") {
    const HamiltonianSpec spec = HamiltonianSpec::make(Frame::EffectiveRotating, effective_params(8));
    const QuantumState psi0 = QuantumState::pure(spec.layout(), plus_plus_vacuum(spec.layout()));
    const std::vector<double> times = {0.0, 10.0, 20.0};
    const Trajectory a = evolve_schrodinger(h_eff_rotating_terms(spec), psi0, times);
    const Trajectory b = evolve_schrodinger([&](double t) { return h_eff_rotating(spec, t); }, psi0, times);
    CHECK(fidelity(a.states.back(), b.states.back()) >= 1.0 - 1e-10);
}

TEST_CASE("integrator validation") {
    const SpaceLayout l = SpaceLayout::boson(3);
    const QuantumState psi = basis_state(l, {0});
    CHECK_THROWS_AS(evolve_schrodinger(TermSum(l), psi, {}), std::invalid_argument);
    CHECK_THROWS_AS(evolve_schrodinger(TermSum(l), psi, {1.0, 1.0}), std::invalid_argument);
    RhsFunction blowup = [](double, const MatrixXcd& y, MatrixXcd& dy) { dy = 1e300 * y * y.norm(); };
    CHECK_THROWS_AS(integrate(blowup, MatrixXcd::Ones(2, 1), {0.0, 1.0}, {}, [](std::size_t, double, const MatrixXcd&) {}),
                    NumericalError);
}

TEST_CASE("magnus propagator matches integration of the rotating-frame hamiltonian") {
    const HamiltonianSpec spec = HamiltonianSpec::make(Frame::EffectiveRotating, effective_params(30));
    const VectorXcd psi0 = plus_plus_vacuum(spec.layout());
    const std::vector<double> times = linspace(0.0, 40.0, 5);
    const Trajectory tr = evolve_schrodinger(h_eff_rotating_terms(spec), QuantumState::pure(spec.layout(), psi0), times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const VectorXcd analytic = analytic_propagator_operator(spec, times[k]).matrix() * psi0;
        CHECK(overlap2(analytic, tr.states[k].vector()) >= 1.0 - 1e-6);
    }
}

TEST_CASE("magnus equivalence under perturbed parameters") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(0.8, 1.2);
    for (int draw = 0; draw < 4; ++draw) {
        SystemParams p = effective_params(30);
        const double gs = u(rng);
        p.g1 *= gs;
        p.g2 *= gs;
        p.g3 *= u(rng);
        p.phi *= u(rng);
        p.omega_m = p.omega_c + (p.omega_m - p.omega_c) * u(rng);
        const HamiltonianSpec spec = HamiltonianSpec::make(Frame::EffectiveRotating, p);
        const VectorXcd psi0 = plus_plus_vacuum(spec.layout());
        const std::vector<double> times = {0.0, 25.0, 60.0};
        const Trajectory tr =
            evolve_schrodinger(h_eff_rotating_terms(spec), QuantumState::pure(spec.layout(), psi0), times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const VectorXcd analytic = analytic_propagator_operator(spec, times[k]).matrix() * psi0;
            CHECK(overlap2(analytic, tr.states[k].vector()) >= 1.0 - 1e-5);
        }
    }
}

TEST_CASE("analytic propagator limits") {
    const DerivedParams d = derive_params(paper_set_1());
    const PropagatorParams z = analytic_propagator(d, 0.0);
    CHECK(z.Theta == 0.0);
    CHECK(std::abs(z.eta1) == 0.0);
    CHECK(z.eta2 == 0.0);
    const HamiltonianSpec spec = HamiltonianSpec::make(Frame::EffectiveRotating, effective_params(10));
    CHECK(analytic_propagator_operator(spec, 0.0).distance(Operator::identity(spec.layout())) < 1e-15);

    const double T = kTwoPi / d.xi;
    const PropagatorParams loop = analytic_propagator(d, T);
    CHECK(std::abs(loop.eta1) < 1e-12 * std::abs(d.Gamma1) * T);
    CHECK(loop.Theta == doctest::Approx(2.0 * std::pow(d.Gamma1 / d.xi, 2) * kTwoPi).epsilon(1e-12));

    const PropagatorParams p40 = analytic_propagator(d, 40.0);
    CHECK(p40.eta2 == 0.0);
    CHECK(std::abs(p40.eta1) == doctest::Approx(1.007).epsilon(0.05));
    CHECK(std::abs(p40.alpha) == doctest::Approx(std::sqrt(2.0) * std::abs(p40.eta1)).epsilon(1e-14));

    // small-xi branch is continuous with the closed form
    DerivedParams a = d, b = d;
    a.xi = 0.99e-2 / 40.0;
    b.xi = 1.01e-2 / 40.0;
    const PropagatorParams pa = analytic_propagator(a, 40.0), pb = analytic_propagator(b, 40.0);
    CHECK(std::abs(pa.eta1 - pb.eta1) < 1e-3 * std::abs(pa.eta1));
    DerivedParams c = d;
    c.xi = 0.0;
    const PropagatorParams pc = analytic_propagator(c, 40.0);
    CHECK(std::abs(pc.eta1 - (-I) * d.Gamma1 * 40.0) < 1e-14);
    CHECK(pc.Theta == 0.0);
}

TEST_CASE("qubit z sectors are conserved") {
    SystemParams p = effective_params(20);
    p.phi = 0.7;
    const HamiltonianSpec spec = HamiltonianSpec::make(Frame::EffectiveRotating, p);
    const SpaceLayout l = spec.layout();
    std::mt19937 rng(12);
    const VectorXcd q = test::random_unit_vector(4, rng);
    VectorXcd psi0 = VectorXcd::Zero(l.dim());
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) psi0 += q(2 * a + b) * basis_state(l, {a, b, 0}).vector();
    const Trajectory tr = evolve_schrodinger(h_eff_rotating_terms(spec), QuantumState::pure(l, psi0), linspace(0, 60, 7));
    const Operator e1 = embed(0.5 * (Operator::identity(SpaceLayout::qubit()) + pauli(PauliAxis::Z)), 0, l);
    const Operator e2 = embed(0.5 * (Operator::identity(SpaceLayout::qubit()) + pauli(PauliAxis::Z)), 1, l);
    const double p1 = expectation(e1, tr.states[0]).real(), p2 = expectation(e2, tr.states[0]).real();
    for (const auto& s : tr.states) {
        CHECK(std::abs(expectation(e1, s).real() - p1) < 1e-10);
        CHECK(std::abs(expectation(e2, s).real() - p2) < 1e-10);
    }
}

TEST_CASE("each z sector carries a coherent magnon state") {
    const HamiltonianSpec spec = HamiltonianSpec::make(Frame::EffectiveRotating, effective_params(30));
    const SpaceLayout l = spec.layout();
    const Operator U = analytic_propagator_operator(spec, 40.0);
    const PropagatorParams pp = analytic_propagator(spec.derived, 40.0);
    const cplx e = std::polar(1.0, spec.derived.Phi);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const VectorXcd out = U.matrix() * basis_state(l, {a, b, 0}).vector();
            Eigen::Index base;
            basis_state(l, {a, b, 0}).vector().cwiseAbs().maxCoeff(&base);
            const VectorXcd magnon = out.segment(base, spec.params.n_magnon);
            const double za = a ? 1.0 : -1.0, zb = b ? 1.0 : -1.0;
            const cplx beta = pp.eta1 * std::conj(za + e * zb);
            const QuantumState m = QuantumState::pure(SpaceLayout::boson(spec.params.n_magnon), magnon);
            CHECK(m.purity() == doctest::Approx(1.0));
            CHECK(fidelity(m, coherent(beta, spec.params.n_magnon)) >= 1.0 - 1e-10);
        }
}

TEST_CASE("lindblad amplitude damping") {
    const int dim = 4;
    const double kappa = 0.3;
    const QuantumState rho0 = basis_state(SpaceLayout::boson(dim), {1}).as_mixed();
    const std::vector<CollapseChannel> ch = {{std::sqrt(kappa) * annihilation(dim), "a"}};
    const std::vector<double> times = linspace(0.0, 6.0, 7);
    const Trajectory tr = evolve_lindblad(TermSum(SpaceLayout::boson(dim)), ch, rho0, times);
    for (std::size_t k = 0; k < times.size(); ++k)
        CHECK(std::abs(expectation(number_operator(dim), tr.states[k]).real() - std::exp(-kappa * times[k])) < 1e-6);
    CHECK(tr.stats.max_norm_drift < 1e-8);
    CHECK(tr.stats.min_eigenvalue >= -1e-8);
}

TEST_CASE("lindblad without channels matches schrodinger evolution") {
    const HamiltonianSpec spec = HamiltonianSpec::make(Frame::EffectiveRotating, effective_params(12));
    const QuantumState psi0 = QuantumState::pure(spec.layout(), plus_plus_vacuum(spec.layout()));
    const std::vector<double> times = {0.0, 20.0, 40.0};
    const Trajectory s = evolve_schrodinger(h_eff_rotating_terms(spec), psi0, times);
    const Trajectory r = evolve_lindblad(h_eff_rotating_terms(spec), std::vector<CollapseChannel>{}, psi0.as_mixed(), times);
    for (std::size_t k = 0; k < times.size(); ++k) CHECK(fidelity(r.states[k], s.states[k]) >= 1.0 - 1e-8);
}

TEST_CASE("lab collapse channels") {
    SystemParams p = paper_set_1();
    p.n_cavity = 2;
    p.n_magnon = 3;
    CHECK(lab_collapse_channels(p).empty());
    p.kappa_m = 1.0 * kMHz;
    auto ch = lab_collapse_channels(p);
    REQUIRE(ch.size() == 1);
    CHECK(ch[0].label == "magnon");
    const Operator m = embed(annihilation(3), kMagnonFull, SpaceLayout::full(2, 3));
    CHECK(ch[0].op.distance(std::sqrt(kTwoPi * 0.001) * m) < 1e-15);
    p.gamma_q1 = 0.5 * kMHz;
    p.kappa_a = 0.25 * kMHz;
    CHECK(lab_collapse_channels(p).size() == 3);
    p.gamma_q2 = 0.1 * kMHz;
    CHECK(lab_collapse_channels(p).size() == 4);
}

TEST_CASE("effective collapse channels") {
    SystemParams p = effective_params(4);
    const DerivedParams d = derive_params(p);
    CHECK(effective_collapse_channels(p, d).empty());
    p.kappa_m = 0.7 * kMHz;
    auto ch = effective_collapse_channels(p, d);
    REQUIRE(ch.size() == 1);
    const SpaceLayout l = SpaceLayout::effective(4);
    CHECK(ch[0].op.distance(std::sqrt(p.kappa_m) * embed(annihilation(4), kMagnonEff, l)) < 1e-15);

    p.gamma_q1 = p.gamma_q2 = 0.5 * kMHz;
    p.kappa_a = 0.5 * kMHz;
    ch = effective_collapse_channels(p, d);
    CHECK(ch.size() == 8);
    const Operator z1 = embed(pauli(PauliAxis::Z), kQubit1, l);
    const Operator z2 = embed(pauli(PauliAxis::Z), kQubit2, l);
    const double w = 0.5818649368420833 * 0.5818649368420833 + 0.10453790247959542 * 0.10453790247959542;
    bool found_z = false, found_hybrid = false;
    for (const auto& c : ch) {
        if (c.label == "qubit1_z") {
            found_z = true;
            CHECK(c.op.distance(std::sqrt(w * p.gamma_q1 / 2.0) * z1) < 1e-15);
            CHECK(w == doctest::Approx(0.582 * 0.582 + 0.1 * 0.1).epsilon(0.01));
        }
        if (c.label == "hybrid") {
            found_hybrid = true;
            // coefficient of z2 from the trace inner product
            const cplx coeff = (z2.adjoint() * c.op).matrix().trace() / double(l.dim());
            CHECK(std::abs(coeff - (-I) * (d.G / d.delta) * std::sqrt(p.kappa_a)) < 1e-15);
        }
    }
    CHECK(found_z);
    CHECK(found_hybrid);
}

TEST_CASE("frame collapse channels are the rotated lowering operators") {
    SystemParams p = paper_set_1();
    p.n_cavity = 2;
    p.n_magnon = 2;
    p.gamma_q1 = p.gamma_q2 = 0.5 * kMHz;
    p.kappa_m = p.kappa_a = 0.3 * kMHz;
    const HamiltonianSpec spec = HamiltonianSpec::make(Frame::Floquet, p);
    const auto ch = floquet_frame_collapse_channels(spec);
    REQUIRE(ch.size() == 4);
    const auto lab = lab_collapse_channels(p);
    const Operator sm1 = std::sqrt(p.gamma_q1) * embed(pauli(PauliAxis::Minus), kQubit1, spec.layout());
    for (const auto& c : ch)
        if (c.label == "qubit1") CHECK(c.op.at(0.0).distance(sm1) < 1e-15);
    for (double t : {0.013, 0.21, 3.7})
        for (std::size_t k = 0; k < ch.size(); ++k) {
            const Operator u1 = frame_unitary(FrameKind::U1, spec, t);
            const Operator rotated = u1.adjoint() * lab[k].op * u1;
            REQUIRE(ch[k].label == lab[k].label);
            CHECK(ch[k].op.at(t).distance(rotated) < 1e-12);
        }
}

TEST_CASE("frame-transformed integration agrees with the lab frame on a short window") {
    SystemParams p = paper_set_1();
    p.n_cavity = 3;
    p.n_magnon = 3;
    const HamiltonianSpec lab = HamiltonianSpec::make(Frame::Lab, p);
    const HamiltonianSpec fram = HamiltonianSpec::make(Frame::Floquet, p, {}, 20);
    const SpaceLayout l = lab.layout();
    const VectorXcd psi0 = plus_plus_vacuum(l);
    const std::vector<double> times = {0.0, 1.0, 2.0};
    IntegratorOptions rk;
    rk.stepping = Stepping::FixedRK4;
    rk.fixed_step = 2.5e-5;
    const Trajectory a = evolve_schrodinger(h_total_terms(lab), QuantumState::pure(l, psi0), times, rk);
    auto u12 = [&](double t) {
        return (frame_unitary(FrameKind::U1, lab, t) * frame_unitary(FrameKind::U2, lab, t)).matrix();
    };
    const VectorXcd f0 = u12(0.0).adjoint() * psi0;
    const Trajectory b = evolve_schrodinger(h_fram_terms(fram), QuantumState::pure(l, f0), times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const VectorXcd mapped = u12(times[k]) * b.states[k].vector();
        CHECK(overlap2(mapped, a.states[k].vector()) >= 1.0 - 1e-8);
    }
    CHECK(a.stats.max_norm_drift < 1e-8);
}

TEST_CASE("linspace") {
    const auto v = linspace(0.0, 1.0, 5);
    REQUIRE(v.size() == 5);
    CHECK(v.front() == 0.0);
    CHECK(v.back() == 1.0);
    CHECK(v[2] == doctest::Approx(0.5));
    CHECK(linspace(2.0, 3.0, 1) == std::vector<double>{2.0});
    CHECK(linspace(0.0, 1.0, 0).empty());
}
