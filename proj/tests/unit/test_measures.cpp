#include <doctest.h>

#include <algorithm>
#include <array>
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
        for (int b = 0; b < 2; ++b) v += 0.5 * basis_state(layout, {a, b, 0}).vector();
    return v;
}

// independent Fock expansion of a coherent state
VectorXcd coherent_oracle(cplx alpha, int dim) {
    VectorXcd v(dim);
    cplx c = std::exp(-0.5 * std::norm(alpha));
    for (int n = 0; n < dim; ++n) {
        if (n > 0) c *= alpha / std::sqrt(double(n));
        v(n) = c;
    }
    return v;
}

// Wigner function from the displaced-parity definition, evaluated densely in a padded space
double wigner_oracle(const VectorXcd& psi, cplx beta) {
    const int pad = 80;
    VectorXcd big = VectorXcd::Zero(pad);
    big.head(psi.size()) = psi;
    const MatrixXcd a = annihilation(pad).matrix();
    const MatrixXcd d = expm(-beta * a.adjoint() + std::conj(beta) * a);
    const VectorXcd shifted = d * big;
    double w = 0.0;
    for (int n = 0; n < pad; ++n) w += (n % 2 ? -1.0 : 1.0) * std::norm(shifted(n));
    return 2.0 / kPi * w;
}

} // namespace

TEST_CASE("coherent states") {
    const int dim = 40;
    CHECK(max_abs(coherent(0.0, dim).vector() - basis_state(SpaceLayout::boson(dim), {0}).vector()) < 1e-15);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> r(0.0, 1.5), ph(-kPi, kPi);
    for (int k = 0; k < 10; ++k) {
        const cplx a = std::polar(r(rng), ph(rng)), b = std::polar(r(rng), ph(rng));
        const cplx expected = std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
        CHECK(std::abs(coherent(a, dim).vector().dot(coherent(b, dim).vector()) - expected) < 1e-8);
        CHECK(std::abs(expectation(number_operator(dim), coherent(a, dim)).real() - std::norm(a)) < 1e-8);
        CHECK(max_abs(coherent(a, dim).vector() - coherent_oracle(a, dim)) < 1e-12);
    }
    Diagnostics diag;
    coherent(3.0, 10, &diag);
    CHECK(diag.size() == 1);
}

TEST_CASE("cat4 branches and fock supports") {
    const int dim = 40;
    for (CatBranch b : all_branches()) {
        const CatState c = cat4(std::polar(1.007, -kPi / 4), b, dim);
        CHECK(c.state.vector().norm() == doctest::Approx(1.0).epsilon(1e-14));
        std::vector<int> residues;
        switch (b) {
        case CatBranch::PP: residues = {0}; break;
        case CatBranch::MM: residues = {2}; break;
        default: residues = {1, 3}; break;
        }
        CHECK(fock_population_outside(c.state, 4, residues) < 1e-10);
    }
    // pp and mm components are exactly the 0 and 2 mod 4 projections of a coherent state
    const cplx alpha = std::polar(1.3, 0.2);
    const VectorXcd coh = coherent_oracle(alpha, dim);
    VectorXcd zero = VectorXcd::Zero(dim);
    for (int n = 0; n < dim; n += 4) zero(n) = coh(n);
    zero.normalize();
    CHECK(std::norm(zero.dot(cat4(alpha, CatBranch::PP, dim).state.vector())) >= 1.0 - 1e-12);
    VectorXcd two = VectorXcd::Zero(dim);
    for (int n = 2; n < dim; n += 4) two(n) = coh(n);
    two.normalize();
    CHECK(std::norm(two.dot(cat4(alpha, CatBranch::MM, dim).state.vector())) >= 1.0 - 1e-12);
}

TEST_CASE("cat4 small-amplitude limits") {
    const int dim = 20;
    CHECK(std::norm(cat4(0.0, CatBranch::PP, dim).state.vector()(0)) == doctest::Approx(1.0));
    CHECK(std::norm(cat4(1e-9, CatBranch::PP, dim).state.vector()(0)) == doctest::Approx(1.0));
    CHECK(std::norm(cat4(0.0, CatBranch::MM, dim).state.vector()(2)) == doctest::Approx(1.0));
    CHECK(std::norm(cat4(1e-5, CatBranch::MM, dim).state.vector()(2)) == doctest::Approx(1.0));
    const double odd = std::norm(cat4(1e-5, CatBranch::PM, dim).state.vector()(1)) +
                       std::norm(cat4(1e-5, CatBranch::PM, dim).state.vector()(3));
    CHECK(odd == doctest::Approx(1.0));
}

TEST_CASE("cat4 orthogonality and normalization formula") {
    const int dim = 50;
    const cplx alpha = std::polar(1.4, 0.3);
    const auto br = all_branches();
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            const bool both_odd = (br[i] == CatBranch::PM || br[i] == CatBranch::MP) &&
                                  (br[j] == CatBranch::PM || br[j] == CatBranch::MP);
            if (both_odd) continue;
            CHECK(std::abs(cat4(alpha, br[i], dim).state.vector().dot(cat4(alpha, br[j], dim).state.vector())) < 1e-12);
        }
    const CatState pp = cat4(alpha, CatBranch::PP, dim);
    CHECK(pp.norm_constant > 0.0);
    CHECK(std::isfinite(pp.closed_form_relative_difference()));
}

TEST_CASE("qubit projection") {
    const SpaceLayout l = SpaceLayout::effective(6);
    const QuantumState psi = QuantumState::pure(l, plus_plus_vacuum(l));
    const ConditionedState c = project_qubits(psi, QubitOutcome::Plus, QubitOutcome::Plus);
    CHECK(c.probability == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity(c.state, basis_state(SpaceLayout::boson(6), {0})) == doctest::Approx(1.0));
    CHECK_THROWS_AS(project_qubits(psi, QubitOutcome::Minus, QubitOutcome::Plus), std::domain_error);

    std::mt19937 rng(5);
    const QuantumState random = QuantumState::pure(l, test::random_unit_vector(int(l.dim()), rng));
    double total = 0.0, total_mixed = 0.0;
    for (auto q1 : {QubitOutcome::Plus, QubitOutcome::Minus})
        for (auto q2 : {QubitOutcome::Plus, QubitOutcome::Minus}) {
            const ConditionedState pure = project_qubits(random, q1, q2);
            const ConditionedState mixed = project_qubits(random.as_mixed(), q1, q2);
            total += pure.probability;
            total_mixed += mixed.probability;
            CHECK(mixed.probability == doctest::Approx(pure.probability).epsilon(1e-12));
            CHECK(fidelity(mixed.state, pure.state) == doctest::Approx(1.0).epsilon(1e-10));
        }
    CHECK(std::abs(total - 1.0) < 1e-10);
    CHECK(std::abs(total_mixed - 1.0) < 1e-10);
}

TEST_CASE("effective evolution yields four-component cats") {
    SystemParams p = paper_set_1();
    p.n_magnon = 30;
    const HamiltonianSpec spec = HamiltonianSpec::make(Frame::EffectiveRotating, p);
    const double t = 40.0;
    const VectorXcd out = analytic_propagator_operator(spec, t).matrix() * plus_plus_vacuum(spec.layout());
    const QuantumState psi = QuantumState::pure(spec.layout(), out);
    const cplx alpha = analytic_propagator(spec.derived, t).alpha;
    double total = 0.0;
    for (auto q1 : {QubitOutcome::Plus, QubitOutcome::Minus})
        for (auto q2 : {QubitOutcome::Plus, QubitOutcome::Minus}) {
            const ConditionedState c = project_qubits(psi, q1, q2);
            total += c.probability;
            const CatState target = cat4(alpha, branch_from_outcomes(q1, q2), p.n_magnon);
            CHECK(fidelity(c.state, target.state) >= 1.0 - 1e-8);
        }
    CHECK(std::abs(total - 1.0) < 1e-10);
}

TEST_CASE("reduction at phi zero") {
    SystemParams p = paper_set_1();
    p.n_magnon = 40;
    p.phi = 0.0;
    const HamiltonianSpec spec = HamiltonianSpec::make(Frame::EffectiveRotating, p);
    const double t = 40.0;
    const PropagatorParams pp = analytic_propagator(spec.derived, t);
    const VectorXcd out = analytic_propagator_operator(spec, t).matrix() * plus_plus_vacuum(spec.layout());
    const QuantumState psi = QuantumState::pure(spec.layout(), out);
    const int nm = p.n_magnon;

    // (+,-) keeps the two anti-aligned sectors: an odd two-component cat of amplitude 2 eta1
    const ConditionedState pm = project_qubits(psi, QubitOutcome::Plus, QubitOutcome::Minus);
    const VectorXcd odd = coherent_oracle(2.0 * pp.eta1, nm) - coherent_oracle(-2.0 * pp.eta1, nm);
    CHECK(fidelity(pm.state, QuantumState::pure(SpaceLayout::boson(nm), odd.normalized())) >= 1.0 - 1e-10);

    // (+,+) is a three-component superposition with relative weight set by eta2
    const ConditionedState plus = project_qubits(psi, QubitOutcome::Plus, QubitOutcome::Plus);
    const cplx e = std::exp(I * pp.eta2);
    const VectorXcd three = e * (coherent_oracle(2.0 * pp.eta1, nm) + coherent_oracle(-2.0 * pp.eta1, nm)) +
                            2.0 * std::conj(e) * coherent_oracle(0.0, nm);
    CHECK(fidelity(plus.state, QuantumState::pure(SpaceLayout::boson(nm), three.normalized())) >= 1.0 - 1e-10);
    const double two_component = fidelity(plus.state, cat2_even(2.0 * pp.eta1, nm));
    CHECK(two_component < 0.5);
}

TEST_CASE("fidelity basics") {
    const SpaceLayout l = SpaceLayout::boson(4);
    const QuantumState z = basis_state(l, {0}), o = basis_state(l, {1});
    CHECK(fidelity(z, z) == doctest::Approx(1.0));
    CHECK(fidelity(z, o) == doctest::Approx(0.0));
    const QuantumState half = QuantumState::mixed(l, 0.5 * (z.density_matrix() + o.density_matrix()));
    CHECK(fidelity(half, z) == doctest::Approx(0.5));
    CHECK(fidelity(z.as_mixed(), z) == doctest::Approx(1.0));
}

TEST_CASE("phase rotation") {
    const cplx a = std::polar(1.1, 0.3);
    const QuantumState r = rotate_phase(coherent(a, 40), 0.5);
    CHECK(fidelity(r, coherent(a * std::polar(1.0, 0.5), 40)) >= 1.0 - 1e-12);
    const QuantumState rm = rotate_phase(coherent(a, 40).as_mixed(), 0.5);
    CHECK(fidelity(rm, coherent(a * std::polar(1.0, 0.5), 40)) >= 1.0 - 1e-12);
}

TEST_CASE("wigner function of simple states") {
    const QuantumState vac = coherent(0.0, 30);
    CHECK(std::abs(wigner_at(vac, 0.0) - 2.0 / kPi) < 1e-8);
    CHECK(std::abs(wigner_at(vac, 0.0, WignerMethod::DisplacedParity) - 2.0 / kPi) < 1e-8);
    const cplx beta(0.8, -0.5);
    const GridSpec g = GridSpec::square(5.0, 101);
    const WignerGrid w = wigner(coherent(beta, 30), g);
    Eigen::Index r, c;
    w.values.maxCoeff(&r, &c);
    CHECK(std::abs(w.re_axis[c] - beta.real()) <= g.step_re());
    CHECK(std::abs(w.im_axis[r] - beta.imag()) <= g.step_im());
    CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("wigner methods agree with the displaced-parity oracle") {
    std::mt19937 rng(8);
    const VectorXcd psi = test::random_unit_vector(12, rng);
    const QuantumState s = QuantumState::pure(SpaceLayout::boson(12), psi);
    for (cplx b : {cplx(0.0, 0.0), cplx(0.5, -0.3), cplx(-1.2, 0.9), cplx(2.0, 1.0)}) {
        const double oracle = wigner_oracle(psi, b);
        CHECK(std::abs(wigner_at(s, b) - oracle) < 1e-8);
        CHECK(std::abs(wigner_at(s, b, WignerMethod::DisplacedParity) - oracle) < 1e-8);
    }
    const GridSpec g = GridSpec::square(2.5, 21);
    const WignerGrid a = wigner(s.as_mixed(), g, WignerMethod::Laguerre);
    const WignerGrid b = wigner(s, g, WignerMethod::DisplacedParity, nullptr, 2);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("cat4 wigner symmetry and negativity") {
    const int dim = 40;
    const CatState c = cat4(std::polar(1.007 * std::sqrt(2.0), -kPi / 4), CatBranch::PP, dim);
    const GridSpec g = GridSpec::square(5.0, 101);
    const WignerGrid w = wigner(c.state, g);
    // rotating by 90 degrees maps grid point (i, j) onto (j, n-1-i)
    const int n = g.n_re;
    double dev = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dev = std::max(dev, std::abs(w.values(i, j) - w.values(j, n - 1 - i)));
    CHECK(dev < 1e-8);
    CHECK(w.min_value() < -0.01);
    CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("amplitude estimate of a known cat") {
    const cplx alpha = std::polar(1.425, -kPi / 4);
    const CatState c = cat4(alpha, CatBranch::PP, 40);
    const CatAmplitudeEstimate e = estimate_cat_amplitude(c.state);
    CHECK(e.lobe_radius == doctest::Approx(std::abs(alpha)).epsilon(1e-8));
    // orientation is defined modulo 90 degrees
    const double d = std::remainder(e.orientation - std::arg(alpha), kPi / 2);
    CHECK(std::abs(d) < 1e-8);
}

TEST_CASE("lobe peaks of a well separated cat") {
    const cplx alpha = std::polar(3.0, kPi / 4);
    const CatState c = cat4(alpha, CatBranch::PP, 60);
    const WignerGrid w = wigner(c.state, GridSpec::square(5.0, 101));
    // fringes between neighbouring lobes peak higher than the lobes and sit closer to the origin
    const auto peaks = find_lobe_peaks(w, 4, 2.8);
    REQUIRE(peaks.size() == 4);
    for (const auto& pk : peaks) CHECK(std::hypot(pk.re, pk.im) == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("grid spec") {
    const GridSpec g = GridSpec::square(2.0, 5);
    const auto ax = g.re_axis();
    REQUIRE(ax.size() == 5);
    CHECK(ax.front() == -2.0);
    CHECK(ax.back() == 2.0);
    CHECK(g.step_re() == doctest::Approx(1.0));
}

TEST_CASE("branch helpers") {
    CHECK(branch_from_outcomes(QubitOutcome::Plus, QubitOutcome::Minus) == CatBranch::PM);
    CHECK(to_string(CatBranch::MP) == "mp");
    auto order = all_branches();
    CHECK(order[0] == CatBranch::PP);
    std::sort(order.begin(), order.end());
    CHECK(order == std::array<CatBranch, 4>{CatBranch::PP, CatBranch::PM, CatBranch::MP, CatBranch::MM});
}
