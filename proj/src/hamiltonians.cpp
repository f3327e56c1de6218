#include "fcat/hamiltonians.hpp"

#include <cmath>
#include <stdexcept>

namespace fcat {

namespace {

const cplx I(0.0, 1.0);

struct FullOps {
    SpaceLayout layout;
    Operator x[2], y[2], z[2], sp[2], sm[2], a, ad, m, md, nc, nm;
};

FullOps full_ops(int n_cavity, int n_magnon) {
    FullOps o;
    o.layout = SpaceLayout::full(n_cavity, n_magnon);
    for (std::size_t j = 0; j < 2; ++j) {
        o.x[j] = embed(pauli(PauliAxis::X), j, o.layout);
        o.y[j] = embed(pauli(PauliAxis::Y), j, o.layout);
        o.z[j] = embed(pauli(PauliAxis::Z), j, o.layout);
        o.sp[j] = embed(pauli(PauliAxis::Plus), j, o.layout);
        o.sm[j] = embed(pauli(PauliAxis::Minus), j, o.layout);
    }
    o.a = embed(annihilation(n_cavity), kCavity, o.layout);
    o.ad = o.a.adjoint();
    o.m = embed(annihilation(n_magnon), kMagnonFull, o.layout);
    o.md = o.m.adjoint();
    o.nc = o.ad * o.a;
    o.nm = o.md * o.m;
    return o;
}

FullOps full_ops(const HamiltonianSpec& spec) { return full_ops(spec.params.n_cavity, spec.params.n_magnon); }

struct EffOps {
    SpaceLayout layout;
    Operator z1, z2, m, md, nm;
};

EffOps eff_ops(const HamiltonianSpec& spec) {
    EffOps o;
    o.layout = SpaceLayout::effective(spec.params.n_magnon);
    o.z1 = embed(pauli(PauliAxis::Z), kQubit1, o.layout);
    o.z2 = embed(pauli(PauliAxis::Z), kQubit2, o.layout);
    o.m = embed(annihilation(spec.params.n_magnon), kMagnonEff, o.layout);
    o.md = o.m.adjoint();
    o.nm = o.md * o.m;
    return o;
}

void require_frame(const HamiltonianSpec& spec, bool effective, const char* what) {
    spec.validate();
    if (spec.is_effective() != effective)
        throw LayoutMismatch(std::string(what) + (effective ? " needs an effective-frame spec (3 factors)"
                                                            : " needs a 4-factor spec"));
}

void require_hermitian(const Operator& h, const char* what) {
    if (!h.is_hermitian(1e-12 * std::max(1.0, h.matrix().cwiseAbs().maxCoeff())))
        throw NumericalError(std::string(what) + " is not Hermitian");
}

// cos(2 theta) and sin(2 theta) with 2 theta = mu sin(psi), Jacobi-Anger sums truncated at order nmax
struct HarmonicSums {
    std::vector<double> j;
    double mu;
    int nmax;

    HarmonicSums(double mu_, int nmax_) : mu(mu_), nmax(nmax_) {
        for (int l = 0; l <= nmax; ++l) j.push_back(bessel_j(l, mu));
    }
    double cos2(double psi) const {
        double c = j[0];
        for (int l = 2; l <= nmax; l += 2) c += 2.0 * j[l] * std::cos(l * psi);
        return c;
    }
    double sin2(double psi) const {
        double s = 0.0;
        for (int l = 1; l <= nmax; l += 2) s += 2.0 * j[l] * std::sin(l * psi);
        return s;
    }
};

} // namespace

HamiltonianSpec HamiltonianSpec::make(Frame frame, const SystemParams& params, Conventions conventions,
                                      int harmonic_cutoff) {
    HamiltonianSpec s;
    s.frame = frame;
    s.params = params;
    s.derived = derive_params(params, conventions);
    s.harmonic_cutoff = harmonic_cutoff;
    s.validate();
    return s;
}

SpaceLayout HamiltonianSpec::layout() const {
    return is_effective() ? SpaceLayout::effective(params.n_magnon) : SpaceLayout::full(params.n_cavity, params.n_magnon);
}

void HamiltonianSpec::validate() const {
    if (harmonic_cutoff < 1) throw std::invalid_argument("harmonic cutoff must be >= 1");
    if (harmonic_cutoff < derived.harmonic())
        throw std::invalid_argument("harmonic cutoff " + std::to_string(harmonic_cutoff) +
                                    " drops the selected sideband " + std::to_string(derived.harmonic()));
    if (params.n_cavity < 2 || params.n_magnon < 2) throw InvalidDimension("Fock truncations must be >= 2");
}

double drive_theta(const SystemParams& p, int qubit, double t) {
    if (qubit == 0) return p.Omega_f1 / p.omega_f1 * std::sin(p.omega_f1 * t);
    return p.Omega_f2 / p.omega_f2 * std::sin(p.omega_f2 * t + p.phi);
}

TermSum h_total_terms(const HamiltonianSpec& spec) {
    require_frame(spec, false, "h_total");
    const SystemParams& p = spec.params;
    const FullOps o = full_ops(spec);
    TermSum h(o.layout);
    h.add(o.z[0], p.omega_q1 / 2);
    h.add(o.z[1], p.omega_q2 / 2);
    h.add(o.nc, p.omega_c);
    h.add(o.nm, p.omega_m);
    const double g[2] = {p.g1, p.g2};
    for (int j = 0; j < 2; ++j) {
        h.add(o.a * o.sp[j], g[j]);
        h.add(o.ad * o.sm[j], g[j]);
    }
    h.add(o.md * o.a, p.g3);
    h.add(o.m * o.ad, p.g3);
    const double w1 = p.omega_f1, w2 = p.omega_f2, O1 = p.Omega_f1, O2 = p.Omega_f2, phi = p.phi;
    if (O1 != 0.0) h.add(o.x[0], [=](double t) { return cplx(O1 * std::cos(w1 * t)); });
    if (O2 != 0.0) h.add(o.x[1], [=](double t) { return cplx(O2 * std::cos(w2 * t + phi)); });
    return h;
}

Operator h_total(const HamiltonianSpec& spec, double t) {
    Operator h = h_total_terms(spec).at(t);
    require_hermitian(h, "h_total");
    return h;
}

TermSum h_fram_terms(const HamiltonianSpec& spec) {
    require_frame(spec, false, "h_fram");
    const SystemParams& p = spec.params;
    const FullOps o = full_ops(spec);
    TermSum h(o.layout);
    const double g[2] = {p.g1, p.g2};
    const double wq[2] = {p.omega_q1, p.omega_q2};
    const double wf[2] = {p.omega_f1, p.omega_f2};
    const double offset[2] = {0.0, p.phi};
    const double wc = p.omega_c;
    for (int j = 0; j < 2; ++j) {
        const HarmonicSums hs(j == 0 ? spec.derived.mu1 : spec.derived.mu2, spec.harmonic_cutoff);
        const double w = wf[j], ph = offset[j];
        if (wq[j] != 0.0) {
            const double half = wq[j] / 2;
            h.add(o.z[j], [=](double t) { return cplx(half * hs.cos2(w * t + ph)); });
            h.add(o.y[j], [=](double t) { return cplx(half * hs.sin2(w * t + ph)); });
        }
        if (g[j] != 0.0) {
            const double gj = g[j];
            h.add_with_adjoint(o.a * o.x[j], [=](double t) { return 0.5 * gj * std::polar(1.0, -wc * t); });
            h.add_with_adjoint(o.a * o.y[j],
                               [=](double t) { return 0.5 * I * gj * hs.cos2(w * t + ph) * std::polar(1.0, -wc * t); });
            h.add_with_adjoint(o.a * o.z[j],
                               [=](double t) { return -0.5 * I * gj * hs.sin2(w * t + ph) * std::polar(1.0, -wc * t); });
        }
    }
    if (p.g3 != 0.0) {
        const double g3 = p.g3, dcm = p.omega_c - p.omega_m;
        h.add_with_adjoint(o.m * o.ad, [=](double t) { return g3 * std::polar(1.0, dcm * t); });
    }
    return h;
}

Operator h_fram(const HamiltonianSpec& spec, double t) {
    Operator h = h_fram_terms(spec).at(t);
    require_hermitian(h, "h_fram");
    return h;
}

TermSum h_sideband_terms(const HamiltonianSpec& spec) {
    require_frame(spec, false, "h_sideband");
    const DerivedParams& d = spec.derived;
    const FullOps o = full_ops(spec);
    TermSum h(o.layout);
    const double delta = d.delta, Phi = d.Phi, G1 = d.G1, G2 = d.G2, dcm = d.delta_cm, g3 = spec.params.g3;
    h.add_with_adjoint(o.z[0] * o.a, [=](double t) { return -G1 * std::polar(1.0, -delta * t); });
    h.add_with_adjoint(o.z[1] * o.a, [=](double t) { return -G2 * std::polar(1.0, -delta * t + Phi); });
    h.add_with_adjoint(o.m * o.ad, [=](double t) { return g3 * std::polar(1.0, dcm * t); });
    return h;
}

Operator h_sideband(const HamiltonianSpec& spec, double t) {
    Operator h = h_sideband_terms(spec).at(t);
    require_hermitian(h, "h_sideband");
    return h;
}

Operator h_eff(const HamiltonianSpec& spec) {
    require_frame(spec, true, "h_eff");
    const DerivedParams& d = spec.derived;
    const EffOps o = eff_ops(spec);
    Operator h = d.xi * o.nm + d.Gamma3 * (o.z1 * o.z2) + d.Gamma1 * (o.z1 * (o.m + o.md)) +
                 o.z2 * (d.Gamma2 * o.m + std::conj(d.Gamma2) * o.md);
    require_hermitian(h, "h_eff");
    return h;
}

Operator joint_operator_a(const HamiltonianSpec& spec) {
    const EffOps o = eff_ops(spec);
    return o.z1 + std::polar(1.0, spec.derived.Phi) * o.z2;
}

TermSum h_eff_rotating_terms(const HamiltonianSpec& spec) {
    require_frame(spec, true, "h_eff_rotating");
    const DerivedParams& d = spec.derived;
    const EffOps o = eff_ops(spec);
    const Operator A = joint_operator_a(spec);
    TermSum h(o.layout);
    const double G1 = d.Gamma1, xi = d.xi;
    h.add_with_adjoint(o.m * A, [=](double t) { return G1 * std::polar(1.0, -xi * t); });
    h.add(o.z1 * o.z2, d.Gamma3);
    return h;
}

Operator h_eff_rotating(const HamiltonianSpec& spec, double t) {
    Operator h = h_eff_rotating_terms(spec).at(t);
    require_hermitian(h, "h_eff_rotating");
    return h;
}

Operator free_hamiltonian_h0(const HamiltonianSpec& spec) {
    const DerivedParams& d = spec.derived;
    const FullOps o = full_ops(spec);
    return d.delta * o.nc + (d.delta - d.delta_cm) * o.nm;
}

Operator coupling_v(const HamiltonianSpec& spec) {
    const DerivedParams& d = spec.derived;
    const FullOps o = full_ops(spec);
    const cplx e = std::polar(1.0, d.Phi);
    return -d.G * (o.z[0] * (o.a + o.ad)) - d.G * (o.z[1] * (std::conj(e) * o.ad + e * o.a)) +
           spec.params.g3 * (o.m * o.ad + o.md * o.a);
}

Operator generator_s(const HamiltonianSpec& spec) {
    const DerivedParams& d = spec.derived;
    const FullOps o = full_ops(spec);
    const cplx e = std::polar(1.0, d.Phi);
    const double r = d.G / d.delta;
    return -r * (o.z[0] * (o.ad - o.a)) - r * (o.z[1] * (std::conj(e) * o.ad - e * o.a)) +
           (spec.params.g3 / d.delta_cm) * (o.m * o.ad - o.md * o.a);
}

namespace {

Operator u1_operator(const SystemParams& p, const SpaceLayout& layout, double t) {
    Operator u = Operator::identity(layout);
    for (int j = 0; j < 2; ++j) {
        const double th = drive_theta(p, j, t);
        MatrixXcd q(2, 2);
        q << std::cos(th), -I * std::sin(th), -I * std::sin(th), std::cos(th);
        u = u * embed(Operator(SpaceLayout::qubit(), q), std::size_t(j), layout);
    }
    return u;
}

Operator diagonal_phase(const SpaceLayout& layout, const Eigen::VectorXd& energies, double t) {
    MatrixXcd u = MatrixXcd::Zero(layout.dim(), layout.dim());
    for (Eigen::Index i = 0; i < layout.dim(); ++i) u(i, i) = std::polar(1.0, -energies(i) * t);
    return Operator(layout, u);
}

Eigen::VectorXd number_diagonal(const SpaceLayout& layout, std::size_t site) {
    const Operator n = embed(number_operator(layout.factor_dim(site)), site, layout);
    return n.matrix().diagonal().real();
}

} // namespace

Operator frame_unitary(FrameKind kind, const HamiltonianSpec& spec, double t) {
    spec.validate();
    const SystemParams& p = spec.params;
    const DerivedParams& d = spec.derived;
    const SpaceLayout layout = SpaceLayout::full(p.n_cavity, p.n_magnon);
    const Eigen::VectorXd nc = number_diagonal(layout, kCavity), nm = number_diagonal(layout, kMagnonFull);
    switch (kind) {
    case FrameKind::U1: return u1_operator(p, layout, t);
    case FrameKind::U2: return diagonal_phase(layout, p.omega_c * nc + p.omega_m * nm, t);
    case FrameKind::Uaux: return diagonal_phase(layout, d.delta * nc + (d.delta - d.delta_cm) * nm, t);
    case FrameKind::ExpS: return matrix_exponential(generator_s(spec));
    case FrameKind::Utot: {
        const Operator uaux = diagonal_phase(layout, d.delta * nc + (d.delta - d.delta_cm) * nm, t);
        return u1_operator(p, layout, t) * diagonal_phase(layout, p.omega_c * nc + p.omega_m * nm, t) *
               uaux.adjoint() * matrix_exponential(-1.0 * generator_s(spec));
    }
    }
    throw std::invalid_argument("unknown frame kind");
}

EffectiveFrameMap::EffectiveFrameMap(const HamiltonianSpec& spec) : spec_(spec) {
    spec_.validate();
    const SpaceLayout layout = SpaceLayout::full(spec.params.n_cavity, spec.params.n_magnon);
    exp_s_ = expm(generator_s(spec_).matrix());
    const DerivedParams& d = spec_.derived;
    h0_diag_ = d.delta * number_diagonal(layout, kCavity) + (d.delta - d.delta_cm) * number_diagonal(layout, kMagnonFull);
}

VectorXcd EffectiveFrameMap::from_floquet(const VectorXcd& psi, double t) const {
    VectorXcd v(psi.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) v(i) = std::polar(1.0, -h0_diag_(i) * t) * psi(i);
    return exp_s_ * v;
}

MatrixXcd EffectiveFrameMap::density_from_floquet(const MatrixXcd& rho, double t) const {
    const Eigen::Index n = rho.rows();
    MatrixXcd r(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            r(i, j) = std::polar(1.0, -(h0_diag_(i) - h0_diag_(j)) * t) * rho(i, j);
    return exp_s_ * r * exp_s_.adjoint();
}

VectorXcd EffectiveFrameMap::from_lab(const VectorXcd& psi_lab, double t) const {
    const SpaceLayout layout = SpaceLayout::full(spec_.params.n_cavity, spec_.params.n_magnon);
    const Operator u1 = frame_unitary(FrameKind::U1, spec_, t);
    VectorXcd v = u1.matrix().adjoint() * psi_lab;
    const Eigen::VectorXd nc = number_diagonal(layout, kCavity), nm = number_diagonal(layout, kMagnonFull);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) *= std::polar(1.0, (spec_.params.omega_c * nc(i) + spec_.params.omega_m * nm(i)) * t);
    return from_floquet(v, t);
}

} // namespace fcat
