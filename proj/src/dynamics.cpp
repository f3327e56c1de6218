#include "fcat/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace fcat {

namespace {

const cplx I(0.0, 1.0);

double error_norm(const MatrixXcd& err, const MatrixXcd& y0, const MatrixXcd& y1, double atol, double rtol) {
    const Eigen::ArrayXXd sc = atol + rtol * y0.cwiseAbs().array().max(y1.cwiseAbs().array());
    return std::sqrt((err.cwiseAbs().array() / sc).square().mean());
}

std::string where(double t) {
    std::ostringstream os;
    os << "t = " << t << " ns";
    return os.str();
}

void check_times(const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("output time list is empty");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("output times must be strictly increasing");
}

IntegratorStats integrate_rk4(const RhsFunction& f, MatrixXcd y, const std::vector<double>& times,
                              const IntegratorOptions& opt, const Observer& observe) {
    IntegratorStats st;
    st.method = "rk4-fixed";
    if (!(opt.fixed_step > 0.0)) throw std::invalid_argument("fixed step must be positive");
    observe(0, times[0], y);
    MatrixXcd k1, k2, k3, k4, tmp;
    st.smallest_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double span = times[i] - times[i - 1];
        const long n = std::max(1L, long(std::ceil(span / opt.fixed_step - 1e-9)));
        const double h = span / double(n);
        st.smallest_step = std::min(st.smallest_step, h);
        st.largest_step = std::max(st.largest_step, h);
        for (long s = 0; s < n; ++s) {
            const double t = times[i - 1] + s * h;
            f(t, y, k1);
            tmp = y + (0.5 * h) * k1;
            f(t + 0.5 * h, tmp, k2);
            tmp = y + (0.5 * h) * k2;
            f(t + 0.5 * h, tmp, k3);
            tmp = y + h * k3;
            f(t + h, tmp, k4);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            st.rhs_evals += 4;
            ++st.accepted;
            if (st.accepted > opt.max_steps) throw NumericalError("step budget exhausted at " + where(t));
        }
        if (!y.allFinite()) throw NumericalError("non-finite state at " + where(times[i]));
        observe(i, times[i], y);
    }
    return st;
}

} // namespace

IntegratorStats integrate(const RhsFunction& f, MatrixXcd y, const std::vector<double>& times,
                          const IntegratorOptions& opt, const Observer& observe) {
    check_times(times);
    if (opt.stepping == Stepping::FixedRK4) return integrate_rk4(f, std::move(y), times, opt, observe);

    // Dormand-Prince 5(4) with PI step-size control
    static const double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
    static const double a21 = 1. / 5;
    static const double a31 = 3. / 40, a32 = 9. / 40;
    static const double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
    static const double a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561, a54 = -212. / 729;
    static const double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247, a64 = 49. / 176,
                        a65 = -5103. / 18656;
    static const double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192, b5 = -2187. / 6784, b6 = 11. / 84;
    static const double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920, e5 = -17253. / 339200,
                        e6 = 22. / 525, e7 = -1. / 40;

    IntegratorStats st;
    st.method = "dopri5";
    st.smallest_step = std::numeric_limits<double>::infinity();
    observe(0, times[0], y);
    if (times.size() == 1) return st;

    double t = times[0];
    MatrixXcd k1, k2, k3, k4, k5, k6, k7, tmp, ynew, err;
    f(t, y, k1);
    st.rhs_evals = 1;

    double h = opt.initial_step;
    if (!(h > 0.0)) {
        const Eigen::ArrayXXd sc = opt.atol + opt.rtol * y.cwiseAbs().array();
        const double d0 = std::sqrt((y.cwiseAbs().array() / sc).square().mean());
        const double d1 = std::sqrt((k1.cwiseAbs().array() / sc).square().mean());
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, times.back() - t);
    }
    if (opt.max_step > 0.0) h = std::min(h, opt.max_step);

    double err_prev = 1e-4;
    std::size_t next = 1;
    while (next < times.size()) {
        const double target = times[next];
        bool clipped = false;
        double h_try = h;
        if (t + h_try >= target - 1e-12 * std::max(1.0, std::abs(target))) {
            h_try = target - t;
            clipped = true;
        }
        if (h_try < opt.min_step * std::max(1.0, std::abs(t)))
            throw NumericalError("step-size underflow (h = " + std::to_string(h_try) + ") at " + where(t) +
                                 "; the problem may be stiff");

        tmp = y + h_try * a21 * k1;
        f(t + c2 * h_try, tmp, k2);
        tmp = y + h_try * (a31 * k1 + a32 * k2);
        f(t + c3 * h_try, tmp, k3);
        tmp = y + h_try * (a41 * k1 + a42 * k2 + a43 * k3);
        f(t + c4 * h_try, tmp, k4);
        tmp = y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(t + c5 * h_try, tmp, k5);
        tmp = y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(t + h_try, tmp, k6);
        ynew = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(t + h_try, ynew, k7);
        st.rhs_evals += 6;
        err = h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double en = error_norm(err, y, ynew, opt.atol, opt.rtol);
        if (!std::isfinite(en)) en = 1e10;

        if (en <= 1.0) {
            t = clipped ? target : t + h_try;
            y.swap(ynew);
            k1.swap(k7);
            ++st.accepted;
            st.smallest_step = std::min(st.smallest_step, h_try);
            st.largest_step = std::max(st.largest_step, h_try);
            double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
            fac = std::clamp(fac, 0.2, 5.0);
            err_prev = std::max(en, 1e-4);
            const double h_next = h_try * fac;
            // a step shortened only to hit an output time should not shrink the controller's step
            h = clipped ? std::max(h, h_next) : h_next;
            if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
            if (clipped) {
                if (!y.allFinite()) throw NumericalError("non-finite state at " + where(t));
                observe(next, t, y);
                ++next;
            }
        } else {
            ++st.rejected;
            h = h_try * std::max(0.2, 0.9 * std::pow(en, -0.2));
        }
        if (st.accepted + st.rejected > opt.max_steps) throw NumericalError("step budget exhausted at " + where(t));
    }
    return st;
}

Trajectory evolve_schrodinger(const TermSum& h, const QuantumState& psi0, const std::vector<double>& times,
                              const IntegratorOptions& options) {
    Trajectory traj;
    traj.stats = evolve_schrodinger_stream(h, psi0, times, options, [&](std::size_t, double t, const MatrixXcd& y) {
        traj.times.push_back(t);
        traj.states.push_back(QuantumState::pure(psi0.layout(), y.col(0)));
    });
    return traj;
}

IntegratorStats evolve_schrodinger_stream(const TermSum& h, const QuantumState& psi0, const std::vector<double>& times,
                                          const IntegratorOptions& options, const Observer& observe) {
    if (!psi0.is_pure()) throw std::invalid_argument("evolve_schrodinger needs a pure initial state");
    if (h.layout() != psi0.layout()) throw LayoutMismatch("Hamiltonian and state layouts differ");
    RhsFunction f = [&h](double t, const MatrixXcd& y, MatrixXcd& dy) {
        h.apply(t, y, dy);
        dy *= -I;
    };
    double drift = 0.0;
    IntegratorStats st = integrate(f, MatrixXcd(psi0.vector()), times, options,
                                   [&](std::size_t i, double t, const MatrixXcd& y) {
                                       drift = std::max(drift, std::abs(y.norm() - 1.0));
                                       observe(i, t, y);
                                   });
    st.max_norm_drift = drift;
    return st;
}

Trajectory evolve_schrodinger(const std::function<Operator(double)>& h, const QuantumState& psi0,
                              const std::vector<double>& times, const IntegratorOptions& options) {
    if (!psi0.is_pure()) throw std::invalid_argument("evolve_schrodinger needs a pure initial state");
    RhsFunction f = [&](double t, const MatrixXcd& y, MatrixXcd& dy) {
        const Operator ht = h(t);
        if (ht.layout() != psi0.layout()) throw LayoutMismatch("Hamiltonian and state layouts differ");
        dy.noalias() = -I * (ht.matrix() * y);
    };
    Trajectory traj;
    double drift = 0.0;
    traj.stats = integrate(f, MatrixXcd(psi0.vector()), times, options, [&](std::size_t, double t, const MatrixXcd& y) {
        drift = std::max(drift, std::abs(y.norm() - 1.0));
        traj.times.push_back(t);
        traj.states.push_back(QuantumState::pure(psi0.layout(), y.col(0)));
    });
    traj.stats.max_norm_drift = drift;
    return traj;
}

namespace {

// rho' = -i(H_nh rho - rho H_nh^dag) + sum_c c rho c^dag with H_nh = H - (i/2) sum c^dag c
class LindbladRhs {
public:
    LindbladRhs(std::function<SparseMatrixXcd(double)> hamiltonian, std::vector<std::function<SparseMatrixXcd(double)>> channels,
                bool constant)
        : hamiltonian_(std::move(hamiltonian)), channels_(std::move(channels)), constant_(constant) {
        if (constant_) build(0.0);
    }

    void operator()(double t, const MatrixXcd& rho, MatrixXcd& drho) {
        if (!constant_) build(t);
        x_.noalias() = h_nh_ * rho;
        x_ *= -I;
        drho = x_ + x_.adjoint();
        if (!c_.empty()) {
            d_.setZero(rho.rows(), rho.cols());
            for (std::size_t k = 0; k < c_.size(); ++k) {
                y_.noalias() = c_[k] * rho;
                z_ = y_.adjoint();
                d_.noalias() += c_[k] * z_;
            }
            drho += 0.5 * (d_ + d_.adjoint());
        }
    }

private:
    void build(double t) {
        h_nh_ = hamiltonian_(t);
        c_.clear();
        for (const auto& ch : channels_) {
            SparseMatrixXcd c = ch(t);
            SparseMatrixXcd cdc = SparseMatrixXcd(c.adjoint()) * c;
            h_nh_ -= (0.5 * I) * cdc;
            c_.push_back(std::move(c));
        }
    }

    std::function<SparseMatrixXcd(double)> hamiltonian_;
    std::vector<std::function<SparseMatrixXcd(double)>> channels_;
    bool constant_;
    SparseMatrixXcd h_nh_;
    std::vector<SparseMatrixXcd> c_;
    MatrixXcd x_, y_, z_, d_;
};

Trajectory run_lindblad(LindbladRhs rhs, const QuantumState& rho0, const std::vector<double>& times,
                        const IntegratorOptions& options) {
    const MatrixXcd r0 = rho0.density_matrix();
    Trajectory traj;
    double drift = 0.0, min_eig = std::numeric_limits<double>::infinity();
    RhsFunction f = [&rhs](double t, const MatrixXcd& y, MatrixXcd& dy) { rhs(t, y, dy); };
    traj.stats = integrate(f, r0, times, options, [&](std::size_t, double t, const MatrixXcd& y) {
        drift = std::max(drift, std::abs(y.trace().real() - 1.0));
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(y, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        min_eig = std::min(min_eig, lo);
        if (lo < -1e-6)
            throw NumericalError("density matrix lost positivity (min eigenvalue " + std::to_string(lo) + ") at " +
                                 where(t) + "; tighten integrator tolerances");
        traj.times.push_back(t);
        traj.states.push_back(QuantumState::mixed(rho0.layout(), y, 1e-6));
    });
    traj.stats.max_norm_drift = drift;
    traj.stats.min_eigenvalue = min_eig;
    return traj;
}

void check_channel_layout(const SpaceLayout& want, const SpaceLayout& got) {
    if (want != got) throw LayoutMismatch("collapse operator layout " + got.describe() + " vs " + want.describe());
}

} // namespace

Trajectory evolve_lindblad(const TermSum& h, const std::vector<CollapseChannel>& channels, const QuantumState& rho0,
                           const std::vector<double>& times, const IntegratorOptions& options) {
    if (h.layout() != rho0.layout()) throw LayoutMismatch("Hamiltonian and state layouts differ");
    std::vector<std::function<SparseMatrixXcd(double)>> ch;
    for (const auto& c : channels) {
        check_channel_layout(rho0.layout(), c.op.layout());
        SparseMatrixXcd s = to_sparse(c.op.matrix());
        ch.push_back([s](double) { return s; });
    }
    LindbladRhs rhs([&h](double t) { return h.sparse_at(t); }, std::move(ch), h.is_constant());
    return run_lindblad(std::move(rhs), rho0, times, options);
}

Trajectory evolve_lindblad(const std::function<Operator(double)>& h, const std::vector<CollapseChannel>& channels,
                           const QuantumState& rho0, const std::vector<double>& times, const IntegratorOptions& options) {
    std::vector<std::function<SparseMatrixXcd(double)>> ch;
    for (const auto& c : channels) {
        check_channel_layout(rho0.layout(), c.op.layout());
        SparseMatrixXcd s = to_sparse(c.op.matrix());
        ch.push_back([s](double) { return s; });
    }
    const SpaceLayout layout = rho0.layout();
    LindbladRhs rhs(
        [h, layout](double t) {
            const Operator ht = h(t);
            if (ht.layout() != layout) throw LayoutMismatch("Hamiltonian and state layouts differ");
            return to_sparse(ht.matrix());
        },
        std::move(ch), false);
    return run_lindblad(std::move(rhs), rho0, times, options);
}

Trajectory evolve_lindblad(const TermSum& h, const std::vector<TimeDependentChannel>& channels,
                           const QuantumState& rho0, const std::vector<double>& times, const IntegratorOptions& options) {
    if (h.layout() != rho0.layout()) throw LayoutMismatch("Hamiltonian and state layouts differ");
    std::vector<std::function<SparseMatrixXcd(double)>> ch;
    bool constant = h.is_constant();
    for (const auto& c : channels) {
        check_channel_layout(rho0.layout(), c.op.layout());
        constant = constant && c.op.is_constant();
        const TermSum* op = &c.op;
        ch.push_back([op](double t) { return op->sparse_at(t); });
    }
    LindbladRhs rhs([&h](double t) { return h.sparse_at(t); }, std::move(ch), constant);
    return run_lindblad(std::move(rhs), rho0, times, options);
}

namespace {

// (x - sin x) / x^2
double x_minus_sin_over_x2(double x) {
    if (std::abs(x) < 0.1) {
        const double x2 = x * x;
        return x * (1.0 / 6 - x2 / 120 * (1.0 - x2 / 42 * (1.0 - x2 / 72 * (1.0 - x2 / 110))));
    }
    return (x - std::sin(x)) / (x * x);
}

// (1 - e^{ix}) / x
cplx one_minus_expi_over_x(double x) {
    if (std::abs(x) < 1e-2) {
        // -sum_{k>=1} (i x)^k / (k! x)
        cplx sum = 0.0, term = 1.0;
        for (int k = 1; k <= 10; ++k) {
            term *= I * x / double(k);
            sum -= term / x;
            if (x == 0.0) break;
        }
        if (x == 0.0) return -I;
        return sum;
    }
    return (1.0 - std::polar(1.0, x)) / x;
}

} // namespace

PropagatorParams analytic_propagator(const DerivedParams& dp, double t) {
    PropagatorParams p;
    const double x = dp.xi * t;
    const double f = x_minus_sin_over_x2(x);
    p.Theta = 2.0 * dp.Gamma1 * dp.Gamma1 * t * t * f;
    p.eta2 = 2.0 * dp.Gamma1 * dp.Gamma1 * std::cos(dp.Phi) * t * t * f - dp.Gamma3 * t;
    if (std::abs(std::cos(dp.Phi)) < 1e-15 && dp.Gamma3 == 0.0) p.eta2 = 0.0;
    p.eta1 = dp.Gamma1 * t * one_minus_expi_over_x(x);
    p.alpha = cplx(1.0, -1.0) * p.eta1;
    return p;
}

Operator analytic_propagator_operator(const HamiltonianSpec& spec, double t) {
    const PropagatorParams p = analytic_propagator(spec.derived, t);
    const SpaceLayout layout = SpaceLayout::effective(spec.params.n_magnon);
    const Operator A = joint_operator_a(spec);
    const Operator m = embed(annihilation(spec.params.n_magnon), kMagnonEff, layout);
    const Operator zz = embed(pauli(PauliAxis::Z), kQubit1, layout) * embed(pauli(PauliAxis::Z), kQubit2, layout);
    const Operator gen = p.eta1 * (m.adjoint() * A.adjoint()) - std::conj(p.eta1) * (m * A) + (I * p.eta2) * zz;
    return std::polar(1.0, p.Theta) * matrix_exponential(gen);
}

std::vector<CollapseChannel> lab_collapse_channels(const SystemParams& p) {
    const SpaceLayout layout = SpaceLayout::full(p.n_cavity, p.n_magnon);
    std::vector<CollapseChannel> out;
    if (p.kappa_m > 0.0)
        out.push_back({std::sqrt(p.kappa_m) * embed(annihilation(p.n_magnon), kMagnonFull, layout), "magnon"});
    if (p.gamma_q1 > 0.0)
        out.push_back({std::sqrt(p.gamma_q1) * embed(pauli(PauliAxis::Minus), kQubit1, layout), "qubit1"});
    if (p.gamma_q2 > 0.0)
        out.push_back({std::sqrt(p.gamma_q2) * embed(pauli(PauliAxis::Minus), kQubit2, layout), "qubit2"});
    if (p.kappa_a > 0.0)
        out.push_back({std::sqrt(p.kappa_a) * embed(annihilation(p.n_cavity), kCavity, layout), "cavity"});
    return out;
}

std::vector<CollapseChannel> effective_collapse_channels(const SystemParams& p, const DerivedParams& d) {
    const SpaceLayout layout = SpaceLayout::effective(p.n_magnon);
    std::vector<CollapseChannel> out;
    const double gammas[2] = {p.gamma_q1, p.gamma_q2};
    const double mus[2] = {d.mu1, d.mu2};
    for (std::size_t j = 0; j < 2; ++j) {
        const double g = gammas[j];
        if (g <= 0.0) continue;
        const std::string q = "qubit" + std::to_string(j + 1);
        const double j1 = bessel_j(1, mus[j]), j2 = bessel_j(2, mus[j]), j3 = bessel_j(3, mus[j]);
        out.push_back({std::sqrt(g / 2) * embed(pauli(PauliAxis::X), j, layout), q + "_x"});
        out.push_back({std::sqrt(g / 2) * j2 * embed(pauli(PauliAxis::Y), j, layout), q + "_y"});
        out.push_back({std::sqrt((j1 * j1 + j3 * j3) * g / 2) * embed(pauli(PauliAxis::Z), j, layout), q + "_z"});
    }
    const Operator m = embed(annihilation(p.n_magnon), kMagnonEff, layout);
    if (p.kappa_m > 0.0) out.push_back({std::sqrt(p.kappa_m) * m, "magnon"});
    if (p.kappa_a > 0.0) {
        const double r = d.G / d.delta;
        const Operator hybrid = r * embed(pauli(PauliAxis::Z), kQubit1, layout) +
                                (r * std::polar(1.0, -d.Phi)) * embed(pauli(PauliAxis::Z), kQubit2, layout) -
                                (p.g3 / d.delta_cm) * m;
        out.push_back({std::sqrt(p.kappa_a) * hybrid, "hybrid"});
    }
    return out;
}

std::vector<TimeDependentChannel> floquet_frame_collapse_channels(const HamiltonianSpec& spec) {
    const SystemParams& p = spec.params;
    const SpaceLayout layout = SpaceLayout::full(p.n_cavity, p.n_magnon);
    std::vector<TimeDependentChannel> out;
    // phases of a and m drop out of the dissipator, so only the qubit channels change
    if (p.kappa_m > 0.0) {
        TermSum c(layout);
        c.add(embed(annihilation(p.n_magnon), kMagnonFull, layout), std::sqrt(p.kappa_m));
        out.push_back({std::move(c), "magnon"});
    }
    const double gammas[2] = {p.gamma_q1, p.gamma_q2};
    for (int j = 0; j < 2; ++j) {
        if (gammas[j] <= 0.0) continue;
        const double s = std::sqrt(gammas[j]);
        const std::size_t site = std::size_t(j);
        TermSum c(layout);
        c.add(embed(pauli(PauliAxis::X), site, layout), 0.5 * s);
        const SystemParams pc = p;
        c.add(embed(pauli(PauliAxis::Z), site, layout),
              [=](double t) { return 0.5 * I * s * std::sin(2.0 * drive_theta(pc, j, t)); });
        c.add(embed(pauli(PauliAxis::Y), site, layout),
              [=](double t) { return -0.5 * I * s * std::cos(2.0 * drive_theta(pc, j, t)); });
        out.push_back({std::move(c), "qubit" + std::to_string(j + 1)});
    }
    if (p.kappa_a > 0.0) {
        TermSum c(layout);
        c.add(embed(annihilation(p.n_cavity), kCavity, layout), std::sqrt(p.kappa_a));
        out.push_back({std::move(c), "cavity"});
    }
    return out;
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
    if (count == 0) return {};
    if (count == 1) return {start};
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = start + (stop - start) * double(i) / double(count - 1);
    v.back() = stop;
    return v;
}

} // namespace fcat
