#include "fcat/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "fcat/model.hpp"

namespace fcat {

std::string to_string(CatBranch b) {
    switch (b) {
    case CatBranch::PP: return "pp";
    case CatBranch::PM: return "pm";
    case CatBranch::MP: return "mp";
    case CatBranch::MM: return "mm";
    }
    return "?";
}

CatBranch branch_from_outcomes(QubitOutcome q1, QubitOutcome q2) {
    if (q1 == QubitOutcome::Plus) return q2 == QubitOutcome::Plus ? CatBranch::PP : CatBranch::PM;
    return q2 == QubitOutcome::Plus ? CatBranch::MP : CatBranch::MM;
}

std::array<CatBranch, 4> all_branches() { return {CatBranch::PP, CatBranch::MM, CatBranch::PM, CatBranch::MP}; }

double CatState::closed_form_relative_difference() const {
    return std::abs(closed_form_constant - norm_constant) / norm_constant;
}

namespace {

VectorXcd coherent_vector(cplx alpha, int dim) {
    VectorXcd v(dim);
    v(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(double(n));
    return v;
}

} // namespace

QuantumState coherent(cplx alpha, int dim, Diagnostics* diag) {
    if (dim < 2) throw InvalidDimension("coherent state needs dim >= 2");
    if (dim < recommended_dim(std::abs(alpha)))
        emit(diag, "truncation", "Fock dim " + std::to_string(dim) + " is small for |alpha| = " +
                                     std::to_string(std::abs(alpha)));
    VectorXcd v = coherent_vector(alpha, dim);
    v.normalize();
    return QuantumState::pure(SpaceLayout::boson(dim), v);
}

CatState cat4(cplx alpha, CatBranch branch, int dim, Diagnostics* diag) {
    if (dim < 2) throw InvalidDimension("cat state needs dim >= 2");
    if (dim < recommended_dim(std::abs(alpha)))
        emit(diag, "truncation", "Fock dim " + std::to_string(dim) + " is small for |alpha| = " +
                                     std::to_string(std::abs(alpha)));
    const cplx I(0.0, 1.0);
    // coefficients of |alpha>, |i alpha>, |-i alpha>, |-alpha>
    double c[4] = {1, 1, 1, 1};
    switch (branch) {
    case CatBranch::PP: break;
    case CatBranch::PM: c[1] = -1; c[3] = -1; break;
    case CatBranch::MP: c[2] = -1; c[3] = -1; break;
    case CatBranch::MM: c[1] = -1; c[2] = -1; break;
    }
    // Fock coefficient sum_k c_k (i^k alpha)^n is evaluated directly; for alpha -> 0 the leading
    // allowed Fock state survives normalization.
    const cplx phases[4] = {1.0, I, -I, -1.0};
    VectorXcd v = VectorXcd::Zero(dim);
    const double a = std::abs(alpha);
    std::vector<double> amp(dim);  // |alpha|^n / sqrt(n!) without the Gaussian factor
    amp[0] = 1.0;
    for (int n = 1; n < dim; ++n) amp[n] = amp[n - 1] * a / std::sqrt(double(n));
    const cplx unit = a > 0.0 ? alpha / a : cplx(1.0);
    for (int n = 0; n < dim; ++n) {
        cplx s = 0.0;
        for (int k = 0; k < 4; ++k) s += c[k] * std::pow(phases[k], n);
        v(n) = s * std::pow(unit, n) * amp[n];
    }
    if (a == 0.0 || v.norm() < 1e-300) {
        // alpha -> 0 limit: lowest Fock state allowed by the branch
        int lowest = 0;
        if (branch == CatBranch::MM) lowest = 2;
        if (branch == CatBranch::PM || branch == CatBranch::MP) lowest = 1;
        if (lowest >= dim) throw InvalidDimension("dim too small for the cat branch");
        v.setZero();
        v(lowest) = 1.0;
    }
    // normalization of the unnormalized superposition with Gaussian factor e^{-|a|^2/2}
    const double gauss = std::exp(-0.5 * a * a);
    CatState cs;
    cs.alpha = alpha;
    cs.branch = branch;
    cs.dim = dim;
    const double raw = v.norm() * gauss;
    cs.norm_constant = raw > 0.0 ? 1.0 / raw : 0.0;
    const double e2 = std::exp(-2.0 * a * a), cs2 = std::cos(a * a);
    double closed = 0.0;
    switch (branch) {
    case CatBranch::PP: closed = 4 + 4 * e2 + 8 * e2 * cs2; break;
    case CatBranch::MM: closed = 4 + 4 * e2 - 8 * e2 * cs2; break;
    default: closed = 4 - 4 * e2; break;
    }
    cs.closed_form_constant = closed > 0.0 ? 1.0 / std::sqrt(closed) : 0.0;
    v.normalize();
    cs.state = QuantumState::pure(SpaceLayout::boson(dim), v);
    return cs;
}

QuantumState cat2_even(cplx alpha, int dim) {
    VectorXcd v = coherent_vector(alpha, dim) + coherent_vector(-alpha, dim);
    if (v.norm() == 0.0) throw std::invalid_argument("degenerate two-component cat");
    v.normalize();
    return QuantumState::pure(SpaceLayout::boson(dim), v);
}

ConditionedState project_qubits(const QuantumState& state, QubitOutcome q1, QubitOutcome q2) {
    const SpaceLayout& layout = state.layout();
    if (layout.size() < 3 || layout.factors()[0].kind != FactorKind::Qubit || layout.factors()[1].kind != FactorKind::Qubit)
        throw LayoutMismatch("project_qubits expects two leading qubit factors, got " + layout.describe());
    std::vector<std::size_t> rest;
    for (std::size_t i = 2; i < layout.size(); ++i) rest.push_back(i);
    const SpaceLayout out_layout = layout.subset(rest);
    const Eigen::Index d = out_layout.dim();
    // <q1 q2| in the (g, e) basis: |+-> = (|g> +- |e>)/sqrt 2
    const double s = 1.0 / std::sqrt(2.0);
    const double v1[2] = {s, q1 == QubitOutcome::Plus ? s : -s};
    const double v2[2] = {s, q2 == QubitOutcome::Plus ? s : -s};
    // projection map P: d x (4d), P = <q1 q2| tensor I
    auto weight = [&](int block) { return v1[block / 2] * v2[block % 2]; };

    if (state.is_pure()) {
        const VectorXcd& psi = state.vector();
        VectorXcd phi = VectorXcd::Zero(d);
        for (int b = 0; b < 4; ++b) phi += weight(b) * psi.segment(b * d, d);
        const double p = phi.squaredNorm();
        if (p < 1e-12) throw std::domain_error("degenerate qubit outcome (probability " + std::to_string(p) + ")");
        return {QuantumState::pure(out_layout, phi / std::sqrt(p)), p};
    }
    const MatrixXcd& rho = state.density();
    MatrixXcd r = MatrixXcd::Zero(d, d);
    for (int b1 = 0; b1 < 4; ++b1)
        for (int b2 = 0; b2 < 4; ++b2) r += weight(b1) * weight(b2) * rho.block(b1 * d, b2 * d, d, d);
    const double p = r.trace().real();
    if (p < 1e-12) throw std::domain_error("degenerate qubit outcome (probability " + std::to_string(p) + ")");
    r /= p;
    r = 0.5 * (r + r.adjoint()).eval();
    return {QuantumState::mixed(out_layout, r), p};
}

double fidelity(const QuantumState& rho, const QuantumState& target) {
    if (!target.is_pure()) throw std::invalid_argument("fidelity target must be pure");
    if (rho.layout() != target.layout())
        throw LayoutMismatch("fidelity: " + rho.layout().describe() + " vs " + target.layout().describe());
    const VectorXcd& t = target.vector();
    double f = rho.is_pure() ? std::norm(t.dot(rho.vector())) : t.dot(rho.density() * t).real();
    return std::clamp(f, 0.0, 1.0);
}

QuantumState rotate_phase(const QuantumState& state, double phase) {
    if (state.layout().size() != 1) throw LayoutMismatch("rotate_phase expects a single boson factor");
    const Eigen::Index n = state.dim();
    VectorXcd ph(n);
    for (Eigen::Index k = 0; k < n; ++k) ph(k) = std::polar(1.0, phase * double(k));
    if (state.is_pure()) return QuantumState::pure(state.layout(), ph.cwiseProduct(state.vector()));
    MatrixXcd r = ph.asDiagonal() * state.density() * ph.conjugate().asDiagonal();
    return QuantumState::mixed(state.layout(), r);
}

GridSpec GridSpec::square(double extent, int points) {
    GridSpec g;
    g.re_min = g.im_min = -extent;
    g.re_max = g.im_max = extent;
    g.n_re = g.n_im = points;
    return g;
}

namespace {

std::vector<double> axis(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("grid needs at least one point per axis");
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw std::invalid_argument("grid bounds invalid");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1);
    return v;
}

// (2/pi) Tr[rho D(alpha) P D(-alpha)] via the Laguerre recursion over matrix elements |m><n|
double wigner_laguerre(const MatrixXcd& rho, cplx alpha, std::vector<cplx>& wl) {
    const int M = int(rho.rows());
    wl.assign(M, 0.0);
    wl[0] = std::exp(-2.0 * std::norm(alpha)) / kPi;
    double w = rho(0, 0).real() * wl[0].real();
    for (int n = 1; n < M; ++n) {
        wl[n] = 2.0 * alpha * wl[n - 1] / std::sqrt(double(n));
        w += 2.0 * (rho(0, n) * wl[n]).real();
    }
    for (int m = 1; m < M; ++m) {
        cplx temp = wl[m];
        wl[m] = (2.0 * std::conj(alpha) * temp - std::sqrt(double(m)) * wl[m - 1]) / std::sqrt(double(m));
        w += (rho(m, m) * wl[m]).real();
        for (int n = m + 1; n < M; ++n) {
            const cplx temp2 = (2.0 * alpha * wl[n - 1] - std::sqrt(double(m)) * temp) / std::sqrt(double(n));
            temp = wl[n];
            wl[n] = temp2;
            w += 2.0 * (rho(m, n) * wl[n]).real();
        }
    }
    return 2.0 * w;
}

struct ParityEvaluator {
    MatrixXcd rho;
    int padded;
    MatrixXcd a;

    ParityEvaluator(const MatrixXcd& r, int pad) : rho(r), padded(pad) { a = annihilation(padded).matrix(); }

    cplx operator()(cplx alpha) const {
        const Eigen::Index n = rho.rows();
        const MatrixXcd d = expm(alpha * a.adjoint() - std::conj(alpha) * a);  // D(alpha)
        // D(-alpha) rho D(alpha) restricted to where rho lives
        const MatrixXcd top = d.topRows(n);  // rows < n of D(alpha)
        const MatrixXcd r = rho * top;       // n x padded
        cplx acc = 0.0;
        for (Eigen::Index k = 0; k < padded; ++k) {
            cplx mkk = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) mkk += std::conj(top(i, k)) * r(i, k);
            acc += (k % 2 == 0 ? 1.0 : -1.0) * mkk;
        }
        return 2.0 / kPi * acc;
    }
};

int padded_dim(int dim, double max_abs_alpha) {
    const double root = std::sqrt(double(dim)) + max_abs_alpha;
    return dim + int(std::ceil(root * root + 8.0 * root + 10.0));
}

} // namespace

std::vector<double> GridSpec::re_axis() const { return axis(re_min, re_max, n_re); }
std::vector<double> GridSpec::im_axis() const { return axis(im_min, im_max, n_im); }
double GridSpec::step_re() const { return n_re > 1 ? (re_max - re_min) / (n_re - 1) : 0.0; }
double GridSpec::step_im() const { return n_im > 1 ? (im_max - im_min) / (n_im - 1) : 0.0; }

double WignerGrid::integral() const { return values.sum() * step_re * step_im; }

double WignerGrid::min_value() const { return values.minCoeff(); }

WignerGrid wigner(const QuantumState& rho_m, const GridSpec& grid, WignerMethod method, Diagnostics* diag, int workers) {
    if (rho_m.layout().size() != 1 || rho_m.layout().factors()[0].kind != FactorKind::Boson)
        throw LayoutMismatch("wigner expects a single boson factor, got " + rho_m.layout().describe());
    const MatrixXcd rho = rho_m.density_matrix();
    const int dim = int(rho.rows());
    WignerGrid out;
    out.re_axis = grid.re_axis();
    out.im_axis = grid.im_axis();
    out.step_re = grid.step_re();
    out.step_im = grid.step_im();
    out.truncation = dim;
    out.values = Eigen::MatrixXd::Zero(grid.n_im, grid.n_re);
    double max_abs = 0.0;
    for (double x : {grid.re_min, grid.re_max})
        for (double y : {grid.im_min, grid.im_max}) max_abs = std::max(max_abs, std::hypot(x, y));
    if (max_abs > std::sqrt(double(dim)) + 1.0)
        emit(diag, "truncation", "grid reaches |alpha| = " + std::to_string(max_abs) + " beyond Fock dim " +
                                     std::to_string(dim));

    std::vector<double> residue(std::max(1, workers), 0.0);
    const int pad = padded_dim(dim, max_abs);
    auto rows = [&](int worker, int r0, int r1) {
        std::vector<cplx> wl;
        std::unique_ptr<ParityEvaluator> pe;
        if (method == WignerMethod::DisplacedParity) pe = std::make_unique<ParityEvaluator>(rho, pad);
        for (int r = r0; r < r1; ++r)
            for (int c = 0; c < grid.n_re; ++c) {
                const cplx alpha(out.re_axis[c], out.im_axis[r]);
                if (method == WignerMethod::Laguerre) {
                    out.values(r, c) = wigner_laguerre(rho, alpha, wl);
                } else {
                    const cplx w = (*pe)(alpha);
                    out.values(r, c) = w.real();
                    residue[worker] = std::max(residue[worker], std::abs(w.imag()));
                }
            }
    };
    if (workers <= 1) {
        rows(0, 0, grid.n_im);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (grid.n_im + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int r0 = w * chunk, r1 = std::min(grid.n_im, r0 + chunk);
            if (r0 < r1) pool.emplace_back(rows, w, r0, r1);
        }
        for (auto& t : pool) t.join();
    }
    out.max_imag_residue = *std::max_element(residue.begin(), residue.end());
    if (out.max_imag_residue > 1e-10)
        emit(diag, "imaginary-residue", "Wigner imaginary residue " + std::to_string(out.max_imag_residue));
    return out;
}

double wigner_at(const QuantumState& rho_m, cplx alpha, WignerMethod method) {
    const MatrixXcd rho = rho_m.density_matrix();
    if (method == WignerMethod::Laguerre) {
        std::vector<cplx> wl;
        return wigner_laguerre(rho, alpha, wl);
    }
    return ParityEvaluator(rho, padded_dim(int(rho.rows()), std::abs(alpha)))(alpha).real();
}

std::vector<LobePeak> find_lobe_peaks(const WignerGrid& g, std::size_t count, double exclude_radius) {
    std::vector<LobePeak> peaks;
    const Eigen::Index nr = g.values.rows(), nc = g.values.cols();
    for (Eigen::Index r = 1; r + 1 < nr; ++r)
        for (Eigen::Index c = 1; c + 1 < nc; ++c) {
            const double v = g.values(r, c);
            bool is_max = true;
            for (int dr = -1; dr <= 1 && is_max; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (!dr && !dc) continue;
                    if (g.values(r + dr, c + dc) >= v) {
                        is_max = false;
                        break;
                    }
                }
            if (!is_max) continue;
            auto offset = [](double fm, double f0, double fp) {
                const double den = fm - 2.0 * f0 + fp;
                return den == 0.0 ? 0.0 : std::clamp(0.5 * (fm - fp) / den, -0.5, 0.5);
            };
            const double dx = offset(g.values(r, c - 1), v, g.values(r, c + 1));
            const double dy = offset(g.values(r - 1, c), v, g.values(r + 1, c));
            LobePeak p{g.re_axis[c] + dx * g.step_re, g.im_axis[r] + dy * g.step_im, v};
            if (std::hypot(p.re, p.im) <= exclude_radius) continue;
            peaks.push_back(p);
        }
    std::sort(peaks.begin(), peaks.end(), [](const LobePeak& a, const LobePeak& b) { return a.value > b.value; });
    if (peaks.size() > count) peaks.resize(count);
    return peaks;
}

CatAmplitudeEstimate estimate_cat_amplitude(const QuantumState& rho_m) {
    if (rho_m.layout().size() != 1) throw LayoutMismatch("estimate_cat_amplitude expects a single boson factor");
    const int dim = int(rho_m.dim());
    const MatrixXcd a = annihilation(dim).matrix();
    const MatrixXcd a4 = a * a * a * a;
    const cplx m4 = rho_m.is_pure() ? rho_m.vector().dot(a4 * rho_m.vector()) : (rho_m.density() * a4).trace();
    CatAmplitudeEstimate e;
    e.lobe_radius = std::pow(std::abs(m4), 0.25);
    e.orientation = std::arg(m4) / 4.0;
    const double extent = e.lobe_radius + 2.5;
    const int points = int(std::ceil(2.0 * extent / 0.04)) | 1;
    const WignerGrid g = wigner(rho_m, GridSpec::square(extent, points));
    const auto peaks = find_lobe_peaks(g, 4, 0.3 * e.lobe_radius);
    if (peaks.size() == 4) {
        double r = 0.0;
        for (const auto& p : peaks) r += std::hypot(p.re, p.im);
        e.peak_radius = r / 4.0;
    }
    return e;
}

double fock_population_outside(const QuantumState& rho_m, int modulus, const std::vector<int>& residues) {
    const MatrixXcd rho = rho_m.density_matrix();
    double out = 0.0;
    for (Eigen::Index n = 0; n < rho.rows(); ++n)
        if (std::find(residues.begin(), residues.end(), int(n % modulus)) == residues.end()) out += rho(n, n).real();
    return out;
}

} // namespace fcat
