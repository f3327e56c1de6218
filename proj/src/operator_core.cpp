#include "fcat/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace fcat {

SpaceLayout::SpaceLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw InvalidDimension("layout needs at least one factor");
    dim_ = 1;
    for (const auto& f : factors_) {
        if (f.kind == FactorKind::Qubit && f.dim != 2)
            throw InvalidDimension("qubit factor must have dim 2, got " + std::to_string(f.dim));
        if (f.kind == FactorKind::Boson && f.dim < 2)
            throw InvalidDimension("boson factor needs dim >= 2, got " + std::to_string(f.dim));
        dim_ *= f.dim;
    }
}

SpaceLayout SpaceLayout::qubit() { return SpaceLayout({{FactorKind::Qubit, 2}}); }

SpaceLayout SpaceLayout::boson(int dim) { return SpaceLayout({{FactorKind::Boson, dim}}); }

SpaceLayout SpaceLayout::full(int n_cavity, int n_magnon) {
    return SpaceLayout({{FactorKind::Qubit, 2},
                        {FactorKind::Qubit, 2},
                        {FactorKind::Boson, n_cavity},
                        {FactorKind::Boson, n_magnon}});
}

SpaceLayout SpaceLayout::effective(int n_magnon) {
    return SpaceLayout({{FactorKind::Qubit, 2}, {FactorKind::Qubit, 2}, {FactorKind::Boson, n_magnon}});
}

int SpaceLayout::factor_dim(std::size_t site) const {
    if (site >= factors_.size())
        throw std::out_of_range("factor index " + std::to_string(site) + " out of range");
    return factors_[site].dim;
}

SpaceLayout SpaceLayout::subset(const std::vector<std::size_t>& keep) const {
    std::vector<Factor> out;
    for (auto k : keep) {
        if (k >= factors_.size()) throw std::out_of_range("factor index out of range");
        out.push_back(factors_[k]);
    }
    return SpaceLayout(std::move(out));
}

std::string SpaceLayout::describe() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) os << ", ";
        os << (factors_[i].kind == FactorKind::Qubit ? "qubit" : "boson") << ":" << factors_[i].dim;
    }
    os << ")";
    return os.str();
}

bool SpaceLayout::operator==(const SpaceLayout& other) const {
    if (factors_.size() != other.factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].kind != other.factors_[i].kind || factors_[i].dim != other.factors_[i].dim)
            return false;
    return true;
}

Operator::Operator(SpaceLayout layout, MatrixXcd matrix) : layout_(std::move(layout)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols())
        throw InvalidDimension("operator matrix must be square");
    if (matrix_.rows() != layout_.dim())
        throw LayoutMismatch("operator size " + std::to_string(matrix_.rows()) + " does not match layout " +
                             layout_.describe());
}

Operator Operator::identity(const SpaceLayout& layout) {
    return Operator(layout, MatrixXcd::Identity(layout.dim(), layout.dim()));
}

Operator Operator::zero(const SpaceLayout& layout) {
    return Operator(layout, MatrixXcd::Zero(layout.dim(), layout.dim()));
}

Operator Operator::adjoint() const { return Operator(layout_, matrix_.adjoint()); }

bool Operator::is_hermitian(double tol) const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() < tol;
}

bool Operator::is_unitary(double tol) const {
    MatrixXcd p = matrix_.adjoint() * matrix_;
    p.diagonal().array() -= 1.0;
    return p.cwiseAbs().maxCoeff() < tol;
}

double Operator::distance(const Operator& other) const {
    require_same_layout(other, "distance");
    return (matrix_ - other.matrix_).cwiseAbs().maxCoeff();
}

void Operator::require_same_layout(const Operator& rhs, const char* what) const {
    if (layout_ != rhs.layout_)
        throw LayoutMismatch(std::string(what) + ": " + layout_.describe() + " vs " + rhs.layout_.describe());
}

Operator Operator::operator+(const Operator& rhs) const {
    require_same_layout(rhs, "operator+");
    return Operator(layout_, matrix_ + rhs.matrix_);
}

Operator Operator::operator-(const Operator& rhs) const {
    require_same_layout(rhs, "operator-");
    return Operator(layout_, matrix_ - rhs.matrix_);
}

Operator Operator::operator*(const Operator& rhs) const {
    require_same_layout(rhs, "operator*");
    return Operator(layout_, matrix_ * rhs.matrix_);
}

Operator Operator::operator*(cplx s) const { return Operator(layout_, matrix_ * s); }

Operator& Operator::operator+=(const Operator& rhs) {
    require_same_layout(rhs, "operator+=");
    matrix_ += rhs.matrix_;
    return *this;
}

Operator operator*(cplx s, const Operator& op) { return op * s; }
Operator operator*(double s, const Operator& op) { return op * cplx(s, 0.0); }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

QuantumState QuantumState::pure(SpaceLayout layout, VectorXcd psi, double tol) {
    if (psi.size() != layout.dim())
        throw LayoutMismatch("state vector size does not match layout " + layout.describe());
    if (!psi.allFinite()) throw NumericalError("state vector has non-finite entries");
    double n = psi.norm();
    if (std::abs(n - 1.0) > tol)
        throw std::invalid_argument("pure state not normalized (norm " + std::to_string(n) + ")");
    QuantumState s;
    s.layout_ = std::move(layout);
    s.pure_ = true;
    s.psi_ = std::move(psi);
    return s;
}

QuantumState QuantumState::mixed(SpaceLayout layout, MatrixXcd rho, double tol) {
    if (rho.rows() != layout.dim() || rho.cols() != layout.dim())
        throw LayoutMismatch("density matrix size does not match layout " + layout.describe());
    if (!rho.allFinite()) throw NumericalError("density matrix has non-finite entries");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("density matrix is not Hermitian");
    double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > tol)
        throw std::invalid_argument("density matrix trace " + std::to_string(tr) + " != 1");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
        throw std::invalid_argument("density matrix is not positive semidefinite");
    QuantumState s;
    s.layout_ = std::move(layout);
    s.pure_ = false;
    s.rho_ = std::move(rho);
    return s;
}

const VectorXcd& QuantumState::vector() const {
    if (!pure_) throw std::logic_error("state is mixed; no state vector");
    return psi_;
}

const MatrixXcd& QuantumState::density() const {
    if (pure_) throw std::logic_error("state is pure; use density_matrix()");
    return rho_;
}

MatrixXcd QuantumState::density_matrix() const { return pure_ ? MatrixXcd(psi_ * psi_.adjoint()) : rho_; }

QuantumState QuantumState::as_mixed() const {
    if (!pure_) return *this;
    QuantumState s;
    s.layout_ = layout_;
    s.pure_ = false;
    s.rho_ = psi_ * psi_.adjoint();
    return s;
}

double QuantumState::purity() const {
    if (pure_) return std::pow(psi_.squaredNorm(), 2);
    return (rho_ * rho_).trace().real();
}

double QuantumState::trace() const { return pure_ ? psi_.squaredNorm() : rho_.trace().real(); }

Operator annihilation(int dim) {
    if (dim < 2) throw InvalidDimension("annihilation needs dim >= 2, got " + std::to_string(dim));
    MatrixXcd a = MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return Operator(SpaceLayout::boson(dim), a);
}

Operator creation(int dim) { return annihilation(dim).adjoint(); }

Operator number_operator(int dim) {
    if (dim < 2) throw InvalidDimension("number operator needs dim >= 2");
    MatrixXcd n = MatrixXcd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = double(k);
    return Operator(SpaceLayout::boson(dim), n);
}

Operator pauli(PauliAxis axis) {
    // basis order (g, e); sigma^+ = |e><g| and sigma_y = -i(sigma^+ - sigma^-)
    MatrixXcd m = MatrixXcd::Zero(2, 2);
    const cplx I(0.0, 1.0);
    switch (axis) {
    case PauliAxis::X: m << 0, 1, 1, 0; break;
    case PauliAxis::Y: m << 0, I, -I, 0; break;
    case PauliAxis::Z: m << -1, 0, 0, 1; break;
    case PauliAxis::Plus: m(1, 0) = 1.0; break;
    case PauliAxis::Minus: m(0, 1) = 1.0; break;
    }
    return Operator(SpaceLayout::qubit(), m);
}

Operator parity_operator(int dim) {
    if (dim < 2) throw InvalidDimension("parity operator needs dim >= 2");
    MatrixXcd p = MatrixXcd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    return Operator(SpaceLayout::boson(dim), p);
}

namespace {

MatrixXcd kron_matrix(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace

Operator embed(const Operator& op, std::size_t site, const SpaceLayout& layout) {
    if (op.layout().size() != 1) throw std::invalid_argument("embed expects a single-factor operator");
    if (site >= layout.size())
        throw std::out_of_range("embed site " + std::to_string(site) + " out of range for " + layout.describe());
    if (op.dim() != layout.factor_dim(site))
        throw LayoutMismatch("embed: operator dim " + std::to_string(op.dim()) + " vs factor dim " +
                             std::to_string(layout.factor_dim(site)));
    Eigen::Index left = 1, right = 1;
    for (std::size_t i = 0; i < site; ++i) left *= layout.factor_dim(i);
    for (std::size_t i = site + 1; i < layout.size(); ++i) right *= layout.factor_dim(i);
    const MatrixXcd& m = op.matrix();
    const Eigen::Index d = m.rows();
    MatrixXcd out = MatrixXcd::Zero(layout.dim(), layout.dim());
    for (Eigen::Index l = 0; l < left; ++l)
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
                const cplx v = m(i, j);
                if (v == cplx(0.0)) continue;
                const Eigen::Index r0 = (l * d + i) * right, c0 = (l * d + j) * right;
                for (Eigen::Index r = 0; r < right; ++r) out(r0 + r, c0 + r) = v;
            }
    return Operator(layout, std::move(out));
}

Operator kron(const Operator& a, const Operator& b) {
    std::vector<Factor> f = a.layout().factors();
    f.insert(f.end(), b.layout().factors().begin(), b.layout().factors().end());
    return Operator(SpaceLayout(std::move(f)), kron_matrix(a.matrix(), b.matrix()));
}

QuantumState tensor(const QuantumState& a, const QuantumState& b) {
    std::vector<Factor> f = a.layout().factors();
    f.insert(f.end(), b.layout().factors().begin(), b.layout().factors().end());
    SpaceLayout layout(std::move(f));
    if (a.is_pure() && b.is_pure()) {
        VectorXcd v = kron_matrix(a.vector(), b.vector());
        return QuantumState::pure(layout, v);
    }
    return QuantumState::mixed(layout, kron_matrix(a.density_matrix(), b.density_matrix()));
}

QuantumState basis_state(const SpaceLayout& layout, const std::vector<int>& levels) {
    if (levels.size() != layout.size()) throw LayoutMismatch("basis_state: level count does not match layout");
    Eigen::Index idx = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 0 || levels[i] >= layout.factor_dim(i))
            throw std::out_of_range("basis_state level out of range");
        idx = idx * layout.factor_dim(i) + levels[i];
    }
    VectorXcd v = VectorXcd::Zero(layout.dim());
    v(idx) = 1.0;
    return QuantumState::pure(layout, v);
}

MatrixXcd expm(const MatrixXcd& a) {
    if (a.rows() != a.cols()) throw InvalidDimension("matrix exponential needs a square matrix");
    if (!a.allFinite()) throw NumericalError("matrix exponential of non-finite matrix");
    const Eigen::Index n = a.rows();
    const MatrixXcd ident = MatrixXcd::Identity(n, n);
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();

    static const double b3[] = {120., 60., 12., 1.};
    static const double b5[] = {30240., 15120., 3360., 420., 30., 1.};
    static const double b7[] = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
    static const double b9[] = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                                2162160.,     110880.,     3960.,       90.,        1.};
    static const double b13[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                                 1187353796428800.,  129060195264000.,   10559470521600.,
                                 670442572800.,      33522128640.,       1323241920.,
                                 40840800.,          960960.,            16380.,
                                 182.,               1.};
    static const double theta[] = {1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
                                   2.097847961257068e0};

    auto pade_low = [&](const double* b, int m) {
        MatrixXcd a2 = a * a;
        MatrixXcd u = b[1] * ident, v = b[0] * ident;
        MatrixXcd p = ident;
        for (int k = 2; k <= m; k += 2) {
            p = p * a2;
            u += b[k + 1] * p;
            v += b[k] * p;
        }
        u = a * u;
        return MatrixXcd((v - u).partialPivLu().solve(v + u));
    };

    const int orders[] = {3, 5, 7, 9};
    const double* coeffs[] = {b3, b5, b7, b9};
    for (int k = 0; k < 4; ++k)
        if (norm1 <= theta[k]) return pade_low(coeffs[k], orders[k]);

    const double theta13 = 5.371920351148152;
    int s = 0;
    if (norm1 > theta13) s = std::max(0, int(std::ceil(std::log2(norm1 / theta13))));
    const MatrixXcd as = a / std::ldexp(1.0, s);
    const MatrixXcd a2 = as * as, a4 = a2 * a2, a6 = a4 * a2;
    MatrixXcd u = as * (a6 * (b13[13] * a6 + b13[11] * a4 + b13[9] * a2) + b13[7] * a6 + b13[5] * a4 +
                        b13[3] * a2 + b13[1] * ident);
    MatrixXcd v = a6 * (b13[12] * a6 + b13[10] * a4 + b13[8] * a2) + b13[6] * a6 + b13[4] * a4 +
                  b13[2] * a2 + b13[0] * ident;
    MatrixXcd r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < s; ++k) r = r * r;
    if (!r.allFinite()) throw NumericalError("matrix exponential overflowed");
    return r;
}

Operator matrix_exponential(const Operator& op) { return Operator(op.layout(), expm(op.matrix())); }

double recommended_dim(double abs_alpha) { return abs_alpha * abs_alpha + 6.0 * abs_alpha + 10.0; }

Operator displacement_operator(cplx alpha, int dim, Diagnostics* diag) {
    if (dim < 2) throw InvalidDimension("displacement operator needs dim >= 2");
    if (dim < recommended_dim(std::abs(alpha)))
        emit(diag, "truncation",
             "Fock dim " + std::to_string(dim) + " is small for |alpha| = " + std::to_string(std::abs(alpha)));
    const MatrixXcd a = annihilation(dim).matrix();
    return Operator(SpaceLayout::boson(dim), expm(alpha * a.adjoint() - std::conj(alpha) * a));
}

QuantumState partial_trace(const QuantumState& state, std::vector<std::size_t> keep) {
    const SpaceLayout& layout = state.layout();
    if (keep.empty()) throw std::invalid_argument("partial_trace needs a non-empty keep set");
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
        throw std::invalid_argument("partial_trace keep set has duplicates");
    for (auto k : keep)
        if (k >= layout.size()) throw std::out_of_range("partial_trace factor index out of range");

    std::vector<std::size_t> traced;
    for (std::size_t i = 0; i < layout.size(); ++i)
        if (!std::binary_search(keep.begin(), keep.end(), i)) traced.push_back(i);
    SpaceLayout kept_layout = layout.subset(keep);
    if (traced.empty()) return state;

    const Eigen::Index dk = kept_layout.dim(), dt = layout.dim() / dk;
    // full_index(k, t): position in the full space of kept multi-index k and traced multi-index t
    Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic> full_index(dk, dt);
    std::vector<int> digits(layout.size());
    for (Eigen::Index i = 0; i < layout.dim(); ++i) {
        Eigen::Index rem = i;
        for (std::size_t f = layout.size(); f-- > 0;) {
            digits[f] = int(rem % layout.factor_dim(f));
            rem /= layout.factor_dim(f);
        }
        Eigen::Index k = 0, t = 0;
        for (auto f : keep) k = k * layout.factor_dim(f) + digits[f];
        for (auto f : traced) t = t * layout.factor_dim(f) + digits[f];
        full_index(k, t) = i;
    }

    MatrixXcd red = MatrixXcd::Zero(dk, dk);
    if (state.is_pure()) {
        const VectorXcd& psi = state.vector();
        MatrixXcd m(dk, dt);
        for (Eigen::Index k = 0; k < dk; ++k)
            for (Eigen::Index t = 0; t < dt; ++t) m(k, t) = psi(full_index(k, t));
        red = m * m.adjoint();
    } else {
        const MatrixXcd& rho = state.density();
        for (Eigen::Index k1 = 0; k1 < dk; ++k1)
            for (Eigen::Index k2 = 0; k2 < dk; ++k2) {
                cplx acc = 0.0;
                for (Eigen::Index t = 0; t < dt; ++t) acc += rho(full_index(k1, t), full_index(k2, t));
                red(k1, k2) = acc;
            }
    }
    red = 0.5 * (red + red.adjoint()).eval();
    return QuantumState::mixed(kept_layout, red, 1e-6);
}

cplx expectation(const Operator& op, const QuantumState& state) {
    if (op.layout() != state.layout())
        throw LayoutMismatch("expectation: operator " + op.layout().describe() + " vs state " +
                             state.layout().describe());
    if (state.is_pure()) return state.vector().dot(op.matrix() * state.vector());
    return (state.density() * op.matrix()).trace();
}

} // namespace fcat
