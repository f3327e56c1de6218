#include "fcat/term_sum.hpp"

namespace fcat {

SparseMatrixXcd to_sparse(const MatrixXcd& m) {
    std::vector<Eigen::Triplet<cplx>> trip;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (m(i, j) != cplx(0.0)) trip.emplace_back(i, j, m(i, j));
    SparseMatrixXcd s(m.rows(), m.cols());
    s.setFromTriplets(trip.begin(), trip.end());
    return s;
}

TermSum::TermSum(SpaceLayout layout) : layout_(std::move(layout)), constant_(layout_.dim(), layout_.dim()) {}

void TermSum::add(const Operator& op, cplx constant) {
    if (op.layout() != layout_) throw LayoutMismatch("TermSum::add: operator layout mismatch");
    constant_ += to_sparse(op.matrix() * constant);
}

void TermSum::add(const Operator& op, Coefficient f) {
    if (op.layout() != layout_) throw LayoutMismatch("TermSum::add: operator layout mismatch");
    terms_.push_back({to_sparse(op.matrix()), std::move(f)});
}

void TermSum::add_with_adjoint(const Operator& op, Coefficient f) {
    Coefficient g = [f](double t) { return std::conj(f(t)); };
    add(op, f);
    add(op.adjoint(), std::move(g));
}

Operator TermSum::at(double t) const {
    MatrixXcd h = MatrixXcd(constant_);
    for (const auto& term : terms_) h += MatrixXcd(term.op) * term.f(t);
    return Operator(layout_, std::move(h));
}

SparseMatrixXcd TermSum::sparse_at(double t) const {
    SparseMatrixXcd h = constant_;
    for (const auto& term : terms_) h += term.op * term.f(t);
    return h;
}

void TermSum::apply(double t, const MatrixXcd& in, MatrixXcd& out) const {
    out.noalias() = constant_ * in;
    for (const auto& term : terms_) {
        const cplx c = term.f(t);
        if (c == cplx(0.0)) continue;
        out.noalias() += c * (term.op * in);
    }
}

} // namespace fcat
