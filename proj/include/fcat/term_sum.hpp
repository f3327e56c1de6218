#pragma once

#include <functional>
#include <vector>

#include <Eigen/Sparse>

#include "fcat/operator_core.hpp"

namespace fcat {

using SparseMatrixXcd = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

// Time-dependent generator H(t) = C + sum_k f_k(t) O_k. Operators are kept sparse so
// integrators can apply H(t) without assembling it.
class TermSum {
public:
    using Coefficient = std::function<cplx(double)>;

    TermSum() = default;
    explicit TermSum(SpaceLayout layout);

    void add(const Operator& op, cplx constant = 1.0);
    void add(const Operator& op, Coefficient f);
    // f(t) op + conj(f(t)) op^dag
    void add_with_adjoint(const Operator& op, Coefficient f);

    const SpaceLayout& layout() const { return layout_; }
    Eigen::Index dim() const { return layout_.dim(); }
    bool is_constant() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size() + 1; }

    Operator at(double t) const;
    SparseMatrixXcd sparse_at(double t) const;
    // out = H(t) * in, for a vector or a block of columns
    void apply(double t, const MatrixXcd& in, MatrixXcd& out) const;

private:
    struct Term {
        SparseMatrixXcd op;
        Coefficient f;
    };
    SpaceLayout layout_;
    SparseMatrixXcd constant_;
    std::vector<Term> terms_;
};

SparseMatrixXcd to_sparse(const MatrixXcd& m);

} // namespace fcat
