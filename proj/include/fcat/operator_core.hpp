#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fcat/errors.hpp"

namespace fcat {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

enum class FactorKind { Qubit, Boson };

struct Factor {
    FactorKind kind;
    int dim;
};

class SpaceLayout {
public:
    SpaceLayout() = default;
    explicit SpaceLayout(std::vector<Factor> factors);

    static SpaceLayout qubit();
    static SpaceLayout boson(int dim);
    // (qubit1, qubit2, cavity, magnon)
    static SpaceLayout full(int n_cavity, int n_magnon);
    // (qubit1, qubit2, magnon)
    static SpaceLayout effective(int n_magnon);

    const std::vector<Factor>& factors() const { return factors_; }
    std::size_t size() const { return factors_.size(); }
    Eigen::Index dim() const { return dim_; }
    int factor_dim(std::size_t site) const;
    SpaceLayout subset(const std::vector<std::size_t>& keep) const;
    std::string describe() const;

    bool operator==(const SpaceLayout& other) const;
    bool operator!=(const SpaceLayout& other) const { return !(*this == other); }

private:
    std::vector<Factor> factors_;
    Eigen::Index dim_ = 0;
};

class Operator {
public:
    Operator() = default;
    Operator(SpaceLayout layout, MatrixXcd matrix);

    static Operator identity(const SpaceLayout& layout);
    static Operator zero(const SpaceLayout& layout);

    const SpaceLayout& layout() const { return layout_; }
    const MatrixXcd& matrix() const { return matrix_; }
    Eigen::Index dim() const { return matrix_.rows(); }

    Operator adjoint() const;
    bool is_hermitian(double tol = 1e-12) const;
    bool is_unitary(double tol = 1e-10) const;
    // max-abs entrywise distance
    double distance(const Operator& other) const;

    Operator operator+(const Operator& rhs) const;
    Operator operator-(const Operator& rhs) const;
    Operator operator*(const Operator& rhs) const;
    Operator operator*(cplx s) const;
    Operator& operator+=(const Operator& rhs);

private:
    void require_same_layout(const Operator& rhs, const char* what) const;

    SpaceLayout layout_;
    MatrixXcd matrix_;
};

Operator operator*(cplx s, const Operator& op);
Operator operator*(double s, const Operator& op);
Operator commutator(const Operator& a, const Operator& b);

class QuantumState {
public:
    QuantumState() = default;

    // Both factories validate: unit norm / unit trace, Hermiticity and positivity within tol.
    static QuantumState pure(SpaceLayout layout, VectorXcd psi, double tol = 1e-6);
    static QuantumState mixed(SpaceLayout layout, MatrixXcd rho, double tol = 1e-6);

    bool is_pure() const { return pure_; }
    const SpaceLayout& layout() const { return layout_; }
    Eigen::Index dim() const { return layout_.dim(); }
    const VectorXcd& vector() const;
    const MatrixXcd& density() const;
    MatrixXcd density_matrix() const;
    QuantumState as_mixed() const;
    double purity() const;
    double trace() const;

private:
    SpaceLayout layout_;
    bool pure_ = true;
    VectorXcd psi_;
    MatrixXcd rho_;
};

enum class PauliAxis { X, Y, Z, Plus, Minus };

Operator annihilation(int dim);
Operator creation(int dim);
Operator number_operator(int dim);
Operator pauli(PauliAxis axis);
Operator parity_operator(int dim);

Operator embed(const Operator& op, std::size_t site, const SpaceLayout& layout);
Operator kron(const Operator& a, const Operator& b);
QuantumState tensor(const QuantumState& a, const QuantumState& b);
// pure basis state |i0, i1, ...> in layout order
QuantumState basis_state(const SpaceLayout& layout, const std::vector<int>& levels);

MatrixXcd expm(const MatrixXcd& a);
Operator matrix_exponential(const Operator& op);
Operator displacement_operator(cplx alpha, int dim, Diagnostics* diag = nullptr);

QuantumState partial_trace(const QuantumState& state, std::vector<std::size_t> keep);
cplx expectation(const Operator& op, const QuantumState& state);

// Fock cutoff rule used for truncation warnings: |a|^2 + 6|a| + 10
double recommended_dim(double abs_alpha);

} // namespace fcat
