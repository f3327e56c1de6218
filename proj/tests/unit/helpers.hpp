#pragma once

#include <random>

#include "fcat/operator_core.hpp"

namespace fcat::test {

inline MatrixXcd random_matrix(int n, std::mt19937& rng) {
    std::normal_distribution<double> d;
    MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(d(rng), d(rng));
    return m;
}

inline MatrixXcd random_hermitian(int n, std::mt19937& rng) {
    const MatrixXcd m = random_matrix(n, rng);
    return 0.5 * (m + m.adjoint());
}

inline VectorXcd random_unit_vector(int n, std::mt19937& rng) {
    std::normal_distribution<double> d;
    VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(d(rng), d(rng));
    return v / v.norm();
}

inline double max_abs(const MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

} // namespace fcat::test
