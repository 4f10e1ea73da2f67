#pragma once

// Dense solvers for the Sylvester equation A*X + X*B = C with A (m x m),
// B (n x n), C (m x n). The solution is unique iff A and -B share no
// eigenvalue.

#include "metasel/error.hpp"

#include <Eigen/Dense>

#include <complex>

namespace metasel {

namespace detail {

inline void check_sylvester_shapes(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c) {
    if (a.rows() != a.cols() || b.rows() != b.cols()) throw InvalidInputError("sylvester: A and B must be square");
    if (c.rows() != a.rows() || c.cols() != b.cols()) throw InvalidInputError("sylvester: C has the wrong shape");
    if (!a.allFinite() || !b.allFinite() || !c.allFinite()) throw InvalidInputError("sylvester: non-finite input");
}

} // namespace detail

/// Column-major vectorization: (I_n (x) A + B^T (x) I_m) vec(X) = vec(C),
/// solved by full-pivot LU. Cost is O((mn)^3), fine for the 3x3 case.
inline Eigen::MatrixXd solve_sylvester_kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                 const Eigen::MatrixXd& c) {
    detail::check_sylvester_shapes(a, b, c);
    const Eigen::Index m = a.rows();
    const Eigen::Index n = b.rows();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m * n, m * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        k.block(j * m, j * m, m, m) += a;
        for (Eigen::Index i = 0; i < n; ++i) {
            k.block(j * m, i * m, m, m).diagonal().array() += b(i, j);
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
    if (!lu.isInvertible()) throw NumericalError("sylvester: A and -B share an eigenvalue");
    Eigen::VectorXd vec_c = Eigen::Map<const Eigen::VectorXd>(c.data(), m * n);
    Eigen::VectorXd vec_x = lu.solve(vec_c);
    return Eigen::Map<Eigen::MatrixXd>(vec_x.data(), m, n);
}

/// Bartels-Stewart over the complex Schur forms A = U T U^*, B = V R V^*:
/// T Y + Y R = U^* C V is solved column by column with triangular
/// back-substitution, then X = U Y V^*.
inline Eigen::MatrixXd solve_sylvester_bartels_stewart(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                       const Eigen::MatrixXd& c) {
    detail::check_sylvester_shapes(a, b, c);
    using Complex = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;

    Eigen::ComplexSchur<Eigen::MatrixXd> schur_a(a);
    Eigen::ComplexSchur<Eigen::MatrixXd> schur_b(b);
    if (schur_a.info() != Eigen::Success || schur_b.info() != Eigen::Success) {
        throw NumericalError("sylvester: Schur decomposition did not converge");
    }
    const CMatrix& t = schur_a.matrixT();
    const CMatrix& r = schur_b.matrixT();
    const CMatrix& u = schur_a.matrixU();
    const CMatrix& v = schur_b.matrixU();

    const Eigen::Index m = a.rows();
    const Eigen::Index n = b.rows();
    const double scale = a.norm() + b.norm() + 1.0;
    CMatrix f = u.adjoint() * c.cast<Complex>() * v;
    CMatrix y(m, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::VectorXcd rhs = f.col(k);
        for (Eigen::Index j = 0; j < k; ++j) rhs -= r(j, k) * y.col(j);
        // (T + r_kk I) y_k = rhs, T upper triangular.
        for (Eigen::Index i = m - 1; i >= 0; --i) {
            Complex acc = rhs(i);
            for (Eigen::Index p = i + 1; p < m; ++p) acc -= t(i, p) * y(p, k);
            const Complex pivot = t(i, i) + r(k, k);
            if (std::abs(pivot) <= 1e-14 * scale) throw NumericalError("sylvester: A and -B share an eigenvalue");
            y(i, k) = acc / pivot;
        }
    }
    return (u * y * v.adjoint()).real();
}

/// ||A X + X B - C||_F
inline double sylvester_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c,
                                 const Eigen::MatrixXd& x) {
    return (a * x + x * b - c).norm();
}

} // namespace metasel
