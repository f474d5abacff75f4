#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "adiacheck/errors.hpp"

namespace adiacheck {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Largest absolute entry.
inline double max_norm(const Matrix& a)
{
    if (a.size() == 0) {
        throw InvalidInput("max_norm: empty matrix");
    }
    return a.cwiseAbs().maxCoeff();
}

/// Maximum absolute column sum.
inline double one_norm(const Matrix& a)
{
    if (a.size() == 0) {
        throw InvalidInput("one_norm: empty matrix");
    }
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

inline double hermiticity_defect(const Matrix& a)
{
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline double anti_hermiticity_defect(const Matrix& a)
{
    return (a + a.adjoint()).cwiseAbs().maxCoeff();
}

inline double unitarity_defect(const Matrix& u)
{
    return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

/// exp(-i h tau) for Hermitian h, by diagonalization. Unitary to round-off.
inline Matrix unitary_exp(const Matrix& h, double tau)
{
    const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Eigen::VectorXd& ev = es.eigenvalues();
    Vector phases(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        phases(i) = std::polar(1.0, -ev(i) * tau);
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// exp(a tau) for anti-Hermitian a, evaluated through the Hermitian matrix i*a.
inline Matrix anti_hermitian_exp(const Matrix& a, double tau)
{
    // a = -i (i a), so exp(a tau) = exp(-i (i a) tau).
    Matrix h = kI * a;
    h = 0.5 * (h + h.adjoint()).eval();
    return unitary_exp(h, tau);
}

/// Unitary factor W of the polar decomposition m = W P.
inline Matrix polar_unitary(const Matrix& m)
{
    const Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

inline double smallest_singular_value(const Matrix& m)
{
    const Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().minCoeff();
}

} // namespace adiacheck
