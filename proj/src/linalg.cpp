#include "rkhs/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace rkhs {

double spectral_norm(const Matrix& m)
{
    if (m.size() == 0)
        return 0.0;
    // The Hermitian route is cheaper than an SVD for the square Gram.
    if (m.rows() >= m.cols()) {
        const Matrix g = m.adjoint() * m;
        Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
        const double top = es.eigenvalues().maxCoeff();
        if (top > 1e-20 * std::max(1.0, g.cwiseAbs().maxCoeff()))
            return std::sqrt(std::max(top, 0.0));
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

Matrix hermitian_part(const Matrix& m)
{
    return (m + m.adjoint()) / 2.0;
}

double hermitian_defect(const Matrix& m)
{
    return spectral_norm(m - m.adjoint()) / std::max(spectral_norm(m), 1.0);
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m)
{
    if (m.size() == 0)
        return Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

PsdRoot psd_sqrt(const Matrix& m)
{
    PsdRoot out;
    if (m.size() == 0) {
        out.root = Matrix(0, 0);
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < 0.0) {
            out.clamped_mass += -ev[i];
            ev[i] = 0.0;
        }
        ev[i] = std::sqrt(ev[i]);
    }
    const Matrix& u = es.eigenvectors();
    out.root = u * ev.asDiagonal() * u.adjoint();
    return out;
}

double isometry_defect(const Matrix& q)
{
    return spectral_norm(q.adjoint() * q - Matrix::Identity(q.cols(), q.cols()));
}

Matrix kron_identity(const Matrix& a, Eigen::Index k)
{
    Matrix out = Matrix::Zero(a.rows() * k, a.cols() * k);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (a(i, j) != std::complex<double>(0.0))
                out.block(i * k, j * k, k, k).diagonal().setConstant(a(i, j));
    return out;
}

} // namespace rkhs
