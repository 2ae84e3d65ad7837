#pragma once

// Dense complex helpers shared by the operator modules.

#include <Eigen/Dense>

namespace rkhs {

using Matrix = Eigen::MatrixXcd;

/// Largest singular value; 0 for empty matrices.
double spectral_norm(const Matrix& m);

/// (M + M^H) / 2
Matrix hermitian_part(const Matrix& m);

/// ||M - M^H|| / max(||M||, 1) in the spectral norm.
double hermitian_defect(const Matrix& m);

/// Ascending eigenvalues of the Hermitian part of m.
Eigen::VectorXd hermitian_eigenvalues(const Matrix& m);

struct PsdRoot {
    Matrix root;
    /// Sum of |lambda| over eigenvalues clamped to zero.
    double clamped_mass = 0.0;
};

/// Positive square root of the Hermitian part of m; negative eigenvalues above
/// -tol are clamped. Callers check positivity beforehand.
PsdRoot psd_sqrt(const Matrix& m);

/// ||Q^H Q - I||
double isometry_defect(const Matrix& q);

/// Kronecker product A (x) I_k.
Matrix kron_identity(const Matrix& a, Eigen::Index k);

} // namespace rkhs
