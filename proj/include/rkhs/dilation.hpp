#pragma once

// Coextension isometries for jointly nilpotent tuples and their verification.

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "rkhs/model.hpp"

namespace rkhs {

struct DilationCertificate {
    /// (dim H_trunc * dim E) x dim E, row index i_alpha * dim E + e.
    Matrix V;
    double isometry_residual = 0.0;               // ||V^H V - I||
    std::vector<double> intertwining_residuals;   // ||(S_j^* (x) I) V - V T_j^*||
    std::vector<double> compression_residuals;    // ||V^H (S_j (x) I) V - T_j||
    /// ||((I - Q Q^H) (x) I) V|| when an ideal complement Q was supplied.
    std::optional<double> range_residual;
    double clamped_mass = 0.0;
    double tolerance = 1e-8;

    double max_residual() const;
    bool valid() const { return max_residual() <= tolerance; }
};

/// {isometry_residual, intertwining_residuals, compression_residuals, range_residual?,
///  clamped_mass, tolerance, valid}
nlohmann::json to_json(const DilationCertificate& c);

struct CoextensionOptions {
    double tolerance = 1e-8;
    double positivity_tol = kDefaultPositivityTol;
    /// Orthonormal coordinates of H_I inside the truncated space.
    std::optional<Matrix> ideal_embedding;
};

/// V x = sum_alpha a_|alpha| C(|alpha|,alpha) ||z^alpha|| e_alpha (x) Delta (T^*)^alpha x with
/// Delta the psd square root of 1/k(T,T^*); multiplicity space E = domain of T.
/// Throws PreconditionError when T is not jointly nilpotent or the hereditary matrix is
/// not psd, TruncationError when T^alpha != 0 for some |alpha| > N.
DilationCertificate agler_coextension(const OperatorTuple& t, const CoeffTable& table, const MonomialBasis& basis,
                                      const CoextensionOptions& options = {});

/// Residuals of a supplied V against T and a model tuple S; no construction.
DilationCertificate verify_coextension(const Matrix& v, const OperatorTuple& t, const OperatorTuple& s,
                                       double tolerance = 1e-8);

/// Diagonal tuple U_j = diag over the points of their j-th coordinates; every point must
/// have norm 1 to 1e-12.
OperatorTuple spherical_unitary(const std::vector<Point>& points);

OperatorTuple direct_sum(const OperatorTuple& a, const OperatorTuple& b);

} // namespace rkhs
