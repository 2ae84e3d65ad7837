#pragma once

// Finite-dimensional model operators: truncated and compressed shifts, the
// hereditary calculus 1/k(T,T*), the psi_k row, joint spectra and the
// defect / commutator / Toeplitz diagnostics.

#include <optional>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rkhs/kernel.hpp"
#include "rkhs/operators.hpp"
#include "rkhs/polyspace.hpp"

namespace rkhs {

/// Multiplication by z_1..z_d on polynomials of degree <= N, in the orthonormal
/// monomial basis e_alpha = z^alpha / ||z^alpha||. Degree-N vectors map to zero.
OperatorTuple shift_tuple(const MonomialBasis& basis);

/// (Q^H T_j Q)_j for Q with orthonormal columns; the commutator defect of the
/// result is measured, not enforced.
OperatorTuple compress(const OperatorTuple& t, const Matrix& q);

/// Smallest K >= 1 with T^alpha = 0 for every |alpha| = K, checked up to the
/// matrix size; nullopt when the tuple is not jointly nilpotent.
/// Products count as zero below rel_tol * (sqrt(d) max_j ||T_j||)^K.
std::optional<int> nilpotency_order(const OperatorTuple& t, double rel_tol = 1e-13);

struct AutoNilpotent {};
inline constexpr AutoNilpotent auto_nilpotent{};
using TruncationOrder = std::variant<int, AutoNilpotent>;

struct TailBound {
    enum class Kind { exact, bound, inconclusive };
    Kind kind = Kind::exact;
    double value = 0.0;
};

inline constexpr double kDefaultPositivityTol = 1e-10;

struct HereditaryResult {
    /// I - sum_{n<=M} b_n sum_{|alpha|=n} C(n,alpha) T^alpha (T*)^alpha
    Matrix D;
    int order_used = 0;
    TailBound tail;
    double min_eigenvalue = 0.0;
    Eigen::VectorXd eigenvalues;  // ascending, of (D + D^H)/2
    double hermitian_defect = 0.0;

    bool positive(double tol = kDefaultPositivityTol) const { return min_eigenvalue >= -tol; }
};

/// Terms are accumulated along the monomial product tree. With an explicit order M the
/// tail beyond M is exact when the degree-(M+1) products vanish, otherwise bounded by
/// sum_{n>M} |b_n| q^n with q = ||sum_j T_j T_j^*|| < 1 (inconclusive when q >= 1).
HereditaryResult hereditary_1k(const OperatorTuple& t, const CoeffTable& table, TruncationOrder order);

struct TechnicalIdentity {
    double factor = 0.0;    // a_{m-n} / a_m
    double residual = 0.0;  // relative, in the space norm
};

/// Residual of sum_{|alpha|=n} C(n,alpha) M^alpha (M*)^alpha p = (a_{m-n}/a_m) p for a
/// homogeneous p of degree m, evaluated with the truncated shift.
TechnicalIdentity technical_identity_check(const MonomialBasis& basis, const CoeffTable& table, int n,
                                           const HomogeneousPolynomial& p);

struct PsiRow {
    std::vector<MultiIndex> indices;
    std::vector<Matrix> family;   // psi_{k,alpha}(T), empty unless kept
    std::size_t family_size = 0;
    Matrix row_sum;               // sum_alpha psi psi^*
    double max_eigenvalue = 0.0;
    int order_used = 0;
};

/// psi_{k,alpha}(T) = b_{|alpha|}^{1/2} C(|alpha|,alpha)^{1/2} T^alpha for 1 <= |alpha| <= M,
/// assembled along the monomial product tree. Throws CnpViolationError on b_n < 0.
PsiRow psi_row(const OperatorTuple& t, const CoeffTable& table, TruncationOrder order,
               bool keep_family = true);

struct JointSpectrum {
    std::vector<Eigen::VectorXcd> points;
    double max_norm = 0.0;
    /// max_j ||strict lower part of U^H T_j U||
    double triangularity_residual = 0.0;
    Matrix unitary;
    bool refined = false;  // true when the deflation pass was needed
};

/// Joint eigenvalues of a commuting tuple via a common triangularizing unitary.
/// Throws DegeneracyError when the tuple cannot be triangularized within tolerance.
JointSpectrum joint_eigenvalues(const OperatorTuple& t, std::uint64_t seed = 0x5eed,
                                double tol = 1e-8);

struct DefectOperator {
    Matrix defect;               // I - sum_j T_j T_j^*
    Eigen::VectorXd eigenvalues; // ascending
};

DefectOperator defect_operator(const OperatorTuple& t);

struct DegreeEigenvalue {
    int degree = 0;
    double eigenvalue = 0.0;
    std::uint64_t multiplicity = 0;
};

/// Per-degree eigenvalues of the defect of the truncated shift:
/// 1 at degree 0 and 1 - a_{m-1}/a_m at degree m >= 1.
std::vector<DegreeEigenvalue> shift_defect_profile(const MonomialBasis& basis);

struct CommutatorTail {
    int cutoff = 0;
    double with_boundary = 0.0;  // P_{>=m} [T_j, T_k^*] P_{>=m}, degrees m..N
    double interior = 0.0;       // degrees m..N-1 only (0 when empty)
};

/// degrees[i] is the polynomial degree of coordinate i; cutoffs run over 0..N.
std::vector<CommutatorTail> commutator_tail_norms(const OperatorTuple& t, const std::vector<int>& degrees,
                                                  int N);
std::vector<CommutatorTail> commutator_tail_norms(const OperatorTuple& t, const MonomialBasis& basis);

struct ToeplitzDefect {
    Matrix unitary;                     // orthonormal B-basis to orthonormal A-basis
    std::vector<Matrix> defects;        // U^H S^A_j U - S^B_j
    std::vector<double> degree_factor;  // signed factor on degree n, n = 0..N-1
    std::vector<double> degree_magnitude;
    /// max over entries of |defect - factor(deg) * S^B| (entrywise check)
    double entry_residual = 0.0;
};

ToeplitzDefect toeplitz_defect(const CoeffTable& table_a, const CoeffTable& table_b, int d, int N);

struct MultiplierNormGap {
    double truncated_norm = 0.0;  // ||S^alpha|| on the truncation
    double target = 0.0;          // ||z^alpha||_H
    double gap = 0.0;             // target - truncated_norm
};

MultiplierNormGap monomial_multiplier_norm(const MonomialBasis& basis, const MultiIndex& alpha);
/// ||S_{z_1}^n|| on the truncation against 1/sqrt(a_n).
MultiplierNormGap sampled_multiplier_power_norm(const CoeffTable& table, int d, int N, int n);

/// {operation, inputs, min_eigenvalue, tolerance, verdict}
nlohmann::json verdict_report(const std::string& operation, const nlohmann::json& inputs,
                              double min_eigenvalue, double tolerance);

} // namespace rkhs
