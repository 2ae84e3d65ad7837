#pragma once

#include <iosfwd>
#include <vector>

#include "rkhs/linalg.hpp"
#include "rkhs/polyspace.hpp"

namespace rkhs {

/// Relative bound on ||T_j T_k - T_k T_j|| accepted by the checked constructor,
/// scaled by max(1, max_j ||T_j||^2).
inline constexpr double kDefaultCommutatorTol = 1e-9;

/// d commuting complex square matrices of a common size.
class OperatorTuple {
public:
    /// Throws ArgumentError when the commutators exceed commutator_tol (relative).
    explicit OperatorTuple(std::vector<Matrix> matrices, double commutator_tol = kDefaultCommutatorTol);

    /// No commutator check; commutator_tol() reports the measured defect.
    static OperatorTuple unchecked(std::vector<Matrix> matrices);
    static OperatorTuple zero(int d, int n);

    int d() const { return static_cast<int>(mats_.size()); }
    int size() const { return mats_.empty() ? 0 : static_cast<int>(mats_[0].rows()); }
    const Matrix& operator[](int j) const { return mats_.at(j); }
    const std::vector<Matrix>& matrices() const { return mats_; }

    double commutator_tol() const { return commutator_tol_; }
    /// max_{j,k} ||T_j T_k - T_k T_j||
    double commutator_defect() const { return commutator_defect_; }
    double max_norm() const;

    OperatorTuple scaled(double r) const;
    /// (U^H T_j U)_j for unitary U.
    OperatorTuple conjugated(const Matrix& u) const;

private:
    OperatorTuple() = default;
    void measure();

    std::vector<Matrix> mats_;
    double commutator_tol_ = 0.0;
    double commutator_defect_ = 0.0;
};

/// Plain-text format:
///   tuple <d> <n>
///   n rows of "re,im" entries separated by blanks, repeated for each matrix.
/// Blank lines and lines starting with '#' are ignored.
void write_tuple(std::ostream& os, const OperatorTuple& t);
OperatorTuple read_tuple(std::istream& is);

/// T^alpha = T_1^{alpha_1} ... T_d^{alpha_d} for all |alpha| = n, one degree at a time.
/// Every product of degree n+1 is one multiplication away from its parent
/// alpha - e_j, j the last nonzero exponent.
class MonomialProducts {
public:
    explicit MonomialProducts(const OperatorTuple& t);

    int degree() const { return degree_; }
    const std::vector<MultiIndex>& indices() const { return indices_; }
    const std::vector<Matrix>& products() const { return products_; }
    void advance();

private:
    const OperatorTuple& tuple_;
    int degree_ = 0;
    std::vector<MultiIndex> indices_;
    std::vector<Matrix> products_;
};

} // namespace rkhs
