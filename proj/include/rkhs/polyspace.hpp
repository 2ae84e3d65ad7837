#pragma once

// Graded monomial basis of polynomials of degree <= N in d variables, the
// weighted inner product of a unitarily invariant space, homogeneous ideals
// and their orthogonal complements as coordinate subspaces.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "rkhs/kernel.hpp"

namespace rkhs {

struct MultiIndex {
    std::vector<int> exponents;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> e) : exponents(std::move(e)) {}

    int dim() const { return static_cast<int>(exponents.size()); }
    int degree() const;
    MultiIndex plus_unit(int j) const;

    auto operator<=>(const MultiIndex&) const = default;
    bool operator==(const MultiIndex&) const = default;
};

/// "(1,1)"
std::string to_string(const MultiIndex& alpha);
MultiIndex parse_multi_index(const std::string& text);

/// All multi-indices of length d and degree m, lexicographic with z_1 > z_2 > ... .
std::vector<MultiIndex> indices_of_degree(int d, int m);

/// n!/(alpha_1! ... alpha_d!), exact. Throws ArgumentError if |alpha| != n and
/// OutOfRangeError if the value does not fit in 64 bits.
std::uint64_t multinomial(int n, const MultiIndex& alpha);
/// Same value as a double; finite for arguments where the integer would overflow.
double multinomial_double(const MultiIndex& alpha);

/// C(m+d-1, d-1).
std::uint64_t homogeneous_dimension(int d, int m);

class MonomialBasis {
public:
    /// weights ||z^alpha||^2 = 1 / (a_{|alpha|} C(|alpha|, alpha)). Rejects unnormalized tables.
    MonomialBasis(const CoeffTable& table, int d, int N);

    int d() const { return d_; }
    int max_degree() const { return N_; }
    int size() const { return static_cast<int>(indices_.size()); }

    const MultiIndex& at(int i) const { return indices_.at(i); }
    int index_of(const MultiIndex& alpha) const;
    bool contains(const MultiIndex& alpha) const;
    const std::vector<MultiIndex>& indices() const { return indices_; }

    double weight(int i) const { return weights_.at(i); }
    const std::vector<double>& weights() const { return weights_; }
    int degree(int i) const { return indices_.at(i).degree(); }

    /// First index of degree m; degree_offset(N+1) == size().
    int degree_offset(int m) const { return offsets_.at(m); }
    int degree_count(int m) const { return offsets_.at(m + 1) - offsets_.at(m); }

    /// Coefficients a_0..a_N the basis was built from.
    const std::vector<double>& coefficients() const { return a_; }

private:
    int d_;
    int N_;
    std::vector<MultiIndex> indices_;
    std::vector<double> weights_;
    std::vector<int> offsets_;
    std::map<MultiIndex, int> lookup_;
    std::vector<double> a_;
};

/// index, exponents, degree, weight
void write_csv(std::ostream& os, const MonomialBasis& basis);

/// Homogeneous polynomial stored as coefficients over the degree's monomials
/// (ordered as indices_of_degree(d, degree)).
struct HomogeneousPolynomial {
    int degree = 0;
    Eigen::VectorXcd coeffs;
};

class HomogeneousIdeal {
public:
    HomogeneousIdeal(int d, std::vector<HomogeneousPolynomial> generators);

    /// The ideal generated by all monomials of degree `power`.
    static HomogeneousIdeal power_of_maximal(int d, int power);
    static HomogeneousIdeal monomial(int d, std::vector<MultiIndex> monomials);

    int d() const { return d_; }
    const std::vector<HomogeneousPolynomial>& generators() const { return generators_; }

private:
    int d_;
    std::vector<HomogeneousPolynomial> generators_;
};

/// A number or an [re,im] pair.
std::complex<double> complex_from_json(const nlohmann::json& v);

/// {"d":2, "generators":[{"degree":2, "coeffs":{"(1,1)":1.0}}]}; coefficient values
/// may be numbers or [re,im] pairs.
HomogeneousIdeal ideal_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HomogeneousIdeal& ideal);

/// Evaluate a homogeneous polynomial at a point.
std::complex<double> evaluate(const HomogeneousPolynomial& p, int d, const Point& z);

inline constexpr double kDefaultRankTol = 1e-10;

struct IdealSlice {
    int degree = 0;
    /// Orthonormal (Euclidean) columns spanning the slice in monomial coefficient
    /// coordinates of this degree.
    Eigen::MatrixXcd span;
    std::vector<double> singular_values;  // of the spanning set, descending
    double largest_discarded = 0.0;       // relative to singular_values[0]
    int dimension() const { return static_cast<int>(span.cols()); }
};

/// Per-degree spans of { q g : g generator, q monomial, deg(q g) = m } for m <= N.
std::vector<IdealSlice> ideal_slices(const HomogeneousIdeal& ideal, const MonomialBasis& basis,
                                     double tol = kDefaultRankTol);

struct ComplementBlock {
    int degree = 0;
    /// Columns C in monomial coefficient coordinates with C^H W C = I.
    Eigen::MatrixXcd coefficients;
    /// Same subspace in the orthonormal monomial coordinates e_alpha = z^alpha/||z^alpha||.
    Eigen::MatrixXcd orthonormal;
    /// Singular values of the slice relative to the largest one: the smallest kept
    /// and the largest dropped at the rank threshold (0 when none).
    double smallest_retained = 0.0;
    double largest_discarded = 0.0;
    int dimension() const { return static_cast<int>(coefficients.cols()); }
};

class IdealComplementBasis {
public:
    IdealComplementBasis(std::vector<ComplementBlock> blocks, int basis_size, std::vector<int> offsets);

    const std::vector<ComplementBlock>& blocks() const { return blocks_; }
    int dimension() const;
    /// basis.size() x dimension() isometry in orthonormal monomial coordinates.
    Eigen::MatrixXcd embedding() const;
    /// Degree label of every embedding column.
    std::vector<int> column_degrees() const;

private:
    std::vector<ComplementBlock> blocks_;
    int basis_size_;
    std::vector<int> offsets_;
};

IdealComplementBasis complement_basis(const HomogeneousIdeal& ideal, const MonomialBasis& basis,
                                      double tol = kDefaultRankTol);

struct KernelPowerVector {
    /// Coefficients of <z,w>^n over the full basis (monomial coordinates).
    Eigen::VectorXcd coeffs;
    double norm_squared = 0.0;
};

KernelPowerVector kernel_power_vector(const MonomialBasis& basis, const Point& w, int n);

/// Weighted inner product <x, y> = y^H W x of coefficient vectors.
std::complex<double> weighted_inner(const MonomialBasis& basis, const Eigen::VectorXcd& x,
                                    const Eigen::VectorXcd& y);

} // namespace rkhs
