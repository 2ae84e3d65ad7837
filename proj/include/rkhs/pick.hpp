#pragma once

// Pick-matrix feasibility, kernel quotients, Gram factorizations and sampled
// multiplier norms.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rkhs/kernel.hpp"
#include "rkhs/linalg.hpp"

namespace rkhs {

struct PickProblem {
    int d = 1;
    std::vector<Point> nodes;
    int r = 1;
    std::vector<Matrix> targets;

    /// Nodes in the open ball and pairwise distinct, one r x r target per node.
    void validate() const;
};

/// {"d":1, "nodes":[[0.0,0.0]], "r":1, "targets":[[[0.5,0.0]]]}
/// Complex entries are numbers or [re,im] pairs. A node is a list of d complexes;
/// for d = 1 it may also be a single complex. A target is a list of r rows of r
/// complexes; for r = 1 a row or the whole target may be a single complex.
PickProblem pick_problem_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PickProblem& problem);

/// Block matrix [k(z_i,z_j)(I - W_i W_j^*)] with the kernel truncated at order N.
Matrix pick_matrix(const PickProblem& problem, const KernelSpec& spec, int N);
Matrix pick_matrix(const PickProblem& problem, const CoeffTable& table);

/// [k(z_i,z_j)] for the truncated kernel.
Matrix kernel_gram(const CoeffTable& table, const std::vector<Point>& points);

inline constexpr double kDefaultPsdTol = 1e-10;

struct PsdVerdict {
    double min_eigenvalue = 0.0;
    int size = 0;
    double tolerance = kDefaultPsdTol;
    double scale = 0.0;  // largest |eigenvalue|
    bool psd = true;
};

/// Verdict psd iff min eigenvalue >= -tol * scale. Throws ArgumentError when the
/// input is not Hermitian to 1e-10 relative.
PsdVerdict is_psd(const Matrix& m, double tol = kDefaultPsdTol);

struct QuotientGram {
    Matrix gram;
    PsdVerdict verdict;
};

/// [k_num(z_i,z_j) / k_den(z_i,z_j)]; throws SingularKernelError when a denominator
/// vanishes.
QuotientGram kernel_quotient_gram(const KernelSpec& numerator, const KernelSpec& denominator,
                                  const std::vector<Point>& points, int N, double tol = kDefaultPsdTol);

struct PrincipalMinor {
    int i = 0;
    int j = 0;  // equal to i for a 1 x 1 minor
    double determinant = 0.0;
};

/// Most negative 1 x 1 or 2 x 2 principal minor below -tol * scale^2, if any.
std::optional<PrincipalMinor> find_negative_principal_minor(const Matrix& m, double tol = kDefaultPsdTol);

struct GramFactor {
    Matrix factor;  // n x rank, F F^H = gram
    int rank = 0;
    std::vector<int> pivots;
    double residual = 0.0;  // ||F F^H - gram||
};

/// Pivoted Cholesky; stops once the largest remaining pivot is <= tol * scale.
/// Throws FactorizationError when the input is not psd to tol.
GramFactor gram_factor(const Matrix& gram, double tol = kDefaultPsdTol);

/// Smallest t >= 0 with [k(z_i,z_j)(t^2 - phi_i conj(phi_j))] psd, i.e. the square
/// root of the largest generalized eigenvalue of (G o Phi, G).
/// Throws DegenerateSampleError when the Gram matrix is numerically singular.
double sampled_multiplier_norm(const std::vector<std::complex<double>>& phi, const KernelSpec& spec,
                               const std::vector<Point>& points, int N);

/// Supremum of the scalings t of every target with a psd Pick matrix, located by
/// bisection on [0, upper] to within tol. The problem at t = 0 must be psd.
double feasibility_threshold(const PickProblem& base, const KernelSpec& spec, int N, double upper = 1.0,
                             double tol = 1e-9, double psd_tol = kDefaultPsdTol);

struct SweepRow {
    double scale = 0.0;
    PsdVerdict verdict;
};

/// Pick verdicts for the targets scaled by each entry of scales; evaluated
/// concurrently, returned in input order.
std::vector<SweepRow> feasibility_sweep(const PickProblem& base, const KernelSpec& spec, int N,
                                        const std::vector<double>& scales, double psd_tol = kDefaultPsdTol);

/// Header "label,size,min_eigenvalue,tolerance,scale,verdict".
void write_verdict_header(std::ostream& os);
void write_verdict_row(std::ostream& os, const std::string& label, const PsdVerdict& v);

} // namespace rkhs
