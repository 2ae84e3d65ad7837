#pragma once

// Coefficient sequences of unitarily invariant kernels
//     k(z,w) = sum_n a_n <z,w>^n
// on the unit ball of C^d, their formal inverses 1 - 1/k = sum_{n>=1} b_n t^n,
// and the classifications read off from those sequences.

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace rkhs {

using Point = Eigen::VectorXcd;

enum class Family {
    hardy,
    drury_arveson,
    h_s,
    besov_sobolev,
    bergman_disc,
    custom,
};

/// Named or custom unitarily invariant kernel family.
struct KernelSpec {
    Family family = Family::hardy;
    int d = 1;
    double s = 0.0;                    // h_s only, s <= 0
    double sigma = 1.0;                // besov_sobolev only, 0 < sigma <= 1
    std::vector<double> coefficients;  // custom only
    bool unnormalized = false;         // custom only: allow coefficients[0] != 1

    static KernelSpec hardy(int d = 1);
    static KernelSpec drury_arveson(int d);
    static KernelSpec h_s(double s, int d = 1);
    /// Dirichlet space: h_s with s = -1, a_n = 1/(n+1).
    static KernelSpec dirichlet(int d = 1);
    static KernelSpec besov_sobolev(double sigma, int d = 1);
    static KernelSpec bergman(int d = 1);
    static KernelSpec custom(std::vector<double> coefficients, int d = 1, bool unnormalized = false);

    /// Throws ParameterDomainError when the invariants of the family are violated.
    void validate() const;
    std::string name() const;
};

/// Accepts the canonical names plus the aliases da, hs, k_sigma, bergman.
/// "dirichlet" is not a family of its own; see kernel_from_name.
Family parse_family(const std::string& name);
std::string family_name(Family f);

/// Named kernel with its parameters; "dirichlet" yields h_s with s = -1.
KernelSpec kernel_from_name(const std::string& name, int d, double s = 0.0, double sigma = 1.0);

/// Truncated a_0..a_N and (once inverted) b_1..b_N.
class CoeffTable {
public:
    CoeffTable(std::vector<double> a, bool normalized);
    CoeffTable(std::vector<double> a, std::vector<double> b, bool normalized);

    int order() const { return static_cast<int>(a_.size()) - 1; }
    const std::vector<double>& a() const { return a_; }
    double a(int n) const { return a_.at(n); }

    bool has_b() const { return !b_.empty(); }
    /// b_n for 1 <= n <= N.
    double b(int n) const;
    /// Storage of b with b[0] = 0 as a placeholder; size N+1 when filled.
    const std::vector<double>& b_storage() const { return b_; }

    bool normalized() const { return normalized_; }
    /// min_{1<=n<=N} b_n; +inf for N = 0.
    double cnp_margin() const;

private:
    std::vector<double> a_;
    std::vector<double> b_;
    bool normalized_;
};

CoeffTable compute_a(const KernelSpec& spec, int N);
CoeffTable invert_series(const CoeffTable& table);
/// compute_a followed by invert_series.
CoeffTable make_table(const KernelSpec& spec, int N);

/// max_m |a_m - sum_{n=1}^m b_n a_{m-n}| / |a_m| over 1 <= m <= N.
double recursion_residual(const CoeffTable& table);

inline constexpr double kDefaultCnpTol = 1e-12;

struct CnpVerdict {
    bool pass = true;
    int first_negative_index = 0;  // 0 when pass
    double value = 0.0;
    double tolerance = kDefaultCnpTol;
};

CnpVerdict is_cnp(const CoeffTable& table, double tol = kDefaultCnpTol);

struct RegularityProfile {
    std::vector<double> ratios;  // a_n / a_{n+1}, n = 0..N-1
    int tail_start = 0;          // first index of the last quartile
    double tail_deviation = 0.0; // max |ratio - 1| over the last quartile
};

RegularityProfile regularity_profile(const CoeffTable& table);

struct SummabilityReport {
    double a_sum = 0.0;
    double b_sum = 0.0;
    std::vector<double> b_partial_sums;  // index n holds sum_{k<=n} b_k, n = 0..N
    /// 1 - sum b; tends to 0 exactly when sum a diverges (unbounded kernel).
    double b_gap = 1.0;
    bool cnp = false;
    bool b_sum_within_unit = true;       // sum b <= 1 + tol
    bool b_partial_sums_monotone = true;
    double tolerance = kDefaultCnpTol;
};

SummabilityReport classify_summability(const CoeffTable& table, double tol = kDefaultCnpTol);

struct KernelValue {
    std::complex<double> value;
    int order = 0;
    /// a_{N+1}|t|^{N+1}/(1-|t|) with a_{N+1} estimated by a_N; +inf when |t| >= 1.
    double tail_estimate = 0.0;
};

/// Truncated evaluation of sum_{n<=N} a_n <z,w>^n. Points must lie in the open ball
/// unless allow_boundary is set.
KernelValue kernel_eval(const KernelSpec& spec, const Point& z, const Point& w, int N,
                        bool allow_boundary = false);
/// Same evaluation against a precomputed table.
KernelValue kernel_eval(const CoeffTable& table, const Point& z, const Point& w,
                        bool allow_boundary = false);

/// Table of k_eps = k - (1 - eps): a_0 = eps, a_n unchanged for n >= 1, b cleared.
CoeffTable perturb_kernel(const CoeffTable& table, double eps);

// Structured text: {"family": "h_s", "s": -1.0, "d": 2, "N": 50}
struct KernelConfig {
    KernelSpec spec;
    std::optional<int> N;
};

KernelConfig kernel_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const KernelSpec& spec, std::optional<int> N = std::nullopt);

/// CSV with header n,a_n,b_n; b_0 is left empty.
void write_csv(std::ostream& os, const CoeffTable& table);

} // namespace rkhs
