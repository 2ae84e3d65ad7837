#include "rkhs/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <random>

#include "rkhs/errors.hpp"
#include "rkhs/format.hpp"

namespace rkhs {

OperatorTuple shift_tuple(const MonomialBasis& basis)
{
    const int n = basis.size();
    std::vector<Matrix> mats(basis.d(), Matrix::Zero(n, n));
    for (int i = 0; i < n; ++i) {
        const auto& alpha = basis.at(i);
        if (alpha.degree() >= basis.max_degree())
            continue;
        for (int j = 0; j < basis.d(); ++j) {
            const int target = basis.index_of(alpha.plus_unit(j));
            mats[j](target, i) = std::sqrt(basis.weight(target) / basis.weight(i));
        }
    }
    return OperatorTuple(std::move(mats));
}

OperatorTuple compress(const OperatorTuple& t, const Matrix& q)
{
    if (q.rows() != t.size())
        throw ShapeError("compression subspace has " + std::to_string(q.rows()) + " rows, tuple size is " +
                         std::to_string(t.size()));
    const double defect = isometry_defect(q);
    if (defect > 1e-10)
        throw ArgumentError("compression columns are not orthonormal (||Q^H Q - I|| = " + format_double(defect) + ")");
    std::vector<Matrix> out;
    for (const auto& m : t.matrices())
        out.push_back(q.adjoint() * m * q);
    return OperatorTuple::unchecked(std::move(out));
}

namespace {

bool products_vanish(const MonomialProducts& tree, double threshold)
{
    for (const auto& p : tree.products())
        if (spectral_norm(p) > threshold)
            return false;
    return true;
}

} // namespace

std::optional<int> nilpotency_order(const OperatorTuple& t, double rel_tol)
{
    const double s = std::sqrt(static_cast<double>(t.d())) * t.max_norm();
    if (s == 0.0)
        return 1;
    MonomialProducts tree(t);
    const int n = std::max(t.size(), 1);
    for (int k = 1; k <= n; ++k) {
        tree.advance();
        if (products_vanish(tree, rel_tol * std::pow(s, k)))
            return k;
    }
    return std::nullopt;
}

namespace {

int resolve_order(const OperatorTuple& t, const CoeffTable& table, TruncationOrder order, bool& exact)
{
    if (!table.has_b())
        throw ArgumentError("table has no b coefficients; call invert_series first");
    exact = false;
    int M = 0;
    if (std::holds_alternative<AutoNilpotent>(order)) {
        const auto K = nilpotency_order(t);
        if (!K)
            throw ModeError("auto-nilpotent requested but the tuple is not jointly nilpotent");
        M = *K - 1;
        exact = true;
    } else {
        M = std::get<int>(order);
        if (M < 0)
            throw ArgumentError("truncation order must be >= 0");
    }
    if (M > table.order())
        throw ArgumentError("truncation order " + std::to_string(M) + " exceeds the table order " +
                            std::to_string(table.order()));
    return M;
}

} // namespace

HereditaryResult hereditary_1k(const OperatorTuple& t, const CoeffTable& table, TruncationOrder order)
{
    bool exact = false;
    const int M = resolve_order(t, table, order, exact);
    const int n = t.size();
    MonomialProducts tree(t);
    Matrix sum = Matrix::Zero(n, n);
    for (int k = 1; k <= M; ++k) {
        tree.advance();
        for (std::size_t i = 0; i < tree.indices().size(); ++i) {
            const Matrix& ta = tree.products()[i];
            sum.noalias() += (table.b(k) * multinomial_double(tree.indices()[i])) * (ta * ta.adjoint());
        }
    }

    HereditaryResult r;
    r.D = Matrix::Identity(n, n) - sum;
    r.order_used = M;
    if (exact) {
        r.tail = {TailBound::Kind::exact, 0.0};
    } else {
        const double s = std::sqrt(static_cast<double>(t.d())) * t.max_norm();
        tree.advance();
        if (s == 0.0 || products_vanish(tree, 1e-13 * std::pow(s, M + 1))) {
            r.tail = {TailBound::Kind::exact, 0.0};
        } else {
            // The degree-n term has norm <= q^n with q = ||sum_j T_j T_j^*||; beyond the table |b_n| <= 1
            // holds for kernels with the CNP property.
            Matrix row = Matrix::Zero(n, n);
            for (const auto& tj : t.matrices())
                row.noalias() += tj * tj.adjoint();
            const double q = spectral_norm(row);
            if (q >= 1.0 || !is_cnp(table).pass) {
                r.tail = {TailBound::Kind::inconclusive, std::numeric_limits<double>::infinity()};
            } else {
                double bound = 0.0;
                for (int k = M + 1; k <= table.order(); ++k)
                    bound += std::abs(table.b(k)) * std::pow(q, k);
                bound += std::pow(q, table.order() + 1) / (1.0 - q);
                r.tail = {TailBound::Kind::bound, bound};
            }
        }
    }
    r.hermitian_defect = hermitian_defect(r.D);
    r.eigenvalues = hermitian_eigenvalues(r.D);
    r.min_eigenvalue = n ? r.eigenvalues.minCoeff() : 0.0;
    return r;
}

TechnicalIdentity technical_identity_check(const MonomialBasis& basis, const CoeffTable& table, int n,
                                           const HomogeneousPolynomial& p)
{
    const int m = p.degree;
    if (m > basis.max_degree())
        throw OutOfRangeError("polynomial degree " + std::to_string(m) + " exceeds truncation N = " +
                              std::to_string(basis.max_degree()));
    if (n < 1 || n > m)
        throw ArgumentError("technical identity needs 1 <= n <= deg p");
    if (p.coeffs.size() != basis.degree_count(m))
        throw ShapeError("polynomial coefficient vector has the wrong length");

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(basis.size());
    const int off = basis.degree_offset(m);
    for (int i = 0; i < basis.degree_count(m); ++i)
        x[off + i] = p.coeffs[i] * std::sqrt(basis.weight(off + i));

    const OperatorTuple s = shift_tuple(basis);
    MonomialProducts tree(s);
    for (int k = 0; k < n; ++k)
        tree.advance();
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(basis.size());
    for (std::size_t i = 0; i < tree.indices().size(); ++i) {
        const auto& sa = tree.products()[i];
        y += multinomial_double(tree.indices()[i]) * (sa * (sa.adjoint() * x));
    }
    TechnicalIdentity out;
    out.factor = table.a(m - n) / table.a(m);
    const double xn = x.norm();
    out.residual = xn > 0.0 ? (y - out.factor * x).norm() / xn : y.norm();
    return out;
}

PsiRow psi_row(const OperatorTuple& t, const CoeffTable& table, TruncationOrder order, bool keep_family)
{
    bool exact = false;
    const int M = resolve_order(t, table, order, exact);
    for (int k = 1; k <= M; ++k)
        if (table.b(k) < -kDefaultCnpTol)
            throw CnpViolationError("b_" + std::to_string(k) + " = " + format_double(table.b(k)) +
                                    " < 0: psi_k is only defined for CNP kernels");
    const int n = t.size();
    PsiRow r;
    r.order_used = M;
    r.row_sum = Matrix::Zero(n, n);
    MonomialProducts tree(t);
    for (int k = 1; k <= M; ++k) {
        tree.advance();
        const double bk = std::max(table.b(k), 0.0);
        for (std::size_t i = 0; i < tree.indices().size(); ++i) {
            const double c = std::sqrt(bk * multinomial_double(tree.indices()[i]));
            const Matrix& ta = tree.products()[i];
            r.row_sum.noalias() += (c * c) * (ta * ta.adjoint());
            ++r.family_size;
            if (keep_family) {
                r.indices.push_back(tree.indices()[i]);
                r.family.push_back(c * ta);
            }
        }
    }
    r.max_eigenvalue = n ? hermitian_eigenvalues(r.row_sum).maxCoeff() : 0.0;
    return r;
}

// ---------------------------------------------------------------------------
// Joint spectrum

namespace {

double strict_lower_norm(const Matrix& m)
{
    Matrix low = m.triangularView<Eigen::StrictlyLower>();
    return spectral_norm(low);
}

// Orthonormal basis of an eigenspace of r (s x s). Eigenvalues nearest the first one
// are averaged over clusters of shrinking size: the mean of a whole defective cluster
// is accurate even when its members are spread by eps^(1/k).
Matrix eigenspace(const Matrix& r, double scale, double tol)
{
    const auto s = r.rows();
    Eigen::ComplexEigenSolver<Matrix> es(r, false);
    Eigen::VectorXcd ev = es.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(s));
    std::iota(order.begin(), order.end(), 0);
    const auto lead = ev[0];
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(ev[a] - lead) < std::abs(ev[b] - lead); });
    std::vector<std::complex<double>> prefix(static_cast<std::size_t>(s) + 1, 0.0);
    for (Eigen::Index m = 1; m <= s; ++m)
        prefix[static_cast<std::size_t>(m)] = prefix[static_cast<std::size_t>(m - 1)] + ev[order[static_cast<std::size_t>(m - 1)]];
    for (Eigen::Index m = s; m >= 1; --m) {
        const std::complex<double> mu = prefix[static_cast<std::size_t>(m)] / static_cast<double>(m);
        const Matrix shifted = r - mu * Matrix::Identity(s, s);
        Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        Eigen::Index k = 0;
        while (k < s && sv[s - 1 - k] <= tol * scale)
            ++k;
        if (k > 0)
            return svd.matrixV().rightCols(k);
    }
    return Matrix(s, 0);
}

Eigen::VectorXcd common_eigenvector(const std::vector<Matrix>& a, const Eigen::VectorXcd& coeffs, double scale,
                                    double tol)
{
    const auto k = a[0].rows();
    Matrix l = Matrix::Zero(k, k);
    for (std::size_t j = 0; j < a.size(); ++j)
        l += coeffs[static_cast<Eigen::Index>(j)] * a[j];
    Matrix q = Matrix::Identity(k, k);
    std::vector<const Matrix*> seq{&l};
    for (const auto& m : a)
        seq.push_back(&m);
    for (const Matrix* m : seq) {
        const Matrix r = q.adjoint() * (*m) * q;
        const Matrix e = eigenspace(r, scale, tol);
        if (e.cols() == 0)
            throw DegeneracyError("no common eigenvector found within tolerance");
        q = q * e;
    }
    return q.col(0).normalized();
}

Matrix deflation_triangularize(const OperatorTuple& t, const Eigen::VectorXcd& coeffs, double scale, double tol)
{
    const int n = t.size();
    std::vector<Matrix> a = t.matrices();
    Matrix basis = Matrix::Identity(n, n);  // remaining subspace, original coordinates
    Matrix u(n, n);
    for (int step = 0; step < n; ++step) {
        const Eigen::VectorXcd x = common_eigenvector(a, coeffs, scale, tol);
        Eigen::HouseholderQR<Matrix> qr(x);
        const Matrix h = qr.householderQ();  // first column is a multiple of x
        u.col(step) = basis * h.col(0);
        const auto rest = a[0].rows() - 1;
        basis = basis * h.rightCols(rest);
        for (auto& m : a)
            m = (h.adjoint() * m * h).bottomRightCorner(rest, rest).eval();
    }
    return u;
}

} // namespace

JointSpectrum joint_eigenvalues(const OperatorTuple& t, std::uint64_t seed, double tol)
{
    JointSpectrum js;
    const int n = t.size();
    const double scale = std::max(t.max_norm(), 1e-300);
    if (t.commutator_defect() > 1e-8 * scale)
        throw ArgumentError("joint eigenvalues need a commuting tuple (commutator " +
                            format_double(t.commutator_defect()) + ")");
    if (n == 0)
        return js;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXcd coeffs(t.d());
    for (int j = 0; j < t.d(); ++j)
        coeffs[j] = {gauss(rng), gauss(rng)};

    auto residual_of = [&](const Matrix& u) {
        double r = 0.0;
        for (const auto& m : t.matrices())
            r = std::max(r, strict_lower_norm(u.adjoint() * m * u));
        return r;
    };

    Matrix l = Matrix::Zero(n, n);
    for (int j = 0; j < t.d(); ++j)
        l += coeffs[j] * t[j];
    Eigen::ComplexSchur<Matrix> schur(l);
    js.unitary = schur.matrixU();
    js.triangularity_residual = residual_of(js.unitary);
    if (js.triangularity_residual > tol * scale) {
        js.unitary = deflation_triangularize(t, coeffs, scale, 1e-9);
        js.triangularity_residual = residual_of(js.unitary);
        js.refined = true;
    }
    if (js.triangularity_residual > tol * scale)
        throw DegeneracyError("simultaneous triangularization failed: residual " +
                              format_double(js.triangularity_residual));

    std::vector<Matrix> tri;
    for (const auto& m : t.matrices())
        tri.push_back(js.unitary.adjoint() * m * js.unitary);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXcd p(t.d());
        for (int j = 0; j < t.d(); ++j)
            p[j] = tri[j](i, i);
        js.max_norm = std::max(js.max_norm, p.norm());
        js.points.push_back(std::move(p));
    }
    return js;
}

// ---------------------------------------------------------------------------
// Diagnostics

DefectOperator defect_operator(const OperatorTuple& t)
{
    const int n = t.size();
    DefectOperator out;
    out.defect = Matrix::Identity(n, n);
    for (const auto& m : t.matrices())
        out.defect.noalias() -= m * m.adjoint();
    out.eigenvalues = hermitian_eigenvalues(out.defect);
    return out;
}

std::vector<DegreeEigenvalue> shift_defect_profile(const MonomialBasis& basis)
{
    std::vector<DegreeEigenvalue> out;
    const auto& a = basis.coefficients();
    for (int m = 0; m <= basis.max_degree(); ++m) {
        DegreeEigenvalue e;
        e.degree = m;
        e.eigenvalue = m == 0 ? 1.0 : 1.0 - a[m - 1] / a[m];
        e.multiplicity = homogeneous_dimension(basis.d(), m);
        out.push_back(e);
    }
    return out;
}

std::vector<CommutatorTail> commutator_tail_norms(const OperatorTuple& t, const std::vector<int>& degrees, int N)
{
    if (static_cast<int>(degrees.size()) != t.size())
        throw ShapeError("need one degree label per coordinate");
    std::vector<Matrix> comms;
    for (int j = 0; j < t.d(); ++j)
        for (int k = 0; k < t.d(); ++k)
            comms.push_back(t[j] * t[k].adjoint() - t[k].adjoint() * t[j]);

    auto restricted_norm = [&](int lo, int hi) {
        std::vector<int> idx;
        for (int i = 0; i < t.size(); ++i)
            if (degrees[i] >= lo && degrees[i] <= hi)
                idx.push_back(i);
        double worst = 0.0;
        if (idx.empty())
            return worst;
        const auto k = static_cast<Eigen::Index>(idx.size());
        for (const auto& c : comms) {
            Matrix sub(k, k);
            for (Eigen::Index r = 0; r < k; ++r)
                for (Eigen::Index s = 0; s < k; ++s)
                    sub(r, s) = c(idx[r], idx[s]);
            worst = std::max(worst, spectral_norm(sub));
        }
        return worst;
    };

    std::vector<CommutatorTail> out;
    for (int m = 0; m <= N; ++m)
        out.push_back({m, restricted_norm(m, N), restricted_norm(m, N - 1)});
    return out;
}

std::vector<CommutatorTail> commutator_tail_norms(const OperatorTuple& t, const MonomialBasis& basis)
{
    std::vector<int> degrees(static_cast<std::size_t>(basis.size()));
    for (int i = 0; i < basis.size(); ++i)
        degrees[i] = basis.degree(i);
    return commutator_tail_norms(t, degrees, basis.max_degree());
}

ToeplitzDefect toeplitz_defect(const CoeffTable& table_a, const CoeffTable& table_b, int d, int N)
{
    if (table_a.order() < N || table_b.order() < N)
        throw ShapeError("both tables must reach order N = " + std::to_string(N));
    if (!table_a.normalized() || !table_b.normalized())
        throw ArgumentError("toeplitz_defect needs normalized tables");
    const MonomialBasis basis_a(table_a, d, N);
    const MonomialBasis basis_b(table_b, d, N);
    const OperatorTuple sa = shift_tuple(basis_a);
    const OperatorTuple sb = shift_tuple(basis_b);

    ToeplitzDefect out;
    const int n = basis_a.size();
    // U p = sqrt(a^A_m / a^B_m) p on degree-m p, written between orthonormal bases.
    out.unitary = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const int m = basis_a.degree(i);
        out.unitary(i, i) = std::sqrt(table_a.a(m) / table_b.a(m)) *
                            std::sqrt(basis_a.weight(i) / basis_b.weight(i));
    }
    for (int m = 0; m < N; ++m) {
        const double f = std::sqrt(table_a.a(m) * table_b.a(m + 1) / (table_a.a(m + 1) * table_b.a(m))) - 1.0;
        out.degree_factor.push_back(f);
        out.degree_magnitude.push_back(std::abs(f));
    }
    for (int j = 0; j < d; ++j) {
        Matrix def = out.unitary.adjoint() * sa[j] * out.unitary - sb[j];
        for (int c = 0; c < n; ++c) {
            const int m = basis_b.degree(c);
            const double f = m < N ? out.degree_factor[m] : 0.0;
            for (int r = 0; r < n; ++r)
                out.entry_residual = std::max(out.entry_residual, std::abs(def(r, c) - f * sb[j](r, c)));
        }
        out.defects.push_back(std::move(def));
    }
    return out;
}

MultiplierNormGap monomial_multiplier_norm(const MonomialBasis& basis, const MultiIndex& alpha)
{
    if (alpha.dim() != basis.d())
        throw ShapeError("multi-index length differs from d");
    if (alpha.degree() > basis.max_degree())
        throw OutOfRangeError("monomial degree exceeds the truncation");
    const OperatorTuple s = shift_tuple(basis);
    Matrix prod = Matrix::Identity(basis.size(), basis.size());
    for (int j = 0; j < basis.d(); ++j)
        for (int e = 0; e < alpha.exponents[j]; ++e)
            prod = prod * s[j];
    MultiplierNormGap g;
    g.truncated_norm = spectral_norm(prod);
    g.target = std::sqrt(basis.weight(basis.index_of(alpha)));
    g.gap = g.target - g.truncated_norm;
    return g;
}

MultiplierNormGap sampled_multiplier_power_norm(const CoeffTable& table, int d, int N, int n)
{
    if (n < 0 || n > N)
        throw OutOfRangeError("power must satisfy 0 <= n <= N");
    const MonomialBasis basis(table, d, N);
    MultiIndex alpha(std::vector<int>(d, 0));
    alpha.exponents[0] = n;
    return monomial_multiplier_norm(basis, alpha);
}

nlohmann::json verdict_report(const std::string& operation, const nlohmann::json& inputs, double min_eigenvalue,
                              double tolerance)
{
    return {{"operation", operation},
            {"inputs", inputs},
            {"min_eigenvalue", min_eigenvalue},
            {"tolerance", tolerance},
            {"verdict", min_eigenvalue >= -tolerance ? "psd" : "not_psd"}};
}

} // namespace rkhs
