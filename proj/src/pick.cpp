#include "rkhs/pick.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <thread>

#include "rkhs/errors.hpp"
#include "rkhs/format.hpp"
#include "rkhs/polyspace.hpp"

namespace rkhs {

void PickProblem::validate() const
{
    if (d < 1)
        throw ArgumentError("pick problem needs d >= 1");
    if (r < 1)
        throw ArgumentError("pick problem needs r >= 1");
    if (targets.size() != nodes.size())
        throw ShapeError("one target per node required");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].size() != d)
            throw ShapeError("node " + std::to_string(i) + " does not have d coordinates");
        if (nodes[i].norm() >= 1.0)
            throw DomainError("node " + std::to_string(i) + " lies outside the open ball");
        if (targets[i].rows() != r || targets[i].cols() != r)
            throw ShapeError("target " + std::to_string(i) + " is not r x r");
        for (std::size_t j = 0; j < i; ++j)
            if (nodes[i] == nodes[j])
                throw ArgumentError("nodes " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
    }
}

namespace {

bool is_pair(const nlohmann::json& v)
{
    return v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number();
}

Point node_from_json(const nlohmann::json& v, int d)
{
    Point p(d);
    if (d == 1 && (v.is_number() || is_pair(v))) {
        p[0] = complex_from_json(v);
        return p;
    }
    if (!v.is_array() || static_cast<int>(v.size()) != d)
        throw ParseError("node must list " + std::to_string(d) + " coordinates: " + v.dump());
    for (int j = 0; j < d; ++j)
        p[j] = complex_from_json(v[static_cast<std::size_t>(j)]);
    return p;
}

Matrix target_from_json(const nlohmann::json& v, int r)
{
    Matrix w(r, r);
    if (r == 1 && (v.is_number() || is_pair(v))) {
        w(0, 0) = complex_from_json(v);
        return w;
    }
    if (!v.is_array() || static_cast<int>(v.size()) != r)
        throw ParseError("target must list " + std::to_string(r) + " rows: " + v.dump());
    for (int i = 0; i < r; ++i) {
        const auto& row = v[static_cast<std::size_t>(i)];
        if (r == 1 && (row.is_number() || is_pair(row))) {
            w(0, 0) = complex_from_json(row);
            continue;
        }
        if (!row.is_array() || static_cast<int>(row.size()) != r)
            throw ParseError("target row must list " + std::to_string(r) + " entries: " + row.dump());
        for (int j = 0; j < r; ++j)
            w(i, j) = complex_from_json(row[static_cast<std::size_t>(j)]);
    }
    return w;
}

nlohmann::json complex_to_json(std::complex<double> c) { return {c.real(), c.imag()}; }

} // namespace

PickProblem pick_problem_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw ParseError("pick problem must be a JSON object");
    PickProblem p;
    try {
        p.d = j.at("d").get<int>();
        p.r = j.value("r", 1);
        if (p.d < 1 || p.r < 1)
            throw ParseError("d and r must be positive");
        for (const auto& n : j.at("nodes"))
            p.nodes.push_back(node_from_json(n, p.d));
        for (const auto& t : j.at("targets"))
            p.targets.push_back(target_from_json(t, p.r));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed pick problem: ") + e.what());
    }
    p.validate();
    return p;
}

nlohmann::json to_json(const PickProblem& problem)
{
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& z : problem.nodes) {
        nlohmann::json node = nlohmann::json::array();
        for (Eigen::Index j = 0; j < z.size(); ++j)
            node.push_back(complex_to_json(z[j]));
        nodes.push_back(node);
    }
    nlohmann::json targets = nlohmann::json::array();
    for (const auto& w : problem.targets) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index k = 0; k < w.cols(); ++k)
                row.push_back(complex_to_json(w(i, k)));
            rows.push_back(row);
        }
        targets.push_back(rows);
    }
    return {{"d", problem.d}, {"nodes", nodes}, {"r", problem.r}, {"targets", targets}};
}

Matrix kernel_gram(const CoeffTable& table, const std::vector<Point>& points)
{
    const auto n = static_cast<Eigen::Index>(points.size());
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            g(i, j) = kernel_eval(table, points[i], points[j]).value;
            g(j, i) = std::conj(g(i, j));
        }
        g(i, i) = g(i, i).real();
    }
    return g;
}

Matrix pick_matrix(const PickProblem& problem, const CoeffTable& table)
{
    problem.validate();
    const Matrix k = kernel_gram(table, problem.nodes);
    const int r = problem.r;
    const auto n = static_cast<int>(problem.nodes.size());
    Matrix p(n * r, n * r);
    const Matrix id = Matrix::Identity(r, r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            p.block(i * r, j * r, r, r) = k(i, j) * (id - problem.targets[i] * problem.targets[j].adjoint());
    return p;
}

Matrix pick_matrix(const PickProblem& problem, const KernelSpec& spec, int N)
{
    return pick_matrix(problem, compute_a(spec, N));
}

PsdVerdict is_psd(const Matrix& m, double tol)
{
    if (m.rows() != m.cols())
        throw ShapeError("psd test needs a square matrix");
    PsdVerdict v;
    v.size = static_cast<int>(m.rows());
    v.tolerance = tol;
    if (m.size() == 0)
        return v;
    const double norm = spectral_norm(m);
    if (spectral_norm(m - m.adjoint()) > 1e-10 * std::max(norm, 1e-300))
        throw ArgumentError("psd test needs a Hermitian matrix");
    const Eigen::VectorXd ev = hermitian_eigenvalues(m);
    v.min_eigenvalue = ev.minCoeff();
    v.scale = ev.cwiseAbs().maxCoeff();
    v.psd = v.min_eigenvalue >= -tol * v.scale;
    return v;
}

QuotientGram kernel_quotient_gram(const KernelSpec& numerator, const KernelSpec& denominator,
                                  const std::vector<Point>& points, int N, double tol)
{
    const CoeffTable num = compute_a(numerator, N);
    const CoeffTable den = compute_a(denominator, N);
    const Matrix gn = kernel_gram(num, points);
    const Matrix gd = kernel_gram(den, points);
    QuotientGram q;
    q.gram = Matrix(gn.rows(), gn.cols());
    for (Eigen::Index i = 0; i < gn.rows(); ++i) {
        for (Eigen::Index j = 0; j < gn.cols(); ++j) {
            if (std::abs(gd(i, j)) <= 1e-300)
                throw SingularKernelError("denominator kernel vanishes at pair (" + std::to_string(i) + ", " +
                                          std::to_string(j) + ")");
            q.gram(i, j) = gn(i, j) / gd(i, j);
        }
    }
    q.gram = hermitian_part(q.gram);
    q.verdict = is_psd(q.gram, tol);
    return q;
}

std::optional<PrincipalMinor> find_negative_principal_minor(const Matrix& m, double tol)
{
    const auto n = m.rows();
    double scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        scale = std::max(scale, std::abs(m(i, i).real()));
    std::optional<PrincipalMinor> worst;
    auto consider = [&](int i, int j, double det, double threshold) {
        if (det < -threshold && (!worst || det < worst->determinant))
            worst = PrincipalMinor{i, j, det};
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        consider(static_cast<int>(i), static_cast<int>(i), m(i, i).real(), tol * scale);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double det = m(i, i).real() * m(j, j).real() - std::norm(m(i, j));
            consider(static_cast<int>(i), static_cast<int>(j), det, tol * scale * scale);
        }
    }
    return worst;
}

GramFactor gram_factor(const Matrix& gram, double tol)
{
    const PsdVerdict v = is_psd(gram, tol);
    if (!v.psd)
        throw FactorizationError("Gram matrix is not psd: min eigenvalue " + format_double(v.min_eigenvalue));
    const auto n = gram.rows();
    Matrix a = hermitian_part(gram);
    Matrix l = Matrix::Zero(n, n);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        perm[i] = static_cast<int>(i);
    Eigen::VectorXd diag(n);
    for (Eigen::Index i = 0; i < n; ++i)
        diag[i] = a(i, i).real();
    const double threshold = tol * std::max(v.scale, 1e-300);

    GramFactor f;
    Eigen::Index k = 0;
    for (; k < n; ++k) {
        Eigen::Index p = k;
        for (Eigen::Index i = k + 1; i < n; ++i)
            if (diag[perm[i]] > diag[perm[p]])
                p = i;
        if (diag[perm[p]] <= threshold)
            break;
        std::swap(perm[k], perm[p]);
        const int pk = perm[k];
        const double piv = std::sqrt(diag[pk]);
        l(pk, k) = piv;
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const int pi = perm[i];
            std::complex<double> s = a(pi, pk);
            for (Eigen::Index c = 0; c < k; ++c)
                s -= l(pi, c) * std::conj(l(pk, c));
            l(pi, k) = s / piv;
            diag[pi] -= std::norm(l(pi, k));
        }
        f.pivots.push_back(pk);
    }
    f.rank = static_cast<int>(k);
    f.factor = l.leftCols(k);
    f.residual = spectral_norm(f.factor * f.factor.adjoint() - gram);
    return f;
}

double sampled_multiplier_norm(const std::vector<std::complex<double>>& phi, const KernelSpec& spec,
                               const std::vector<Point>& points, int N)
{
    if (phi.size() != points.size())
        throw ShapeError("one multiplier value per sample point required");
    if (points.empty())
        return 0.0;
    const Matrix g = kernel_gram(compute_a(spec, N), points);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    const Eigen::VectorXd ev = es.eigenvalues();
    if (ev[0] <= 1e-14 * ev.cwiseAbs().maxCoeff())
        throw DegenerateSampleError("kernel Gram matrix is numerically singular on the sample");
    const Matrix inv_sqrt = es.eigenvectors() * ev.cwiseInverse().cwiseSqrt().asDiagonal() *
                            es.eigenvectors().adjoint();
    const auto n = g.rows();
    Matrix gphi(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            gphi(i, j) = g(i, j) * phi[i] * std::conj(phi[j]);
    const Eigen::VectorXd gen = hermitian_eigenvalues(inv_sqrt * gphi * inv_sqrt);
    return std::sqrt(std::max(gen.maxCoeff(), 0.0));
}

namespace {

PickProblem scaled_problem(const PickProblem& base, double t)
{
    PickProblem p = base;
    for (auto& w : p.targets)
        w *= t;
    return p;
}

} // namespace

double feasibility_threshold(const PickProblem& base, const KernelSpec& spec, int N, double upper, double tol,
                             double psd_tol)
{
    const CoeffTable table = compute_a(spec, N);
    auto feasible = [&](double t) { return is_psd(pick_matrix(scaled_problem(base, t), table), psd_tol).psd; };
    if (!feasible(0.0))
        throw PreconditionError("Pick matrix is not psd with zero targets");
    if (feasible(upper))
        return upper;
    double lo = 0.0, hi = upper;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<SweepRow> feasibility_sweep(const PickProblem& base, const KernelSpec& spec, int N,
                                        const std::vector<double>& scales, double psd_tol)
{
    const CoeffTable table = compute_a(spec, N);
    std::vector<SweepRow> rows(scales.size());
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), scales.size()));
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < scales.size(); i += workers)
                rows[i] = {scales[i], is_psd(pick_matrix(scaled_problem(base, scales[i]), table), psd_tol)};
        }));
    for (auto& j : jobs)
        j.get();
    return rows;
}

void write_verdict_header(std::ostream& os) { os << "label,size,min_eigenvalue,tolerance,scale,verdict\n"; }

void write_verdict_row(std::ostream& os, const std::string& label, const PsdVerdict& v)
{
    os << label << ',' << v.size << ',' << format_double(v.min_eigenvalue) << ',' << format_double(v.tolerance)
       << ',' << format_double(v.scale) << ',' << (v.psd ? "psd" : "not_psd") << '\n';
}

} // namespace rkhs
