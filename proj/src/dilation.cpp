#include "rkhs/dilation.hpp"

#include <algorithm>
#include <cmath>

#include "rkhs/errors.hpp"
#include "rkhs/format.hpp"

namespace rkhs {

double DilationCertificate::max_residual() const
{
    double m = isometry_residual;
    for (double r : intertwining_residuals)
        m = std::max(m, r);
    for (double r : compression_residuals)
        m = std::max(m, r);
    if (range_residual)
        m = std::max(m, *range_residual);
    return m;
}

nlohmann::json to_json(const DilationCertificate& c)
{
    nlohmann::json j = {{"isometry_residual", c.isometry_residual},
                        {"intertwining_residuals", c.intertwining_residuals},
                        {"compression_residuals", c.compression_residuals},
                        {"clamped_mass", c.clamped_mass},
                        {"tolerance", c.tolerance},
                        {"valid", c.valid()}};
    if (c.range_residual)
        j["range_residual"] = *c.range_residual;
    return j;
}

DilationCertificate verify_coextension(const Matrix& v, const OperatorTuple& t, const OperatorTuple& s,
                                       double tolerance)
{
    if (s.d() != t.d())
        throw ShapeError("model and tuple have different d");
    const Eigen::Index m = t.size();
    if (v.cols() != m || v.rows() != static_cast<Eigen::Index>(s.size()) * m)
        throw ShapeError("V must be (dim S * dim T) x dim T");
    DilationCertificate c;
    c.V = v;
    c.tolerance = tolerance;
    c.isometry_residual = isometry_defect(v);
    for (int j = 0; j < t.d(); ++j) {
        const Matrix sj = kron_identity(s[j], m);
        c.intertwining_residuals.push_back(spectral_norm(sj.adjoint() * v - v * t[j].adjoint()));
        c.compression_residuals.push_back(spectral_norm(v.adjoint() * sj * v - t[j]));
    }
    return c;
}

DilationCertificate agler_coextension(const OperatorTuple& t, const CoeffTable& table, const MonomialBasis& basis,
                                      const CoextensionOptions& options)
{
    if (t.d() != basis.d())
        throw ShapeError("tuple and basis have different d");
    const int N = basis.max_degree();
    if (table.order() < N)
        throw ShapeError("table order is below the basis truncation");
    for (int n = 0; n <= N; ++n)
        if (std::abs(table.a(n) - basis.coefficients()[static_cast<std::size_t>(n)]) >
            1e-12 * std::abs(table.a(n)))
            throw ArgumentError("basis was built from a different coefficient table");

    const auto K = nilpotency_order(t);
    if (!K)
        throw PreconditionError("coextensions are only constructed for jointly nilpotent tuples");
    if (*K - 1 > N)
        throw TruncationError("T^alpha is nonzero at degree " + std::to_string(*K - 1) + " > N = " +
                              std::to_string(N));

    const HereditaryResult h = hereditary_1k(t, table, auto_nilpotent);
    if (!h.positive(options.positivity_tol))
        throw PreconditionError("1/k(T,T*) is not psd: min eigenvalue " + format_double(h.min_eigenvalue));
    const PsdRoot root = psd_sqrt(h.D);

    const Eigen::Index m = t.size();
    Matrix v = Matrix::Zero(basis.size() * m, m);
    MonomialProducts tree(t);
    for (int n = 0; n < *K; ++n) {
        if (n > 0)
            tree.advance();
        for (std::size_t k = 0; k < tree.indices().size(); ++k) {
            const auto& alpha = tree.indices()[k];
            const int i = basis.index_of(alpha);
            const double c = table.a(n) * multinomial_double(alpha) * std::sqrt(basis.weight(i));
            v.middleRows(static_cast<Eigen::Index>(i) * m, m) = c * root.root * tree.products()[k].adjoint();
        }
    }

    DilationCertificate cert = verify_coextension(v, t, shift_tuple(basis), options.tolerance);
    cert.clamped_mass = root.clamped_mass;
    if (options.ideal_embedding) {
        const Matrix& q = *options.ideal_embedding;
        if (q.rows() != basis.size())
            throw ShapeError("ideal embedding has the wrong number of rows");
        const Matrix p = Matrix::Identity(basis.size(), basis.size()) - q * q.adjoint();
        cert.range_residual = spectral_norm(kron_identity(p, m) * v);
    }
    return cert;
}

OperatorTuple spherical_unitary(const std::vector<Point>& points)
{
    if (points.empty())
        throw ArgumentError("spherical_unitary needs at least one point");
    const auto d = points[0].size();
    const auto n = static_cast<Eigen::Index>(points.size());
    std::vector<Matrix> mats(static_cast<std::size_t>(d), Matrix::Zero(n, n));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (points[i].size() != d)
            throw ShapeError("points have different dimensions");
        if (std::abs(points[i].norm() - 1.0) > 1e-12)
            throw DomainError("point " + std::to_string(i) + " is not on the unit sphere");
        for (Eigen::Index j = 0; j < d; ++j)
            mats[j](i, i) = points[i][j];
    }
    return OperatorTuple(std::move(mats));
}

OperatorTuple direct_sum(const OperatorTuple& a, const OperatorTuple& b)
{
    if (a.d() != b.d())
        throw ShapeError("direct sum needs tuples with the same d");
    const int na = a.size(), nb = b.size();
    std::vector<Matrix> mats;
    for (int j = 0; j < a.d(); ++j) {
        Matrix m = Matrix::Zero(na + nb, na + nb);
        m.topLeftCorner(na, na) = a[j];
        m.bottomRightCorner(nb, nb) = b[j];
        mats.push_back(std::move(m));
    }
    return OperatorTuple::unchecked(std::move(mats));
}

} // namespace rkhs
