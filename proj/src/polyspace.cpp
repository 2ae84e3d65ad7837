#include "rkhs/polyspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "rkhs/errors.hpp"
#include "rkhs/format.hpp"

namespace rkhs {

int MultiIndex::degree() const
{
    return std::accumulate(exponents.begin(), exponents.end(), 0);
}

MultiIndex MultiIndex::plus_unit(int j) const
{
    MultiIndex r = *this;
    ++r.exponents.at(j);
    return r;
}

std::string to_string(const MultiIndex& alpha)
{
    std::string s = "(";
    for (int j = 0; j < alpha.dim(); ++j) {
        if (j)
            s += ',';
        s += std::to_string(alpha.exponents[j]);
    }
    return s + ")";
}

MultiIndex parse_multi_index(const std::string& text)
{
    std::string body = text;
    if (!body.empty() && body.front() == '(')
        body.erase(0, 1);
    if (!body.empty() && body.back() == ')')
        body.pop_back();
    std::vector<int> e;
    std::stringstream ss(body);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(part, &used);
            if (v < 0)
                throw ParseError("negative exponent in '" + text + "'");
            e.push_back(v);
        } catch (const std::logic_error&) {
            throw ParseError("bad multi-index '" + text + "'");
        }
    }
    if (e.empty())
        throw ParseError("empty multi-index '" + text + "'");
    return MultiIndex(std::move(e));
}

namespace {

void fill_degree(int d, int j, int remaining, std::vector<int>& cur, std::vector<MultiIndex>& out)
{
    if (j == d - 1) {
        cur[j] = remaining;
        out.emplace_back(cur);
        return;
    }
    for (int k = remaining; k >= 0; --k) {
        cur[j] = k;
        fill_degree(d, j + 1, remaining - k, cur, out);
    }
}

using u128 = unsigned __int128;
constexpr u128 kU64Max = std::numeric_limits<std::uint64_t>::max();

// C(n, r), exact while the running value fits in 64 bits.
bool binomial_exact(int n, int r, u128& out)
{
    if (r < 0 || r > n) {
        out = 0;
        return true;
    }
    r = std::min(r, n - r);
    u128 v = 1;
    for (int i = 1; i <= r; ++i) {
        v = v * static_cast<u128>(n - r + i) / static_cast<u128>(i);
        if (v > kU64Max)
            return false;
    }
    out = v;
    return true;
}

} // namespace

std::vector<MultiIndex> indices_of_degree(int d, int m)
{
    if (d < 1 || m < 0)
        throw ArgumentError("indices_of_degree needs d >= 1 and m >= 0");
    std::vector<MultiIndex> out;
    std::vector<int> cur(d, 0);
    fill_degree(d, 0, m, cur, out);
    return out;
}

std::uint64_t multinomial(int n, const MultiIndex& alpha)
{
    if (alpha.degree() != n)
        throw ArgumentError("multinomial: |alpha| = " + std::to_string(alpha.degree()) +
                            " differs from n = " + std::to_string(n));
    // product of binomials C(alpha_1 + ... + alpha_j, alpha_j)
    u128 value = 1;
    int partial = 0;
    for (int e : alpha.exponents) {
        partial += e;
        u128 c = 0;
        if (!binomial_exact(partial, e, c))
            throw OutOfRangeError("multinomial coefficient overflows 64 bits");
        value *= c;
        if (value > kU64Max)
            throw OutOfRangeError("multinomial coefficient overflows 64 bits");
    }
    return static_cast<std::uint64_t>(value);
}

double multinomial_double(const MultiIndex& alpha)
{
    try {
        return static_cast<double>(multinomial(alpha.degree(), alpha));
    } catch (const OutOfRangeError&) {
        double value = 1.0;
        int partial = 0;
        for (int e : alpha.exponents) {
            partial += e;
            for (int i = 1; i <= e; ++i)
                value *= static_cast<double>(partial - e + i) / i;
        }
        return value;
    }
}

std::uint64_t homogeneous_dimension(int d, int m)
{
    u128 c = 0;
    if (!binomial_exact(m + d - 1, d - 1, c))
        throw OutOfRangeError("homogeneous dimension overflows 64 bits");
    return static_cast<std::uint64_t>(c);
}

// ---------------------------------------------------------------------------

MonomialBasis::MonomialBasis(const CoeffTable& table, int d, int N)
    : d_(d), N_(N), a_(table.a())
{
    if (!table.normalized())
        throw ArgumentError("monomial basis requires a normalized table (a_0 = 1)");
    if (d < 1 || N < 0)
        throw ArgumentError("monomial basis needs d >= 1 and N >= 0");
    if (table.order() < N)
        throw ArgumentError("table has order " + std::to_string(table.order()) + " < N = " + std::to_string(N));
    a_.resize(N + 1);
    offsets_.reserve(N + 2);
    for (int m = 0; m <= N; ++m) {
        offsets_.push_back(static_cast<int>(indices_.size()));
        for (auto& alpha : indices_of_degree(d, m)) {
            const double c = multinomial_double(alpha);
            weights_.push_back(1.0 / (table.a(m) * c));
            lookup_.emplace(alpha, static_cast<int>(indices_.size()));
            indices_.push_back(std::move(alpha));
        }
    }
    offsets_.push_back(static_cast<int>(indices_.size()));
}

int MonomialBasis::index_of(const MultiIndex& alpha) const
{
    auto it = lookup_.find(alpha);
    if (it == lookup_.end())
        throw OutOfRangeError("multi-index " + to_string(alpha) + " not in basis");
    return it->second;
}

bool MonomialBasis::contains(const MultiIndex& alpha) const
{
    return lookup_.count(alpha) != 0;
}

void write_csv(std::ostream& os, const MonomialBasis& basis)
{
    os << "index,exponents,degree,weight\n";
    for (int i = 0; i < basis.size(); ++i)
        os << i << ",\"" << to_string(basis.at(i)) << "\"," << basis.degree(i) << ','
           << format_double(basis.weight(i)) << '\n';
}

// ---------------------------------------------------------------------------

HomogeneousIdeal::HomogeneousIdeal(int d, std::vector<HomogeneousPolynomial> generators)
    : d_(d), generators_(std::move(generators))
{
    if (d < 1)
        throw ArgumentError("ideal needs d >= 1");
    for (const auto& g : generators_) {
        if (g.degree < 0)
            throw ArgumentError("generator degree must be >= 0");
        const auto expected = homogeneous_dimension(d, g.degree);
        if (static_cast<std::uint64_t>(g.coeffs.size()) != expected)
            throw ShapeError("generator of degree " + std::to_string(g.degree) + " needs " +
                             std::to_string(expected) + " coefficients");
        if (g.coeffs.cwiseAbs().maxCoeff() == 0.0)
            throw ArgumentError("generators must be nonzero");
    }
}

HomogeneousIdeal HomogeneousIdeal::power_of_maximal(int d, int power)
{
    std::vector<MultiIndex> monos = indices_of_degree(d, power);
    return monomial(d, std::move(monos));
}

HomogeneousIdeal HomogeneousIdeal::monomial(int d, std::vector<MultiIndex> monomials)
{
    std::vector<HomogeneousPolynomial> gens;
    for (const auto& alpha : monomials) {
        if (alpha.dim() != d)
            throw ShapeError("monomial " + to_string(alpha) + " has wrong length");
        const int m = alpha.degree();
        const auto all = indices_of_degree(d, m);
        HomogeneousPolynomial p{m, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(all.size()))};
        for (std::size_t i = 0; i < all.size(); ++i)
            if (all[i] == alpha)
                p.coeffs[static_cast<Eigen::Index>(i)] = 1.0;
        gens.push_back(std::move(p));
    }
    return HomogeneousIdeal(d, std::move(gens));
}

std::complex<double> complex_from_json(const nlohmann::json& v)
{
    if (v.is_number())
        return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ParseError("expected a number or [re,im] pair, got " + v.dump());
}

HomogeneousIdeal ideal_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("d") || !j.contains("generators"))
        throw ParseError("ideal must be an object with \"d\" and \"generators\"");
    const int d = j.at("d").get<int>();
    std::vector<HomogeneousPolynomial> gens;
    for (const auto& g : j.at("generators")) {
        const int deg = g.at("degree").get<int>();
        const auto monos = indices_of_degree(d, deg);
        HomogeneousPolynomial p{deg, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(monos.size()))};
        for (const auto& [key, value] : g.at("coeffs").items()) {
            const MultiIndex alpha = parse_multi_index(key);
            if (alpha.dim() != d || alpha.degree() != deg)
                throw ParseError("monomial " + key + " is not of degree " + std::to_string(deg) +
                                 " in " + std::to_string(d) + " variables");
            const auto it = std::find(monos.begin(), monos.end(), alpha);
            p.coeffs[static_cast<Eigen::Index>(it - monos.begin())] += complex_from_json(value);
        }
        gens.push_back(std::move(p));
    }
    return HomogeneousIdeal(d, std::move(gens));
}

nlohmann::json to_json(const HomogeneousIdeal& ideal)
{
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : ideal.generators()) {
        const auto monos = indices_of_degree(ideal.d(), g.degree);
        nlohmann::json coeffs = nlohmann::json::object();
        for (std::size_t i = 0; i < monos.size(); ++i) {
            const auto c = g.coeffs[static_cast<Eigen::Index>(i)];
            if (c == std::complex<double>(0.0))
                continue;
            if (c.imag() == 0.0)
                coeffs[to_string(monos[i])] = c.real();
            else
                coeffs[to_string(monos[i])] = {c.real(), c.imag()};
        }
        gens.push_back({{"degree", g.degree}, {"coeffs", coeffs}});
    }
    return {{"d", ideal.d()}, {"generators", gens}};
}

std::complex<double> evaluate(const HomogeneousPolynomial& p, int d, const Point& z)
{
    if (z.size() != d)
        throw ShapeError("point dimension mismatch");
    const auto monos = indices_of_degree(d, p.degree);
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < monos.size(); ++i) {
        std::complex<double> term = p.coeffs[static_cast<Eigen::Index>(i)];
        for (int j = 0; j < d; ++j)
            term *= std::pow(z[j], monos[i].exponents[j]);
        acc += term;
    }
    return acc;
}

std::vector<IdealSlice> ideal_slices(const HomogeneousIdeal& ideal, const MonomialBasis& basis, double tol)
{
    if (ideal.d() != basis.d())
        throw ShapeError("ideal and basis have different numbers of variables");
    for (const auto& g : ideal.generators())
        if (g.degree == 0)
            throw ImproperIdealError("ideal contains a nonzero constant");

    const int d = basis.d();
    const int N = basis.max_degree();
    std::vector<IdealSlice> slices(N + 1);
    // Degrees are independent; assembled in order.
    for (int m = 0; m <= N; ++m) {
        IdealSlice& slice = slices[m];
        slice.degree = m;
        const int dim_m = basis.degree_count(m);
        const int off = basis.degree_offset(m);
        std::vector<Eigen::VectorXcd> cols;
        for (const auto& g : ideal.generators()) {
            if (g.degree > m)
                continue;
            const auto gen_monos = indices_of_degree(d, g.degree);
            for (const auto& q : indices_of_degree(d, m - g.degree)) {
                Eigen::VectorXcd col = Eigen::VectorXcd::Zero(dim_m);
                for (std::size_t i = 0; i < gen_monos.size(); ++i) {
                    const auto c = g.coeffs[static_cast<Eigen::Index>(i)];
                    if (c == std::complex<double>(0.0))
                        continue;
                    MultiIndex prod = q;
                    for (int j = 0; j < d; ++j)
                        prod.exponents[j] += gen_monos[i].exponents[j];
                    col[basis.index_of(prod) - off] += c;
                }
                cols.push_back(std::move(col));
            }
        }
        if (cols.empty()) {
            slice.span = Eigen::MatrixXcd::Zero(dim_m, 0);
            continue;
        }
        Eigen::MatrixXcd G(dim_m, static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c)
            G.col(static_cast<Eigen::Index>(c)) = cols[c];
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        slice.singular_values.assign(sv.data(), sv.data() + sv.size());
        int rank = 0;
        const double smax = sv.size() ? sv[0] : 0.0;
        while (rank < sv.size() && sv[rank] > tol * smax)
            ++rank;
        if (rank < sv.size() && smax > 0.0)
            slice.largest_discarded = sv[rank] / smax;
        slice.span = svd.matrixU().leftCols(rank);
    }
    return slices;
}

IdealComplementBasis::IdealComplementBasis(std::vector<ComplementBlock> blocks, int basis_size,
                                           std::vector<int> offsets)
    : blocks_(std::move(blocks)), basis_size_(basis_size), offsets_(std::move(offsets))
{
}

int IdealComplementBasis::dimension() const
{
    int n = 0;
    for (const auto& b : blocks_)
        n += b.dimension();
    return n;
}

Eigen::MatrixXcd IdealComplementBasis::embedding() const
{
    Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(basis_size_, dimension());
    int col = 0;
    for (const auto& b : blocks_) {
        E.block(offsets_.at(b.degree), col, b.orthonormal.rows(), b.dimension()) = b.orthonormal;
        col += b.dimension();
    }
    return E;
}

std::vector<int> IdealComplementBasis::column_degrees() const
{
    std::vector<int> out;
    for (const auto& b : blocks_)
        out.insert(out.end(), static_cast<std::size_t>(b.dimension()), b.degree);
    return out;
}

IdealComplementBasis complement_basis(const HomogeneousIdeal& ideal, const MonomialBasis& basis, double tol)
{
    const auto slices = ideal_slices(ideal, basis, tol);
    std::vector<ComplementBlock> blocks;
    std::vector<int> offsets;
    for (int m = 0; m <= basis.max_degree() + 1; ++m)
        offsets.push_back(basis.degree_offset(m));
    for (const auto& slice : slices) {
        const int m = slice.degree;
        const int dim_m = basis.degree_count(m);
        const int off = basis.degree_offset(m);
        Eigen::VectorXd sqrt_w(dim_m);
        for (int i = 0; i < dim_m; ++i)
            sqrt_w[i] = std::sqrt(basis.weight(off + i));

        ComplementBlock block;
        block.degree = m;
        if (slice.dimension() == 0) {
            block.orthonormal = Eigen::MatrixXcd::Identity(dim_m, dim_m);
        } else {
            // Slice in orthonormal coordinates; its Euclidean orthogonal complement is
            // the weighted complement.
            const Eigen::MatrixXcd A = sqrt_w.asDiagonal() * slice.span;
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullU);
            const int r = slice.dimension();
            block.orthonormal = svd.matrixU().rightCols(dim_m - r);
            const auto& sv = svd.singularValues();
            block.smallest_retained = sv[r - 1] / sv[0];
            block.largest_discarded = slice.largest_discarded;
        }
        block.coefficients = sqrt_w.cwiseInverse().asDiagonal() * block.orthonormal;
        blocks.push_back(std::move(block));
    }
    return IdealComplementBasis(std::move(blocks), basis.size(), std::move(offsets));
}

KernelPowerVector kernel_power_vector(const MonomialBasis& basis, const Point& w, int n)
{
    if (n < 0 || n > basis.max_degree())
        throw OutOfRangeError("power " + std::to_string(n) + " outside 0.." + std::to_string(basis.max_degree()));
    if (w.size() != basis.d())
        throw ShapeError("point dimension mismatch");
    KernelPowerVector out;
    out.coeffs = Eigen::VectorXcd::Zero(basis.size());
    const int off = basis.degree_offset(n);
    for (int i = off; i < off + basis.degree_count(n); ++i) {
        const auto& alpha = basis.at(i);
        std::complex<double> c = multinomial_double(alpha);
        for (int j = 0; j < basis.d(); ++j)
            c *= std::pow(std::conj(w[j]), alpha.exponents[j]);
        out.coeffs[i] = c;
        out.norm_squared += std::norm(c) * basis.weight(i);
    }
    return out;
}

std::complex<double> weighted_inner(const MonomialBasis& basis, const Eigen::VectorXcd& x,
                                    const Eigen::VectorXcd& y)
{
    if (x.size() != basis.size() || y.size() != basis.size())
        throw ShapeError("vector length must equal basis size");
    std::complex<double> acc = 0.0;
    for (int i = 0; i < basis.size(); ++i)
        acc += std::conj(y[i]) * basis.weight(i) * x[i];
    return acc;
}

} // namespace rkhs
