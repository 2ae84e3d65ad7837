#include "rkhs/operators.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "rkhs/errors.hpp"
#include "rkhs/format.hpp"

namespace rkhs {

OperatorTuple::OperatorTuple(std::vector<Matrix> matrices, double commutator_tol)
    : mats_(std::move(matrices)), commutator_tol_(commutator_tol)
{
    measure();
    const double s = max_norm();
    if (commutator_defect_ > commutator_tol * std::max(1.0, s * s))
        throw ArgumentError("tuple does not commute: max commutator norm " + format_double(commutator_defect_));
}

OperatorTuple OperatorTuple::unchecked(std::vector<Matrix> matrices)
{
    OperatorTuple t;
    t.mats_ = std::move(matrices);
    t.measure();
    t.commutator_tol_ = t.commutator_defect_;
    return t;
}

OperatorTuple OperatorTuple::zero(int d, int n)
{
    return OperatorTuple(std::vector<Matrix>(d, Matrix::Zero(n, n)));
}

void OperatorTuple::measure()
{
    if (mats_.empty())
        throw ArgumentError("operator tuple needs d >= 1");
    const auto n = mats_[0].rows();
    for (const auto& m : mats_)
        if (m.rows() != n || m.cols() != n)
            throw ShapeError("tuple matrices must be square of a common size");
    commutator_defect_ = 0.0;
    for (std::size_t j = 0; j < mats_.size(); ++j)
        for (std::size_t k = j + 1; k < mats_.size(); ++k)
            commutator_defect_ = std::max(commutator_defect_,
                                          spectral_norm(mats_[j] * mats_[k] - mats_[k] * mats_[j]));
}

double OperatorTuple::max_norm() const
{
    double s = 0.0;
    for (const auto& m : mats_)
        s = std::max(s, spectral_norm(m));
    return s;
}

OperatorTuple OperatorTuple::scaled(double r) const
{
    OperatorTuple t = *this;
    for (auto& m : t.mats_)
        m *= r;
    t.commutator_defect_ *= r * r;
    t.commutator_tol_ *= r * r;
    return t;
}

OperatorTuple OperatorTuple::conjugated(const Matrix& u) const
{
    if (u.rows() != size() || u.cols() != size())
        throw ShapeError("conjugating matrix has the wrong size");
    std::vector<Matrix> out;
    for (const auto& m : mats_)
        out.push_back(u.adjoint() * m * u);
    return unchecked(std::move(out));
}

void write_tuple(std::ostream& os, const OperatorTuple& t)
{
    os << "tuple " << t.d() << ' ' << t.size() << '\n';
    for (int j = 0; j < t.d(); ++j) {
        os << "# T_" << j + 1 << '\n';
        for (int r = 0; r < t.size(); ++r) {
            for (int c = 0; c < t.size(); ++c) {
                if (c)
                    os << ' ';
                os << format_complex(t[j](r, c));
            }
            os << '\n';
        }
    }
}

OperatorTuple read_tuple(std::istream& is)
{
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        lines.push_back(line);
    }
    if (lines.empty())
        throw ParseError("empty tuple file");
    std::istringstream head(lines[0]);
    std::string tag;
    int d = 0, n = 0;
    if (!(head >> tag >> d >> n) || tag != "tuple" || d < 1 || n < 0)
        throw ParseError("tuple header must read 'tuple <d> <n>'");
    if (lines.size() != static_cast<std::size_t>(1 + d * n))
        throw ParseError("expected " + std::to_string(d * n) + " matrix rows, found " +
                         std::to_string(lines.size() - 1));
    std::vector<Matrix> mats(d, Matrix::Zero(n, n));
    std::size_t li = 1;
    for (int j = 0; j < d; ++j) {
        for (int r = 0; r < n; ++r, ++li) {
            std::istringstream row(lines[li]);
            std::string tok;
            int c = 0;
            while (row >> tok) {
                if (c >= n)
                    throw ParseError("too many entries in row " + std::to_string(li));
                const auto comma = tok.find(',');
                try {
                    const double re = std::stod(tok.substr(0, comma));
                    const double im = comma == std::string::npos ? 0.0 : std::stod(tok.substr(comma + 1));
                    mats[j](r, c) = {re, im};
                } catch (const std::logic_error&) {
                    throw ParseError("bad matrix entry '" + tok + "'");
                }
                ++c;
            }
            if (c != n)
                throw ParseError("row " + std::to_string(li) + " has " + std::to_string(c) + " entries");
        }
    }
    return OperatorTuple::unchecked(std::move(mats));
}

MonomialProducts::MonomialProducts(const OperatorTuple& t) : tuple_(t)
{
    indices_.emplace_back(std::vector<int>(t.d(), 0));
    products_.push_back(Matrix::Identity(t.size(), t.size()));
}

void MonomialProducts::advance()
{
    std::map<MultiIndex, std::size_t> parent_of;
    for (std::size_t i = 0; i < indices_.size(); ++i)
        parent_of.emplace(indices_[i], i);
    std::vector<MultiIndex> next = indices_of_degree(tuple_.d(), degree_ + 1);
    std::vector<Matrix> next_products;
    next_products.reserve(next.size());
    for (const auto& alpha : next) {
        int j = tuple_.d() - 1;
        while (alpha.exponents[j] == 0)
            --j;
        MultiIndex parent = alpha;
        --parent.exponents[j];
        next_products.push_back(products_[parent_of.at(parent)] * tuple_[j]);
    }
    indices_ = std::move(next);
    products_ = std::move(next_products);
    ++degree_;
}

} // namespace rkhs
