#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rkhs/errors.hpp"
#include "rkhs/polyspace.hpp"

using namespace rkhs;

namespace {

MultiIndex mi(std::vector<int> e) { return MultiIndex(std::move(e)); }

HomogeneousPolynomial mono(int d, const MultiIndex& alpha)
{
    const auto all = indices_of_degree(d, alpha.degree());
    HomogeneousPolynomial p{alpha.degree(), Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(all.size()))};
    for (std::size_t i = 0; i < all.size(); ++i)
        if (all[i] == alpha)
            p.coeffs[static_cast<Eigen::Index>(i)] = 1.0;
    return p;
}

} // namespace

TEST(MultiIndex, ParseAndPrint)
{
    EXPECT_EQ(to_string(mi({1, 1})), "(1,1)");
    EXPECT_EQ(parse_multi_index("(2, 0,3)"), mi({2, 0, 3}));
    EXPECT_EQ(mi({2, 0, 3}).degree(), 5);
    EXPECT_THROW(parse_multi_index("(1,-1)"), ParseError);
    EXPECT_THROW(parse_multi_index("()"), ParseError);
}

TEST(Enumeration, GradedLexOrder)
{
    const auto deg2 = indices_of_degree(2, 2);
    ASSERT_EQ(deg2.size(), 3u);
    EXPECT_EQ(deg2[0], mi({2, 0}));
    EXPECT_EQ(deg2[1], mi({1, 1}));
    EXPECT_EQ(deg2[2], mi({0, 2}));
    for (int d = 1; d <= 4; ++d)
        for (int m = 0; m <= 6; ++m)
            EXPECT_EQ(indices_of_degree(d, m).size(), homogeneous_dimension(d, m));
}

TEST(Multinomial, Values)
{
    EXPECT_EQ(multinomial(2, mi({1, 1})), 2u);
    EXPECT_EQ(multinomial(3, mi({2, 1})), 3u);
    EXPECT_EQ(multinomial(4, mi({2, 2})), 6u);
    EXPECT_THROW(multinomial(3, mi({1, 1})), ArgumentError);
    for (int d = 1; d <= 3; ++d)
        for (int m = 0; m <= 12; ++m)
            for (const auto& a : indices_of_degree(d, m))
                EXPECT_EQ(oracle::cpp_int(multinomial(m, a)), oracle::multinomial(a.exponents));
    EXPECT_THROW(multinomial(80, mi({40, 40})), OutOfRangeError);
}

TEST(MonomialBasis, Weights)
{
    const MonomialBasis da(make_table(KernelSpec::drury_arveson(2), 4), 2, 4);
    EXPECT_DOUBLE_EQ(da.weight(da.index_of(mi({1, 1}))), 0.5);
    const MonomialBasis hardy(make_table(KernelSpec::hardy(), 6), 1, 6);
    for (int i = 0; i < hardy.size(); ++i)
        EXPECT_EQ(hardy.weight(i), 1.0);
    const MonomialBasis dir(make_table(KernelSpec::dirichlet(), 4), 1, 4);
    EXPECT_DOUBLE_EQ(dir.weight(dir.index_of(mi({2}))), 3.0);
}

TEST(MonomialBasis, WeightsMatchClosedForm)
{
    const int N = 6;
    for (int d = 1; d <= 3; ++d) {
        const auto a = oracle::besov_a(1, 2, N);
        const MonomialBasis b(make_table(KernelSpec::besov_sobolev(0.5, d), N), d, N);
        for (int i = 0; i < b.size(); ++i) {
            const auto& alpha = b.at(i);
            const oracle::cpp_rational w =
                1 / (a[alpha.degree()] * oracle::cpp_rational(oracle::multinomial(alpha.exponents)));
            EXPECT_NEAR(b.weight(i), oracle::to_double(w), 1e-14 * oracle::to_double(w));
        }
    }
}

TEST(MonomialBasis, IndexBijectionAndDegreeCounts)
{
    const MonomialBasis b(make_table(KernelSpec::hardy(3), 5), 3, 5);
    for (int i = 0; i < b.size(); ++i)
        EXPECT_EQ(b.index_of(b.at(i)), i);
    for (int m = 0; m <= 5; ++m)
        EXPECT_EQ(static_cast<std::uint64_t>(b.degree_count(m)), homogeneous_dimension(3, m));
    EXPECT_EQ(b.degree_offset(6), b.size());
    EXPECT_FALSE(b.contains(mi({6, 0, 0})));
    EXPECT_THROW(b.index_of(mi({6, 0, 0})), OutOfRangeError);
}

TEST(MonomialBasis, RejectsUnnormalized)
{
    const auto t = perturb_kernel(make_table(KernelSpec::hardy(), 4), 0.5);
    EXPECT_THROW(MonomialBasis(t, 1, 4), ArgumentError);
}

TEST(MonomialBasis, Csv)
{
    std::ostringstream os;
    write_csv(os, MonomialBasis(make_table(KernelSpec::drury_arveson(2), 1), 2, 1));
    EXPECT_EQ(os.str(), "index,exponents,degree,weight\n0,\"(0,0)\",0,1\n1,\"(1,0)\",1,1\n2,\"(0,1)\",1,1\n");
}

TEST(IdealSlices, Examples)
{
    const MonomialBasis b(make_table(KernelSpec::drury_arveson(2), 4), 2, 4);
    for (const auto& s : ideal_slices(HomogeneousIdeal::power_of_maximal(2, 5), b))
        EXPECT_EQ(s.dimension(), 0);
    const auto z1 = ideal_slices(HomogeneousIdeal::monomial(2, {mi({1, 0})}), b);
    EXPECT_EQ(z1[1].dimension(), 1);
    const auto z1z2 = ideal_slices(HomogeneousIdeal::monomial(2, {mi({1, 1})}), b);
    EXPECT_EQ(z1z2[3].dimension(), 2);
    EXPECT_EQ(z1z2[2].dimension(), 1);
    EXPECT_EQ(z1z2[1].dimension(), 0);
}

TEST(IdealSlices, ImproperIdeal)
{
    const MonomialBasis b(make_table(KernelSpec::hardy(), 3), 1, 3);
    HomogeneousPolynomial one{0, Eigen::VectorXcd::Constant(1, 1.0)};
    EXPECT_THROW(ideal_slices(HomogeneousIdeal(1, {one}), b), ImproperIdealError);
}

TEST(ComplementBasis, Examples)
{
    const MonomialBasis b3(make_table(KernelSpec::hardy(), 3), 1, 3);
    EXPECT_EQ(complement_basis(HomogeneousIdeal::power_of_maximal(1, 4), b3).dimension(), 4);
    const auto c = complement_basis(HomogeneousIdeal::monomial(1, {mi({2})}), b3);
    EXPECT_EQ(c.dimension(), 2);
    EXPECT_EQ(c.column_degrees(), (std::vector<int>{0, 1}));

    const MonomialBasis b(make_table(KernelSpec::drury_arveson(2), 4), 2, 4);
    const auto cz1 = complement_basis(HomogeneousIdeal::monomial(2, {mi({1, 0})}), b);
    for (const auto& blk : cz1.blocks())
        EXPECT_EQ(blk.dimension(), 1);
    Point w(2);
    w << 0.0, 1.0;
    for (int n = 1; n <= 4; ++n) {
        const auto kp = kernel_power_vector(b, w, n);
        const auto& blk = cz1.blocks()[static_cast<std::size_t>(n)];
        // kp restricted to degree n is a multiple of z2^n, which spans the complement block.
        const Eigen::VectorXcd coeffs = kp.coeffs.segment(b.degree_offset(n), b.degree_count(n));
        Eigen::VectorXcd proj = blk.coefficients * (blk.coefficients.adjoint() *
                                                    (Eigen::VectorXcd(coeffs.array() *
                                                                      Eigen::Map<const Eigen::VectorXd>(
                                                                          b.weights().data() + b.degree_offset(n),
                                                                          b.degree_count(n))
                                                                          .cast<std::complex<double>>()
                                                                          .array())));
        EXPECT_LT((proj - coeffs).norm(), 1e-12);
    }
}

TEST(ComplementBasis, InvariantsOnRandomIdeals)
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    const int N = 5, d = 3;
    const MonomialBasis b(make_table(KernelSpec::dirichlet(d), N), d, N);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<HomogeneousPolynomial> gens;
        for (int k = 0; k < 2; ++k) {
            const int deg = 1 + static_cast<int>(rng() % 3);
            HomogeneousPolynomial p{deg, Eigen::VectorXcd(static_cast<Eigen::Index>(homogeneous_dimension(d, deg)))};
            for (Eigen::Index i = 0; i < p.coeffs.size(); ++i)
                p.coeffs[i] = {g(rng), g(rng)};
            gens.push_back(p);
        }
        const HomogeneousIdeal ideal(d, gens);
        const auto slices = ideal_slices(ideal, b);
        const auto comp = complement_basis(ideal, b);
        for (int m = 0; m <= N; ++m) {
            const auto& blk = comp.blocks()[static_cast<std::size_t>(m)];
            EXPECT_EQ(static_cast<std::uint64_t>(slices[static_cast<std::size_t>(m)].dimension() + blk.dimension()),
                      homogeneous_dimension(d, m));
            if (blk.dimension() == 0)
                continue;
            Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(b.weights().data() + b.degree_offset(m),
                                                                  b.degree_count(m));
            const Eigen::MatrixXcd gram = blk.coefficients.adjoint() * w.asDiagonal() * blk.coefficients;
            EXPECT_LT((gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).norm(), 1e-12);
            // Complement is weighted-orthogonal to the slice.
            const auto& span = slices[static_cast<std::size_t>(m)].span;
            if (span.cols() > 0) {
                EXPECT_LT((span.adjoint() * w.asDiagonal() * blk.coefficients).norm(), 1e-10);
            }
        }
        const Eigen::MatrixXcd q = comp.embedding();
        EXPECT_LT((q.adjoint() * q - Eigen::MatrixXcd::Identity(q.cols(), q.cols())).norm(), 1e-12);
    }
}

TEST(KernelPowerVector, Norms)
{
    Point half(1);
    half << 0.5;
    EXPECT_NEAR(kernel_power_vector(MonomialBasis(make_table(KernelSpec::hardy(), 3), 1, 3), half, 2).norm_squared,
                1.0 / 16, 1e-15);
    Point e1(2);
    e1 << 1.0, 0.0;
    EXPECT_NEAR(kernel_power_vector(MonomialBasis(make_table(KernelSpec::drury_arveson(2), 3), 2, 3), e1, 3)
                    .norm_squared,
                1.0, 1e-14);
    Point one(1);
    one << 1.0;
    EXPECT_NEAR(kernel_power_vector(MonomialBasis(make_table(KernelSpec::dirichlet(), 3), 1, 3), one, 2).norm_squared,
                3.0, 1e-13);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const MonomialBasis b(make_table(KernelSpec::besov_sobolev(0.25, 3), 6), 3, 6);
    for (int trial = 0; trial < 20; ++trial) {
        Point w(3);
        for (int j = 0; j < 3; ++j)
            w[j] = {g(rng), g(rng)};
        w *= 0.9 / w.norm();
        const int n = 1 + trial % 6;
        const double want = std::pow(w.squaredNorm(), n) / b.coefficients()[static_cast<std::size_t>(n)];
        EXPECT_NEAR(kernel_power_vector(b, w, n).norm_squared, want, 1e-10 * want);
    }
}

TEST(KernelPowerVector, OrthogonalToIdealAtCommonZero)
{
    // z1 z2 - z3^2 vanishes at w = (1, 1, 1)/sqrt(3).
    const int d = 3, N = 4;
    const MonomialBasis b(make_table(KernelSpec::drury_arveson(d), N), d, N);
    HomogeneousPolynomial p = mono(d, mi({1, 1, 0}));
    p.coeffs -= mono(d, mi({0, 0, 2})).coeffs;
    const auto slices = ideal_slices(HomogeneousIdeal(d, {p}), b);
    Point w = Point::Constant(d, 1.0 / std::sqrt(3.0));
    for (int n = 2; n <= N; ++n) {
        const auto kp = kernel_power_vector(b, w, n);
        const auto& span = slices[static_cast<std::size_t>(n)].span;
        Eigen::VectorXd wt = Eigen::Map<const Eigen::VectorXd>(b.weights().data() + b.degree_offset(n),
                                                               b.degree_count(n));
        const Eigen::VectorXcd seg = kp.coeffs.segment(b.degree_offset(n), b.degree_count(n));
        EXPECT_LT((span.adjoint() * wt.asDiagonal() * seg).norm(), 1e-12) << "n=" << n;
    }
}

TEST(IdealJson, RoundTrip)
{
    const auto ideal = ideal_from_json(
        nlohmann::json::parse(R"j({"d":2, "generators":[{"degree":2, "coeffs":{"(1,1)":1.0, "(2,0)":[0.0,2.0]}}]})j"));
    ASSERT_EQ(ideal.generators().size(), 1u);
    const auto& c = ideal.generators()[0].coeffs;
    EXPECT_EQ(c[0], std::complex<double>(0.0, 2.0));
    EXPECT_EQ(c[1], std::complex<double>(1.0, 0.0));
    const auto back = ideal_from_json(to_json(ideal));
    EXPECT_EQ(back.generators()[0].coeffs, c);
    EXPECT_THROW(ideal_from_json(nlohmann::json::parse(R"j({"d":2, "generators":[{"degree":2, "coeffs":{"(1,0)":1}}]})j")),
                 ParseError);
}
