#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "rkhs/errors.hpp"
#include "rkhs/pick.hpp"
#include "rkhs/sampling.hpp"

using namespace rkhs;
using cd = std::complex<double>;

namespace {

Point pt(std::initializer_list<cd> v)
{
    Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (auto c : v)
        p[i++] = c;
    return p;
}

Matrix scalar(cd c) { return Matrix::Constant(1, 1, c); }

PickProblem two_node_disc(cd w0, cd w1)
{
    PickProblem p;
    p.nodes = {pt({0.0}), pt({0.5})};
    p.targets = {scalar(w0), scalar(w1)};
    return p;
}

} // namespace

TEST(PickProblemJson, ParsesAndRoundTrips)
{
    const auto j = nlohmann::json::parse(R"({"d":1, "nodes":[[0.0,0.0]], "r":1, "targets":[[[0.5,0.0]]]})");
    const PickProblem p = pick_problem_from_json(j);
    ASSERT_EQ(p.nodes.size(), 1u);
    EXPECT_EQ(p.targets[0](0, 0), cd(0.5));
    const PickProblem back = pick_problem_from_json(to_json(p));
    EXPECT_EQ(back.nodes[0], p.nodes[0]);
    EXPECT_EQ(back.targets[0], p.targets[0]);

    const auto lenient = nlohmann::json::parse(R"({"d":1, "nodes":[0.0, [0.5, 0.1]], "targets":[0.25, [0.1, 0.2]]})");
    const PickProblem q = pick_problem_from_json(lenient);
    EXPECT_EQ(q.nodes[1][0], cd(0.5, 0.1));
    EXPECT_EQ(q.targets[1](0, 0), cd(0.1, 0.2));

    const auto matrix = nlohmann::json::parse(R"({"d":2, "r":2, "nodes":[[0.1, [0, 0.2]]],
        "targets":[[[1, 0], [0, [0, 1]]]]})");
    const PickProblem m = pick_problem_from_json(matrix);
    EXPECT_EQ(m.nodes[0][1], cd(0.0, 0.2));
    EXPECT_EQ(m.targets[0](1, 1), cd(0.0, 1.0));
}

TEST(PickProblemJson, Errors)
{
    EXPECT_THROW(pick_problem_from_json(nlohmann::json::array()), ParseError);
    EXPECT_THROW(pick_problem_from_json(nlohmann::json::parse(R"({"nodes":[0]})")), ParseError);
    EXPECT_THROW(pick_problem_from_json(nlohmann::json::parse(R"({"d":2, "nodes":[[0]], "targets":[0]})")),
                 ParseError);
    EXPECT_THROW(pick_problem_from_json(nlohmann::json::parse(R"({"d":1, "nodes":[1.0], "targets":[0]})")),
                 DomainError);
    EXPECT_THROW(pick_problem_from_json(nlohmann::json::parse(R"({"d":1, "nodes":[0.2, 0.2], "targets":[0, 0]})")),
                 ArgumentError);
    EXPECT_THROW(pick_problem_from_json(nlohmann::json::parse(R"({"d":1, "nodes":[0.2], "targets":[0, 0]})")),
                 ShapeError);
}

TEST(PickMatrix, SingleNode)
{
    PickProblem p;
    p.nodes = {pt({0.0})};
    p.targets = {scalar(0.5)};
    const Matrix m = pick_matrix(p, KernelSpec::hardy(), 10);
    EXPECT_NEAR(std::abs(m(0, 0) - 0.75), 0.0, 1e-15);
}

TEST(PickMatrix, SchwarzPickThreshold)
{
    // Nodes 0 and 1/2 with targets 0 and w: feasible for the Schur class iff |w| <= 1/2.
    const auto spec = KernelSpec::hardy();
    EXPECT_TRUE(is_psd(pick_matrix(two_node_disc(0.0, 0.49), spec, 200)).psd);
    EXPECT_FALSE(is_psd(pick_matrix(two_node_disc(0.0, 0.51), spec, 200)).psd);
    const double t = feasibility_threshold(two_node_disc(0.0, 1.0), spec, 200, 1.0, 1e-9);
    EXPECT_NEAR(t, 0.5, 2e-9);

    // Table overload agrees with the spec overload.
    const auto table = make_table(spec, 200);
    EXPECT_LT(spectral_norm(pick_matrix(two_node_disc(0.1, 0.3), table) -
                            pick_matrix(two_node_disc(0.1, 0.3), spec, 200)),
              1e-15);
}

TEST(PickMatrix, DruryArvesonMatrixTargets)
{
    // W_i = phi(z_i) for the contractive row multiplier phi(z) = (z_1, z_2) gives a psd Pick matrix.
    PickProblem p;
    p.d = 2;
    p.r = 2;
    std::mt19937_64 rng(3);
    for (const Point& z : ball_sample(2, 6, 0.8, 11)) {
        p.nodes.push_back(z);
        Matrix w = Matrix::Zero(2, 2);
        w(0, 0) = z[0];
        w(0, 1) = z[1];
        p.targets.push_back(w);
    }
    EXPECT_TRUE(is_psd(pick_matrix(p, KernelSpec::drury_arveson(2), 400), 1e-9).psd);
    for (auto& w : p.targets)
        w *= 2.0;
    EXPECT_FALSE(is_psd(pick_matrix(p, KernelSpec::drury_arveson(2), 400)).psd);
}

TEST(IsPsd, Verdicts)
{
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1e-12;
    const auto v = is_psd(m);
    EXPECT_TRUE(v.psd);
    EXPECT_EQ(v.size, 2);
    EXPECT_DOUBLE_EQ(v.scale, 1.0);
    m(1, 1) = -1e-9;
    EXPECT_FALSE(is_psd(m).psd);
    m(0, 1) = 1.0;
    EXPECT_THROW(is_psd(m), ArgumentError);
    EXPECT_THROW(is_psd(Matrix::Zero(2, 3)), ShapeError);
}

TEST(KernelQuotient, BergmanOverHardyAndBack)
{
    const auto pts = disc_sample(50, 0.9, 7);
    const auto good = kernel_quotient_gram(KernelSpec::bergman(), KernelSpec::hardy(), pts, 200);
    EXPECT_TRUE(good.verdict.psd);
    // k_B / k_H = 1/(1 - z conj w), itself a Szego kernel.
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            EXPECT_LT(std::abs(good.gram(i, j) - 1.0 / (1.0 - pts[static_cast<std::size_t>(i)][0] *
                                                                     std::conj(pts[static_cast<std::size_t>(j)][0]))),
                      1e-9);

    const auto bad = kernel_quotient_gram(KernelSpec::hardy(), KernelSpec::bergman(), pts, 200);
    EXPECT_FALSE(bad.verdict.psd);
    const auto minor = find_negative_principal_minor(bad.gram);
    ASSERT_TRUE(minor.has_value());
    EXPECT_NE(minor->i, minor->j);
    EXPECT_LT(minor->determinant, 0.0);
    EXPECT_FALSE(find_negative_principal_minor(good.gram).has_value());
}

TEST(KernelQuotient, SingularDenominator)
{
    // 1 + 4 z conj(w) vanishes at z = 1/2, w = -1/2.
    const auto spec = KernelSpec::custom({1.0, 4.0});
    EXPECT_THROW(kernel_quotient_gram(KernelSpec::hardy(), spec, {pt({0.5}), pt({-0.5})}, 1), SingularKernelError);
}

TEST(GramFactor, LowRankAndFailures)
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    Matrix f(6, 3);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 3; ++j)
            f(i, j) = cd(g(rng), g(rng));
    const Matrix gram = f * f.adjoint();
    const auto r = gram_factor(gram);
    EXPECT_EQ(r.rank, 3);
    EXPECT_EQ(r.pivots.size(), 3u);
    EXPECT_LT(r.residual, 1e-12 * spectral_norm(gram));
    EXPECT_LT(spectral_norm(r.factor * r.factor.adjoint() - gram), 1e-12 * spectral_norm(gram));

    Matrix neg = Matrix::Identity(2, 2);
    neg(1, 1) = -0.5;
    EXPECT_THROW(gram_factor(neg), FactorizationError);
}

TEST(SampledMultiplierNorm, Examples)
{
    const auto pts = disc_sample(10, 0.9, 5);
    std::vector<cd> constant(pts.size(), cd(0.0, 0.7));
    EXPECT_NEAR(sampled_multiplier_norm(constant, KernelSpec::hardy(), pts, 300), 0.7, 1e-8);

    std::vector<cd> z;
    for (const auto& p : pts)
        z.push_back(p[0]);
    const double n = sampled_multiplier_norm(z, KernelSpec::hardy(), pts, 300);
    EXPECT_LE(n, 1.0 + 1e-8);
    EXPECT_GT(n, 0.5);

    const auto ball = ball_sample(2, 8, 0.8, 2);
    std::vector<cd> z1;
    for (const auto& p : ball)
        z1.push_back(p[0]);
    EXPECT_LE(sampled_multiplier_norm(z1, KernelSpec::drury_arveson(2), ball, 300), 1.0 + 1e-8);

    EXPECT_THROW(sampled_multiplier_norm({0.1, 0.2}, KernelSpec::hardy(), {pt({0.3}), pt({0.3})}, 50),
                 DegenerateSampleError);
    EXPECT_THROW(sampled_multiplier_norm({0.1}, KernelSpec::hardy(), {pt({0.3}), pt({0.2})}, 50), ShapeError);
}

TEST(Feasibility, SweepMatchesPointwiseVerdicts)
{
    const auto base = two_node_disc(0.0, 1.0);
    std::vector<double> scales;
    for (int i = 0; i <= 10; ++i)
        scales.push_back(0.1 * i);
    const auto rows = feasibility_sweep(base, KernelSpec::hardy(), 200, scales);
    ASSERT_EQ(rows.size(), scales.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].scale, scales[i]);
        const auto v = is_psd(pick_matrix(two_node_disc(0.0, scales[i]), KernelSpec::hardy(), 200));
        EXPECT_EQ(rows[i].verdict.psd, v.psd);
        EXPECT_EQ(rows[i].verdict.min_eigenvalue, v.min_eigenvalue);
    }
    EXPECT_TRUE(rows[5].verdict.psd);
    EXPECT_FALSE(rows[6].verdict.psd);
}

TEST(VerdictCsv, Format)
{
    std::ostringstream os;
    write_verdict_header(os);
    PsdVerdict v;
    v.min_eigenvalue = -0.5;
    v.size = 2;
    v.scale = 1.0;
    v.psd = false;
    write_verdict_row(os, "t=1", v);
    EXPECT_EQ(os.str(), "label,size,min_eigenvalue,tolerance,scale,verdict\nt=1,2,-0.5,1e-10,1,not_psd\n");
}

TEST(Sampling, Determinism)
{
    EXPECT_EQ(ball_sample(3, 20, 0.9, 42), ball_sample(3, 20, 0.9, 42));
    EXPECT_NE(ball_sample(3, 20, 0.9, 42), ball_sample(3, 20, 0.9, 43));
    HaltonSequence a(4, 1), b(4, 1);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        for (double v : x) {
            EXPECT_GE(v, 0.0);
            EXPECT_LT(v, 1.0);
        }
    }
    EXPECT_THROW(HaltonSequence(0, 1), ArgumentError);
    EXPECT_THROW(HaltonSequence(33, 1), ArgumentError);
}

TEST(Sampling, Domains)
{
    for (const auto& p : sphere_sample(3, 50, 9))
        EXPECT_NEAR(p.norm(), 1.0, 1e-14);
    for (const auto& p : ball_sample(2, 50, 0.7, 9))
        EXPECT_LT(p.norm(), 0.7);
    const auto disc = disc_sample(200, 0.9, 1);
    double mean_sq = 0.0;
    for (const auto& p : disc) {
        ASSERT_EQ(p.size(), 1);
        mean_sq += std::norm(p[0]);
    }
    // Uniform on the disc of radius 0.9: E|z|^2 = 0.81/2.
    EXPECT_NEAR(mean_sq / 200.0, 0.405, 0.02);
    EXPECT_THROW(ball_sample(2, 5, 1.0, 0), DomainError);
    EXPECT_THROW(ball_sample(2, 5, 0.0, 0), DomainError);
    EXPECT_THROW(sphere_sample(0, 5, 0), ArgumentError);
}
