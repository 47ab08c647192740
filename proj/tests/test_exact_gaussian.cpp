#include "shortmem/error.hpp"
#include "shortmem/exact_gaussian.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace shortmem;

namespace {

oracle::Filter as_filter(const CoefficientSequence& c)
{
    return oracle::Filter{c.lo(), std::vector<double>(c.values().begin(), c.values().end())};
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST(ExactVariance, IdentityIsNSigma2)
{
    for (std::int64_t n : {1, 10, 1000, 123457})
        EXPECT_EQ(exact_variance(CoefficientSequence::identity(), n, 2.5), 2.5 * static_cast<double>(n));
}

TEST(ExactVariance, TwoTapClosedForm)
{
    // S_n = xi_0 + 2 (xi_1 + ... + xi_{n-1}) + xi_n
    const auto c = CoefficientSequence::finite(0, {1.0, 1.0});
    for (std::int64_t n : {1, 2, 5, 100})
        EXPECT_DOUBLE_EQ(exact_variance(c, n, 1.0), 2.0 + 4.0 * static_cast<double>(n - 1));
}

TEST(ExactVariance, MatchesDoubleSumOracle)
{
    const std::vector<CoefficientSequence> seqs{
        CoefficientSequence::geometric(0.5, 45), CoefficientSequence::causal_geometric(0.8, 60),
        CoefficientSequence::finite(-3, {0.2, -0.7, 1.0, 0.4, -0.1, 0.05}), CoefficientSequence::polynomial(1.5, 40),
        build_prop10(3)};
    for (const auto& c : seqs) {
        const oracle::Filter f = as_filter(c);
        for (std::int64_t n : {1, 7, 16, 64, 300}) {
            const double truth = oracle::double_sum_variance(f, n, 1.3);
            EXPECT_LT(rel(exact_variance(c, n, 1.3), truth), 1e-9) << decay_kind_name(c.descriptor().kind) << " n=" << n;
        }
    }
}

// Frozen from an exact rational computation of the double sum.
TEST(ExactVariance, BlockSequenceFrozenValues)
{
    const auto c = build_prop10(3);
    EXPECT_LT(rel(exact_variance(c, 16, 1.0), 49.58703649458501), 1e-12);
    EXPECT_LT(rel(exact_variance(c, 64, 1.0), 277.6418203128969), 1e-12);
}

TEST(ExactVariance, RoutesAgree)
{
    const std::vector<CoefficientSequence> seqs{CoefficientSequence::geometric(0.3, 30),
                                                CoefficientSequence::polynomial(2.0, 500), build_prop10(4)};
    for (const auto& c : seqs)
        for (std::int64_t n : {1, 33, 1024, 5000})
            EXPECT_LT(rel(exact_variance(c, n, 1.0), variance_from_autocovariance(c, n, 1.0)), 1e-10);
}

TEST(ExactVariance, ScalesWithSigma2)
{
    const auto c = CoefficientSequence::geometric(0.5, 45);
    EXPECT_LT(rel(exact_variance(c, 500, 4.0), 4.0 * exact_variance(c, 500, 1.0)), 1e-14);
}

TEST(ExactVariance, RejectsBadArguments)
{
    EXPECT_THROW(exact_variance(CoefficientSequence::identity(), 0, 1.0), Error);
    EXPECT_THROW(exact_variance(CoefficientSequence::identity(), 10, -1.0), Error);
    EXPECT_THROW(exact_variance(build_prop10(5), 1 << 20, 1.0, 1000), Error);
}

TEST(VarianceProfile, ShortMemoryNormalizedConverges)
{
    const auto c = CoefficientSequence::geometric(0.5, 45);
    const std::vector<std::int64_t> grid{100, 1000, 10000, 100000};
    const VarianceProfile p = variance_profile(c, grid, 1.0);
    ASSERT_EQ(p.slopes.size(), 3u);
    EXPECT_LT(p.max_route_discrepancy(), 1e-10);
    EXPECT_NEAR(p.normalized.back(), 9.0, 1e-3);
    for (double s : p.slopes)
        EXPECT_NEAR(s, 1.0, 0.02);
}

TEST(VarianceProfile, IdentitySlopeIsOne)
{
    const std::vector<std::int64_t> grid{4, 16, 64};
    const VarianceProfile p = variance_profile(CoefficientSequence::identity(), grid, 1.0);
    for (double s : regular_variation_slope(p))
        EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(BlockVariance, ExceedsDefensibleBound)
{
    const auto c = build_prop10(5);
    for (int r = 1; r <= 4; ++r) {
        const Prop10VarianceReport rep = prop10_variance_report(c, r);
        const double u = 1.0 / (3.0 * std::pow(r, 4) * std::pow(2.0, r));
        const double n = std::pow(4.0, r + 1);
        EXPECT_EQ(rep.n, static_cast<std::int64_t>(n));
        EXPECT_NEAR(rep.defensible_bound, u * u * n * n * n / 12.0, 1e-12 * rep.defensible_bound);
        EXPECT_NEAR(rep.paper_bound, n * n / (9.0 * std::pow(r, 8)), 1e-12 * rep.paper_bound);
        EXPECT_GE(rep.exact, rep.defensible_bound) << "r=" << r;
    }
    EXPECT_THROW(prop10_variance_report(c, 5), Error);
    EXPECT_THROW(prop10_variance_report(CoefficientSequence::identity(), 1), Error);
}

TEST(Projection, FirstBlockNormIsOneThird)
{
    const Prop10Blocks blocks(20);
    EXPECT_NEAR(projection_block_norm(blocks, 1, 0), 1.0 / 3.0, 1e-12);
}

TEST(Projection, BlockNormMatchesMaterializedSum)
{
    const Prop10Blocks blocks(5);
    const auto c = build_prop10(5);
    for (int r = 1; r <= 4; ++r)
        for (std::uint64_t k : {0u, 1u, 7u, 100u}) {
            long double acc = 0.0L;
            const auto lo = static_cast<std::int64_t>(k + Prop10Blocks::block_start(r));
            const auto hi = static_cast<std::int64_t>(k + Prop10Blocks::block_start(r + 1));
            for (std::int64_t j = lo + 1; j <= hi; ++j)
                acc += static_cast<long double>(c[j]) * c[j];
            EXPECT_NEAR(projection_block_norm(blocks, r, k), static_cast<double>(acc), 1e-14) << r << " " << k;
        }
}

TEST(Projection, NormSumBelowZetaFour)
{
    const Prop10Blocks blocks(20);
    const double s = projection_norm_sum(blocks);
    EXPECT_LE(s, std::pow(std::numbers::pi, 4) / 90.0);
    double expected = 0.0;
    for (int r = 1; r <= 20; ++r)
        expected += std::pow(r, -4.0) / std::sqrt(3.0);
    EXPECT_NEAR(s, expected, 1e-12);
}

TEST(Projection, TailBoundCoversRemainder)
{
    for (int r : {1, 5, 20}) {
        double tail = 0.0;
        for (int s = r + 1; s <= 100000; ++s)
            tail += std::pow(s, -4.0) / std::sqrt(3.0);
        EXPECT_GE(projection_norm_tail_bound(r), tail);
    }
}

TEST(Projection, ProfileRows)
{
    const auto rows = projection_profile(Prop10Blocks(4));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_NEAR(rows[0].norm, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(rows[2].cumulative, (1.0 + 1.0 / 16.0 + 1.0 / 81.0) / std::sqrt(3.0), 1e-12);
    for (const auto& row : rows) {
        EXPECT_NEAR(row.norm, row.bound, 1e-15);
        EXPECT_LE(row.norm, row.paper_bound);
    }
}

TEST(WeightedExactVariance, IdentityLinearWeight)
{
    EXPECT_NEAR(weighted_exact_variance(CoefficientSequence::identity(), WeightFunction::linear(), 10000, 1.0, 1.0),
                1.0 / 3.0, 1e-3);
}

TEST(WeightedExactVariance, ConstantWeightReducesToExactVariance)
{
    const auto c = CoefficientSequence::geometric(0.5, 45);
    const double w = weighted_exact_variance(c, WeightFunction::constant(1.0), 2000, 1.0, 1.0);
    EXPECT_LT(rel(w, exact_variance(c, 2000, 1.0) / 2000.0), 1e-10);
    const double half = weighted_exact_variance(c, WeightFunction::constant(1.0), 2000, 0.5, 1.0);
    EXPECT_LT(rel(half, exact_variance(c, 1000, 1.0) / 2000.0), 1e-10);
}

TEST(WeightedExactVariance, BruteForceQuadraticForm)
{
    const auto c = CoefficientSequence::finite(-1, {0.5, 1.0, -0.25});
    const oracle::Filter f = as_filter(c);
    const std::int64_t n = 40;
    const WeightFunction g = WeightFunction::linear();
    long double acc = 0.0L;
    for (std::int64_t k = 1; k <= n; ++k)
        for (std::int64_t l = 1; l <= n; ++l)
            acc += g(static_cast<double>(k) / n) * g(static_cast<double>(l) / n) * oracle::gamma(f, k - l);
    EXPECT_NEAR(weighted_exact_variance(c, g, n, 1.0, 1.0), static_cast<double>(acc) / n, 1e-13);
}

TEST(WeightedExactVariance, ApproachesLimit)
{
    const auto c = CoefficientSequence::geometric(0.5, 45);
    const double limit = 9.0 / 3.0;
    EXPECT_NEAR(weighted_exact_variance(c, WeightFunction::linear(), 100000, 1.0, 1.0), limit, 1e-3);
}
