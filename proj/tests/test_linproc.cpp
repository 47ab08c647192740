#include "shortmem/error.hpp"
#include "shortmem/linproc.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace shortmem;

namespace {

Stream constant_stream(std::int64_t first, std::int64_t last, double v)
{
    return Stream{first, std::vector<double>(static_cast<std::size_t>(last - first + 1), v)};
}

Stream gaussian_stream(std::uint64_t seed, std::int64_t first, std::int64_t last)
{
    return materialize(InnovationModel::gaussian(1.0, seed), first, last);
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

TEST(Filter, IdentityReproducesInnovations)
{
    const InnovationModel m = InnovationModel::gaussian(1.3, 21);
    const ProcessPath p = filter(CoefficientSequence::identity(), m, 500);
    const auto xi = sample_stream(m, 1, 500);
    EXPECT_EQ(p.x, xi);
    EXPECT_EQ(p.b_n, std::sqrt(500.0));
    EXPECT_EQ(p.truncation_error, 0.0);
    ASSERT_TRUE(p.seed.has_value());
    EXPECT_EQ(*p.seed, 21u);
}

TEST(Filter, ConvexCombinationOfConstantStream)
{
    const auto c = CoefficientSequence::finite(0, {0.5, 0.5});
    const ProcessPath p = filter(c, constant_stream(0, 20, 1.0), 20);
    for (double x : p.x)
        EXPECT_EQ(x, 1.0);
}

TEST(Filter, ImpulseResponseIsCoefficientSequence)
{
    const auto c = CoefficientSequence::geometric(0.5, 40);
    Stream impulse = constant_stream(1 - 40, 30 + 40, 0.0);
    impulse.values[static_cast<std::size_t>(0 - impulse.first)] = 1.0;
    const ProcessPath p = filter(c, impulse, 30);
    for (std::int64_t k = 1; k <= 30; ++k)
        EXPECT_EQ(p.x[static_cast<std::size_t>(k - 1)], c[k]);
}

TEST(Filter, PartialSumsArePrefixSums)
{
    const auto c = CoefficientSequence::geometric(0.6, 50);
    const ProcessPath p = filter(c, InnovationModel::gaussian(1.0, 4), 2000);
    long double s = 0.0L;
    EXPECT_EQ(p.partial[0], 0.0);
    for (std::size_t k = 0; k < p.x.size(); ++k) {
        s += p.x[k];
        ASSERT_NEAR(p.partial[k + 1], static_cast<double>(s), 1e-12 * std::max(1.0L, std::abs(s)));
    }
}

TEST(Filter, LinearInCoefficients)
{
    const auto a = CoefficientSequence::finite(-2, {0.3, -0.2, 1.0, 0.4});
    const auto b = CoefficientSequence::finite(0, {0.7, 0.1, -0.5, 0.25, 0.05});
    const double alpha = 1.7, beta = -0.6;
    const auto ab = CoefficientSequence::combine(alpha, a, beta, b);
    const Stream xi = gaussian_stream(12, -10, 310);
    const ProcessPath pa = filter(a, xi, 300);
    const ProcessPath pb = filter(b, xi, 300);
    const ProcessPath pab = filter(ab, xi, 300);
    for (std::size_t k = 0; k < 300; ++k) {
        const double expected = alpha * pa.x[k] + beta * pb.x[k];
        ASSERT_NEAR(pab.x[k], expected, 1e-12 * std::max(1.0, std::abs(expected)));
    }
}

TEST(Filter, ShiftEquivariant)
{
    const auto c = CoefficientSequence::finite(-1, {0.2, 1.0, -0.3, 0.6});
    Stream xi = gaussian_stream(5, -10, 210);
    Stream shifted = xi;
    shifted.first += 1;  // shifted.at(k) = xi.at(k - 1)
    const ProcessPath p = filter(c, xi, 200);
    const ProcessPath q = filter(c, shifted, 200);
    for (std::int64_t k = 2; k <= 200; ++k)
        ASSERT_EQ(q.x[static_cast<std::size_t>(k - 1)], p.x[static_cast<std::size_t>(k - 2)]);
}

TEST(Filter, TruncationErrorShrinksWithWindow)
{
    const InnovationModel m = InnovationModel::gaussian(1.0, 3);
    FilterOptions loose;
    loose.eps_tail = 1.0;
    double prev = INFINITY;
    for (std::int64_t w : {5, 10, 20, 40, 80}) {
        const ProcessPath p = filter(CoefficientSequence::geometric(0.7, w), m, 50, loose);
        EXPECT_LE(p.truncation_error, prev);
        prev = p.truncation_error;
    }
}

TEST(Filter, RejectsWindowWithLargeTail)
{
    try {
        filter(CoefficientSequence::geometric(0.5, 5), InnovationModel::gaussian(1.0, 1), 10);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::capacity);
    }
}

TEST(Filter, RejectsCapacityOverflow)
{
    FilterOptions tiny;
    tiny.capacity = 100;
    EXPECT_THROW(filter(CoefficientSequence::identity(), InnovationModel::gaussian(1.0, 1), 101, tiny), Error);
}

TEST(Filter, CoupledModelMustMatchLength)
{
    EXPECT_THROW(filter(CoefficientSequence::identity(), InnovationModel::bm_coupled(64, 1), 32), Error);
}

TEST(Filter, StreamMustCoverInputRange)
{
    const auto c = CoefficientSequence::finite(-1, {1.0, 1.0, 1.0});
    EXPECT_THROW(filter(c, constant_stream(1, 10, 1.0), 10), Error);
    EXPECT_NO_THROW(filter(c, constant_stream(-1, 11, 1.0), 10));
}

TEST(PartialSumPath, FloorArithmetic)
{
    FilterOptions unit;
    unit.b_n = 1.0;
    const InnovationModel m = InnovationModel::gaussian(1.0, 8);
    const ProcessPath p = filter(CoefficientSequence::identity(), m, 10, unit);
    const auto xi = sample_stream(m, 1, 10);
    EXPECT_EQ(partial_sum_path(p, 0.0), 0.0);
    double s = 0.0;
    for (double v : xi)
        s += v;
    EXPECT_EQ(partial_sum_path(p, 1.0), s);
    EXPECT_EQ(partial_sum_path(p, 0.5), p.partial[5]);
    EXPECT_EQ(partial_sum_path(p, 0.59), p.partial[5]);
    EXPECT_THROW(partial_sum_path(p, 1.5), Error);
}

TEST(CouplingStat, IdentityIsExactlyZero)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ProcessPath p = filter(CoefficientSequence::identity(), InnovationModel::gaussian(1.0, seed), 1000);
        EXPECT_EQ(coupling_stat(p, 1.0), 0.0);
        EXPECT_EQ(lp_coupling_stat(p, 1.0, 3.0), 0.0);
    }
}

TEST(CouplingStat, PureShiftClosedForm)
{
    const auto shift = CoefficientSequence::finite(1, {1.0});
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Stream xi = gaussian_stream(seed, 0, 400);
        const ProcessPath p = filter(shift, xi, 400);
        double brute = 0.0;
        for (std::int64_t j = 1; j <= 400; ++j)
            brute = std::max(brute, std::abs(xi.at(0) - xi.at(j)));
        brute /= p.b_n;
        EXPECT_NEAR(coupling_stat(p, 1.0), brute, 1e-12);
        EXPECT_EQ(lp_coupling_stat(p, 1.0, 1.0), coupling_stat(p, 1.0));
        EXPECT_NEAR(lp_coupling_stat(p, 1.0, 2.0), brute * brute, 1e-12);
    }
}

TEST(CouplingStat, ScalarFilterVanishesToRounding)
{
    const auto c = CoefficientSequence::finite(0, {2.5});
    const ProcessPath p = filter(c, InnovationModel::gaussian(1.0, 6), 5000);
    EXPECT_LT(coupling_stat(p, 2.5), 1e-12);
}

TEST(CouplingStat, GeometricMedianDecreases)
{
    const auto c = CoefficientSequence::geometric(0.5, 40);
    std::vector<double> small, large;
    for (std::uint64_t r = 0; r < 100; ++r) {
        small.push_back(coupling_stat(filter(c, InnovationModel::gaussian(1.0, derive_seed(31, 256, r)), 256), 3.0));
        large.push_back(
            coupling_stat(filter(c, InnovationModel::gaussian(1.0, derive_seed(31, 16384, r)), 16384), 3.0));
    }
    EXPECT_LT(median(large), median(small));
}

TEST(LpCouplingStat, RejectsSmallP)
{
    const ProcessPath p = filter(CoefficientSequence::identity(), InnovationModel::gaussian(1.0, 1), 10);
    EXPECT_THROW(lp_coupling_stat(p, 1.0, 0.5), Error);
}

TEST(SupBmDistance, IdentityIsExactlyZero)
{
    for (std::int64_t n : {1, 100, 1000, 10000})
        for (std::uint64_t seed : {0u, 9u, 77u}) {
            const ProcessPath p = filter(CoefficientSequence::identity(), InnovationModel::bm_coupled(n, seed), n);
            EXPECT_EQ(sup_bm_distance(p, 1.0, brownian_grid(seed, n)), 0.0);
        }
}

TEST(SupBmDistance, ScalarFilterVanishesToRounding)
{
    const auto c = CoefficientSequence::finite(0, {-1.75});
    const ProcessPath p = filter(c, InnovationModel::bm_coupled(2048, 4), 2048);
    EXPECT_LT(sup_bm_distance(p, -1.75, brownian_grid(4, 2048)), 1e-12);
}

TEST(SupBmDistance, RejectsMismatchedGrid)
{
    const ProcessPath p = filter(CoefficientSequence::identity(), InnovationModel::bm_coupled(64, 4), 64);
    EXPECT_THROW(sup_bm_distance(p, 1.0, brownian_grid(4, 32)), Error);
    EXPECT_THROW(sup_bm_distance(p, 1.0, brownian_grid(5, 64)), Error);
    const ProcessPath g = filter(CoefficientSequence::identity(), InnovationModel::gaussian(1.0, 4), 64);
    EXPECT_THROW(sup_bm_distance(g, 1.0, brownian_grid(4, 64)), Error);
}

TEST(TruncationCheck, FullWindowHasNoGap)
{
    const auto c = CoefficientSequence::finite(-2, {0.5, 1.0, 2.0, 1.0, 0.5});
    const TruncationCheck chk = lemma2_truncation_check(c, {InnovationKind::gaussian, 1.0}, 3, 200, 2, 5);
    EXPECT_EQ(chk.mean_gap, 0.0);
    EXPECT_EQ(chk.bound, 0.0);
    EXPECT_TRUE(chk.pass);
}

TEST(TruncationCheck, IdentityAtZeroHasNoGap)
{
    const TruncationCheck chk =
        lemma2_truncation_check(CoefficientSequence::identity(), {InnovationKind::gaussian, 1.0}, 3, 200, 0, 5);
    EXPECT_EQ(chk.mean_gap, 0.0);
    EXPECT_TRUE(chk.pass);
}

TEST(TruncationCheck, WiderTruncationShrinksGapAndRespectsBound)
{
    const auto c = CoefficientSequence::geometric(0.5, 40);
    const InnovationDescriptor d{InnovationKind::gaussian, 1.0};
    const TruncationCheck m5 = lemma2_truncation_check(c, d, 8, 500, 5, 40);
    const TruncationCheck m10 = lemma2_truncation_check(c, d, 8, 500, 10, 40);
    EXPECT_LT(m10.mean_gap, m5.mean_gap);
    EXPECT_TRUE(m5.pass);
    EXPECT_TRUE(m10.pass);
    EXPECT_GT(m5.bound, 0.0);
}
