#include "shortmem/exact_gaussian.hpp"

#include "shortmem/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shortmem {

namespace {

// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(long double v) noexcept
    {
        const long double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    long double value() const noexcept { return sum_ + comp_; }

private:
    long double sum_ = 0.0L;
    long double comp_ = 0.0L;
};

void require_sigma2(double sigma2)
{
    if (!(sigma2 > 0.0))
        throw Error(Errc::invalid_argument, "innovation variance must be positive");
}

}  // namespace

double exact_variance(const CoefficientSequence& coeffs, std::int64_t n, double sigma2, std::size_t capacity)
{
    if (n < 1)
        throw Error(Errc::invalid_argument, "n must be >= 1");
    require_sigma2(sigma2);
    const std::int64_t lo = coeffs.lo();
    const std::int64_t hi = coeffs.hi();
    const std::int64_t count = n + hi - lo;
    if (static_cast<std::uint64_t>(count) > capacity)
        throw Error(Errc::capacity, "exact variance capacity exceeded for n = " + std::to_string(n));

    // prefix[q] = a_lo + ... + a_{lo+q-1}
    const auto a = coeffs.values();
    std::vector<long double> prefix(a.size() + 1, 0.0L);
    for (std::size_t q = 0; q < a.size(); ++q)
        prefix[q + 1] = prefix[q] + a[q];
    const auto prefix_at = [&](std::int64_t j) {  // a_lo + ... + a_j, clipped
        if (j < lo)
            return 0.0L;
        if (j >= hi)
            return prefix.back();
        return prefix[static_cast<std::size_t>(j - lo + 1)];
    };

    CompensatedSum outer;
    for (std::int64_t i = 1 - hi; i <= n - lo; ++i) {
        // sum_{k=1}^n a_{k-i} = sum_{j=1-i}^{n-i} a_j
        const long double inner = prefix_at(n - i) - prefix_at(-i);
        outer.add(inner * inner);
    }
    return sigma2 * static_cast<double>(outer.value());
}

double variance_from_autocovariance(const CoefficientSequence& coeffs, std::int64_t n, double sigma2)
{
    if (n < 1)
        throw Error(Errc::invalid_argument, "n must be >= 1");
    require_sigma2(sigma2);
    const std::int64_t reach = std::min<std::int64_t>(n - 1, coeffs.hi() - coeffs.lo());
    CompensatedSum acc;
    acc.add(static_cast<long double>(n) * autocovariance(coeffs, sigma2, 0));
    for (std::int64_t h = 1; h <= reach; ++h)
        acc.add(2.0L * static_cast<long double>(n - h) * autocovariance(coeffs, sigma2, h));
    return static_cast<double>(acc.value());
}

double VarianceProfile::max_route_discrepancy() const
{
    double worst = 0.0;
    for (std::size_t i = 0; i < variance.size(); ++i) {
        const double scale = std::max(std::abs(variance[i]), std::abs(autocov_variance[i]));
        if (scale > 0.0)
            worst = std::max(worst, std::abs(variance[i] - autocov_variance[i]) / scale);
    }
    return worst;
}

VarianceProfile variance_profile(const CoefficientSequence& coeffs, std::span<const std::int64_t> grid,
                                 double sigma2)
{
    if (grid.empty())
        throw Error(Errc::invalid_argument, "variance grid is empty");
    VarianceProfile p;
    for (std::int64_t n : grid) {
        const double v = exact_variance(coeffs, n, sigma2);
        p.n.push_back(n);
        p.variance.push_back(v);
        p.normalized.push_back(v / static_cast<double>(n));
        p.autocov_variance.push_back(variance_from_autocovariance(coeffs, n, sigma2));
    }
    if (grid.size() >= 2)
        p.slopes = regular_variation_slope(p);
    return p;
}

std::vector<double> regular_variation_slope(const VarianceProfile& profile)
{
    if (profile.n.size() < 2)
        throw Error(Errc::invalid_argument, "slope diagnostics need at least two grid points");
    std::vector<double> slopes;
    for (std::size_t i = 1; i < profile.n.size(); ++i) {
        const double dn = std::log(static_cast<double>(profile.n[i])) - std::log(static_cast<double>(profile.n[i - 1]));
        if (!(dn > 0.0))
            throw Error(Errc::invalid_argument, "variance grid must be strictly increasing");
        slopes.push_back((std::log(profile.variance[i]) - std::log(profile.variance[i - 1])) / dn);
    }
    return slopes;
}

Prop10VarianceReport prop10_variance_report(const CoefficientSequence& coeffs, int r)
{
    if (coeffs.descriptor().kind != DecayKind::prop10_blocks)
        throw Error(Errc::invalid_argument, "variance report needs prop10 coefficients");
    const int r_max = static_cast<int>(coeffs.descriptor().param);
    if (r < 1 || r > r_max - 1)
        throw Error(Errc::out_of_range, "r must lie in [1, r_max - 1] = [1, " + std::to_string(r_max - 1) + "]");

    Prop10VarianceReport rep;
    rep.r = r;
    rep.n = static_cast<std::int64_t>(Prop10Blocks::block_start(r + 1));
    const double n = static_cast<double>(rep.n);
    const double u = Prop10Blocks::level(r);
    rep.exact = exact_variance(coeffs, rep.n, 1.0);
    rep.paper_bound = n * n / (9.0 * std::pow(static_cast<double>(r), 8));
    rep.defensible_bound = u * u * n * n * n / 12.0;
    rep.meets_paper_bound = rep.exact >= rep.paper_bound;
    if (rep.exact < rep.defensible_bound)
        throw Error(Errc::invariant, "exact variance fell below u_r^2 n^3 / 12 at r = " + std::to_string(r));
    return rep;
}

double projection_block_norm(const Prop10Blocks& blocks, int r, std::uint64_t k)
{
    if (r < 1 || r > blocks.r_max())
        throw Error(Errc::out_of_range, "block r outside the built blocks");
    if (k > blocks.support_end())
        return 0.0;
    return blocks.sum_of_squares(k + Prop10Blocks::block_start(r) + 1, k + Prop10Blocks::block_start(r + 1));
}

double projection_norm_sum(const Prop10Blocks& blocks)
{
    double acc = 0.0;
    for (int r = 1; r <= blocks.r_max(); ++r)
        acc += std::sqrt(projection_block_norm(blocks, r, 0));
    const double bound = std::pow(std::numbers::pi, 4) / 90.0;
    if (acc > bound)
        throw Error(Errc::invariant, "projection norm sum exceeds sum r^-4");
    return acc;
}

double projection_norm_tail_bound(int r)
{
    if (r < 1)
        throw Error(Errc::out_of_range, "r must be >= 1");
    // sqrt(1/(3 s^8)) = s^-4 / sqrt(3), and sum_{s>r} s^-4 <= 1 / (3 r^3)
    const double rd = static_cast<double>(r);
    return 1.0 / (std::sqrt(3.0) * 3.0 * rd * rd * rd);
}

std::vector<ProjectionRow> projection_profile(const Prop10Blocks& blocks)
{
    std::vector<ProjectionRow> rows;
    double cumulative = 0.0;
    for (int r = 1; r <= blocks.r_max(); ++r) {
        ProjectionRow row;
        row.r = r;
        row.norm = projection_block_norm(blocks, r, 0);
        const double u = Prop10Blocks::level(r);
        row.bound = static_cast<double>(Prop10Blocks::block_start(r + 1) - Prop10Blocks::block_start(r)) * u * u;
        row.paper_bound = std::pow(static_cast<double>(r), -8);
        cumulative += std::sqrt(row.norm);
        row.cumulative = cumulative;
        rows.push_back(row);
    }
    return rows;
}

double weighted_exact_variance(const CoefficientSequence& coeffs, const WeightFunction& g, std::int64_t n,
                               double t, double sigma2, double work_limit)
{
    if (n < 1)
        throw Error(Errc::invalid_argument, "n must be >= 1");
    if (!(t >= 0.0 && t <= 1.0))
        throw Error(Errc::invalid_argument, "t must lie in [0, 1]");
    require_sigma2(sigma2);
    const auto m = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * t));
    if (m == 0)
        return 0.0;
    const std::int64_t band = std::min<std::int64_t>(coeffs.hi() - coeffs.lo(), m - 1);
    if (static_cast<double>(m) * static_cast<double>(band + 1) > work_limit)
        throw Error(Errc::capacity, "weighted variance work exceeds the configured limit");

    std::vector<double> w(static_cast<std::size_t>(m));
    for (std::int64_t i = 1; i <= m; ++i)
        w[static_cast<std::size_t>(i - 1)] = g(static_cast<double>(i) / static_cast<double>(n));

    CompensatedSum total;
    for (std::int64_t h = 0; h <= band; ++h) {
        const double gamma = autocovariance(coeffs, sigma2, h);
        if (gamma == 0.0)
            continue;
        CompensatedSum lagged;
        for (std::int64_t i = 0; i + h < m; ++i)
            lagged.add(static_cast<long double>(w[static_cast<std::size_t>(i)]) * w[static_cast<std::size_t>(i + h)]);
        total.add((h == 0 ? 1.0L : 2.0L) * gamma * lagged.value());
    }
    return static_cast<double>(total.value()) / static_cast<double>(n);
}

}  // namespace shortmem
