#pragma once

#include "shortmem/coefficients.hpp"
#include "shortmem/weights.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace shortmem {

inline constexpr std::size_t kDefaultExactCapacity = std::size_t{1} << 27;
inline constexpr double kDefaultWorkLimit = 4e9;

// sigma2 * sum_i (sum_{k=1}^n a_{k-i})^2 over every i with a nonzero inner sum.
double exact_variance(const CoefficientSequence& coeffs, std::int64_t n, double sigma2,
                      std::size_t capacity = kDefaultExactCapacity);

// Second route to the same number: sum_{|h|<n} (n - |h|) gamma(h).
double variance_from_autocovariance(const CoefficientSequence& coeffs, std::int64_t n, double sigma2);

struct VarianceProfile {
    std::vector<std::int64_t> n;
    std::vector<double> variance;
    std::vector<double> normalized;        // Var(S_n) / n
    std::vector<double> autocov_variance;  // cross-check route
    std::vector<double> slopes;            // d log Var / d log n, size n.size() - 1

    double max_route_discrepancy() const;  // relative
};

VarianceProfile variance_profile(const CoefficientSequence& coeffs, std::span<const std::int64_t> grid,
                                 double sigma2);
std::vector<double> regular_variation_slope(const VarianceProfile& profile);

struct Prop10VarianceReport {
    int r = 0;
    std::int64_t n = 0;  // n_{r+1}
    double exact = 0.0;
    double paper_bound = 0.0;       // n^2 / (9 r^8)
    double defensible_bound = 0.0;  // u_r^2 n^3 / 12
    bool meets_paper_bound = false;
};

// `coeffs` must come from build_prop10; needs 1 <= r <= r_max - 1. Throws
// Errc::invariant if the exact variance ever falls below the defensible bound.
Prop10VarianceReport prop10_variance_report(const CoefficientSequence& coeffs, int r);

// ||P_i(X_k)||^2 for the block r projection: sum of t_j^2, j in (k + n_r, k + n_{r+1}].
double projection_block_norm(const Prop10Blocks& blocks, int r, std::uint64_t k);

// sum_{r=1}^{r_max} sqrt(projection_block_norm(r, 0)); checked against pi^4/90.
double projection_norm_sum(const Prop10Blocks& blocks);

// Upper bound on the remaining terms sum_{s > r} sqrt(projection_block_norm(s, 0)).
double projection_norm_tail_bound(int r);

struct ProjectionRow {
    int r = 0;
    double norm = 0.0;         // k = 0
    double bound = 0.0;        // (n_{r+1} - n_r) u_r^2
    double paper_bound = 0.0;  // r^-8
    double cumulative = 0.0;   // running sum of sqrt(norm)
};

std::vector<ProjectionRow> projection_profile(const Prop10Blocks& blocks);

// Var(n^{-1/2} sum_{i <= floor(nt)} g(i/n) X_i), banded over the support of gamma.
double weighted_exact_variance(const CoefficientSequence& coeffs, const WeightFunction& g, std::int64_t n,
                               double t, double sigma2, double work_limit = kDefaultWorkLimit);

}  // namespace shortmem
