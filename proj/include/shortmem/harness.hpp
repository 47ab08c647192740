#pragma once

#include "shortmem/coefficients.hpp"
#include "shortmem/innovations.hpp"
#include "shortmem/linproc.hpp"
#include "shortmem/weights.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shortmem {

struct EnsembleConfig {
    CoefficientSequence coeffs = CoefficientSequence::identity();
    InnovationDescriptor model;
    std::vector<std::int64_t> grid;
    int replicates = 1;
    std::vector<double> p_list{1.0, 2.0};
    std::uint64_t seed = 0;
    FilterOptions filter;
};

struct PathEnsemble {
    std::vector<std::int64_t> grid;
    int replicates = 0;
    std::uint64_t master_seed = 0;
    double total = 0.0;  // A used for the coupling statistics
    bool coupled = false;

    // Row-major (grid index, replicate); every vector has grid.size() * replicates entries.
    std::vector<std::uint64_t> seeds;
    std::vector<double> coupling;        // max_j |S_j - A S_j^(xi)| / b_n
    std::vector<double> sup_bm;          // only when coupled
    std::vector<double> max_innovation;  // max_j |xi_j| / b_n
    std::vector<double> terminal;        // S_n / b_n

    std::size_t cell(std::size_t grid_index, int replicate) const noexcept
    {
        return grid_index * static_cast<std::size_t>(replicates) + static_cast<std::size_t>(replicate);
    }
    std::span<const double> row(const std::vector<double>& stat, std::size_t grid_index) const noexcept
    {
        return std::span<const double>(stat).subspan(cell(grid_index, 0), static_cast<std::size_t>(replicates));
    }
};

// Cells are independent work items; results land in fixed slots, so output
// does not depend on `workers` or on scheduling.
PathEnsemble run_ensemble(const EnsembleConfig& config, int workers = 1);

struct Summary {
    double mean = 0.0;
    double median = 0.0;
    double q90 = 0.0;
};

// Quantiles use linear interpolation between order statistics.
double quantile(std::span<const double> values, double q);
Summary summarize(std::span<const double> values);

struct CouplingRow {
    std::int64_t n = 0;
    Summary coupling;
    std::optional<Summary> sup_bm;
    Summary max_innovation;
    std::map<double, double> lp_coupling;  // p -> mean of coupling^p
    std::map<double, double> lp_sup_bm;    // p -> mean of sup_bm^p
};

struct CouplingReport {
    std::vector<CouplingRow> rows;
    std::optional<bool> coupling_trend;  // set when the grid has >= 3 points
    std::optional<bool> sup_bm_trend;
    std::map<double, bool> lp_trend;  // on the per-n L_p means of sup_bm (or coupling when uncoupled)
};

CouplingReport coupling_report(const PathEnsemble& ensemble, std::span<const double> p_list);

struct LpEstimate {
    std::vector<double> means;    // per n, mean of sup_bm^p
    std::vector<double> medians;  // per n, median of sup_bm^p
    bool decreasing = false;      // largest n below smallest n
    bool trend = false;           // trend_verdict on the means
};

LpEstimate lp_estimate(const PathEnsemble& ensemble, double p);

// sup_x |F_N(x) - Phi((x - mean)/std)| evaluated on both sides of each order statistic.
double ks_statistic(std::span<const double> samples, double mean, double std_dev);
// Asymptotic Kolmogorov critical value c(alpha)/sqrt(N) for alpha in {0.05, 0.01}.
double ks_critical_value(std::size_t count, double alpha);

// Non-negative laws with a closed-form tail, for the truncated-mean identity.
struct PositiveLaw {
    enum class Kind { exponential, uniform, degenerate } kind = Kind::exponential;
    double param = 1.0;  // rate, or upper end of U(0, w)

    double density(double x) const;
    double survival(double x) const;  // P(xi >= x)
    double mean() const;
};

// |centered uniform(h)| ~ U(0, h); exponential(rate) maps to the uncentered Exp(rate).
PositiveLaw positive_law_for(const InnovationDescriptor& model);

struct TruncatedMeanIdentity {
    double lhs = 0.0;  // E g(a xi), g(x) = x 1{x <= 1} + 1{x > 1}
    double rhs = 0.0;  // a int_0^{1/a} P(xi >= t) dt
    double residual = 0.0;
};

TruncatedMeanIdentity truncated_mean_identity(double a, const PositiveLaw& law);

// sum_{j < terms} a_j 1{x <= 1/a_j}
double staircase_weight(double x, std::span<const double> a_seq, std::size_t terms);

struct WeightedVarianceCheck {
    std::int64_t n = 0;
    double exact = 0.0;      // weighted_exact_variance
    double empirical = 0.0;  // sample variance over replicates
    double standard_error = 0.0;
    double limit = 0.0;      // A^2 sigma^2 int_0^t g^2
    bool pass = false;       // |empirical - exact| <= sigmas * standard_error
};

// Replicate r uses derive_seed(seed, n, r), as in run_ensemble.
WeightedVarianceCheck weighted_variance_check(const CoefficientSequence& coeffs, const InnovationDescriptor& model,
                                              const WeightFunction& g, std::int64_t n, double t, int replicates,
                                              std::uint64_t seed, int workers = 1, double sigmas = 3.0,
                                              const FilterOptions& filter = {});

// Non-increasing across the grid and last <= first / 2. Needs >= 3 values.
bool trend_verdict(std::span<const double> values);

}  // namespace shortmem
