#include "shortmem/harness.hpp"

#include "shortmem/error.hpp"
#include "shortmem/exact_gaussian.hpp"
#include "shortmem/projective.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace shortmem {

namespace {

void validate(const EnsembleConfig& config)
{
    if (config.grid.empty())
        throw Error(Errc::validation, "n-grid is empty");
    for (std::size_t i = 0; i < config.grid.size(); ++i) {
        if (config.grid[i] < 1)
            throw Error(Errc::validation, "grid values must be >= 1");
        if (i > 0 && config.grid[i] <= config.grid[i - 1])
            throw Error(Errc::validation, "n-grid must be strictly ascending");
    }
    if (config.replicates < 1)
        throw Error(Errc::validation, "replicates must be >= 1");
    for (double p : config.p_list)
        if (!(p >= 1.0))
            throw Error(Errc::validation, "every p must be >= 1");
}

double mean_of_power(std::span<const double> values, double p)
{
    double acc = 0.0;
    for (double v : values)
        acc += p == 1.0 ? v : std::pow(v, p);
    return acc / static_cast<double>(values.size());
}

template <class F>
double integrate(F f, double lo, double hi)
{
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    double v = 0.0;
    if (std::isfinite(hi)) {
        // on [0, 1] the per-panel error floor no longer depends on the interval width
        const double width = hi - lo;
        v = width * gauss_kronrod<double, 31>::integrate([&](double u) { return f(lo + width * u); }, 0.0, 1.0, 20,
                                                          1e-14, &err);
        err *= width;
    } else {
        v = gauss_kronrod<double, 31>::integrate(f, lo, hi, 20, 1e-14, &err);
    }
    if (!std::isfinite(v) || err > 1e-11 * std::max(1.0, std::abs(v)))
        throw Error(Errc::numerical, "adaptive quadrature did not converge on [" + std::to_string(lo) + ", " +
                                         std::to_string(hi) + "]");
    return v;
}

// Splits [lo, hi] at lo + scale * 2^k so mass near lo is resolved on long ranges.
template <class F>
double integrate_scaled(F f, double lo, double hi, double scale)
{
    double acc = 0.0;
    double left = lo;
    for (double width = scale; left < hi; width *= 2.0) {
        const double right = std::isfinite(hi) ? std::min(hi, lo + width) : lo + width;
        if (!std::isfinite(hi) && width > 1e3 * scale)
            return acc + integrate(f, left, hi);
        acc += integrate(f, left, right);
        left = right;
    }
    return acc;
}

// Runs work(c) for c in [0, cells); each call writes only its own slot.
template <class Work>
void for_each_cell(std::size_t cells, int workers, Work work)
{
    const std::size_t threads = std::min(static_cast<std::size_t>(workers), cells);
    if (threads <= 1) {
        for (std::size_t c = 0; c < cells; ++c)
            work(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t c = next++; c < cells; c = next++)
                work(c);
        });
    for (auto& th : pool)
        th.join();
}

void rethrow_first(const std::vector<std::optional<Error>>& failures)
{
    for (const auto& f : failures)
        if (f)
            throw *f;
}

std::string cell_context(std::int64_t n, int replicate)
{
    return " (n=" + std::to_string(n) + ", replicate=" + std::to_string(replicate) + ")";
}

}  // namespace

PathEnsemble run_ensemble(const EnsembleConfig& config, int workers)
{
    validate(config);
    if (workers < 1)
        throw Error(Errc::invalid_argument, "worker count must be >= 1");

    PathEnsemble e;
    e.grid = config.grid;
    e.replicates = config.replicates;
    e.master_seed = config.seed;
    e.total = total_sum(config.coeffs).value;
    e.coupled = config.model.kind == InnovationKind::bm_coupled;

    const std::size_t cells = config.grid.size() * static_cast<std::size_t>(config.replicates);
    e.seeds.assign(cells, 0);
    e.coupling.assign(cells, 0.0);
    e.max_innovation.assign(cells, 0.0);
    e.terminal.assign(cells, 0.0);
    if (e.coupled)
        e.sup_bm.assign(cells, 0.0);

    std::vector<std::optional<Error>> failures(cells);
    const auto run_cell = [&](std::size_t c) {
        const std::size_t gi = c / static_cast<std::size_t>(config.replicates);
        const int r = static_cast<int>(c % static_cast<std::size_t>(config.replicates));
        const std::int64_t n = config.grid[gi];
        try {
            const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(n),
                                                   static_cast<std::uint64_t>(r));
            const InnovationModel model(config.model, seed, n);
            const ProcessPath path = filter(config.coeffs, model, n, config.filter);
            e.seeds[c] = seed;
            e.coupling[c] = coupling_stat(path, e.total);
            e.max_innovation[c] = max_abs(sample_stream(model, 1, n), path.b_n);
            e.terminal[c] = path.partial.back() / path.b_n;
            if (e.coupled)
                e.sup_bm[c] = sup_bm_distance(path, e.total, brownian_grid(seed, n));
        } catch (const Error& err) {
            failures[c].emplace(err.code(), err.what() + cell_context(n, r));
        }
    };

    for_each_cell(cells, workers, run_cell);
    rethrow_first(failures);
    return e;
}

WeightedVarianceCheck weighted_variance_check(const CoefficientSequence& coeffs, const InnovationDescriptor& model,
                                              const WeightFunction& g, std::int64_t n, double t, int replicates,
                                              std::uint64_t seed, int workers, double sigmas,
                                              const FilterOptions& filter_opts)
{
    if (replicates < 2)
        throw Error(Errc::validation, "weighted variance check needs at least two replicates");
    if (workers < 1)
        throw Error(Errc::invalid_argument, "worker count must be >= 1");
    const auto cells = static_cast<std::size_t>(replicates);
    std::vector<double> values(cells, 0.0);
    std::vector<std::optional<Error>> failures(cells);
    for_each_cell(cells, workers, [&](std::size_t c) {
        const int r = static_cast<int>(c);
        try {
            const InnovationModel gen(model, derive_seed(seed, static_cast<std::uint64_t>(n), c), n);
            values[c] = weighted_partial_sum(filter(coeffs, gen, n, filter_opts), g, t);
        } catch (const Error& err) {
            failures[c].emplace(err.code(), err.what() + cell_context(n, r));
        }
    });
    rethrow_first(failures);

    const double sigma2 = InnovationModel(model, seed, n).variance();
    WeightedVarianceCheck out;
    out.n = n;
    out.exact = weighted_exact_variance(coeffs, g, n, t, sigma2);
    const double total = total_sum(coeffs).value;
    out.limit = total * total * sigma2 * g.integral_of_square(t);

    const auto reps = static_cast<double>(replicates);
    const double mean = mean_of_power(values, 1.0);
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : values) {
        const double d2 = (v - mean) * (v - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    out.empirical = m2 / (reps - 1.0);
    m4 /= reps;
    // Var(s^2) ~ (mu_4 - s^4 (R - 3)/(R - 1)) / R
    const double var_of_var = (m4 - out.empirical * out.empirical * (reps - 3.0) / (reps - 1.0)) / reps;
    out.standard_error = std::sqrt(std::max(var_of_var, 0.0));
    out.pass = std::abs(out.empirical - out.exact) <= sigmas * out.standard_error;
    return out;
}

double quantile(std::span<const double> values, double q)
{
    if (values.empty())
        throw Error(Errc::invalid_argument, "quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0))
        throw Error(Errc::invalid_argument, "quantile level must lie in [0, 1]");
    std::vector<double> s(values.begin(), values.end());
    std::sort(s.begin(), s.end());
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return s[lo] + frac * (s[hi] - s[lo]);
}

Summary summarize(std::span<const double> values)
{
    if (values.empty())
        throw Error(Errc::invalid_argument, "summary of an empty sample");
    Summary s;
    s.mean = mean_of_power(values, 1.0);
    s.median = quantile(values, 0.5);
    s.q90 = quantile(values, 0.9);
    return s;
}

CouplingReport coupling_report(const PathEnsemble& e, std::span<const double> p_list)
{
    CouplingReport rep;
    std::vector<double> coupling_medians;
    std::vector<double> sup_medians;
    std::map<double, std::vector<double>> lp_series;
    for (std::size_t gi = 0; gi < e.grid.size(); ++gi) {
        CouplingRow row;
        row.n = e.grid[gi];
        const auto coupling = e.row(e.coupling, gi);
        row.coupling = summarize(coupling);
        row.max_innovation = summarize(e.row(e.max_innovation, gi));
        coupling_medians.push_back(row.coupling.median);
        for (double p : p_list)
            row.lp_coupling[p] = mean_of_power(coupling, p);
        if (e.coupled) {
            const auto sup = e.row(e.sup_bm, gi);
            row.sup_bm = summarize(sup);
            sup_medians.push_back(row.sup_bm->median);
            for (double p : p_list)
                row.lp_sup_bm[p] = mean_of_power(sup, p);
        }
        for (double p : p_list)
            lp_series[p].push_back(e.coupled ? row.lp_sup_bm[p] : row.lp_coupling[p]);
        rep.rows.push_back(std::move(row));
    }
    if (e.grid.size() >= 3) {
        rep.coupling_trend = trend_verdict(coupling_medians);
        if (e.coupled)
            rep.sup_bm_trend = trend_verdict(sup_medians);
        for (const auto& [p, series] : lp_series)
            rep.lp_trend[p] = trend_verdict(series);
    }
    return rep;
}

LpEstimate lp_estimate(const PathEnsemble& e, double p)
{
    if (!e.coupled)
        throw Error(Errc::invalid_argument, "L_p estimate needs an ensemble built on bm-coupled innovations");
    if (!(p >= 1.0))
        throw Error(Errc::invalid_argument, "p must be >= 1");
    LpEstimate out;
    for (std::size_t gi = 0; gi < e.grid.size(); ++gi) {
        const auto sup = e.row(e.sup_bm, gi);
        std::vector<double> powered(sup.begin(), sup.end());
        if (p != 1.0)
            for (double& v : powered)
                v = std::pow(v, p);
        out.means.push_back(mean_of_power(powered, 1.0));
        out.medians.push_back(quantile(powered, 0.5));
    }
    out.decreasing = out.means.back() < out.means.front();
    out.trend = out.means.size() >= 3 && trend_verdict(out.means);
    return out;
}

double ks_statistic(std::span<const double> samples, double mean, double std_dev)
{
    if (samples.empty())
        throw Error(Errc::invalid_argument, "KS statistic needs samples");
    if (!(std_dev > 0.0))
        throw Error(Errc::invalid_argument, "KS reference std must be positive");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    const auto count = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double cdf = 0.5 * std::erfc(-(s[i] - mean) / (std_dev * std::sqrt(2.0)));
        const double above = static_cast<double>(i + 1) / count - cdf;
        const double below = cdf - static_cast<double>(i) / count;
        d = std::max({d, above, below});
    }
    return d;
}

double ks_critical_value(std::size_t count, double alpha)
{
    if (count == 0)
        throw Error(Errc::invalid_argument, "KS critical value needs N >= 1");
    double c = 0.0;
    if (alpha == 0.05)
        c = 1.36;
    else if (alpha == 0.01)
        c = 1.63;
    else
        throw Error(Errc::invalid_argument, "KS critical values are tabulated for alpha 0.05 and 0.01 only");
    return c / std::sqrt(static_cast<double>(count));
}

double PositiveLaw::density(double x) const
{
    switch (kind) {
    case Kind::exponential: return x < 0.0 ? 0.0 : param * std::exp(-param * x);
    case Kind::uniform: return (x < 0.0 || x > param) ? 0.0 : 1.0 / param;
    case Kind::degenerate: return 0.0;
    }
    return 0.0;
}

double PositiveLaw::survival(double x) const
{
    if (x <= 0.0)
        return 1.0;
    switch (kind) {
    case Kind::exponential: return std::exp(-param * x);
    case Kind::uniform: return x >= param ? 0.0 : 1.0 - x / param;
    case Kind::degenerate: return 0.0;
    }
    return 0.0;
}

double PositiveLaw::mean() const
{
    switch (kind) {
    case Kind::exponential: return 1.0 / param;
    case Kind::uniform: return param / 2.0;
    case Kind::degenerate: return 0.0;
    }
    return 0.0;
}

PositiveLaw positive_law_for(const InnovationDescriptor& model)
{
    switch (model.kind) {
    case InnovationKind::exponential: return {PositiveLaw::Kind::exponential, model.param};
    case InnovationKind::uniform: return {PositiveLaw::Kind::uniform, model.param};
    default: break;
    }
    throw Error(Errc::invalid_argument, "truncated-mean identity needs exponential or uniform innovations");
}

TruncatedMeanIdentity truncated_mean_identity(double a, const PositiveLaw& law)
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw Error(Errc::invalid_argument, "a must be positive");
    if (law.kind != PositiveLaw::Kind::degenerate && !(law.param > 0.0))
        throw Error(Errc::invalid_argument, "law parameter must be positive");

    TruncatedMeanIdentity out;
    if (law.kind == PositiveLaw::Kind::degenerate)
        return out;  // g(0) = 0 and P(0 >= t) = 0 for t > 0

    const double cut = 1.0 / a;
    // support end: the density vanishes beyond it
    const double end = law.kind == PositiveLaw::Kind::uniform ? law.param : std::numeric_limits<double>::infinity();
    const auto linear_part = [&](double x) { return a * x * law.density(x); };
    const auto density = [&](double x) { return law.density(x); };
    const auto tail = [&](double t) { return law.survival(t); };

    const double scale = law.mean();
    out.lhs = integrate_scaled(linear_part, 0.0, std::min(cut, end), scale);
    if (cut < end)
        out.lhs += integrate_scaled(density, cut, end, scale);

    out.rhs = a * integrate_scaled(tail, 0.0, std::min(cut, end), scale);

    out.residual = std::abs(out.lhs - out.rhs);
    return out;
}

double staircase_weight(double x, std::span<const double> a_seq, std::size_t terms)
{
    if (!(x >= 0.0))
        throw Error(Errc::invalid_argument, "x must be >= 0");
    if (terms > a_seq.size())
        throw Error(Errc::invalid_argument, "more terms requested than stored");
    double acc = 0.0;
    for (std::size_t j = 0; j < terms; ++j) {
        if (!(a_seq[j] > 0.0))
            throw Error(Errc::invalid_argument, "staircase sequence must be positive");
        if (x <= 1.0 / a_seq[j])
            acc += a_seq[j];
    }
    return acc;
}

bool trend_verdict(std::span<const double> values)
{
    if (values.size() < 3)
        throw Error(Errc::invalid_argument, "trend verdict needs at least three grid points");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[i - 1])
            return false;
    return values.back() <= values.front() / 2.0;
}

}  // namespace shortmem
