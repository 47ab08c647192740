#include "shortmem/projective.hpp"

#include "shortmem/error.hpp"

#include <algorithm>
#include <cmath>

namespace shortmem {

namespace {

void require_causal(const CoefficientSequence& coeffs)
{
    if (!coeffs.causal())
        throw Error(Errc::invalid_argument, "projections have a closed form only for causal coefficients");
}

void require_cover(const Stream& s, std::int64_t lo, std::int64_t hi)
{
    if (!s.covers(lo, hi))
        throw Error(Errc::out_of_range, "stream must cover indices [" + std::to_string(lo) + ", " +
                                            std::to_string(hi) + "]");
}

std::int64_t floor_nt(std::int64_t n, double t)
{
    if (n < 1)
        throw Error(Errc::invalid_argument, "n must be >= 1");
    if (!(t >= 0.0 && t <= 1.0))
        throw Error(Errc::invalid_argument, "t must lie in [0, 1]");
    return static_cast<std::int64_t>(std::floor(static_cast<double>(n) * t));
}

}  // namespace

ProjectionComponents project(const CoefficientSequence& coeffs, const Stream& stream, std::int64_t k,
                             std::optional<std::int64_t> truncation)
{
    require_causal(coeffs);
    const std::int64_t m = truncation.value_or(coeffs.hi());
    if (m < 0)
        throw Error(Errc::invalid_argument, "truncation index must be >= 0");
    require_cover(stream, k - m, k);

    ProjectionComponents out;
    out.k = k;
    out.truncation = m;
    out.components.resize(static_cast<std::size_t>(m + 1));
    for (std::int64_t i = 0; i <= m; ++i) {
        const double c = coeffs[i] * stream.at(k - i);
        out.components[static_cast<std::size_t>(i)] = c;
        out.reconstruction += c;
    }
    double max_xi = 0.0;
    for (double v : stream.values)
        max_xi = std::max(max_xi, std::abs(v));
    out.residual_bound = tail_mass(coeffs, m) * max_xi;
    return out;
}

DoobCheck doob_check(const CoefficientSequence& coeffs, const InnovationDescriptor& model, std::uint64_t seed,
                     std::int64_t n, std::int64_t i, int replicates, double sigmas)
{
    require_causal(coeffs);
    if (n < 1 || i < 0 || replicates < 1)
        throw Error(Errc::invalid_argument, "Doob check needs n >= 1, i >= 0, replicates >= 1");
    const double a = coeffs[i];

    std::vector<double> maxima(static_cast<std::size_t>(replicates));
    double variance = 1.0;
    for (int r = 0; r < replicates; ++r) {
        const InnovationModel gen(model, derive_seed(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r)),
                                  n);
        variance = gen.variance();
        const Stream xi = materialize(gen, 1 - i, n - i);
        double run = 0.0;
        double best = 0.0;
        for (std::int64_t k = 1; k <= n; ++k) {
            run += a * xi.at(k - i);
            best = std::max(best, run * run);
        }
        maxima[static_cast<std::size_t>(r)] = best;
    }

    DoobCheck out;
    const auto reps = static_cast<double>(replicates);
    for (double v : maxima)
        out.empirical += v;
    out.empirical /= reps;
    if (replicates > 1) {
        double ss = 0.0;
        for (double v : maxima)
            ss += (v - out.empirical) * (v - out.empirical);
        out.standard_error = std::sqrt(ss / (reps - 1.0) / reps);
    }
    const double p_i = std::abs(a) * std::sqrt(variance);
    out.bound = 4.0 * static_cast<double>(n) * p_i * p_i;
    out.pass = out.empirical <= out.bound + sigmas * out.standard_error;
    return out;
}

double CoboundaryDecomposition::identity_residual() const
{
    double worst = 0.0;
    for (std::size_t j = 0; j < partial_y.size(); ++j)
        worst = std::max(worst, std::abs(partial_y[j] - martingale[j] - corrector[0] + corrector[j]));
    return worst;
}

double CoboundaryDecomposition::scale() const
{
    double s = 0.0;
    for (double v : partial_y)
        s = std::max(s, std::abs(v));
    return s;
}

CoboundaryDecomposition coboundary(const CoefficientSequence& coeffs, const Stream& stream, int m, std::int64_t n)
{
    require_causal(coeffs);
    if (m < 1 || n < 1)
        throw Error(Errc::invalid_argument, "coboundary needs m >= 1 and n >= 1");
    require_cover(stream, 1 - m, n);

    const auto xi = [&](std::int64_t k) { return stream.values[static_cast<std::size_t>(k - stream.first)]; };
    const auto size = static_cast<std::size_t>(n + 1);

    CoboundaryDecomposition d;
    d.order = m;
    d.n = n;
    d.y.assign(size, 0.0);
    d.theta.assign(size, 0.0);
    d.corrector.assign(size, 0.0);
    d.increments.assign(size, 0.0);
    d.martingale.assign(size, 0.0);
    d.partial_y.assign(size, 0.0);

    for (std::int64_t k = 0; k <= n; ++k) {
        double y = 0.0;
        for (int i = 0; i < m; ++i)
            y += coeffs[i] * xi(k - i);

        // theta_k = sum_{d<m} E(Y_{k+d} | F_k), E(Y_{k+d} | F_k) = sum_{i=d}^{m-1} a_i xi_{k+d-i}
        double theta = 0.0;
        double theta_prev = 0.0;  // E(theta_k | F_{k-1}): only terms with i >= d + 1 survive
        for (int dd = 0; dd < m; ++dd) {
            for (int i = dd; i < m; ++i) {
                const double term = coeffs[i] * xi(k + dd - i);
                theta += term;
                if (i > dd)
                    theta_prev += term;
            }
        }
        const auto kk = static_cast<std::size_t>(k);
        d.y[kk] = y;
        d.theta[kk] = theta;
        d.corrector[kk] = theta - y;
        if (k > 0) {
            d.increments[kk] = theta - theta_prev;
            d.martingale[kk] = d.martingale[kk - 1] + d.increments[kk];
            d.partial_y[kk] = d.partial_y[kk - 1] + y;
        }
    }
    return d;
}

double partial_coefficient_sum(const CoefficientSequence& coeffs, int m)
{
    if (m < 1)
        throw Error(Errc::invalid_argument, "m must be >= 1");
    double acc = 0.0;
    for (int i = 0; i < m; ++i)
        acc += coeffs[i];
    return acc;
}

double projected_increment(const CoefficientSequence& coeffs, const Stream& stream, std::int64_t j, int m)
{
    require_causal(coeffs);
    return partial_coefficient_sum(coeffs, m) * stream.at(j);
}

double quadratic_variation_path(const CoefficientSequence& coeffs, const Stream& stream, int m, std::int64_t n,
                                double t)
{
    return weighted_quadratic_variation(coeffs, stream, WeightFunction::constant(1.0), m, n, t);
}

double weighted_quadratic_variation(const CoefficientSequence& coeffs, const Stream& stream,
                                    const WeightFunction& g, int m, std::int64_t n, double t)
{
    require_causal(coeffs);
    const std::int64_t last = floor_nt(n, t);
    if (last == 0)
        return 0.0;
    require_cover(stream, 1, last);
    const double a_m = partial_coefficient_sum(coeffs, m);
    double acc = 0.0;
    for (std::int64_t j = 1; j <= last; ++j) {
        const double w = g(static_cast<double>(j) / static_cast<double>(n));
        const double psi = a_m * stream.at(j);
        acc += w * w * psi * psi;
    }
    return acc / static_cast<double>(n);
}

double abel_identity_residual(std::span<const double> g_values, std::span<const double> psi_values)
{
    if (g_values.empty() || g_values.size() != psi_values.size())
        throw Error(Errc::invalid_argument, "Abel identity needs two nonempty sequences of equal length");
    const std::size_t len = g_values.size();
    double lhs = 0.0;
    double rhs = 0.0;
    double u = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
        lhs += g_values[j] * psi_values[j];
        u += psi_values[j];
        if (j + 1 < len)
            rhs += (g_values[j] - g_values[j + 1]) * u;
    }
    rhs += g_values[len - 1] * u;
    return std::abs(lhs - rhs);
}

double weighted_partial_sum(const ProcessPath& path, const WeightFunction& g, double t)
{
    const std::int64_t last = floor_nt(path.n, t);
    double acc = 0.0;
    for (std::int64_t i = 1; i <= last; ++i)
        acc += g(static_cast<double>(i) / static_cast<double>(path.n)) * path.x[static_cast<std::size_t>(i - 1)];
    return acc / std::sqrt(static_cast<double>(path.n));
}

double weighted_partial_sum(const CoefficientSequence& coeffs, const Stream& stream, const WeightFunction& g,
                            std::int64_t n, double t)
{
    return weighted_partial_sum(filter(coeffs, stream, n), g, t);
}

double condition15_check(const CoefficientSequence& coeffs, std::int64_t truncation, double sigma)
{
    if (!(sigma > 0.0))
        throw Error(Errc::invalid_argument, "sigma must be positive");
    return sigma * std::sqrt(causal_square_tail(coeffs, truncation));
}

}  // namespace shortmem
