#include "shortmem/linproc.hpp"

#include "shortmem/error.hpp"

#include <algorithm>
#include <cmath>

namespace shortmem {

namespace {

void check_tail(const CoefficientSequence& coeffs, const FilterOptions& opts)
{
    if (!(coeffs.tail_beyond_window() < opts.eps_tail) && coeffs.tail_beyond_window() > 0.0)
        throw Error(Errc::capacity, std::string("certified tail of ") + decay_kind_name(coeffs.descriptor().kind) +
                                        " coefficients exceeds tolerance; widen the window");
}

std::int64_t required_length(const CoefficientSequence& coeffs, std::int64_t n, const FilterOptions& opts)
{
    if (n < 1)
        throw Error(Errc::invalid_argument, "path length n must be >= 1");
    const std::int64_t len = n + coeffs.hi() - coeffs.lo();
    if (static_cast<std::uint64_t>(len) > opts.capacity)
        throw Error(Errc::capacity, "filter window capacity exceeded");
    return len;
}

ProcessPath convolve(const CoefficientSequence& coeffs, const Stream& xi, std::int64_t n, double b_n)
{
    ProcessPath path;
    path.n = n;
    path.b_n = b_n;
    path.coeffs = coeffs.descriptor();
    path.x.assign(static_cast<std::size_t>(n), 0.0);
    path.partial.assign(static_cast<std::size_t>(n + 1), 0.0);
    path.innovation_partial.assign(static_cast<std::size_t>(n + 1), 0.0);

    const auto a = coeffs.values();
    const std::int64_t lo = coeffs.lo();
    for (std::int64_t k = 1; k <= n; ++k) {
        // xi_{k-j} for j = lo..hi lives at stream offset (k - j) - first
        double acc = 0.0;
        for (std::size_t idx = 0; idx < a.size(); ++idx) {
            if (a[idx] == 0.0)
                continue;
            const std::int64_t j = lo + static_cast<std::int64_t>(idx);
            acc += a[idx] * xi.values[static_cast<std::size_t>(k - j - xi.first)];
        }
        path.x[static_cast<std::size_t>(k - 1)] = acc;
    }
    double s = 0.0;
    double s_xi = 0.0;
    for (std::int64_t k = 1; k <= n; ++k) {
        s += path.x[static_cast<std::size_t>(k - 1)];
        s_xi += xi.values[static_cast<std::size_t>(k - xi.first)];
        path.partial[static_cast<std::size_t>(k)] = s;
        path.innovation_partial[static_cast<std::size_t>(k)] = s_xi;
    }
    return path;
}

double resolve_bn(std::int64_t n, const FilterOptions& opts)
{
    const double b_n = opts.b_n.value_or(std::sqrt(static_cast<double>(n)));
    if (!(b_n > 0.0))
        throw Error(Errc::invalid_argument, "normalization b_n must be positive");
    return b_n;
}

}  // namespace

ProcessPath filter(const CoefficientSequence& coeffs, const InnovationModel& model, std::int64_t n,
                   const FilterOptions& opts)
{
    check_tail(coeffs, opts);
    required_length(coeffs, n, opts);
    const double b_n = resolve_bn(n, opts);
    if (model.coupled() && model.grid_size() != n)
        throw Error(Errc::invalid_argument, "bm-coupled model resolution does not match path length");
    const Stream xi = materialize(model, 1 - coeffs.hi(), n - coeffs.lo());
    ProcessPath path = convolve(coeffs, xi, n, b_n);
    path.truncation_error = coeffs.tail_beyond_window() * model.mean_abs();
    path.model = model.descriptor();
    path.seed = model.seed();
    return path;
}

ProcessPath filter(const CoefficientSequence& coeffs, const Stream& stream, std::int64_t n,
                   const FilterOptions& opts)
{
    check_tail(coeffs, opts);
    required_length(coeffs, n, opts);
    const double b_n = resolve_bn(n, opts);
    if (!stream.covers(1 - coeffs.hi(), n - coeffs.lo()))
        throw Error(Errc::out_of_range, "stream does not cover the filter's input range");
    ProcessPath path = convolve(coeffs, stream, n, b_n);
    double mean_abs = 0.0;
    for (double v : stream.values)
        mean_abs += std::abs(v);
    mean_abs /= static_cast<double>(stream.values.size());
    path.truncation_error = coeffs.tail_beyond_window() * mean_abs;
    return path;
}

double partial_sum_path(const ProcessPath& path, double t)
{
    if (!(t >= 0.0 && t <= 1.0))
        throw Error(Errc::invalid_argument, "t must lie in [0, 1]");
    const auto j = static_cast<std::size_t>(std::floor(static_cast<double>(path.n) * t));
    return path.partial[j] / path.b_n;
}

double coupling_stat(const ProcessPath& path, double total)
{
    double m = 0.0;
    for (std::size_t j = 1; j < path.partial.size(); ++j)
        m = std::max(m, std::abs(path.partial[j] - total * path.innovation_partial[j]));
    return m / path.b_n;
}

double lp_coupling_stat(const ProcessPath& path, double total, double p)
{
    if (!(p >= 1.0))
        throw Error(Errc::invalid_argument, "p must be >= 1");
    const double c = coupling_stat(path, total);
    return p == 1.0 ? c : std::pow(c, p);
}

double sup_bm_distance(const ProcessPath& path, double total, const BrownianGrid& grid)
{
    if (grid.n != path.n)
        throw Error(Errc::invalid_argument, "path and Brownian grid resolutions differ");
    if (path.model && path.model->kind != InnovationKind::bm_coupled)
        throw Error(Errc::invalid_argument, "sup-BM distance needs a path built on bm-coupled innovations");
    if (path.seed && *path.seed != grid.seed)
        throw Error(Errc::invalid_argument, "path and Brownian grid come from different seeds");
    const double root_n = std::sqrt(static_cast<double>(path.n));
    double m = 0.0;
    for (std::size_t j = 0; j < path.partial.size(); ++j)
        m = std::max(m, std::abs(path.partial[j] / root_n - total * grid.w[j]));
    return m;
}

TruncationCheck lemma2_truncation_check(const CoefficientSequence& coeffs, const InnovationDescriptor& desc,
                                        std::uint64_t seed, std::int64_t n, std::int64_t m, int replicates,
                                        double sigmas)
{
    if (n < 1 || m < 0 || replicates < 1)
        throw Error(Errc::invalid_argument, "truncation check needs n >= 1, m >= 0, replicates >= 1");
    const double b_n = std::sqrt(static_cast<double>(n));
    const std::int64_t lo = coeffs.lo();
    const std::int64_t hi = coeffs.hi();
    const auto width = static_cast<std::size_t>(hi - lo + 1);

    std::vector<double> gaps(static_cast<std::size_t>(replicates));
    std::vector<double> u_norm_sum(width, 0.0);

    for (int r = 0; r < replicates; ++r) {
        const InnovationModel model(desc, derive_seed(seed, static_cast<std::uint64_t>(n),
                                                      static_cast<std::uint64_t>(r)),
                                    n);
        const Stream xi = materialize(model, 1 - hi, n - lo);
        const auto at = [&](std::int64_t k) { return xi.values[static_cast<std::size_t>(k - xi.first)]; };

        // psi - psi_m at l is the sum over |j| > m of a_j (xi_{1-j} + ... + xi_{l-j}) / b_n
        double gap = 0.0;
        double sup_gap = 0.0;
        for (std::int64_t l = 1; l <= n; ++l) {
            double incr = 0.0;
            for (std::int64_t j = lo; j <= hi; ++j)
                if (std::llabs(j) > m && coeffs[j] != 0.0)
                    incr += coeffs[j] * at(l - j);
            gap += incr;
            sup_gap = std::max(sup_gap, std::abs(gap));
        }
        gaps[static_cast<std::size_t>(r)] = sup_gap / b_n;

        for (std::int64_t j = lo; j <= hi; ++j) {
            double run = 0.0;
            double sup_u = 0.0;
            for (std::int64_t l = 1; l <= n; ++l) {
                run += at(l - j);
                sup_u = std::max(sup_u, std::abs(run));
            }
            u_norm_sum[static_cast<std::size_t>(j - lo)] += sup_u / b_n;
        }
    }

    TruncationCheck out;
    const auto reps = static_cast<double>(replicates);
    for (double g : gaps)
        out.mean_gap += g;
    out.mean_gap /= reps;
    if (replicates > 1) {
        double ss = 0.0;
        for (double g : gaps)
            ss += (g - out.mean_gap) * (g - out.mean_gap);
        out.gap_se = std::sqrt(ss / (reps - 1.0) / reps);
    }
    for (double u : u_norm_sum)
        out.sup_u_mean = std::max(out.sup_u_mean, u / reps);
    out.bound = 2.0 * tail_mass(coeffs, m) * out.sup_u_mean;
    out.pass = out.mean_gap <= out.bound + sigmas * out.gap_se;
    return out;
}

}  // namespace shortmem
