#include "shortmem/innovations.hpp"

#include "shortmem/error.hpp"
#include "shortmem/philox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shortmem {

namespace {

constexpr std::uint32_t kPrimaryStream = 0;
constexpr std::uint32_t kAuxiliaryStream = 1;

Philox4x32::Counter block_at(std::uint64_t seed, std::uint32_t stream, std::int64_t k) noexcept
{
    const auto idx = static_cast<std::uint64_t>(k);
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32),
                                  stream, 0u};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Philox4x32::apply(ctr, key);
}

double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept
{
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double sign_of(double x) noexcept
{
    return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

}  // namespace

const char* innovation_kind_name(InnovationKind kind) noexcept
{
    switch (kind) {
    case InnovationKind::gaussian: return "gaussian";
    case InnovationKind::uniform: return "uniform";
    case InnovationKind::exponential: return "exponential";
    case InnovationKind::martingale_difference: return "mds";
    case InnovationKind::bm_coupled: return "bm-coupled";
    }
    return "unknown";
}

InnovationKind innovation_kind_from_name(const std::string& name)
{
    if (name == "gaussian") return InnovationKind::gaussian;
    if (name == "uniform") return InnovationKind::uniform;
    if (name == "exponential") return InnovationKind::exponential;
    if (name == "mds") return InnovationKind::martingale_difference;
    if (name == "bm-coupled") return InnovationKind::bm_coupled;
    throw Error(Errc::invalid_argument, "unknown innovation kind '" + name + "'");
}

double uniform_at(std::uint64_t seed, std::uint32_t stream, std::int64_t k) noexcept
{
    const auto b = block_at(seed, stream, k);
    return to_open_unit(b[0], b[1]);
}

double gaussian_at(std::uint64_t seed, std::uint32_t stream, std::int64_t k) noexcept
{
    const auto b = block_at(seed, stream, k);
    const double u1 = to_open_unit(b[0], b[1]);
    const double u2 = to_open_unit(b[2], b[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

InnovationModel::InnovationModel(InnovationDescriptor desc, std::uint64_t seed, std::int64_t n)
    : desc_(desc), seed_(seed), n_(n)
{
    switch (desc_.kind) {
    case InnovationKind::gaussian:
    case InnovationKind::uniform:
    case InnovationKind::exponential:
        if (!(desc_.param > 0.0) || !std::isfinite(desc_.param))
            throw Error(Errc::invalid_argument,
                        std::string(innovation_kind_name(desc_.kind)) + " parameter must be positive");
        break;
    case InnovationKind::bm_coupled:
        if (n_ < 1)
            throw Error(Errc::invalid_argument, "bm-coupled innovations need a grid size n >= 1");
        desc_.param = 1.0;
        break;
    case InnovationKind::martingale_difference:
        desc_.param = 1.0;
        break;
    }
}

InnovationModel InnovationModel::gaussian(double sigma, std::uint64_t seed)
{
    return {{InnovationKind::gaussian, sigma}, seed};
}

InnovationModel InnovationModel::bm_coupled(std::int64_t n, std::uint64_t seed)
{
    return {{InnovationKind::bm_coupled, 1.0}, seed, n};
}

double InnovationModel::value(std::int64_t k) const
{
    switch (desc_.kind) {
    case InnovationKind::gaussian:
        return desc_.param * gaussian_at(seed_, kPrimaryStream, k);
    case InnovationKind::uniform:
        return desc_.param * (2.0 * uniform_at(seed_, kPrimaryStream, k) - 1.0);
    case InnovationKind::exponential: {
        const double rate = desc_.param;
        return -std::log(uniform_at(seed_, kPrimaryStream, k)) / rate - 1.0 / rate;
    }
    case InnovationKind::martingale_difference:
        return gaussian_at(seed_, kPrimaryStream, k) * sign_of(gaussian_at(seed_, kPrimaryStream, k - 1));
    case InnovationKind::bm_coupled:
        if (k < 1 || k > n_)
            throw Error(Errc::out_of_range, "bm-coupled innovations exist only for indices 1..n");
        return gaussian_at(seed_, kPrimaryStream, k);
    }
    return 0.0;
}

double InnovationModel::value_or_auxiliary(std::int64_t k) const
{
    if (coupled() && (k < 1 || k > n_))
        return gaussian_at(seed_, kAuxiliaryStream, k);
    return value(k);
}

double InnovationModel::variance() const noexcept
{
    switch (desc_.kind) {
    case InnovationKind::gaussian: return desc_.param * desc_.param;
    case InnovationKind::uniform: return desc_.param * desc_.param / 3.0;
    case InnovationKind::exponential: return 1.0 / (desc_.param * desc_.param);
    case InnovationKind::martingale_difference:
    case InnovationKind::bm_coupled: return 1.0;
    }
    return 0.0;
}

double InnovationModel::mean_abs() const noexcept
{
    const double gauss = std::sqrt(2.0 / std::numbers::pi);
    switch (desc_.kind) {
    case InnovationKind::gaussian: return desc_.param * gauss;
    case InnovationKind::uniform: return desc_.param / 2.0;
    case InnovationKind::exponential: return 2.0 / (desc_.param * std::numbers::e);
    case InnovationKind::martingale_difference:
    case InnovationKind::bm_coupled: return gauss;
    }
    return 0.0;
}

std::vector<double> sample_stream(const InnovationModel& model, std::int64_t first, std::int64_t last)
{
    if (first > last)
        throw Error(Errc::invalid_argument, "sample range must satisfy first <= last");
    if (model.coupled() && (first < 1 || last > model.grid_size()))
        throw Error(Errc::out_of_range, "bm-coupled innovations exist only for indices 1..n");
    std::vector<double> out(static_cast<std::size_t>(last - first + 1));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = model.value(first + static_cast<std::int64_t>(i));
    return out;
}

double Stream::at(std::int64_t k) const
{
    if (k < first || k > last())
        throw Error(Errc::out_of_range, "stream index " + std::to_string(k) + " outside [" +
                                            std::to_string(first) + ", " + std::to_string(last()) + "]");
    return values[static_cast<std::size_t>(k - first)];
}

Stream materialize(const InnovationModel& model, std::int64_t first, std::int64_t last)
{
    if (first > last)
        throw Error(Errc::invalid_argument, "stream range must satisfy first <= last");
    Stream s{first, std::vector<double>(static_cast<std::size_t>(last - first + 1))};
    for (std::size_t i = 0; i < s.values.size(); ++i)
        s.values[i] = model.value_or_auxiliary(first + static_cast<std::int64_t>(i));
    return s;
}

BrownianGrid brownian_grid(std::uint64_t seed, std::int64_t n)
{
    if (n < 1)
        throw Error(Errc::invalid_argument, "Brownian grid needs n >= 1");
    BrownianGrid g{n, seed, std::vector<double>(static_cast<std::size_t>(n + 1), 0.0)};
    const double root_n = std::sqrt(static_cast<double>(n));
    double running = 0.0;
    for (std::int64_t k = 1; k <= n; ++k) {
        running += gaussian_at(seed, kPrimaryStream, k);
        g.w[static_cast<std::size_t>(k)] = running / root_n;
    }
    return g;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept
{
    return mix64(mix64(mix64(master) ^ a) ^ (b + 0x632BE59BD9B4E019ull));
}

double max_abs(std::span<const double> stream, double b_n)
{
    if (!(b_n > 0.0))
        throw Error(Errc::invalid_argument, "normalization b_n must be positive");
    if (stream.empty())
        throw Error(Errc::invalid_argument, "stream must be nonempty");
    double m = 0.0;
    for (double x : stream)
        m = std::max(m, std::abs(x));
    return m / b_n;
}

}  // namespace shortmem
