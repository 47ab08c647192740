#include "shortmem/coefficients.hpp"

#include "shortmem/error.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <utility>

namespace shortmem {

namespace {

constexpr int kMaxBlockLevel = 30;  // 4^31 still fits in 63 bits

void require_ratio(double rho)
{
    if (!(rho > 0.0 && rho < 1.0))
        throw Error(Errc::invalid_argument, "geometric ratio must lie in (0, 1)");
}

void require_window(std::int64_t w)
{
    if (w < 0)
        throw Error(Errc::invalid_argument, "coefficient window must be non-negative");
}

double polynomial_tail(double beta, std::int64_t m)
{
    // sum_{j>m} j^-beta <= integral_m^inf x^-beta dx, and zeta(beta) <= beta/(beta-1) at m = 0
    if (m == 0)
        return beta / (beta - 1.0);
    return std::pow(static_cast<double>(m), 1.0 - beta) / (beta - 1.0);
}

}  // namespace

const char* decay_kind_name(DecayKind kind) noexcept
{
    switch (kind) {
    case DecayKind::finite_support: return "finite";
    case DecayKind::geometric: return "geometric";
    case DecayKind::causal_geometric: return "causal-geometric";
    case DecayKind::polynomial: return "polynomial";
    case DecayKind::prop10_blocks: return "prop10";
    }
    return "unknown";
}

DecayKind decay_kind_from_name(const std::string& name)
{
    if (name == "finite") return DecayKind::finite_support;
    if (name == "geometric") return DecayKind::geometric;
    if (name == "causal-geometric") return DecayKind::causal_geometric;
    if (name == "polynomial") return DecayKind::polynomial;
    if (name == "prop10") return DecayKind::prop10_blocks;
    throw Error(Errc::invalid_argument, "unknown coefficient kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// Prop10Blocks

Prop10Blocks::Prop10Blocks(int r_max) : r_max_(r_max)
{
    if (r_max < 1)
        throw Error(Errc::invalid_argument, "r_max must be at least 1");
    if (r_max > kMaxBlockLevel)
        throw Error(Errc::capacity, "r_max too large for 64-bit block indices");
}

std::uint64_t Prop10Blocks::block_start(int r)
{
    if (r < 0 || r > kMaxBlockLevel + 1)
        throw Error(Errc::out_of_range, "block level out of range");
    return std::uint64_t{1} << (2 * r);
}

double Prop10Blocks::level(int r)
{
    if (r < 1)
        throw Error(Errc::out_of_range, "block level must be >= 1");
    const double r4 = std::pow(static_cast<double>(r), 4);
    return 1.0 / std::ldexp(3.0 * r4, r);
}

int Prop10Blocks::block_of(std::uint64_t j) const noexcept
{
    for (int r = 1; r <= r_max_; ++r) {
        const std::uint64_t lo = std::uint64_t{1} << (2 * r);
        const std::uint64_t hi = lo << 2;
        if (j > lo && j <= hi)
            return r;
    }
    return 0;
}

double Prop10Blocks::coefficient(std::int64_t j) const noexcept
{
    if (j <= 0)
        return 0.0;
    const int r = block_of(static_cast<std::uint64_t>(j));
    return r == 0 ? 0.0 : level(r);
}

double Prop10Blocks::sum_of_squares(std::uint64_t first, std::uint64_t last) const
{
    if (last < first)
        return 0.0;
    long double acc = 0.0L;
    for (int r = 1; r <= r_max_; ++r) {
        const std::uint64_t lo = block_start(r) + 1;
        const std::uint64_t hi = block_start(r + 1);
        const std::uint64_t a = std::max(lo, first);
        const std::uint64_t b = std::min(hi, last);
        if (a > b)
            continue;
        const long double u = level(r);
        acc += static_cast<long double>(b - a + 1) * u * u;
    }
    return static_cast<double>(acc);
}

// ---------------------------------------------------------------------------
// CoefficientSequence

CoefficientSequence::CoefficientSequence(DecayDescriptor desc, std::int64_t window, std::int64_t lo,
                                         std::vector<double> values, double tail)
    : desc_(desc),
      window_(window),
      lo_(lo),
      hi_(lo + static_cast<std::int64_t>(values.size()) - 1),
      values_(std::move(values)),
      tail_(tail)
{
    if (values_.empty())
        throw Error(Errc::invalid_argument, "coefficient sequence needs at least one stored value");
    for (double v : values_)
        if (!std::isfinite(v))
            throw Error(Errc::invalid_argument, "coefficients must be finite");
}

CoefficientSequence CoefficientSequence::identity()
{
    return finite(0, {1.0});
}

CoefficientSequence CoefficientSequence::finite(std::int64_t first_index, std::vector<double> values)
{
    if (values.size() > kDefaultIndexCapacity)
        throw Error(Errc::capacity, "finite coefficient list exceeds index capacity");
    const auto count = static_cast<std::int64_t>(values.size());
    return {DecayDescriptor{DecayKind::finite_support, 0.0}, first_index + count - 1, first_index,
            std::move(values), 0.0};
}

CoefficientSequence CoefficientSequence::geometric(double rho, std::int64_t half_width)
{
    require_ratio(rho);
    require_window(half_width);
    if (static_cast<std::uint64_t>(2 * half_width + 1) > kDefaultIndexCapacity)
        throw Error(Errc::capacity, "geometric window exceeds index capacity");
    std::vector<double> v(static_cast<std::size_t>(2 * half_width + 1));
    for (std::int64_t j = -half_width; j <= half_width; ++j)
        v[static_cast<std::size_t>(j + half_width)] = std::pow(rho, static_cast<double>(std::llabs(j)));
    const double tail = 2.0 * std::pow(rho, static_cast<double>(half_width + 1)) / (1.0 - rho);
    return {DecayDescriptor{DecayKind::geometric, rho}, half_width, -half_width, std::move(v), tail};
}

CoefficientSequence CoefficientSequence::causal_geometric(double rho, std::int64_t last_index)
{
    require_ratio(rho);
    require_window(last_index);
    if (static_cast<std::uint64_t>(last_index + 1) > kDefaultIndexCapacity)
        throw Error(Errc::capacity, "geometric window exceeds index capacity");
    std::vector<double> v(static_cast<std::size_t>(last_index + 1));
    for (std::int64_t j = 0; j <= last_index; ++j)
        v[static_cast<std::size_t>(j)] = std::pow(rho, static_cast<double>(j));
    const double tail = std::pow(rho, static_cast<double>(last_index + 1)) / (1.0 - rho);
    return {DecayDescriptor{DecayKind::causal_geometric, rho}, last_index, 0, std::move(v), tail};
}

CoefficientSequence CoefficientSequence::polynomial(double beta, std::int64_t last_index)
{
    if (!(beta > 1.0))
        throw Error(Errc::invalid_argument, "polynomial exponent must exceed 1");
    require_window(last_index);
    if (static_cast<std::uint64_t>(last_index + 1) > kDefaultIndexCapacity)
        throw Error(Errc::capacity, "polynomial window exceeds index capacity");
    std::vector<double> v(static_cast<std::size_t>(last_index + 1));
    v[0] = 1.0;
    for (std::int64_t j = 1; j <= last_index; ++j)
        v[static_cast<std::size_t>(j)] = std::pow(static_cast<double>(j), -beta);
    return {DecayDescriptor{DecayKind::polynomial, beta}, last_index, 0, std::move(v),
            polynomial_tail(beta, last_index)};
}

std::int64_t CoefficientSequence::auto_window(const DecayDescriptor& desc, double eps_tail,
                                              std::size_t capacity)
{
    if (!(eps_tail > 0.0))
        throw Error(Errc::invalid_argument, "tail tolerance must be positive");
    const auto fail = [&] {
        return Error(Errc::capacity, std::string("tail tolerance unachievable for ") +
                                         decay_kind_name(desc.kind) + " coefficients within capacity");
    };
    switch (desc.kind) {
    case DecayKind::finite_support:
        throw Error(Errc::invalid_argument, "finite coefficients carry their own window");
    case DecayKind::prop10_blocks: {
        const Prop10Blocks blocks(static_cast<int>(desc.param));
        if (blocks.support_end() + 1 > capacity)
            throw fail();
        return static_cast<std::int64_t>(blocks.support_end());
    }
    case DecayKind::geometric:
    case DecayKind::causal_geometric: {
        require_ratio(desc.param);
        const double scale = (desc.kind == DecayKind::geometric ? 2.0 : 1.0) / (1.0 - desc.param);
        std::int64_t w = 0;
        while (scale * std::pow(desc.param, static_cast<double>(w + 1)) >= eps_tail) {
            ++w;
            const std::uint64_t stored = desc.kind == DecayKind::geometric ? 2 * w + 1 : w + 1;
            if (stored > capacity)
                throw fail();
        }
        return w;
    }
    case DecayKind::polynomial: {
        const double beta = desc.param;
        if (!(beta > 1.0))
            throw Error(Errc::invalid_argument, "polynomial exponent must exceed 1");
        const double guess = std::pow(eps_tail * (beta - 1.0), -1.0 / (beta - 1.0));
        if (!(guess < static_cast<double>(capacity)))
            throw fail();
        auto w = static_cast<std::int64_t>(std::floor(guess));
        while (polynomial_tail(beta, w) >= eps_tail)
            ++w;
        if (static_cast<std::uint64_t>(w + 1) > capacity)
            throw fail();
        return w;
    }
    }
    throw Error(Errc::invalid_argument, "unknown coefficient kind");
}

CoefficientSequence CoefficientSequence::from_descriptor(const DecayDescriptor& desc, std::int64_t window)
{
    switch (desc.kind) {
    case DecayKind::geometric: return geometric(desc.param, window);
    case DecayKind::causal_geometric: return causal_geometric(desc.param, window);
    case DecayKind::polynomial: return polynomial(desc.param, window);
    case DecayKind::prop10_blocks: {
        const double r = desc.param;
        if (r != std::floor(r) || r < 1.0 || r > kMaxBlockLevel)
            throw Error(Errc::invalid_argument, "r_max must be a positive integer");
        return build_prop10(static_cast<int>(r));
    }
    case DecayKind::finite_support: break;
    }
    throw Error(Errc::invalid_argument, "finite coefficients cannot be rebuilt from a descriptor");
}

double CoefficientSequence::l1_norm() const
{
    double acc = 0.0;
    for (std::int64_t j : canonical_order(*this))
        acc += std::abs((*this)[j]);
    return acc + tail_;
}

CoefficientSequence CoefficientSequence::combine(double alpha, const CoefficientSequence& a, double beta,
                                                 const CoefficientSequence& b)
{
    const std::int64_t lo = std::min(a.lo(), b.lo());
    const std::int64_t hi = std::max(a.hi(), b.hi());
    std::vector<double> v(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t j = lo; j <= hi; ++j)
        v[static_cast<std::size_t>(j - lo)] = alpha * a[j] + beta * b[j];
    CoefficientSequence out = finite(lo, std::move(v));
    out.tail_ = std::abs(alpha) * a.tail_ + std::abs(beta) * b.tail_;
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::int64_t> canonical_order(const CoefficientSequence& coeffs)
{
    std::vector<std::int64_t> order;
    order.reserve(coeffs.size());
    const std::int64_t reach = std::max(std::llabs(coeffs.lo()), std::llabs(coeffs.hi()));
    for (std::int64_t d = 0; d <= reach; ++d) {
        if (d == 0) {
            if (coeffs.lo() <= 0 && coeffs.hi() >= 0)
                order.push_back(0);
            continue;
        }
        if (-d >= coeffs.lo() && -d <= coeffs.hi())
            order.push_back(-d);
        if (d >= coeffs.lo() && d <= coeffs.hi())
            order.push_back(d);
    }
    return order;
}

TotalSum total_sum(const CoefficientSequence& coeffs)
{
    double stored = 0.0;
    for (std::int64_t j : canonical_order(coeffs))
        stored += coeffs[j];

    const double tail = coeffs.tail_beyond_window();
    switch (coeffs.descriptor().kind) {
    case DecayKind::geometric:
    case DecayKind::causal_geometric: {
        // all omitted terms are positive, so the signed tail equals the mass
        const double v = stored + tail;
        return {v, v, v, true};
    }
    case DecayKind::polynomial:
        return {stored, stored - tail, stored + tail, false};
    case DecayKind::finite_support:
    case DecayKind::prop10_blocks:
        break;
    }
    if (tail > 0.0)
        return {stored, stored - tail, stored + tail, false};
    return {stored, stored, stored, true};
}

double tail_mass(const CoefficientSequence& coeffs, std::int64_t m)
{
    if (m < 0)
        throw Error(Errc::invalid_argument, "tail window half-width must be non-negative");
    const DecayDescriptor& d = coeffs.descriptor();
    switch (d.kind) {
    case DecayKind::geometric:
        return 2.0 * std::pow(d.param, static_cast<double>(m + 1)) / (1.0 - d.param);
    case DecayKind::causal_geometric:
        return std::pow(d.param, static_cast<double>(m + 1)) / (1.0 - d.param);
    case DecayKind::polynomial:
        if (m >= coeffs.hi())
            return polynomial_tail(d.param, m);
        break;
    case DecayKind::finite_support:
    case DecayKind::prop10_blocks:
        break;
    }
    double acc = 0.0;
    for (std::int64_t j : canonical_order(coeffs))
        if (std::llabs(j) > m)
            acc += std::abs(coeffs[j]);
    return acc + coeffs.tail_beyond_window();
}

double causal_square_tail(const CoefficientSequence& coeffs, std::int64_t m)
{
    if (!coeffs.causal())
        throw Error(Errc::invalid_argument, "square tail requires causal coefficients");
    if (m < 0)
        m = 0;
    long double acc = 0.0L;
    for (std::int64_t i = std::max<std::int64_t>(m, coeffs.lo()); i <= coeffs.hi(); ++i)
        acc += static_cast<long double>(coeffs[i]) * coeffs[i];
    const DecayDescriptor& d = coeffs.descriptor();
    if (d.kind == DecayKind::causal_geometric) {
        const double rho2 = d.param * d.param;
        const std::int64_t from = std::max(m, coeffs.hi() + 1);
        acc += std::pow(rho2, static_cast<double>(from)) / (1.0 - rho2);
    }
    return static_cast<double>(acc);
}

double autocovariance(const CoefficientSequence& coeffs, double sigma2, std::int64_t h)
{
    if (!(sigma2 > 0.0))
        throw Error(Errc::invalid_argument, "innovation variance must be positive");
    const std::int64_t lag = std::llabs(h);
    if (lag > coeffs.hi() - coeffs.lo())
        return 0.0;
    const auto v = coeffs.values();
    const auto count = static_cast<std::size_t>(coeffs.hi() - coeffs.lo() - lag + 1);
    const auto shift = static_cast<std::size_t>(lag);
    long double acc = 0.0L;
    for (std::size_t k = 0; k < count; ++k)
        acc += static_cast<long double>(v[k]) * v[k + shift];
    return sigma2 * static_cast<double>(acc);
}

CoefficientSequence build_prop10(int r_max, std::size_t capacity)
{
    const Prop10Blocks blocks(r_max);
    const std::uint64_t end = blocks.support_end();
    if (end + 1 > capacity)
        throw Error(Errc::capacity, "prop10 support n_{r_max+1} = " + std::to_string(end) +
                                        " exceeds index capacity " + std::to_string(capacity));
    std::vector<double> v(static_cast<std::size_t>(end + 1), 0.0);
    for (int r = 1; r <= r_max; ++r) {
        const double u = Prop10Blocks::level(r);
        for (std::uint64_t j = Prop10Blocks::block_start(r) + 1; j <= Prop10Blocks::block_start(r + 1); ++j)
            v[static_cast<std::size_t>(j)] = u;
    }
    return {DecayDescriptor{DecayKind::prop10_blocks, static_cast<double>(r_max)},
            static_cast<std::int64_t>(end), 0, std::move(v), 0.0};
}

}  // namespace shortmem
