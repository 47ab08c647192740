#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace shortmem {

enum class InnovationKind {
    gaussian,               // N(0, sigma^2)
    uniform,                // U(-h, h)
    exponential,            // Exp(rate) - 1/rate
    martingale_difference,  // eps_k * sign(eps_{k-1}), eps iid N(0,1)
    bm_coupled,             // N(0,1) increments of a Brownian grid of resolution n
};

const char* innovation_kind_name(InnovationKind kind) noexcept;
InnovationKind innovation_kind_from_name(const std::string& name);

struct InnovationDescriptor {
    InnovationKind kind = InnovationKind::gaussian;
    double param = 1.0;  // sigma, half-width or rate; unused for the last two kinds
};

// Counter-based innovation stream. The value at index k is a pure function of
// (descriptor, seed, k), so any two ranges agree wherever they overlap.
class InnovationModel {
public:
    // `n` is the grid resolution for bm_coupled and ignored otherwise.
    InnovationModel(InnovationDescriptor desc, std::uint64_t seed, std::int64_t n = 0);

    static InnovationModel gaussian(double sigma, std::uint64_t seed);
    static InnovationModel bm_coupled(std::int64_t n, std::uint64_t seed);

    const InnovationDescriptor& descriptor() const noexcept { return desc_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::int64_t grid_size() const noexcept { return n_; }
    bool coupled() const noexcept { return desc_.kind == InnovationKind::bm_coupled; }

    // xi_k. For bm_coupled, k must lie in 1..n.
    double value(std::int64_t k) const;
    // Like value(), except bm_coupled indices outside 1..n are drawn from an
    // independent auxiliary N(0,1) stream so a two-sided filter can run.
    double value_or_auxiliary(std::int64_t k) const;

    double variance() const noexcept;
    double mean_abs() const noexcept;

private:
    InnovationDescriptor desc_;
    std::uint64_t seed_;
    std::int64_t n_;
};

// Uniform on (0, 1), 53-bit resolution, never 0 or 1.
double uniform_at(std::uint64_t seed, std::uint32_t stream, std::int64_t k) noexcept;
// Standard Gaussian via Box-Muller on one Philox block.
double gaussian_at(std::uint64_t seed, std::uint32_t stream, std::int64_t k) noexcept;

// xi_first .. xi_last inclusive.
std::vector<double> sample_stream(const InnovationModel& model, std::int64_t first, std::int64_t last);

// A materialized stretch of innovations indexed from `first`.
struct Stream {
    std::int64_t first = 0;
    std::vector<double> values;

    std::int64_t last() const noexcept { return first + static_cast<std::int64_t>(values.size()) - 1; }
    bool covers(std::int64_t lo, std::int64_t hi) const noexcept { return lo >= first && hi <= last(); }
    double at(std::int64_t k) const;
};

Stream materialize(const InnovationModel& model, std::int64_t first, std::int64_t last);

struct BrownianGrid {
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    std::vector<double> w;  // W(k/n), k = 0..n

    // Same generating Gaussians as InnovationModel::bm_coupled(n, seed):
    // W(j/n) = (z_1 + ... + z_j) / sqrt(n), summed in index order.
};

BrownianGrid brownian_grid(std::uint64_t seed, std::int64_t n);

// Pure function of its arguments; gives every (n, replicate) cell its own seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept;

// max_j |xi_j| / b_n
double max_abs(std::span<const double> stream, double b_n);

}  // namespace shortmem
