#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace shortmem {

// Largest number of stored coefficients any sequence may hold.
inline constexpr std::size_t kDefaultIndexCapacity = std::size_t{1} << 24;

enum class DecayKind {
    finite_support,    // explicit values, zero outside the stored window
    geometric,         // a_j = rho^|j|, j in Z
    causal_geometric,  // a_j = rho^j, j >= 0
    polynomial,        // a_0 = 1, a_j = j^-beta for j >= 1
    prop10_blocks,     // block-constant counterexample sequence, param = r_max
};

const char* decay_kind_name(DecayKind kind) noexcept;
DecayKind decay_kind_from_name(const std::string& name);

struct DecayDescriptor {
    DecayKind kind = DecayKind::finite_support;
    double param = 0.0;  // rho, beta or r_max depending on kind
};

// Block structure of the counterexample sequence: n_r = 4^r, and the
// coefficient equals u_r = 1/(3 r^4 2^r) on (n_r, n_{r+1}]. Everything here is
// closed form so it works for r_max far beyond what can be materialized.
class Prop10Blocks {
public:
    explicit Prop10Blocks(int r_max);

    int r_max() const noexcept { return r_max_; }
    static std::uint64_t block_start(int r);  // n_r
    static double level(int r);               // u_r
    // Last index with a nonzero coefficient, n_{r_max+1}.
    std::uint64_t support_end() const { return block_start(r_max_ + 1); }
    // Block containing j, or 0 when t_j = 0.
    int block_of(std::uint64_t j) const noexcept;
    double coefficient(std::int64_t j) const noexcept;
    // sum of t_j^2 for j in [first, last]
    double sum_of_squares(std::uint64_t first, std::uint64_t last) const;

private:
    int r_max_;
};

// A two-sided absolutely summable coefficient family (a_j), stored exactly on
// the window [lo, hi], with a certified bound on the l1 mass outside it.
class CoefficientSequence {
public:
    static CoefficientSequence identity();
    static CoefficientSequence finite(std::int64_t first_index, std::vector<double> values);
    static CoefficientSequence geometric(double rho, std::int64_t half_width);
    static CoefficientSequence causal_geometric(double rho, std::int64_t last_index);
    static CoefficientSequence polynomial(double beta, std::int64_t last_index);

    // Smallest window whose certified tail is below eps_tail; throws when that
    // needs more than `capacity` stored values.
    static std::int64_t auto_window(const DecayDescriptor& desc, double eps_tail,
                                    std::size_t capacity = kDefaultIndexCapacity);
    static CoefficientSequence from_descriptor(const DecayDescriptor& desc, std::int64_t window);

    std::int64_t lo() const noexcept { return lo_; }
    std::int64_t hi() const noexcept { return hi_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    const DecayDescriptor& descriptor() const noexcept { return desc_; }
    // Window parameter this sequence was built from (half-width or last index).
    std::int64_t window() const noexcept { return window_; }

    double operator[](std::int64_t j) const noexcept
    {
        return (j < lo_ || j > hi_) ? 0.0 : values_[static_cast<std::size_t>(j - lo_)];
    }

    bool causal() const noexcept { return lo_ >= 0; }
    double tail_beyond_window() const noexcept { return tail_; }
    // Stored absolute sum (canonical order) plus the certified tail.
    double l1_norm() const;

    // Pointwise alpha*a + beta*b over the union of the windows (finite support result).
    static CoefficientSequence combine(double alpha, const CoefficientSequence& a, double beta,
                                       const CoefficientSequence& b);

private:
    friend CoefficientSequence build_prop10(int r_max, std::size_t capacity);

    CoefficientSequence(DecayDescriptor desc, std::int64_t window, std::int64_t lo,
                        std::vector<double> values, double tail);

    DecayDescriptor desc_;
    std::int64_t window_;
    std::int64_t lo_;
    std::int64_t hi_;
    std::vector<double> values_;
    double tail_;
};

// Indices of the stored window in the fixed summation order: ascending |j|,
// negative index first at equal |j|.
std::vector<std::int64_t> canonical_order(const CoefficientSequence& coeffs);

struct TotalSum {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool exact_tail = true;  // false when only an interval is known
};

TotalSum total_sum(const CoefficientSequence& coeffs);

// l1 mass of {a_j : |j| > m} of the underlying (untruncated) sequence. Exact
// for finite support and the block sequence, closed form for geometric decay,
// an upper bound for polynomial decay.
double tail_mass(const CoefficientSequence& coeffs, std::int64_t m);

// Sum of a_j^2 over j >= m for a causal sequence, including the closed-form
// geometric tail beyond the window where one exists.
double causal_square_tail(const CoefficientSequence& coeffs, std::int64_t m);

// gamma(h) = sigma2 * sum_k a_k a_{k+h}; computed on |h| so it is exactly even.
double autocovariance(const CoefficientSequence& coeffs, double sigma2, std::int64_t h);

CoefficientSequence build_prop10(int r_max, std::size_t capacity = kDefaultIndexCapacity);

}  // namespace shortmem
