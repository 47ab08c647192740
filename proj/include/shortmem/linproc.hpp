#pragma once

#include "shortmem/coefficients.hpp"
#include "shortmem/innovations.hpp"

#include <cstdint>
#include <optional>

namespace shortmem {

struct FilterOptions {
    double eps_tail = 1e-10;
    std::optional<double> b_n;  // defaults to sqrt(n)
    std::size_t capacity = std::size_t{1} << 27;  // stored innovations per path
};

struct ProcessPath {
    std::int64_t n = 0;
    std::vector<double> x;                   // X_1..X_n at offsets 0..n-1
    std::vector<double> partial;             // S_0..S_n
    std::vector<double> innovation_partial;  // S^(xi)_0..S^(xi)_n
    double b_n = 1.0;
    double truncation_error = 0.0;  // tail beyond window times E|xi_0|

    DecayDescriptor coeffs;
    std::optional<InnovationDescriptor> model;
    std::optional<std::uint64_t> seed;
};

// X_k = sum_{j=lo}^{hi} a_j xi_{k-j}, k = 1..n. Needs innovations on [1-hi, n-lo].
ProcessPath filter(const CoefficientSequence& coeffs, const InnovationModel& model, std::int64_t n,
                   const FilterOptions& opts = {});
ProcessPath filter(const CoefficientSequence& coeffs, const Stream& stream, std::int64_t n,
                   const FilterOptions& opts = {});

// S_floor(nt) / b_n
double partial_sum_path(const ProcessPath& path, double t);

// max_j |S_j - A S_j^(xi)| / b_n
double coupling_stat(const ProcessPath& path, double total);
double lp_coupling_stat(const ProcessPath& path, double total, double p);

// max_{0<=j<=n} |S_j/sqrt(n) - A W(j/n)|; the grid max is the exact sup for
// piecewise-constant paths on {j/n}.
double sup_bm_distance(const ProcessPath& path, double total, const BrownianGrid& grid);

struct TruncationCheck {
    double mean_gap = 0.0;   // Monte Carlo mean of sup_t |psi - psi_m|
    double gap_se = 0.0;
    double sup_u_mean = 0.0; // empirical sup_j E ||U_j||
    double bound = 0.0;      // 2 * tail_mass(m) * sup_u_mean
    bool pass = false;       // mean_gap <= bound + sigmas * gap_se
};

// Replicates use seeds derived from `seed`; b_n = sqrt(n).
TruncationCheck lemma2_truncation_check(const CoefficientSequence& coeffs, const InnovationDescriptor& model,
                                        std::uint64_t seed, std::int64_t n, std::int64_t m, int replicates,
                                        double sigmas = 3.0);

}  // namespace shortmem
