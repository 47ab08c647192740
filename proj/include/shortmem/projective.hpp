#pragma once

#include "shortmem/coefficients.hpp"
#include "shortmem/innovations.hpp"
#include "shortmem/linproc.hpp"
#include "shortmem/weights.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace shortmem {

// Everything here assumes iid innovations and the natural filtration
// F_k = sigma(xi_j, j <= k). Conditioning on F_j then amounts to zeroing the
// innovations with index > j, which gives closed forms for every projection.

struct ProjectionComponents {
    std::int64_t k = 0;
    std::int64_t truncation = 0;     // M
    std::vector<double> components;  // c_i = P_{k-i}(X_k) = a_i xi_{k-i}, i = 0..M
    double reconstruction = 0.0;     // sum of components
    double residual_bound = 0.0;     // tail_mass(M) * max |xi| on the stream
};

// M defaults to the last stored coefficient index.
ProjectionComponents project(const CoefficientSequence& coeffs, const Stream& stream, std::int64_t k,
                             std::optional<std::int64_t> truncation = std::nullopt);

struct DoobCheck {
    double empirical = 0.0;  // mean of max_j |sum_{k<=j} a_i xi_{k-i}|^2
    double standard_error = 0.0;
    double bound = 0.0;      // 4 n p_i^2
    bool pass = false;
};

DoobCheck doob_check(const CoefficientSequence& coeffs, const InnovationDescriptor& model, std::uint64_t seed,
                     std::int64_t n, std::int64_t i, int replicates, double sigmas = 3.0);

struct CoboundaryDecomposition {
    int order = 1;                     // m
    std::int64_t n = 0;
    std::vector<double> y;             // Y_0..Y_n
    std::vector<double> theta;         // theta_0..theta_n
    std::vector<double> corrector;     // Q_0..Q_n
    std::vector<double> increments;    // index 0 unused; theta_k - E(theta_k | F_{k-1}) for k = 1..n
    std::vector<double> martingale;    // M_0 = 0, M_1..M_n
    std::vector<double> partial_y;     // S^(Y)_0..S^(Y)_n

    // max_j |S_j^(Y) - M_j - Q_0 + Q_j|
    double identity_residual() const;
    double scale() const;  // max_j |S_j^(Y)|
};

// Needs a causal sequence and innovations on [1 - m, n].
CoboundaryDecomposition coboundary(const CoefficientSequence& coeffs, const Stream& stream, int m, std::int64_t n);

// A_m = a_0 + ... + a_{m-1}
double partial_coefficient_sum(const CoefficientSequence& coeffs, int m);

// P_j(S_{j+m-1} - S_{j-1}) = A_m xi_j
double projected_increment(const CoefficientSequence& coeffs, const Stream& stream, std::int64_t j, int m);

double quadratic_variation_path(const CoefficientSequence& coeffs, const Stream& stream, int m, std::int64_t n,
                                double t);
double weighted_quadratic_variation(const CoefficientSequence& coeffs, const Stream& stream,
                                    const WeightFunction& g, int m, std::int64_t n, double t);

// |LHS - RHS| of sum_j G_j psi_j = G_N U_N + sum_{j<N} (G_j - G_{j+1}) U_j, U the prefix sums of psi.
double abel_identity_residual(std::span<const double> g_values, std::span<const double> psi_values);

// n^{-1/2} sum_{i <= floor(nt)} g(i/n) X_i
double weighted_partial_sum(const ProcessPath& path, const WeightFunction& g, double t);
double weighted_partial_sum(const CoefficientSequence& coeffs, const Stream& stream, const WeightFunction& g,
                            std::int64_t n, double t);

// ||E(X_k | F_{k-M})||_2 = sigma * sqrt(sum_{i >= M} a_i^2)
double condition15_check(const CoefficientSequence& coeffs, std::int64_t truncation, double sigma = 1.0);

}  // namespace shortmem
