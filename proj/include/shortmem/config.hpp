#pragma once

#include "shortmem/coefficients.hpp"
#include "shortmem/innovations.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shortmem {

struct Tolerances {
    double tail = 1e-10;        // tol.tail: certified l1 mass allowed beyond the window
    double identity = 1e-10;    // tol.identity: relative residual for exact identities
    double sigma = 3.0;         // tol.sigma: standard errors allowed in Monte Carlo checks
    double quadrature = 1e-8;   // tol.quadrature: absolute residual for quadrature identities
};

struct CoefficientSpec {
    std::string kind = "identity";  // identity, finite, or a DecayKind name
    double param = 0.0;             // rho, beta or r_max
    std::vector<double> values;     // finite: a_0, a_1, ...
    std::optional<std::int64_t> window;
};

struct SimConfig {
    CoefficientSpec coeffs;
    InnovationDescriptor model;
    std::vector<std::int64_t> grid;
    int replicates = 1;
    std::vector<double> p_list{1.0, 2.0};
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    int m = 2;
    std::string weight = "linear";
    Tolerances tol;
};

// Line-oriented "key = value" text. '#' starts a comment, "[section]" prefixes
// the keys that follow with "section.". Lists are comma separated.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::string& path);

// Inverse of parse_config; every number is written in shortest round-trip form.
std::string format_config(const SimConfig& config);

// Window from coeffs.window, or the smallest one certified by tol.tail.
CoefficientSequence build_coefficients(const SimConfig& config);

// Shortest decimal string that parses back to the same double.
std::string format_number(double value);
std::string format_number(std::int64_t value);
std::string format_number(std::uint64_t value);

}  // namespace shortmem
