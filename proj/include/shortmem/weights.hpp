#pragma once

#include <string>
#include <utility>
#include <vector>

namespace shortmem {

// Weight g on [0, 1] for the weighted partial sums. The Lipschitz constant is
// declared metadata only.
class WeightFunction {
public:
    enum class Kind { constant, linear, piecewise_linear };

    static WeightFunction constant(double c);
    static WeightFunction linear();  // g(x) = x
    // Knots (x_i, y_i) with strictly increasing x covering [0, 1].
    static WeightFunction piecewise_linear(std::vector<std::pair<double, double>> knots);

    // "zero", "one", "constant:<c>", "linear", "piecewise:<x>:<y>;<x>:<y>;..."
    static WeightFunction from_name(const std::string& spec);

    double operator()(double x) const;
    // int_0^t g(x)^2 dx in closed form.
    double integral_of_square(double t) const;

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    double lipschitz() const noexcept { return lipschitz_; }

private:
    WeightFunction(Kind kind, std::string name, double lipschitz, std::vector<std::pair<double, double>> knots);

    Kind kind_;
    std::string name_;
    double lipschitz_;
    std::vector<std::pair<double, double>> knots_;  // constant: single (0, c)
};

}  // namespace shortmem
