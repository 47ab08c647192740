#include "shortmem/weights.hpp"

#include "shortmem/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shortmem {

namespace {

double parse_number(const std::string& text, const std::string& spec)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty() || !std::isfinite(v))
        throw Error(Errc::invalid_argument, "bad number '" + text + "' in weight '" + spec + "'");
    return v;
}

// int_{x0}^{x1} (y0 + s (x - x0))^2 dx
double segment_square_integral(double x0, double y0, double x1, double y1)
{
    const double h = x1 - x0;
    return h * (y0 * y0 + y0 * y1 + y1 * y1) / 3.0;
}

}  // namespace

WeightFunction::WeightFunction(Kind kind, std::string name, double lipschitz,
                               std::vector<std::pair<double, double>> knots)
    : kind_(kind), name_(std::move(name)), lipschitz_(lipschitz), knots_(std::move(knots))
{
}

WeightFunction WeightFunction::constant(double c)
{
    std::ostringstream os;
    os << "constant:" << c;
    return {Kind::constant, os.str(), 0.0, {{0.0, c}}};
}

WeightFunction WeightFunction::linear()
{
    return {Kind::linear, "linear", 1.0, {{0.0, 0.0}, {1.0, 1.0}}};
}

WeightFunction WeightFunction::piecewise_linear(std::vector<std::pair<double, double>> knots)
{
    if (knots.size() < 2)
        throw Error(Errc::invalid_argument, "piecewise-linear weight needs at least two knots");
    double lip = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i].first > knots[i - 1].first))
            throw Error(Errc::invalid_argument, "piecewise-linear knots must be strictly increasing");
        lip = std::max(lip, std::abs(knots[i].second - knots[i - 1].second) /
                                (knots[i].first - knots[i - 1].first));
    }
    if (knots.front().first > 0.0 || knots.back().first < 1.0)
        throw Error(Errc::invalid_argument, "piecewise-linear knots must cover [0, 1]");
    std::ostringstream os;
    os << "piecewise:";
    for (std::size_t i = 0; i < knots.size(); ++i)
        os << (i ? ";" : "") << knots[i].first << ':' << knots[i].second;
    return {Kind::piecewise_linear, os.str(), lip, std::move(knots)};
}

WeightFunction WeightFunction::from_name(const std::string& spec)
{
    if (spec == "zero")
        return constant(0.0);
    if (spec == "one")
        return constant(1.0);
    if (spec == "linear")
        return linear();
    if (spec.rfind("constant:", 0) == 0)
        return constant(parse_number(spec.substr(9), spec));
    if (spec.rfind("piecewise:", 0) == 0) {
        std::vector<std::pair<double, double>> knots;
        std::stringstream ss(spec.substr(10));
        std::string item;
        while (std::getline(ss, item, ';')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw Error(Errc::invalid_argument, "piecewise knot '" + item + "' must be x:y");
            knots.emplace_back(parse_number(item.substr(0, colon), spec), parse_number(item.substr(colon + 1), spec));
        }
        return piecewise_linear(std::move(knots));
    }
    throw Error(Errc::invalid_argument, "unknown weight function '" + spec + "'");
}

double WeightFunction::operator()(double x) const
{
    switch (kind_) {
    case Kind::constant: return knots_.front().second;
    case Kind::linear: return x;
    case Kind::piecewise_linear: break;
    }
    if (x <= knots_.front().first)
        return knots_.front().second;
    if (x >= knots_.back().first)
        return knots_.back().second;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                                     [](double v, const auto& k) { return v < k.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

double WeightFunction::integral_of_square(double t) const
{
    if (t <= 0.0)
        return 0.0;
    switch (kind_) {
    case Kind::constant: {
        const double c = knots_.front().second;
        return c * c * t;
    }
    case Kind::linear: return t * t * t / 3.0;
    case Kind::piecewise_linear: break;
    }
    double acc = 0.0;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        const double x0 = knots_[i - 1].first;
        if (x0 >= t)
            break;
        const double x1 = std::min(knots_[i].first, t);
        acc += segment_square_integral(x0, (*this)(x0), x1, (*this)(x1));
    }
    return acc;
}

}  // namespace shortmem
