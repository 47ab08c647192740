#include "shortmem/config.hpp"

#include "shortmem/error.hpp"
#include "shortmem/weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace shortmem {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    int line = 0;
};

class ValueReader {
public:
    ValueReader(const std::string& key, const Entry& entry) : key_(key), entry_(entry) {}

    [[noreturn]] void malformed(const std::string& what) const
    {
        throw Error(Errc::parse, "line " + std::to_string(entry_.line) + ": " + key_ + ": " + what);
    }
    [[noreturn]] void invalid(const std::string& what) const
    {
        throw Error(Errc::validation, key_ + ": " + what);
    }

    template <class T>
    T number(std::string_view text) const
    {
        text = trim(text);
        T out{};
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
        if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
            malformed("cannot read '" + std::string(text) + "' as a number");
        if constexpr (std::is_floating_point_v<T>)
            if (!std::isfinite(out))
                malformed("value must be finite");
        return out;
    }
    template <class T>
    T number() const { return number<T>(entry_.value); }

    template <class T>
    std::vector<T> list() const
    {
        std::vector<T> out;
        std::string_view rest = entry_.value;
        while (true) {
            const auto comma = rest.find(',');
            out.push_back(number<T>(rest.substr(0, comma)));
            if (comma == std::string_view::npos)
                break;
            rest.remove_prefix(comma + 1);
        }
        return out;
    }

    const std::string& text() const noexcept { return entry_.value; }

private:
    const std::string& key_;
    const Entry& entry_;
};

using Setter = std::function<void(SimConfig&, const ValueReader&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"coeffs.kind",
         [](SimConfig& c, const ValueReader& v) {
             const std::string& kind = v.text();
             if (kind != "identity") {
                 try {
                     decay_kind_from_name(kind);
                 } catch (const Error&) {
                     v.invalid("unknown coefficient kind '" + kind + "'");
                 }
             }
             c.coeffs.kind = kind;
         }},
        {"coeffs.param",
         [](SimConfig& c, const ValueReader& v) {
             c.coeffs.values = v.list<double>();
             c.coeffs.param = c.coeffs.values.front();
         }},
        {"coeffs.window", [](SimConfig& c, const ValueReader& v) { c.coeffs.window = v.number<std::int64_t>(); }},
        {"model.kind",
         [](SimConfig& c, const ValueReader& v) {
             try {
                 c.model.kind = innovation_kind_from_name(v.text());
             } catch (const Error&) {
                 v.invalid("unknown innovation kind '" + v.text() + "'");
             }
         }},
        {"model.param", [](SimConfig& c, const ValueReader& v) { c.model.param = v.number<double>(); }},
        {"grid", [](SimConfig& c, const ValueReader& v) { c.grid = v.list<std::int64_t>(); }},
        {"replicates", [](SimConfig& c, const ValueReader& v) { c.replicates = v.number<int>(); }},
        {"p_list", [](SimConfig& c, const ValueReader& v) { c.p_list = v.list<double>(); }},
        {"seed", [](SimConfig& c, const ValueReader& v) { c.seed = v.number<std::uint64_t>(); }},
        {"out_dir", [](SimConfig& c, const ValueReader& v) { c.out_dir = v.text(); }},
        {"m", [](SimConfig& c, const ValueReader& v) { c.m = v.number<int>(); }},
        {"weight", [](SimConfig& c, const ValueReader& v) { c.weight = v.text(); }},
        {"tol.tail", [](SimConfig& c, const ValueReader& v) { c.tol.tail = v.number<double>(); }},
        {"tol.identity", [](SimConfig& c, const ValueReader& v) { c.tol.identity = v.number<double>(); }},
        {"tol.sigma", [](SimConfig& c, const ValueReader& v) { c.tol.sigma = v.number<double>(); }},
        {"tol.quadrature", [](SimConfig& c, const ValueReader& v) { c.tol.quadrature = v.number<double>(); }},
    };
    return table;
}

void validate(SimConfig& c, const std::set<std::string>& present)
{
    const auto invalid = [](const std::string& key, const std::string& what) {
        throw Error(Errc::validation, key + ": " + what);
    };
    if (!present.count("seed"))
        throw Error(Errc::validation, "seed required");

    const std::string& kind = c.coeffs.kind;
    if (kind == "identity") {
        if (present.count("coeffs.param") || present.count("coeffs.window"))
            invalid("coeffs.param", "identity coefficients take no parameters");
    } else if (kind == "finite") {
        if (!present.count("coeffs.param"))
            invalid("coeffs.param", "finite coefficients need a value list");
        if (present.count("coeffs.window"))
            invalid("coeffs.window", "finite coefficients carry their own window");
    } else {
        if (!present.count("coeffs.param"))
            invalid("coeffs.param", "required for kind '" + kind + "'");
        if (c.coeffs.values.size() != 1)
            invalid("coeffs.param", "expected a single number for kind '" + kind + "'");
        c.coeffs.values.clear();
        const double p = c.coeffs.param;
        const DecayKind dk = decay_kind_from_name(kind);
        if ((dk == DecayKind::geometric || dk == DecayKind::causal_geometric) && !(p > 0.0 && p < 1.0))
            invalid("coeffs.param", "rho must lie in (0, 1)");
        if (dk == DecayKind::polynomial && !(p > 1.0))
            invalid("coeffs.param", "beta must exceed 1");
        if (dk == DecayKind::prop10_blocks) {
            if (p != std::floor(p) || p < 1.0 || p > 30.0)
                invalid("coeffs.param", "r_max must be an integer in [1, 30]");
            if (present.count("coeffs.window"))
                invalid("coeffs.window", "the block sequence fixes its own support");
        }
        if (c.coeffs.window && *c.coeffs.window < 0)
            invalid("coeffs.window", "must be >= 0");
    }

    const InnovationKind mk = c.model.kind;
    if ((mk == InnovationKind::gaussian || mk == InnovationKind::uniform || mk == InnovationKind::exponential) &&
        !(c.model.param > 0.0))
        invalid("model.param", "must be positive");

    for (std::size_t i = 0; i < c.grid.size(); ++i) {
        if (c.grid[i] < 1)
            invalid("grid", "values must be >= 1");
        if (i > 0 && c.grid[i] <= c.grid[i - 1])
            invalid("grid", "must be strictly ascending");
    }
    if (c.replicates < 1)
        invalid("replicates", "must be >= 1");
    for (double p : c.p_list)
        if (!(p >= 1.0))
            invalid("p_list", "every p must be >= 1");
    if (c.m < 1)
        invalid("m", "must be >= 1");
    try {
        WeightFunction::from_name(c.weight);
    } catch (const Error& e) {
        invalid("weight", e.what());
    }
    if (c.out_dir.empty())
        invalid("out_dir", "must not be empty");
    if (!(c.tol.tail > 0.0))
        invalid("tol.tail", "must be positive");
    if (!(c.tol.identity > 0.0))
        invalid("tol.identity", "must be positive");
    if (!(c.tol.sigma > 0.0))
        invalid("tol.sigma", "must be positive");
    if (!(c.tol.quadrature > 0.0))
        invalid("tol.quadrature", "must be positive");
}

template <class T>
std::string join(const std::vector<T>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0)
            out += ", ";
        out += format_number(values[i]);
    }
    return out;
}

}  // namespace

std::string format_number(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string format_number(std::int64_t value)
{
    return std::to_string(value);
}

std::string format_number(std::uint64_t value)
{
    return std::to_string(value);
}

SimConfig parse_config(std::string_view text)
{
    std::map<std::string, Entry> entries;
    std::string section;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        const auto where = "line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(Errc::parse, where + "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.find_first_of(" \t=.") != std::string::npos)
                throw Error(Errc::parse, where + "malformed section name '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(Errc::parse, where + "expected 'key = value'");
        const std::string_view bare = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (bare.empty())
            throw Error(Errc::parse, where + "missing key");
        if (value.empty())
            throw Error(Errc::parse, where + "missing value for '" + std::string(bare) + "'");

        const std::string key = section.empty() ? std::string(bare) : section + "." + std::string(bare);
        if (!setters().count(key))
            throw Error(Errc::validation, "unknown key '" + key + "' (line " + std::to_string(line_no) + ")");
        if (entries.count(key))
            throw Error(Errc::validation, "duplicate key '" + key + "' (line " + std::to_string(line_no) + ")");
        entries.emplace(key, Entry{std::string(value), line_no});
    }

    SimConfig config;
    std::set<std::string> present;
    for (const auto& [key, entry] : entries) {
        setters().at(key)(config, ValueReader(key, entry));
        present.insert(key);
    }
    validate(config, present);
    return config;
}

SimConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::io, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string format_config(const SimConfig& c)
{
    std::ostringstream out;
    out << "seed = " << c.seed << '\n';
    out << "out_dir = " << c.out_dir << '\n';
    if (!c.grid.empty())
        out << "grid = " << join(c.grid) << '\n';
    out << "replicates = " << c.replicates << '\n';
    out << "p_list = " << join(c.p_list) << '\n';
    out << "m = " << c.m << '\n';
    out << "weight = " << c.weight << '\n';
    out << "\n[coeffs]\nkind = " << c.coeffs.kind << '\n';
    if (c.coeffs.kind == "finite")
        out << "param = " << join(c.coeffs.values) << '\n';
    else if (c.coeffs.kind != "identity")
        out << "param = " << format_number(c.coeffs.param) << '\n';
    if (c.coeffs.window)
        out << "window = " << *c.coeffs.window << '\n';
    out << "\n[model]\nkind = " << innovation_kind_name(c.model.kind) << '\n';
    out << "param = " << format_number(c.model.param) << '\n';
    out << "\n[tol]\n";
    out << "tail = " << format_number(c.tol.tail) << '\n';
    out << "identity = " << format_number(c.tol.identity) << '\n';
    out << "sigma = " << format_number(c.tol.sigma) << '\n';
    out << "quadrature = " << format_number(c.tol.quadrature) << '\n';
    return out.str();
}

CoefficientSequence build_coefficients(const SimConfig& config)
{
    const CoefficientSpec& spec = config.coeffs;
    if (spec.kind == "identity")
        return CoefficientSequence::identity();
    if (spec.kind == "finite")
        return CoefficientSequence::finite(0, spec.values);
    const DecayDescriptor desc{decay_kind_from_name(spec.kind), spec.param};
    if (desc.kind == DecayKind::prop10_blocks)
        return build_prop10(static_cast<int>(spec.param));
    const std::int64_t window = spec.window ? *spec.window : CoefficientSequence::auto_window(desc, config.tol.tail);
    return CoefficientSequence::from_descriptor(desc, window);
}

}  // namespace shortmem
