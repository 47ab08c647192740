#include "shortmem/dispatch.hpp"

#include "shortmem/error.hpp"
#include "shortmem/exact_gaussian.hpp"
#include "shortmem/harness.hpp"
#include "shortmem/projective.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <variant>

namespace shortmem {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

using Cell = std::variant<std::monostate, double, std::int64_t, std::uint64_t, bool, std::string>;

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : width_(header.size())
    {
        line(header);
    }

    void row(const std::vector<Cell>& cells)
    {
        if (cells.size() != width_)
            throw Error(Errc::invariant, "CSV row width does not match its header");
        std::vector<std::string> text;
        text.reserve(cells.size());
        for (const Cell& c : cells)
            text.push_back(std::visit(
                [](const auto& v) -> std::string {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>)
                        return {};
                    else if constexpr (std::is_same_v<T, bool>)
                        return v ? "true" : "false";
                    else if constexpr (std::is_same_v<T, std::string>)
                        return v;
                    else
                        return format_number(v);
                },
                c));
        line(text);
    }

    const std::string& text() const noexcept { return text_; }

private:
    void line(const std::vector<std::string>& fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0)
                text_ += ',';
            text_ += fields[i];
        }
        text_ += '\n';
    }

    std::size_t width_;
    std::string text_;
};

Cell cell(int v) { return static_cast<std::int64_t>(v); }
Cell cell(const std::optional<double>& v) { return v ? Cell(*v) : Cell(); }

class Output {
public:
    explicit Output(const SimConfig& config) : dir_(config.out_dir)
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec)
            throw Error(Errc::io, "cannot create output directory '" + dir_.string() + "': " + ec.message());
    }

    void write(const std::string& name, const std::string& content)
    {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(Errc::io, "cannot open '" + path.string() + "' for writing");
        out << content;
        out.close();
        if (!out)
            throw Error(Errc::io, "failed writing '" + path.string() + "'");
        if (name != "meta.json")
            files_.push_back(name);
    }
    void write(const std::string& name, const Csv& csv) { write(name, csv.text()); }
    void write(const std::string& name, const json& doc) { write(name, doc.dump(2) + "\n"); }

    const std::vector<std::string>& files() const noexcept { return files_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

std::string p_key(double p)
{
    return format_number(p);
}

json summary_json(const Summary& s)
{
    return {{"mean", s.mean}, {"median", s.median}, {"q90", s.q90}};
}

json optional_json(const std::optional<bool>& v)
{
    return v ? json(*v) : json(nullptr);
}

json coeffs_json(const SimConfig& config, const CoefficientSequence& coeffs)
{
    json j = {{"kind", config.coeffs.kind},
              {"lo", coeffs.lo()},
              {"hi", coeffs.hi()},
              {"tail_beyond_window", coeffs.tail_beyond_window()},
              {"total", total_sum(coeffs).value}};
    if (config.coeffs.kind == "finite")
        j["values"] = config.coeffs.values;
    else if (config.coeffs.kind != "identity")
        j["param"] = config.coeffs.param;
    return j;
}

json model_json(const SimConfig& config)
{
    return {{"kind", innovation_kind_name(config.model.kind)}, {"param", config.model.param}};
}

void require_grid(const SimConfig& config, const std::string& command)
{
    if (config.grid.empty())
        throw Error(Errc::validation, "grid: required by '" + command + "'");
}

double innovation_variance(const SimConfig& config)
{
    return InnovationModel(config.model, config.seed, 1).variance();
}

EnsembleConfig ensemble_config(const SimConfig& config)
{
    EnsembleConfig ec;
    ec.coeffs = build_coefficients(config);
    ec.model = config.model;
    ec.grid = config.grid;
    ec.replicates = config.replicates;
    ec.p_list = config.p_list;
    ec.seed = config.seed;
    ec.filter.eps_tail = config.tol.tail;
    return ec;
}

void run_simulate(const SimConfig& config, int workers, Output& out)
{
    require_grid(config, "simulate");
    const PathEnsemble e = run_ensemble(ensemble_config(config), workers);

    std::vector<std::string> header{"n", "replicate", "seed", "coupling"};
    if (e.coupled)
        header.push_back("sup_bm");
    header.insert(header.end(), {"max_innovation", "terminal"});
    Csv csv(header);
    for (std::size_t gi = 0; gi < e.grid.size(); ++gi) {
        for (int r = 0; r < e.replicates; ++r) {
            const std::size_t c = e.cell(gi, r);
            std::vector<Cell> row{e.grid[gi], cell(r), e.seeds[c], e.coupling[c]};
            if (e.coupled)
                row.push_back(e.sup_bm[c]);
            row.push_back(e.max_innovation[c]);
            row.push_back(e.terminal[c]);
            csv.row(row);
        }
    }
    out.write("ensemble.csv", csv);
}

void run_couple(const SimConfig& config, int workers, Output& out)
{
    require_grid(config, "couple");
    const EnsembleConfig ec = ensemble_config(config);
    const PathEnsemble e = run_ensemble(ec, workers);
    const CouplingReport rep = coupling_report(e, config.p_list);

    Csv csv({"n", "stat", "mean", "median", "q90"});
    json rows = json::array();
    for (const CouplingRow& row : rep.rows) {
        const auto emit = [&](const std::string& stat, const Summary& s) {
            csv.row({row.n, stat, s.mean, s.median, s.q90});
        };
        emit("coupling", row.coupling);
        if (row.sup_bm)
            emit("sup_bm", *row.sup_bm);
        emit("max_innovation", row.max_innovation);

        json jr = {{"n", row.n}, {"coupling", summary_json(row.coupling)},
                   {"max_innovation", summary_json(row.max_innovation)}};
        jr["sup_bm"] = row.sup_bm ? summary_json(*row.sup_bm) : json(nullptr);
        json lp_c = json::object();
        json lp_s = json::object();
        for (const auto& [p, v] : row.lp_coupling)
            lp_c[p_key(p)] = v;
        for (const auto& [p, v] : row.lp_sup_bm)
            lp_s[p_key(p)] = v;
        jr["lp_coupling"] = lp_c;
        jr["lp_sup_bm"] = lp_s;
        rows.push_back(jr);
    }
    json lp_trend = json::object();
    for (const auto& [p, v] : rep.lp_trend)
        lp_trend[p_key(p)] = v;

    const json doc = {
        {"coeffs", coeffs_json(config, ec.coeffs)},
        {"model", model_json(config)},
        {"replicates", config.replicates},
        {"seed", config.seed},
        {"rows", rows},
        {"trend", {{"coupling", optional_json(rep.coupling_trend)},
                   {"sup_bm", optional_json(rep.sup_bm_trend)},
                   {"lp", lp_trend}}},
    };
    out.write("coupling.csv", csv);
    out.write("coupling.json", doc);
}

void run_counterexample(const SimConfig& config, int, Output& out)
{
    if (config.coeffs.kind != "prop10")
        throw Error(Errc::validation, "coeffs.kind: counterexample needs kind 'prop10'");
    const int r_max = static_cast<int>(config.coeffs.param);
    if (r_max < 2)
        throw Error(Errc::validation, "coeffs.param: counterexample needs r_max >= 2");
    const Prop10Blocks blocks(r_max);
    const CoefficientSequence coeffs = build_coefficients(config);

    // Var(S_n) at n_1 .. n_{r_max}; rows r report n_{r+1}.
    std::vector<std::int64_t> n_grid;
    std::vector<double> exact;
    for (int r = 1; r <= r_max; ++r) {
        n_grid.push_back(static_cast<std::int64_t>(Prop10Blocks::block_start(r)));
        exact.push_back(exact_variance(coeffs, n_grid.back(), 1.0));
    }
    VarianceProfile profile;
    profile.n = n_grid;
    profile.variance = exact;
    const std::vector<double> slopes = regular_variation_slope(profile);

    Csv variance({"r", "n", "exact", "defensible_bound", "paper_bound", "meets_paper_bound", "slope"});
    json variance_rows = json::array();
    for (int r = 1; r <= r_max - 1; ++r) {
        const Prop10VarianceReport rep = prop10_variance_report(coeffs, r);
        const double slope = slopes[static_cast<std::size_t>(r - 1)];
        variance.row({cell(r), rep.n, rep.exact, rep.defensible_bound, rep.paper_bound, rep.meets_paper_bound, slope});
        variance_rows.push_back({{"r", r},
                                 {"n", rep.n},
                                 {"exact", rep.exact},
                                 {"defensible_bound", rep.defensible_bound},
                                 {"paper_bound", rep.paper_bound},
                                 {"meets_paper_bound", rep.meets_paper_bound},
                                 {"slope", slope}});
    }

    Csv slope_csv({"n_from", "n_to", "slope"});
    for (std::size_t i = 0; i < slopes.size(); ++i)
        slope_csv.row({n_grid[i], n_grid[i + 1], slopes[i]});

    Csv projection({"r", "norm", "bound", "paper_bound", "cumulative", "tail_bound"});
    for (const ProjectionRow& row : projection_profile(blocks))
        projection.row({cell(row.r), row.norm, row.bound, row.paper_bound, row.cumulative,
                        projection_norm_tail_bound(row.r)});

    double max_slope = 0.0;
    for (double s : slopes)
        max_slope = std::max(max_slope, s);
    const json doc = {
        {"r_max", r_max},
        {"variance", variance_rows},
        {"max_slope", max_slope},
        {"projection_norm_sum", projection_norm_sum(blocks)},
        {"projection_norm_sum_bound", std::pow(std::numbers::pi, 4) / 90.0},
        {"projection_tail_bound", projection_norm_tail_bound(r_max)},
    };
    out.write("blocks_variance.csv", variance);
    out.write("blocks_slopes.csv", slope_csv);
    out.write("blocks_projection.csv", projection);
    out.write("blocks.json", doc);
}

void run_variance(const SimConfig& config, int, Output& out)
{
    require_grid(config, "variance");
    const CoefficientSequence coeffs = build_coefficients(config);
    const double sigma2 = innovation_variance(config);

    VarianceProfile profile;
    std::vector<std::optional<double>> second_route;
    const auto width = static_cast<double>(coeffs.hi() - coeffs.lo() + 1);
    for (std::int64_t n : config.grid) {
        profile.n.push_back(n);
        profile.variance.push_back(exact_variance(coeffs, n, sigma2));
        profile.normalized.push_back(profile.variance.back() / static_cast<double>(n));
        // the autocovariance route costs about width^2 operations
        if (width * std::min(width, static_cast<double>(n)) <= kDefaultWorkLimit)
            second_route.emplace_back(variance_from_autocovariance(coeffs, n, sigma2));
        else
            second_route.emplace_back();
    }
    if (profile.n.size() >= 2)
        profile.slopes = regular_variation_slope(profile);

    Csv csv({"n", "variance", "normalized", "autocov_variance", "slope"});
    for (std::size_t i = 0; i < profile.n.size(); ++i) {
        const std::optional<double> slope = i > 0 ? std::optional<double>(profile.slopes[i - 1]) : std::nullopt;
        csv.row({profile.n[i], profile.variance[i], profile.normalized[i], cell(second_route[i]), cell(slope)});
    }
    out.write("variance.csv", csv);
}

void run_weighted(const SimConfig& config, int workers, Output& out)
{
    require_grid(config, "weighted");
    const CoefficientSequence coeffs = build_coefficients(config);
    const WeightFunction g = WeightFunction::from_name(config.weight);
    FilterOptions opts;
    opts.eps_tail = config.tol.tail;

    Csv csv({"n", "exact", "empirical", "standard_error", "limit", "pass"});
    for (std::int64_t n : config.grid) {
        const WeightedVarianceCheck chk = weighted_variance_check(coeffs, config.model, g, n, 1.0, config.replicates,
                                                                  config.seed, workers, config.tol.sigma, opts);
        csv.row({n, chk.exact, chk.empirical, chk.standard_error, chk.limit, chk.pass});
    }
    out.write("weighted.csv", csv);
}

void run_coboundary(const SimConfig& config, int, Output& out)
{
    require_grid(config, "coboundary");
    const CoefficientSequence coeffs = build_coefficients(config);
    const std::int64_t n = config.grid.back();
    const int m = config.m;
    const InnovationModel gen(config.model, derive_seed(config.seed, static_cast<std::uint64_t>(n), 0), n);
    const Stream xi = materialize(gen, 1 - m, n);
    const CoboundaryDecomposition d = coboundary(coeffs, xi, m, n);

    const double a_m = partial_coefficient_sum(coeffs, m);
    double increment_residual = 0.0;
    Csv csv({"k", "y", "theta", "corrector", "increment", "martingale", "partial_y"});
    for (std::int64_t k = 0; k <= n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        const std::optional<double> inc = k > 0 ? std::optional<double>(d.increments[i]) : std::nullopt;
        if (k > 0)
            increment_residual = std::max(increment_residual, std::abs(d.increments[i] - a_m * xi.at(k)));
        csv.row({k, d.y[i], d.theta[i], d.corrector[i], cell(inc), d.martingale[i], d.partial_y[i]});
    }
    const double residual = d.identity_residual();
    const double scale = d.scale();
    const double relative = scale > 0.0 ? residual / scale : residual;
    const json doc = {
        {"m", m},
        {"n", n},
        {"partial_coefficient_sum", a_m},
        {"identity_residual", residual},
        {"scale", scale},
        {"relative_residual", relative},
        {"increment_residual", increment_residual},
        {"tolerance", config.tol.identity},
        {"pass", relative < config.tol.identity},
    };
    out.write("coboundary.csv", csv);
    out.write("coboundary.json", doc);
}

void run_diagnose(const SimConfig& config, int, Output& out)
{
    require_grid(config, "diagnose");
    const CoefficientSequence coeffs = build_coefficients(config);

    PositiveLaw law{PositiveLaw::Kind::exponential, 1.0};
    if (config.model.kind == InnovationKind::exponential || config.model.kind == InnovationKind::uniform)
        law = positive_law_for(config.model);
    bool all_pass = true;

    Csv truncated_mean({"a", "lhs", "rhs", "residual", "pass"});
    for (double a : {1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0}) {
        const TruncatedMeanIdentity id = truncated_mean_identity(a, law);
        const bool pass = id.residual < config.tol.quadrature;
        all_pass = all_pass && pass;
        truncated_mean.row({a, id.lhs, id.rhs, id.residual, pass});
    }

    Csv truncation({"n", "m", "mean_gap", "gap_se", "sup_u_mean", "bound", "pass"});
    for (std::int64_t n : config.grid) {
        const TruncationCheck chk =
            lemma2_truncation_check(coeffs, config.model, config.seed, n, config.m, config.replicates, config.tol.sigma);
        all_pass = all_pass && chk.pass;
        truncation.row({n, cell(config.m), chk.mean_gap, chk.gap_se, chk.sup_u_mean, chk.bound, chk.pass});
    }

    std::optional<Csv> doob;
    if (coeffs.causal()) {
        doob.emplace(std::vector<std::string>{"n", "i", "empirical", "standard_error", "bound", "pass"});
        for (std::int64_t n : config.grid)
            for (std::int64_t i : {std::int64_t{0}, std::int64_t{1}}) {
                const DoobCheck chk = doob_check(coeffs, config.model, config.seed, n, i, config.replicates,
                                                 config.tol.sigma);
                all_pass = all_pass && chk.pass;
                doob->row({n, i, chk.empirical, chk.standard_error, chk.bound, chk.pass});
            }
    }

    const char* law_name = law.kind == PositiveLaw::Kind::uniform ? "uniform" : "exponential";
    const json doc = {
        {"law", {{"kind", law_name}, {"param", law.param}}},
        {"doob_checked", doob.has_value()},
        {"all_pass", all_pass},
    };
    out.write("truncated_mean.csv", truncated_mean);
    out.write("truncation.csv", truncation);
    if (doob)
        out.write("doob.csv", *doob);
    out.write("diagnose.json", doc);
}

using Runner = std::function<void(const SimConfig&, int, Output&)>;

const std::map<std::string, Runner>& runners()
{
    static const std::map<std::string, Runner> table = {
        {"simulate", run_simulate},     {"couple", run_couple},         {"counterexample", run_counterexample},
        {"variance", run_variance},     {"weighted", run_weighted},     {"coboundary", run_coboundary},
        {"diagnose", run_diagnose},
    };
    return table;
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names = {"simulate", "couple",     "counterexample", "variance",
                                                   "weighted", "coboundary", "diagnose"};
    return names;
}

std::vector<std::string> dispatch(const std::string& command, const SimConfig& config, int workers)
{
    const auto it = runners().find(command);
    if (it == runners().end())
        throw Error(Errc::invalid_argument, "unknown command '" + command + "'");
    if (workers < 1)
        throw Error(Errc::invalid_argument, "worker count must be >= 1");

    Output out(config);
    it->second(config, workers, out);

    const json meta = {
        {"command", command},
        {"config", format_config(config)},
        {"created_utc", utc_timestamp()},
        {"files", out.files()},
        {"workers", workers},
    };
    out.write("meta.json", meta);
    return out.files();
}

}  // namespace shortmem
