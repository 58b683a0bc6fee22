// bootlab command-line front end.

#include "bootlab/bands.hpp"
#include "bootlab/config.hpp"
#include "bootlab/dgp.hpp"
#include "bootlab/error.hpp"
#include "bootlab/experiments.hpp"
#include "bootlab/inference.hpp"
#include "bootlab/report.hpp"
#include "bootlab/resampling.hpp"
#include "bootlab/sample.hpp"
#include "bootlab/statistic.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using json = nlohmann::json;
using namespace bootlab;

enum ExitCode { kOk = 0, kIoError = 1, kConfigError = 2, kNumericError = 3 };

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "json";
    unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "YAML or JSON config file");
    cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
    cmd->add_option("--out", f.out, "output file (default: stdout)");
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", f.threads, "worker threads; never changes results")->check(CLI::PositiveNumber);
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

json read_document(const CommonFlags& f) {
    json doc = f.config.empty() ? json::object() : load_config_document(f.config);
    if (!doc.is_object()) {
        throw ConfigError("config '" + f.config + "' must be a mapping");
    }
    if (f.seed) {
        doc["seed"] = *f.seed;
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Data commands: resample, ci, test, bias, band
// ---------------------------------------------------------------------------

json data_defaults() {
    return json{{"data", ""},       {"column", ""},      {"statistic", "mean"}, {"plan", "iid"}, {"m", 0},
                {"B", 999},         {"alpha", 0.05},     {"sided", "symmetric"}, {"null", 0.0},
                {"form", "studentized"}, {"function", "square"}, {"seed", 20240101}};
}

ExperimentConfig data_config(const std::string& command, const CommonFlags& f) {
    json doc = read_document(f);
    doc.erase("experiment");
    ExperimentConfig c;
    c.experiment = command;
    c.threads = f.threads;
    c.settings = merge_settings(data_defaults(), doc, command);
    if (c.text("data").empty()) {
        throw ConfigError(command + ": 'data' must name a CSV file");
    }
    std::filesystem::path data = c.text("data");
    if (data.is_relative() && !f.config.empty()) {
        data = std::filesystem::path(f.config).parent_path() / data;
    }
    c.settings["data"] = data.lexically_normal().string();
    if (c.count("B") == 0) {
        throw ConfigError(command + ": 'B' must be positive");
    }
    const double alpha = c.real("alpha");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError(command + ": 'alpha' must lie in (0, 1)");
    }
    return c;
}

Sample load_data(const ExperimentConfig& c) {
    try {
        return read_csv_file(c.text("data"));
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("data: ") + e.what());
    }
}

std::size_t data_column(const ExperimentConfig& c, const Sample& s) {
    const std::string name = c.text("column");
    if (name.empty()) {
        return 0;
    }
    try {
        return s.column_index(name);
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("column: ") + e.what());
    }
}

Statistic data_statistic(const ExperimentConfig& c, std::size_t column) {
    const std::string name = c.text("statistic");
    if (name == "mean") {
        return Statistic::mean(column);
    }
    if (name == "max") {
        return Statistic::maximum(column);
    }
    throw ConfigError("statistic must be mean or max, got '" + name + "'");
}

ResamplePlan data_plan(const ExperimentConfig& c) {
    const std::string name = c.text("plan");
    if (name == "iid") {
        return IidPlan{};
    }
    if (name == "m-out-of-n") {
        return MOutOfNPlan{c.count("m")};
    }
    if (name == "subsample") {
        return SubsamplePlan{c.count("m")};
    }
    throw ConfigError("plan must be iid, m-out-of-n or subsample, got '" + name + "'");
}

ReplicateForm data_form(const ExperimentConfig& c) {
    const std::string name = c.text("form");
    if (name == "raw") {
        return ReplicateForm::raw;
    }
    if (name == "centered") {
        return ReplicateForm::centered;
    }
    if (name == "studentized") {
        return ReplicateForm::studentized;
    }
    throw ConfigError("form must be raw, centered or studentized, got '" + name + "'");
}

Sidedness data_sided(const ExperimentConfig& c) {
    try {
        return sidedness_from_string(c.text("sided"));
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

MCReport stamp(MCReport r, const ExperimentConfig& c) {
    r.experiment = c.experiment;
    r.config = c.settings;
    r.provenance.config_hash = c.hash();
    r.provenance.seed = c.seed();
    return r;
}

int cmd_resample(const CommonFlags& f) {
    const auto c = data_config("resample", f);
    const Sample data = load_data(c);
    const auto column = data_column(c, data);
    BootstrapOptions opt;
    opt.B = c.count("B");
    opt.seed = SeedPolicy{c.seed(), 0};
    opt.form = data_form(c);
    opt.mode = EnumerationMode::monte_carlo;
    opt.threads = c.threads;
    opt.rate = [](std::size_t m) { return std::sqrt(static_cast<double>(m)); };
    const auto run = run_bootstrap(data_statistic(c, column), data_plan(c), data, opt);
    if (f.format == "csv") {
        std::ostringstream out;
        write_replicates_csv(out, run.distribution);
        write_output(out.str(), f.out);
    } else {
        json doc = inference_report(c.text("statistic"), run.distribution, std::nullopt, std::nullopt, std::nullopt,
                                    opt.seed);
        doc["discarded"] = run.discarded;
        doc["config_hash"] = c.hash();
        write_output(doc.dump(2) + "\n", f.out);
    }
    return kOk;
}

int cmd_ci(const CommonFlags& f) {
    const auto c = data_config("ci", f);
    const Sample data = load_data(c);
    const auto stat = data_statistic(c, data_column(c, data));
    const TestOptions opt{c.count("B"), c.real("alpha"), SeedPolicy{c.seed(), 0}, data_sided(c), c.threads};
    const auto ci = bootstrap_t_ci(stat, data_plan(c), data, opt);
    MCReport r;
    r.cell("interval").add("estimate", stat.point(data)).add("lower", ci.lower).add("upper", ci.upper).add(
        "level", ci.level);
    write_output(emit_report(stamp(r, c), report_format_from_string(f.format)), f.out);
    return kOk;
}

int cmd_test(const CommonFlags& f) {
    const auto c = data_config("test", f);
    const Sample data = load_data(c);
    const auto stat = data_statistic(c, data_column(c, data));
    const TestOptions opt{c.count("B"), c.real("alpha"), SeedPolicy{c.seed(), 0}, data_sided(c), c.threads};
    const auto res = bootstrap_t_test(stat, data_plan(c), data, c.real("null"), opt);
    const auto asym = normal_decision(res.t, opt.alpha, opt.sided);
    MCReport r;
    r.cell("test")
        .add("t", res.t)
        .add("z_star", res.critical.z_star)
        .add("p_star", res.p_star)
        .add("reject", res.reject ? 1.0 : 0.0)
        .add("normal_critical", asym.critical.z_star)
        .add("normal_reject", asym.reject ? 1.0 : 0.0)
        .add("discarded", static_cast<double>(res.discarded));
    write_output(emit_report(stamp(r, c), report_format_from_string(f.format)), f.out);
    return kOk;
}

int cmd_bias(const CommonFlags& f) {
    const auto c = data_config("bias", f);
    const Sample data = load_data(c);
    const auto column = data_column(c, data);
    const std::string name = c.text("function");
    MeanFunctional h;
    if (name == "square") {
        h = [column](std::span<const double> m) { return m[column] * m[column]; };
    } else if (name == "cube") {
        h = [column](std::span<const double> m) { return m[column] * m[column] * m[column]; };
    } else if (name == "exp") {
        h = [column](std::span<const double> m) { return std::exp(m[column]); };
    } else {
        throw ConfigError("function must be square, cube or exp, got '" + name + "'");
    }
    BiasOptions opt;
    opt.B = c.count("B");
    opt.seed = SeedPolicy{c.seed(), 0};
    const double bias = bias_estimate(h, data, opt);
    std::vector<double> means(data.dim(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dim(); ++j) {
            means[j] += data(i, j) / static_cast<double>(data.size());
        }
    }
    const double plug_in = h(means);
    MCReport r;
    r.cell(name).add("plug_in", plug_in).add("bias", bias).add("corrected", plug_in - bias);
    write_output(emit_report(stamp(r, c), report_format_from_string(f.format)), f.out);
    return kOk;
}

int cmd_band(const CommonFlags& f) {
    json doc = read_document(f);
    doc.erase("experiment");
    const json defaults{{"data", ""},      {"x", "x"},         {"y", "y"},     {"grid", nullptr},
                        {"grid_points", 50}, {"degree", 1},      {"kernel", "biweight"},
                        {"alpha0", 0.05},  {"xi", 0.1},        {"B", 500},     {"bandwidth", 0.0},
                        {"seed", 20240101}};
    ExperimentConfig c;
    c.experiment = "band";
    c.threads = f.threads;
    c.settings = merge_settings(defaults, doc, "band");
    std::filesystem::path path = c.text("data");
    if (path.empty()) {
        throw ConfigError("band: 'data' must name a CSV file");
    }
    if (path.is_relative() && !f.config.empty()) {
        path = std::filesystem::path(f.config).parent_path() / path;
    }
    c.settings["data"] = path.lexically_normal().string();
    const Sample data = load_data(c);
    std::size_t xi = 0;
    std::size_t yi = 0;
    try {
        xi = data.column_index(c.text("x"));
        yi = data.column_index(c.text("y"));
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("band: ") + e.what());
    }
    const auto xv = data.column(xi);
    const auto yv = data.column(yi);
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xv.data(), static_cast<Eigen::Index>(xv.size()));
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(yv.data(), static_cast<Eigen::Index>(yv.size()));
    std::vector<double> grid;
    if (c.at("grid").is_null()) {
        grid = linear_grid(x.minCoeff(), x.maxCoeff(), c.count("grid_points"));
    } else {
        grid = c.reals("grid");
    }
    BandOptions opt;
    opt.degree = static_cast<int>(c.count("degree"));
    try {
        opt.kernel = kernel_from_string(c.text("kernel"));
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("band: ") + e.what());
    }
    opt.alpha0 = c.real("alpha0");
    opt.xi = c.real("xi");
    opt.B = c.count("B");
    opt.seed = SeedPolicy{c.seed(), 0};
    opt.threads = c.threads;
    if (c.real("bandwidth") > 0.0) {
        opt.bandwidth = c.real("bandwidth");
    }
    const auto band = hh_band(x, y, grid, opt);
    if (f.format == "csv") {
        std::ostringstream out;
        write_band_csv(out, band);
        write_output(out.str(), f.out);
    } else {
        json summary = band_summary(band, opt.seed);
        summary["config_hash"] = c.hash();
        write_output(summary.dump(2) + "\n", f.out);
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// Experiments: erp-study, ecp-study, demo <name>
// ---------------------------------------------------------------------------

int run_named(const std::string& name, const CommonFlags& f) {
    json doc = read_document(f);
    if (doc.contains("experiment")) {
        if (doc.at("experiment") != name) {
            throw ConfigError("config is for experiment '" + doc.at("experiment").dump() + "', not '" + name + "'");
        }
        doc.erase("experiment");
    }
    if (doc.contains("threads")) {
        doc.erase("threads");
    }
    const auto config = resolve_config(name, doc, f.threads);
    const auto report = run_experiment(config);
    write_output(emit_report(report, report_format_from_string(f.format)), f.out);
    return kOk;
}

int run_study(const std::string& command, const CommonFlags& f) {
    // A study config may name one of the preset study experiments.
    const json doc = read_document(f);
    std::string name = command;
    if (doc.contains("experiment") && doc.at("experiment").is_string()) {
        name = doc.at("experiment").get<std::string>();
    }
    const std::vector<std::string> allowed = command == "erp-study"
                                                 ? std::vector<std::string>{"erp-study", "erp-mean", "wild"}
                                                 : std::vector<std::string>{"ecp-study"};
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
        throw ConfigError("experiment '" + name + "' cannot be run by '" + command + "'");
    }
    return run_named(name, f);
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Bootstrap resampling inference and Monte Carlo experiments"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    CommonFlags flags;

    auto* resample = app.add_subcommand("resample", "bootstrap replicates of a statistic");
    auto* ci = app.add_subcommand("ci", "bootstrap-t confidence interval");
    auto* test = app.add_subcommand("test", "bootstrap-t test of a point null");
    auto* bias = app.add_subcommand("bias", "bootstrap bias correction of a smooth function of the mean");
    auto* band = app.add_subcommand("band", "bootstrap-calibrated local polynomial bands");
    auto* erp = app.add_subcommand("erp-study", "Monte Carlo rejection-probability study");
    auto* ecp = app.add_subcommand("ecp-study", "Monte Carlo coverage-probability study");
    auto* demo = app.add_subcommand("demo", "run a named experiment");
    auto* list = app.add_subcommand("list", "list experiments, procedures and data-generating processes");
    std::string demo_name;
    demo->add_option("name", demo_name, "experiment name")->required();
    for (auto* cmd : {resample, ci, test, bias, band, erp, ecp, demo}) {
        add_common(cmd, flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (*list) {
        std::cout << "experiments:\n";
        for (const auto& e : experiments()) {
            std::cout << "  " << e.name << "  " << e.description << "\n";
        }
        std::cout << "procedures:\n";
        for (const auto& p : procedure_names()) {
            std::cout << "  " << p << "\n";
        }
        std::cout << "dgps:\n";
        for (const auto& d : dgp_names()) {
            std::cout << "  " << d << "\n";
        }
        return kOk;
    }
    if (*resample) return cmd_resample(flags);
    if (*ci) return cmd_ci(flags);
    if (*test) return cmd_test(flags);
    if (*bias) return cmd_bias(flags);
    if (*band) return cmd_band(flags);
    if (*erp) return run_study("erp-study", flags);
    if (*ecp) return run_study("ecp-study", flags);
    return run_named(demo_name, flags);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kConfigError;
    } catch (const EvaluationError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumericError;
    } catch (const SingularDesign& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumericError;
    } catch (const ConvergenceError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumericError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    }
}
