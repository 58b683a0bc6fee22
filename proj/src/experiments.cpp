#include "bootlab/experiments.hpp"

#include "bootlab/bands.hpp"
#include "bootlab/dgp.hpp"
#include "bootlab/distribution.hpp"
#include "bootlab/error.hpp"
#include "bootlab/inference.hpp"
#include "bootlab/linear.hpp"
#include "bootlab/multiplier.hpp"
#include "bootlab/parallel.hpp"
#include "bootlab/resampling.hpp"
#include "bootlab/sample.hpp"
#include "bootlab/smoothed.hpp"
#include "bootlab/sparse.hpp"
#include "bootlab/statistic.hpp"
#include "bootlab/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace bootlab {

namespace {

using json = nlohmann::json;

SeedPolicy base_seed(const ExperimentConfig& c) { return SeedPolicy{c.seed(), 0}; }

SeedPolicy rep_seed(const ExperimentConfig& c, std::size_t cell, std::size_t rep) {
    return base_seed(c).child(cell).child(rep);
}

std::string label(double v) { return format_double(v); }

Eigen::VectorXd column_vector(const Sample& s, std::size_t j) {
    const auto v = s.column(j);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd columns_matrix(const Sample& s, std::size_t first, std::size_t last, bool intercept) {
    if (last > s.dim() || first >= last) {
        throw ConfigError("procedure needs regression data with at least " + std::to_string(last) +
                          " columns; the generator emits " + std::to_string(s.dim()));
    }
    const auto n = static_cast<Eigen::Index>(s.size());
    const auto k = static_cast<Eigen::Index>(last - first) + (intercept ? 1 : 0);
    Eigen::MatrixXd X(n, k);
    Eigen::Index c = 0;
    if (intercept) {
        X.col(c++).setOnes();
    }
    for (std::size_t j = first; j < last; ++j, ++c) {
        X.col(c) = column_vector(s, j);
    }
    return X;
}

double sample_sd(const Eigen::VectorXd& v) {
    const double m = v.mean();
    return std::sqrt((v.array() - m).square().sum() / static_cast<double>(std::max<Eigen::Index>(v.size() - 1, 1)));
}

void add_rate(ReportCell& cell, const std::string& name, std::size_t hits, std::size_t R) {
    const double p = static_cast<double>(hits) / static_cast<double>(R);
    cell.add(name, p, proportion_se(p, R));
}

// ---------------------------------------------------------------------------
// enumeration
// ---------------------------------------------------------------------------

double step_cdf_distance(const BootstrapDistribution& a, const BootstrapDistribution& b) {
    auto fa = [&](double t) { return a.cdf(t); };
    auto fa_left = [&](double t) { return a.cdf_left(t); };
    auto fb = [&](double t) { return b.cdf(t); };
    auto fb_left = [&](double t) { return b.cdf_left(t); };
    return std::max(ks_distance(a, fb, fb_left), ks_distance(b, fa, fa_left));
}

MCReport run_enumeration(const ExperimentConfig& c) {
    const auto data_values = c.reals("data");
    const Sample data = Sample::from_values(data_values);
    const SeedPolicy seed = base_seed(c);
    BootstrapOptions exact;
    exact.form = ReplicateForm::raw;
    exact.mode = EnumerationMode::exact;
    const auto dist_exact = run_bootstrap(Statistic::mean(), IidPlan{}, data, exact).distribution;
    BootstrapOptions mc = exact;
    mc.mode = EnumerationMode::monte_carlo;
    mc.B = c.count("B");
    mc.seed = seed.child(0);
    mc.threads = c.threads;
    const auto dist_mc = run_bootstrap(Statistic::mean(), IidPlan{}, data, mc).distribution;

    const MeanFunctional square = [](std::span<const double> m) { return m[0] * m[0]; };
    BiasOptions bias_exact;
    bias_exact.mode = EnumerationMode::exact;
    BiasOptions bias_mc;
    bias_mc.mode = EnumerationMode::monte_carlo;
    bias_mc.B = c.count("bias_B");
    bias_mc.seed = seed.child(1);
    const double n = static_cast<double>(data_values.size());
    const double mean = std::accumulate(data_values.begin(), data_values.end(), 0.0) / n;
    double ml_var = 0.0;
    for (double v : data_values) {
        ml_var += (v - mean) * (v - mean);
    }
    ml_var /= n;

    MCReport r;
    r.cell("cdf")
        .add("sup_distance_mc_vs_exact", step_cdf_distance(dist_exact, dist_mc))
        .add("exact_resamples", static_cast<double>(dist_exact.size()))
        .add("B", static_cast<double>(dist_mc.size()));
    r.cell("bias_square")
        .add("analytic", ml_var / n)
        .add("exact_enumeration", bias_estimate(square, data, bias_exact))
        .add("monte_carlo", bias_estimate(square, data, bias_mc));
    return r;
}

// ---------------------------------------------------------------------------
// uniform-max
// ---------------------------------------------------------------------------

MCReport run_uniform_max(const ExperimentConfig& c) {
    const std::size_t n = c.count("n");
    if (n < 2) {
        throw ConfigError("uniform-max: n must be at least 2");
    }
    const double theta = c.real("theta");
    CounterRng rng(base_seed(c).child(0), 0);
    const Sample data = find_dgp("uniform").generate(n, json{{"theta", theta}}, rng);
    BootstrapOptions opt;
    opt.B = c.count("B");
    opt.seed = base_seed(c).child(1);
    opt.form = ReplicateForm::centered;
    opt.rate = [](std::size_t m) { return static_cast<double>(m); };
    opt.mode = EnumerationMode::monte_carlo;
    opt.threads = c.threads;
    const auto dist = run_bootstrap(Statistic::maximum(), IidPlan{}, data, opt).distribution;
    const auto values = dist.values();
    const auto zeros = static_cast<std::size_t>(std::count(values.begin(), values.end(), 0.0));
    // Limit law of n (X_(n) - theta): P(T <= -z) = exp(-z / theta).
    const Cdf limit = [theta](double t) { return t >= 0.0 ? 1.0 : std::exp(t / theta); };
    const double nd = static_cast<double>(n);

    MCReport r;
    auto& atom = r.cell("atom_at_zero");
    add_rate(atom, "p_star_zero", zeros, opt.B);
    atom.add("exact", 1.0 - std::pow(1.0 - 1.0 / nd, nd)).add("limit", 1.0 - std::exp(-1.0));
    r.cell("limit_law")
        .add("ks_to_limit", ks_distance(dist, limit))
        .add("limit_cdf_at_minus_1", limit(-theta));
    return r;
}

// ---------------------------------------------------------------------------
// boundary
// ---------------------------------------------------------------------------

MCReport run_boundary(const ExperimentConfig& c) {
    const double mu = c.real("mu");
    if (mu < 0.0) {
        throw ConfigError("boundary: mu must be non-negative");
    }
    const std::size_t n = c.count("n");
    const std::size_t m = c.count("m") == 0 ? static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))))
                                            : c.count("m");
    const std::size_t B = c.count("B");
    const std::size_t R = c.count("mc_reps");
    Statistic stat{"boundary-mean",
                   [](const Sample& s) {
                       double sum = 0.0;
                       for (std::size_t i = 0; i < s.size(); ++i) {
                           sum += s(i, 0);
                       }
                       return std::max(0.0, sum / static_cast<double>(s.size()));
                   },
                   {}};
    const Cdf limit = [mu](double z) { return mu > 0.0 || z >= 0.0 ? normal_cdf(z) : 0.0; };
    const Cdf limit_left = [mu](double z) { return mu > 0.0 || z > 0.0 ? normal_cdf(z) : 0.0; };
    struct Rep {
        double full = 0.0;
        double moon = 0.0;
    };
    const auto reps = parallel_map<Rep>(R, c.threads, [&](std::size_t r) {
        const SeedPolicy s = rep_seed(c, 0, r);
        CounterRng rng(s, 0);
        const Sample data = find_dgp("gaussian").generate(n, json{{"mu", mu}, {"sigma", 1.0}}, rng);
        BootstrapOptions opt;
        opt.B = B;
        opt.form = ReplicateForm::centered;
        opt.rate = [](std::size_t k) { return std::sqrt(static_cast<double>(k)); };
        opt.mode = EnumerationMode::monte_carlo;
        opt.seed = s.child(1);
        const auto full = run_bootstrap(stat, IidPlan{}, data, opt).distribution;
        opt.seed = s.child(2);
        const auto moon = run_bootstrap(stat, MOutOfNPlan{m}, data, opt).distribution;
        return Rep{ks_distance(full, limit, limit_left), ks_distance(moon, limit, limit_left)};
    });
    std::vector<double> full;
    std::vector<double> moon;
    std::vector<double> diff;
    std::size_t moon_better = 0;
    for (const auto& rep : reps) {
        full.push_back(rep.full);
        moon.push_back(rep.moon);
        diff.push_back(rep.full - rep.moon);
        moon_better += rep.moon < rep.full ? 1 : 0;
    }
    MCReport r;
    const auto f = mean_se(full);
    const auto mo = mean_se(moon);
    const auto d = mean_se(diff);
    r.cell("ks_to_censored_normal")
        .add("full_n", f.mean, f.se)
        .add("m_out_of_n", mo.mean, mo.se)
        .add("difference", d.mean, d.se)
        .add("m", static_cast<double>(m));
    add_rate(r.cell("paired"), "m_out_of_n_better", moon_better, R);
    r.cell("limit_law").add("cdf_at_0", limit(0.0)).add("cdf_below_0", limit(-1e-9));
    return r;
}

// ---------------------------------------------------------------------------
// mammen
// ---------------------------------------------------------------------------

MCReport run_mammen(const ExperimentConfig& c) {
    const double eps = c.real("residual");
    const std::size_t N = c.count("draws");
    using L = MammenLaw;
    const double m1 = L::p * L::a + (1.0 - L::p) * L::b;
    const double m2 = L::p * L::a * L::a + (1.0 - L::p) * L::b * L::b;
    const double m3 = L::p * L::a * L::a * L::a + (1.0 - L::p) * L::b * L::b * L::b;
    const Eigen::VectorXd e =
        wild_errors(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(N), eps), WildScheme::mammen(),
                    base_seed(c), 0);
    MCReport r;
    r.cell("identities")
        .add("mean_error", std::abs(m1))
        .add("second_moment_error", std::abs(m2 - 1.0))
        .add("third_moment_error", std::abs(m3 - 1.0))
        .add("a", L::a)
        .add("b", L::b)
        .add("p", L::p);
    auto& sample = r.cell("sample_moments");
    const double target[3] = {0.0, eps * eps, eps * eps * eps};
    for (int k = 1; k <= 3; ++k) {
        const Eigen::ArrayXd pw = e.array().pow(k);
        const double mean = pw.mean();
        const double sd = std::sqrt((pw - mean).square().sum() / static_cast<double>(N - 1));
        const double se = sd / std::sqrt(static_cast<double>(N));
        const std::string name = "moment" + std::to_string(k);
        sample.add(name, mean, se).add(name + "_target", target[k - 1]).add(name + "_z", (mean - target[k - 1]) / se);
    }
    return r;
}

// ---------------------------------------------------------------------------
// ERP / ECP studies
// ---------------------------------------------------------------------------

struct ProcedureContext {
    std::size_t B;
    double alpha;
    Sidedness sided;
    SeedPolicy seed;
    const ExperimentConfig& config;
};

using Decisions = std::vector<std::pair<std::string, bool>>;
using Procedure = std::function<Decisions(const Sample& data, double truth, const ProcedureContext& ctx)>;

bool exact_t_reject(double t, std::size_t n, double alpha, Sidedness sided) {
    const double dof = static_cast<double>(n - 1);
    switch (sided) {
        case Sidedness::symmetric:
            return std::abs(t) > student_t_quantile(1.0 - alpha / 2.0, dof);
        case Sidedness::upper:
            return t > student_t_quantile(1.0 - alpha, dof);
        case Sidedness::lower:
            return t < -student_t_quantile(1.0 - alpha, dof);
    }
    return false;
}

Decisions procedure_mean_t(const Sample& data, double truth, const ProcedureContext& ctx) {
    const auto res = bootstrap_t_test(Statistic::mean(), IidPlan{}, data, truth,
                                      TestOptions{ctx.B, ctx.alpha, ctx.seed, ctx.sided, 1});
    return {{"bootstrap", res.reject},
            {"asymptotic", normal_decision(res.t, ctx.alpha, ctx.sided).reject},
            {"exact_t", exact_t_reject(res.t, data.size(), ctx.alpha, ctx.sided)}};
}

Decisions procedure_wild_slope(const Sample& data, double truth, const ProcedureContext& ctx) {
    const auto fit = ols_fit(data, "y", {"x"}, true);
    WildTestOptions opt;
    opt.B = ctx.B;
    opt.alpha = ctx.alpha;
    opt.seed = ctx.seed;
    opt.sided = ctx.sided;
    opt.variant = HcVariant::hc1;
    const auto boot = wild_bootstrap_t_test(fit, WildScheme::mammen(), 1, truth, opt);
    const auto asym = asymptotic_hccme_t_test(fit, 1, truth, ctx.alpha, ctx.sided, HcVariant::hc1);
    return {{"bootstrap", boot.reject}, {"asymptotic", asym.reject}};
}

Decisions procedure_slad_t(const Sample& data, double truth, const ProcedureContext& ctx) {
    const Eigen::MatrixXd X = columns_matrix(data, 1, 2, true);
    const Eigen::VectorXd y = column_vector(data, 0);
    const auto lad = lad_fit(X, y);
    const double scale = sample_sd(y - X * lad.coefficients);
    const SmoothKernel kernel(ctx.config.real("bandwidth_scale") * default_bandwidth(scale, data.size()));
    SmoothedTestOptions opt;
    opt.B = ctx.B;
    opt.alpha = ctx.alpha;
    opt.seed = ctx.seed;
    opt.sided = ctx.sided;
    const auto res = slad_t_test(X, y, kernel, 1, truth, opt);
    return {{"bootstrap", res.bootstrap.reject}, {"asymptotic", res.asymptotic.reject}};
}

Decisions procedure_sms_t(const Sample& data, double truth, const ProcedureContext& ctx) {
    const BinaryResponseData bin(column_vector(data, 0), columns_matrix(data, 1, data.dim(), false));
    const SmoothKernel kernel(ctx.config.real("bandwidth_scale") * sms_default_bandwidth(bin));
    SmoothedTestOptions opt;
    opt.B = ctx.B;
    opt.alpha = ctx.alpha;
    opt.seed = ctx.seed;
    opt.sided = ctx.sided;
    const auto res = sms_t_test(bin, kernel, 1, truth, opt);
    return {{"bootstrap", res.bootstrap.reject}, {"asymptotic", res.asymptotic.reject}};
}

Decisions procedure_alasso_t(const Sample& data, double truth, const ProcedureContext& ctx) {
    const Eigen::MatrixXd X = columns_matrix(data, 1, data.dim(), false);
    const Eigen::VectorXd y = column_vector(data, 0);
    const double lambda = ctx.config.real("lambda_scale") * default_lambda(data.size());
    const Eigen::VectorXd contrast = Eigen::VectorXd::Unit(X.cols(), 0);
    const auto res = alasso_residual_bootstrap_t(X, y, lambda, contrast, truth,
                                                 TestOptions{ctx.B, ctx.alpha, ctx.seed, ctx.sided, 1});
    return {{"bootstrap", res.bootstrap.reject}, {"asymptotic", res.asymptotic.reject}};
}

Decisions procedure_multiplier_lr(const Sample& data, double truth, const ProcedureContext& ctx) {
    const auto model = gaussian_mean_model(data.column(0), 1.0);
    MultiplierLrOptions opt;
    opt.B = ctx.B;
    opt.alpha = ctx.alpha;
    opt.seed = ctx.seed;
    const auto res = multiplier_lr_test(model, Eigen::VectorXd::Constant(1, truth), Eigen::VectorXd::Zero(1), opt);
    return {{"bootstrap", res.reject}, {"asymptotic", res.LR > chi_squared_quantile(1.0 - ctx.alpha, 1.0)}};
}

const std::vector<std::pair<std::string, Procedure>>& procedures() {
    static const std::vector<std::pair<std::string, Procedure>> list = {
        {"mean-t", procedure_mean_t},         {"wild-slope", procedure_wild_slope},
        {"slad-t", procedure_slad_t},         {"sms-t", procedure_sms_t},
        {"alasso-t", procedure_alasso_t},     {"multiplier-lr", procedure_multiplier_lr},
    };
    return list;
}

const Procedure& find_procedure(const std::string& name) {
    for (const auto& [n, p] : procedures()) {
        if (n == name) {
            return p;
        }
    }
    std::string names;
    for (const auto& [n, p] : procedures()) {
        names += (names.empty() ? "" : ", ") + n;
    }
    throw ConfigError("unknown procedure '" + name + "' (available: " + names + ")");
}

MCReport run_rejection_study(const ExperimentConfig& c, bool coverage) {
    const Procedure& procedure = find_procedure(c.text("procedure"));
    const auto ns = c.counts("n");
    const std::size_t R = c.count("mc_reps");
    const std::size_t B = c.count("B");
    const double alpha = c.real("alpha");
    const Sidedness sided = sidedness_from_string(c.text("sided"));
    struct CellSpec {
        std::string dgp;
        json params;
        std::size_t n;
    };
    std::vector<CellSpec> cells;
    for (std::size_t n : ns) {
        cells.push_back({c.text("dgp"), c.at("dgp_params"), n});
    }
    const std::string oracle = c.text("oracle_dgp");
    if (!oracle.empty()) {
        for (std::size_t n : ns) {
            cells.push_back({oracle, resolve_dgp_params(oracle, json::object()), n});
        }
    }
    MCReport report;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto& spec = cells[k];
        const Dgp& dgp = find_dgp(spec.dgp);
        const double truth = dgp.truth(spec.params);
        const auto outcomes = parallel_map<Decisions>(R, c.threads, [&](std::size_t r) {
            const SeedPolicy s = rep_seed(c, k, r);
            CounterRng rng(s, 0);
            const Sample data = dgp.generate(spec.n, spec.params, rng);
            return procedure(data, truth, ProcedureContext{B, alpha, sided, s.child(1), c});
        });
        auto& cell = report.cell(spec.dgp + "/n=" + std::to_string(spec.n));
        for (std::size_t d = 0; d < outcomes.front().size(); ++d) {
            std::size_t hits = 0;
            for (const auto& o : outcomes) {
                hits += o[d].second ? 1 : 0;
            }
            const double rate = static_cast<double>(hits) / static_cast<double>(R);
            const double se = proportion_se(rate, R);
            const std::string& name = outcomes.front()[d].first;
            if (coverage) {
                cell.add(name + "_coverage", 1.0 - rate, se).add(name + "_ecp", (1.0 - rate) - (1.0 - alpha), se);
            } else {
                cell.add(name + "_rate", rate, se).add(name + "_erp", rate - alpha, se);
            }
        }
        cell.add("mc_reps", static_cast<double>(R));
    }
    if (coverage) {
        report.notes.push_back("coverage of the interval dual to each test: covered iff the test does not reject");
    }
    return report;
}

// ---------------------------------------------------------------------------
// bias
// ---------------------------------------------------------------------------

MCReport run_bias(const ExperimentConfig& c) {
    const std::string dgp_name = c.text("dgp");
    const Dgp& dgp = find_dgp(dgp_name);
    const json& params = c.at("dgp_params");
    const std::size_t n = c.count("n");
    const std::size_t R = c.count("mc_reps");
    const double mu = dgp.truth(params);
    const double target = mu * mu;
    const MeanFunctional square = [](std::span<const double> m) { return m[0] * m[0]; };
    struct Rep {
        double raw;
        double corrected;
    };
    const auto reps = parallel_map<Rep>(R, c.threads, [&](std::size_t r) {
        const SeedPolicy s = rep_seed(c, 0, r);
        CounterRng rng(s, 0);
        const Sample data = dgp.generate(n, params, rng);
        BiasOptions opt;
        opt.B = c.count("B");
        opt.seed = s.child(1);
        opt.mode = EnumerationMode::monte_carlo;
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += data(i, 0);
        }
        mean /= static_cast<double>(n);
        return Rep{mean * mean - target, bias_corrected(square, data, opt) - target};
    });
    std::vector<double> raw;
    std::vector<double> corrected;
    for (const auto& rep : reps) {
        raw.push_back(rep.raw);
        corrected.push_back(rep.corrected);
    }
    const auto a = mean_se(raw);
    const auto b = mean_se(corrected);
    MCReport report;
    auto& cell = report.cell(dgp_name + "/n=" + std::to_string(n));
    cell.add("raw_bias", a.mean, a.se).add("corrected_bias", b.mean, b.se);
    if (dgp_name == "gaussian") {
        const double sigma = params.at("sigma").get<double>();
        cell.add("analytic_raw_bias", sigma * sigma / static_cast<double>(n));
    }
    return report;
}

// ---------------------------------------------------------------------------
// hh-band
// ---------------------------------------------------------------------------

MCReport run_hh_band(const ExperimentConfig& c) {
    const std::size_t n = c.count("n");
    const std::size_t R = c.count("mc_reps");
    const std::size_t G = c.count("grid_points");
    const json params{{"sigma", c.real("sigma")}};
    std::vector<double> grid(G);
    for (std::size_t g = 0; g < G; ++g) {
        grid[g] = (static_cast<double>(g) + 0.5) / static_cast<double>(G);
    }
    BandOptions base;
    base.degree = static_cast<int>(c.count("degree"));
    base.kernel = kernel_from_string(c.text("kernel"));
    base.alpha0 = c.real("alpha0");
    base.xi = c.real("xi");
    base.B = c.count("B");
    if (c.real("bandwidth") > 0.0) {
        base.bandwidth = c.real("bandwidth");
    }
    struct Rep {
        std::vector<char> covered;
        double z;
        double alpha;
        double h;
        double flagged;
    };
    const Dgp& dgp = find_dgp("sine_regression");
    const auto reps = parallel_map<Rep>(R, c.threads, [&](std::size_t r) {
        const SeedPolicy s = rep_seed(c, 0, r);
        CounterRng rng(s, 0);
        const Sample data = dgp.generate(n, params, rng);
        BandOptions opt = base;
        opt.seed = s.child(1);
        const auto band = hh_band(column_vector(data, 1), column_vector(data, 0), grid, opt);
        Rep rep;
        rep.covered.resize(G);
        for (std::size_t g = 0; g < G; ++g) {
            const double truth = std::sin(2.0 * M_PI * grid[g]);
            const auto i = static_cast<Eigen::Index>(g);
            rep.covered[g] = band.lower[i] <= truth && truth <= band.upper[i] ? 1 : 0;
        }
        rep.z = band.z;
        rep.alpha = band.alpha_calibrated;
        rep.h = band.bandwidth;
        rep.flagged = static_cast<double>(std::count_if(band.flags.begin(), band.flags.end(),
                                                        [](BetaFlag f) { return f != BetaFlag::none; })) /
                      static_cast<double>(G);
        return rep;
    });
    MCReport report;
    std::vector<double> z;
    std::vector<double> alpha;
    std::vector<double> h;
    std::vector<double> flagged;
    for (const auto& rep : reps) {
        z.push_back(rep.z);
        alpha.push_back(rep.alpha);
        h.push_back(rep.h);
        flagged.push_back(rep.flagged);
    }
    std::size_t above = 0;
    const double threshold = c.real("coverage_target");
    std::vector<double> coverage(G);
    for (std::size_t g = 0; g < G; ++g) {
        std::size_t hits = 0;
        for (const auto& rep : reps) {
            hits += static_cast<std::size_t>(rep.covered[g]);
        }
        coverage[g] = static_cast<double>(hits) / static_cast<double>(R);
        above += coverage[g] >= threshold ? 1 : 0;
    }
    const auto zs = mean_se(z);
    const auto as = mean_se(alpha);
    const auto hs = mean_se(h);
    const auto fs = mean_se(flagged);
    report.cell("summary")
        .add("z_multiplier", zs.mean, zs.se)
        .add("z_multiplier_min", *std::min_element(z.begin(), z.end()))
        .add("alpha_calibrated", as.mean, as.se)
        .add("bandwidth", hs.mean, hs.se)
        .add("flagged_fraction", fs.mean, fs.se)
        .add("fraction_points_at_target", static_cast<double>(above) / static_cast<double>(G))
        .add("coverage_target", threshold);
    for (std::size_t g = 0; g < G; ++g) {
        report.cell("x=" + label(grid[g])).add("coverage", coverage[g], proportion_se(coverage[g], R));
    }
    return report;
}

// ---------------------------------------------------------------------------
// alasso
// ---------------------------------------------------------------------------

MCReport run_alasso(const ExperimentConfig& c) {
    const Dgp& dgp = find_dgp("sparse_linear");
    const json& params = c.at("dgp_params");
    const auto beta = params.at("beta").get<std::vector<double>>();
    const std::size_t n = c.count("n");
    const std::size_t R = c.count("mc_reps");
    const std::size_t j = c.count("test_coefficient");
    if (j >= beta.size()) {
        throw ConfigError("alasso: test_coefficient out of range");
    }
    std::vector<Eigen::Index> support;
    for (std::size_t k = 0; k < beta.size(); ++k) {
        if (beta[k] != 0.0) {
            support.push_back(static_cast<Eigen::Index>(k));
        }
    }
    const double lambda = c.real("lambda_scale") * default_lambda(n);
    struct Rep {
        bool support;
        bool boot;
        bool asym;
        std::size_t discarded;
    };
    const auto reps = parallel_map<Rep>(R, c.threads, [&](std::size_t r) {
        const SeedPolicy s = rep_seed(c, 0, r);
        CounterRng rng(s, 0);
        const Sample data = dgp.generate(n, params, rng);
        const Eigen::MatrixXd X = columns_matrix(data, 1, data.dim(), false);
        const Eigen::VectorXd y = column_vector(data, 0);
        const auto res = alasso_residual_bootstrap_t(
            X, y, lambda, Eigen::VectorXd::Unit(X.cols(), static_cast<Eigen::Index>(j)), beta[j],
            TestOptions{c.count("B"), c.real("alpha"), s.child(1), sidedness_from_string(c.text("sided")), 1});
        return Rep{res.fit.active_set == support, res.bootstrap.reject, res.asymptotic.reject,
                   res.bootstrap.discarded};
    });
    std::size_t sup = 0;
    std::size_t boot = 0;
    std::size_t asym = 0;
    std::size_t discarded = 0;
    for (const auto& rep : reps) {
        sup += rep.support ? 1 : 0;
        boot += rep.boot ? 1 : 0;
        asym += rep.asym ? 1 : 0;
        discarded += rep.discarded;
    }
    MCReport report;
    add_rate(report.cell("support"), "recovery_rate", sup, R);
    auto& test = report.cell("test");
    add_rate(test, "bootstrap_rate", boot, R);
    add_rate(test, "asymptotic_rate", asym, R);
    test.add("discarded_replicates", static_cast<double>(discarded)).add("lambda", lambda);
    return report;
}

// ---------------------------------------------------------------------------
// time-series
// ---------------------------------------------------------------------------

MCReport run_time_series(const ExperimentConfig& c) {
    const double phi = c.real("phi");
    const double sigma = c.real("sigma");
    const std::size_t n = c.count("n");
    const std::size_t R = c.count("mc_reps");
    const std::size_t B = c.count("B");
    const std::size_t l =
        c.count("block_length") == 0 ? optimal_block_length(n, BlockPurpose::bias_variance) : c.count("block_length");
    SieveSettings sieve;
    if (c.count("sieve_order") > 0) {
        sieve.order = c.count("sieve_order");
    }
    sieve.method = c.text("method") == "least_squares" ? ArMethod::least_squares : ArMethod::yule_walker;
    if (c.text("method") != "least_squares" && c.text("method") != "yule_walker") {
        throw ConfigError("time-series: method must be yule_walker or least_squares");
    }
    struct Rep {
        double sieve;
        double block;
        double iid;
    };
    const auto reps = parallel_map<Rep>(R, c.threads, [&](std::size_t r) {
        const SeedPolicy s = rep_seed(c, 0, r);
        CounterRng rng(s, 0);
        const auto x = simulate_ar1(n, phi, sigma, rng);
        const SieveBootstrap sb(x, sieve);
        const SeedPolicy s_sieve = s.child(1);
        const SeedPolicy s_block = s.child(2);
        const SeedPolicy s_iid = s.child(3);
        Rep rep;
        rep.sieve = bootstrap_mean_variance([&](std::size_t b) { return sb.generate(n, s_sieve, b); }, B, n);
        rep.block = bootstrap_mean_variance(
            [&](std::size_t b) { return block_resample(x, BlockPlan{l, true, n}, s_block, b); }, B, n);
        rep.iid = bootstrap_mean_variance(
            [&](std::size_t b) { return block_resample(x, BlockPlan{1, true, n}, s_iid, b); }, B, n);
        return rep;
    });
    std::vector<double> sv;
    std::vector<double> bv;
    std::vector<double> iv;
    for (const auto& rep : reps) {
        sv.push_back(rep.sieve);
        bv.push_back(rep.block);
        iv.push_back(rep.iid);
    }
    const double truth = sigma * sigma / ((1.0 - phi) * (1.0 - phi));
    const auto a = mean_se(sv);
    const auto b = mean_se(bv);
    const auto i = mean_se(iv);
    MCReport report;
    report.cell("long_run_variance")
        .add("analytic", truth)
        .add("sieve", a.mean, a.se)
        .add("sieve_relative_error", a.mean / truth - 1.0, a.se / truth)
        .add("block", b.mean, b.se)
        .add("block_relative_error", b.mean / truth - 1.0, b.se / truth)
        .add("iid", i.mean, i.se)
        .add("block_length", static_cast<double>(l))
        .add("sieve_order", static_cast<double>(sieve.order ? *sieve.order : sieve_order(n)));
    return report;
}

// ---------------------------------------------------------------------------
// multiplier-lr
// ---------------------------------------------------------------------------

MCReport run_multiplier_lr(const ExperimentConfig& c) {
    const std::size_t n = c.count("n");
    const std::size_t R = c.count("mc_reps");
    const double mu = c.real("mu");
    const double alpha = c.real("alpha");
    MultiplierLrOptions base;
    base.B = c.count("B");
    base.alpha = alpha;
    base.law = multiplier_law_from_string(c.text("law"));
    base.centering = c.text("centering") == "null_value" ? LrCentering::null_value : LrCentering::estimate;
    if (c.text("centering") != "estimate" && c.text("centering") != "null_value") {
        throw ConfigError("multiplier-lr: centering must be estimate or null_value");
    }
    const Eigen::VectorXd theta0 = Eigen::VectorXd::Constant(1, mu);

    // Closed-form check on fixed data: LR = n (mean - theta0)^2 for N(theta, 1).
    MCReport report;
    {
        const auto data = c.reals("check_data");
        const double mean = std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
        const double check_theta0 = c.real("check_theta0");
        MultiplierLrOptions opt = base;
        opt.B = 1;
        opt.seed = base_seed(c).child(0);
        const auto res = multiplier_lr_test(gaussian_mean_model(data), Eigen::VectorXd::Constant(1, check_theta0),
                                            Eigen::VectorXd::Zero(1), opt);
        const double analytic = static_cast<double>(data.size()) * (mean - check_theta0) * (mean - check_theta0);
        report.cell("fixed_data").add("LR", res.LR).add("analytic", analytic).add("abs_error",
                                                                                  std::abs(res.LR - analytic));
    }
    struct Rep {
        bool boot;
        bool asym;
        double z;
        double lr_error;
    };
    const double chi2 = chi_squared_quantile(1.0 - alpha, 1.0);
    const auto reps = parallel_map<Rep>(R, c.threads, [&](std::size_t r) {
        const SeedPolicy s = rep_seed(c, 1, r);
        CounterRng rng(s, 0);
        const Sample data = find_dgp("gaussian").generate(n, json{{"mu", mu}, {"sigma", 1.0}}, rng);
        const auto x = data.column(0);
        MultiplierLrOptions opt = base;
        opt.seed = s.child(1);
        const auto res = multiplier_lr_test(gaussian_mean_model(x), theta0, Eigen::VectorXd::Zero(1), opt);
        const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
        const double analytic = static_cast<double>(n) * (mean - mu) * (mean - mu);
        return Rep{res.reject, res.LR > chi2, res.z_star, std::abs(res.LR - analytic)};
    });
    std::size_t boot = 0;
    std::size_t asym = 0;
    std::vector<double> z;
    double worst = 0.0;
    for (const auto& rep : reps) {
        boot += rep.boot ? 1 : 0;
        asym += rep.asym ? 1 : 0;
        z.push_back(rep.z);
        worst = std::max(worst, rep.lr_error);
    }
    auto& cell = report.cell("gaussian/n=" + std::to_string(n));
    add_rate(cell, "bootstrap_rate", boot, R);
    add_rate(cell, "chi2_rate", asym, R);
    const auto zs = mean_se(z);
    cell.add("z_star", zs.mean, zs.se).add("chi2_critical", chi2).add("max_lr_abs_error", worst);
    return report;
}

// ---------------------------------------------------------------------------
// cck
// ---------------------------------------------------------------------------

MCReport run_cck(const ExperimentConfig& c) {
    const auto n = static_cast<Eigen::Index>(c.count("n"));
    const auto p = static_cast<Eigen::Index>(c.count("p"));
    const std::size_t R = c.count("mc_reps");
    const std::size_t B = c.count("B");
    const double alpha = c.real("alpha");
    struct Rep {
        bool covered;
        double z;
    };
    const auto reps = parallel_map<Rep>(R, c.threads, [&](std::size_t r) {
        const SeedPolicy s = rep_seed(c, 0, r);
        CounterRng rng(s, 0);
        Eigen::MatrixXd X(n, p);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) {
                X(i, j) = rng.normal();
            }
        }
        const auto res = cck_max_bootstrap(X, B, alpha, s.child(1));
        return Rep{res.covered, res.z_star};
    });
    std::size_t covered = 0;
    std::vector<double> z;
    for (const auto& rep : reps) {
        covered += rep.covered ? 1 : 0;
        z.push_back(rep.z);
    }
    MCReport report;
    auto& cell = report.cell("gaussian/n=" + std::to_string(n) + "/p=" + std::to_string(p));
    add_rate(cell, "coverage", covered, R);
    const auto zs = mean_se(z);
    cell.add("z_star", zs.mean, zs.se).add("nominal", 1.0 - alpha);
    return report;
}

// ---------------------------------------------------------------------------
// maxscore
// ---------------------------------------------------------------------------

std::vector<double> deciles(std::vector<double> v) {
    std::vector<double> out;
    for (int d = 1; d <= 9; ++d) {
        out.push_back(rank_quantile(v, d / 10.0));
    }
    return out;
}

MCReport run_maxscore(const ExperimentConfig& c) {
    const std::size_t n = c.count("n");
    const std::size_t B = c.count("B");
    const std::size_t seeds = c.count("seeds");
    const json params{{"beta", c.real("beta")}};
    MaxScoreGrid grid;
    grid.half_width = c.real("half_width");
    grid.points = c.count("grid_points");
    const Dgp& dgp = find_dgp("logistic_latent_binary");
    auto make_data = [&](std::size_t r) {
        CounterRng rng(rep_seed(c, 0, r), 0);
        const Sample data = dgp.generate(n, params, rng);
        return BinaryResponseData(column_vector(data, 0), columns_matrix(data, 1, data.dim(), false));
    };
    auto kernel_for = [&](const BinaryResponseData& bin) {
        return SmoothKernel(c.real("bandwidth_scale") * sms_default_bandwidth(bin));
    };
    auto abs_q95 = [](const std::vector<double>& t) {
        std::vector<double> a(t.size());
        std::transform(t.begin(), t.end(), a.begin(), [](double v) { return std::abs(v); });
        return rank_quantile(a, 0.95);
    };
    auto cv = [](const std::vector<double>& v) {
        const auto m = mean_se(v);
        return m.se * std::sqrt(static_cast<double>(v.size())) / m.mean;
    };
    struct Rep {
        std::vector<double> t_star;
        double q95 = 0.0;
        std::size_t discarded = 0;
    };

    // One dataset; the SMS bootstrap-t cloud is redrawn under `seeds` bootstrap seeds.
    const BinaryResponseData bin = make_data(0);
    const SmoothKernel kernel = kernel_for(bin);
    const auto sms = sms_fit(bin, kernel);
    const auto reps = parallel_map<Rep>(seeds, c.threads, [&](std::size_t r) {
        Rep rep;
        rep.t_star = sms_t_replicates(bin, sms, kernel, 1, B, rep_seed(c, 1, r), 1, &rep.discarded);
        rep.q95 = abs_q95(rep.t_star);
        return rep;
    });
    // The same diagnostic over independent datasets.
    const auto across = parallel_map<double>(seeds, c.threads, [&](std::size_t r) {
        const BinaryResponseData other = make_data(r + 1);
        const SmoothKernel k = kernel_for(other);
        const auto fit = sms_fit(other, k);
        return abs_q95(sms_t_replicates(other, fit, k, 1, B, rep_seed(c, 2, r), 1, nullptr));
    });

    const auto ms = max_score_fit(bin, grid);
    std::vector<double> cloud;
    const SeedPolicy s_ms = rep_seed(c, 3, 0);
    for (std::size_t b = 0; b < B; ++b) {
        CounterRng brng(s_ms, b);
        const auto idx = iid_indices(n, n, brng);
        Eigen::VectorXd y(static_cast<Eigen::Index>(n));
        Eigen::MatrixXd X(static_cast<Eigen::Index>(n), bin.X.cols());
        for (std::size_t i = 0; i < n; ++i) {
            y[static_cast<Eigen::Index>(i)] = bin.y[static_cast<Eigen::Index>(idx[i])];
            X.row(static_cast<Eigen::Index>(i)) = bin.X.row(static_cast<Eigen::Index>(idx[i]));
        }
        try {
            const auto star = max_score_fit(BinaryResponseData(std::move(y), std::move(X)), grid);
            cloud.push_back(star.coefficients[1] - ms.coefficients[1]);
        } catch (const InvalidInput&) {
            // a resample without enough distinct x1 values; skipped
        }
    }

    std::vector<double> q95;
    for (const auto& rep : reps) {
        q95.push_back(rep.q95);
    }
    MCReport report;
    const auto q = mean_se(q95);
    report.cell("sms_abs_t_q95")
        .add("mean", q.mean, q.se)
        .add("coefficient_of_variation", cv(q95))
        .add("seeds", static_cast<double>(seeds))
        .add("b2_hat", sms.coefficients[1])
        .add("b2_se", std::sqrt(sms.cov(1, 1)));
    const auto qa = mean_se(across);
    report.cell("sms_abs_t_q95_across_datasets")
        .add("mean", qa.mean, qa.se)
        .add("coefficient_of_variation", cv(across));
    std::set<double> atoms(cloud.begin(), cloud.end());
    double min_gap = std::numeric_limits<double>::infinity();
    for (auto it = atoms.begin(); it != atoms.end() && std::next(it) != atoms.end(); ++it) {
        min_gap = std::min(min_gap, *std::next(it) - *it);
    }
    report.cell("max_score_cloud")
        .add("b2_hat", ms.coefficients[1])
        .add("distinct_values", static_cast<double>(atoms.size()))
        .add("replicates", static_cast<double>(cloud.size()))
        .add("cell_width", ms.cell_width)
        .add("min_gap", std::isfinite(min_gap) ? min_gap : 0.0);
    const auto ms_dec = deciles(cloud);
    const auto t_dec = deciles(reps.front().t_star);
    auto& dec = report.cell("deciles");
    for (std::size_t d = 0; d < ms_dec.size(); ++d) {
        dec.add("max_score_d" + std::to_string(d + 1), ms_dec[d]);
    }
    for (std::size_t d = 0; d < t_dec.size(); ++d) {
        dec.add("sms_t_d" + std::to_string(d + 1), t_dec[d]);
    }
    for (std::size_t r = 0; r < reps.size(); ++r) {
        report.cell("seed=" + std::to_string(r))
            .add("sms_abs_t_q95", reps[r].q95)
            .add("sms_discarded", static_cast<double>(reps[r].discarded));
    }
    report.notes.push_back("qualitative contrast; the unsmoothed estimator lives on a finite grid");
    return report;
}

// ---------------------------------------------------------------------------
// registry
// ---------------------------------------------------------------------------

json study_defaults(const std::string& procedure, const std::string& dgp, std::vector<std::size_t> n,
                    std::size_t B, std::size_t R, const std::string& oracle) {
    return json{{"procedure", procedure}, {"dgp", dgp},          {"dgp_params", nullptr},
                {"n", n},                 {"B", B},              {"mc_reps", R},
                {"alpha", 0.05},          {"sided", "symmetric"}, {"oracle_dgp", oracle},
                {"seed", 20240101},       {"bandwidth_scale", 1.0}, {"lambda_scale", 1.0}};
}

std::vector<ExperimentInfo> build_experiments() {
    std::vector<ExperimentInfo> list;
    list.push_back({"enumeration", "simulated vs exactly enumerated bootstrap of the mean of {1,2,3}",
                    json{{"data", {1.0, 2.0, 3.0}}, {"B", 100000}, {"bias_B", 1000000}, {"seed", 20240101}},
                    run_enumeration});
    list.push_back({"uniform-max", "bootstrap of n(max - theta) for U[0, theta] data: mass at zero",
                    json{{"n", 1000}, {"B", 5000}, {"theta", 1.0}, {"seed", 20240101}}, run_uniform_max});
    list.push_back({"boundary", "full-n vs m-out-of-n bootstrap for a mean on the boundary of the parameter set",
                    json{{"mu", 0.0}, {"n", 500}, {"B", 1000}, {"m", 0}, {"mc_reps", 50}, {"seed", 20240101}},
                    run_boundary});
    list.push_back({"mammen", "moment identities and sample moments of Mammen wild-bootstrap errors",
                    json{{"residual", 1.7}, {"draws", 1000000}, {"seed", 20240101}}, run_mammen});
    list.push_back({"erp-study", "rejection rates under a true null, bootstrap vs asymptotic critical values",
                    study_defaults("mean-t", "centered_exponential", {15}, 999, 10000, "gaussian"),
                    run_erp_study});
    list.push_back({"ecp-study", "coverage of bootstrap-t vs asymptotic intervals",
                    study_defaults("mean-t", "centered_exponential", {15}, 999, 10000, "gaussian"),
                    run_ecp_study});
    list.push_back({"erp-mean", "ERP of the studentized mean test (centered exponential, n = 15)",
                    study_defaults("mean-t", "centered_exponential", {15}, 999, 10000, "gaussian"),
                    run_erp_study});
    list.push_back({"wild", "wild bootstrap vs asymptotic HCCME slope test, heteroskedastic design",
                    study_defaults("wild-slope", "heteroskedastic_linear", {25}, 999, 10000, ""), run_erp_study});
    list.push_back({"bias", "bootstrap bias correction of the squared mean",
                    json{{"dgp", "gaussian"}, {"dgp_params", nullptr}, {"n", 20}, {"B", 200}, {"mc_reps", 20000},
                         {"seed", 20240101}},
                    run_bias});
    list.push_back({"hh-band", "bootstrap-calibrated pointwise bands for local linear regression",
                    json{{"n", 500},
                         {"sigma", 0.3},
                         {"grid_points", 50},
                         {"alpha0", 0.05},
                         {"xi", 0.1},
                         {"B", 500},
                         {"mc_reps", 500},
                         {"degree", 1},
                         {"kernel", "biweight"},
                         {"bandwidth", 0.0},
                         {"coverage_target", 0.93},
                         {"seed", 20240101}},
                    run_hh_band});
    list.push_back({"alasso", "adaptive LASSO support recovery and residual-bootstrap t test",
                    json{{"dgp_params", nullptr},
                         {"n", 400},
                         {"B", 399},
                         {"mc_reps", 1000},
                         {"alpha", 0.05},
                         {"sided", "symmetric"},
                         {"lambda_scale", 1.0},
                         {"test_coefficient", 0},
                         {"seed", 20240101}},
                    run_alasso});
    list.push_back({"time-series", "sieve and block bootstrap estimates of Var(sqrt(n) mean) for AR(1)",
                    json{{"phi", 0.5},
                         {"sigma", 1.0},
                         {"n", 400},
                         {"B", 500},
                         {"mc_reps", 500},
                         {"block_length", 0},
                         {"sieve_order", 0},
                         {"method", "yule_walker"},
                         {"seed", 20240101}},
                    run_time_series});
    list.push_back({"multiplier-lr", "multiplier-bootstrap likelihood-ratio test, Gaussian mean",
                    json{{"n", 100},
                         {"mu", 0.0},
                         {"B", 499},
                         {"mc_reps", 2000},
                         {"alpha", 0.05},
                         {"law", "gaussian"},
                         {"centering", "estimate"},
                         {"check_data", {0.0, 2.0}},
                         {"check_theta0", 0.0},
                         {"seed", 20240101}},
                    run_multiplier_lr});
    list.push_back({"cck", "Gaussian multiplier bootstrap for the max of a high-dimensional mean",
                    json{{"n", 100}, {"p", 200}, {"B", 500}, {"mc_reps", 1000}, {"alpha", 0.05}, {"seed", 20240101}},
                    run_cck});
    list.push_back({"maxscore", "pairs bootstrap of the maximum-score estimator vs SMS bootstrap-t",
                    json{{"n", 250},
                         {"B", 999},
                         {"seeds", 10},
                         {"beta", 1.0},
                         {"half_width", 5.0},
                         {"grid_points", 401},
                         {"bandwidth_scale", 1.0},
                         {"seed", 20240101}},
                    run_maxscore});
    return list;
}

void validate(const ExperimentConfig& c) {
    const json& s = c.settings;
    for (const char* key : {"B", "mc_reps", "draws", "seeds", "bias_B", "grid_points", "p"}) {
        if (s.contains(key) && c.count(key) == 0) {
            throw ConfigError(c.experiment + ": '" + key + "' must be positive");
        }
    }
    if (s.contains("n")) {
        if (s.at("n").is_array()) {
            if (s.at("n").empty()) {
                throw ConfigError(c.experiment + ": 'n' must list at least one sample size");
            }
            (void)c.counts("n");
        } else if (c.count("n") == 0) {
            throw ConfigError(c.experiment + ": 'n' must be positive");
        }
    }
    for (const char* key : {"alpha", "alpha0"}) {
        if (s.contains(key)) {
            const double a = c.real(key);
            if (!(a > 0.0 && a < 1.0)) {
                throw ConfigError(c.experiment + ": '" + std::string(key) + "' must lie in (0, 1)");
            }
        }
    }
    if (s.contains("sided")) {
        try {
            (void)sidedness_from_string(c.text("sided"));
        } catch (const std::exception& e) {
            throw ConfigError(c.experiment + ": " + e.what());
        }
    }
    if (s.contains("procedure")) {
        (void)find_procedure(c.text("procedure"));
    }
    (void)c.seed();
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
    static const std::vector<ExperimentInfo> list = build_experiments();
    return list;
}

const ExperimentInfo& find_experiment(const std::string& name) {
    for (const auto& e : experiments()) {
        if (e.name == name) {
            return e;
        }
    }
    std::string names;
    for (const auto& e : experiments()) {
        names += (names.empty() ? "" : ", ") + e.name;
    }
    throw ConfigError("unknown experiment '" + name + "' (available: " + names + ")");
}

ExperimentConfig resolve_config(const std::string& experiment, const json& overrides, unsigned threads) {
    const ExperimentInfo& info = find_experiment(experiment);
    ExperimentConfig c;
    c.experiment = experiment;
    c.threads = std::max(1U, threads);
    c.settings = merge_settings(info.defaults, overrides, experiment);
    if (c.settings.contains("dgp_params")) {
        const std::string dgp = c.settings.contains("dgp") ? c.settings.at("dgp").get<std::string>()
                                                           : std::string("sparse_linear");
        const json user = c.settings.at("dgp_params").is_null() ? json::object() : c.settings.at("dgp_params");
        c.settings["dgp_params"] = resolve_dgp_params(dgp, user);
    }
    validate(c);
    return c;
}

ExperimentConfig resolve_config(const json& document) {
    if (!document.is_object() || !document.contains("experiment") || !document.at("experiment").is_string()) {
        throw ConfigError("config must be a mapping with a string 'experiment' key");
    }
    json overrides = document;
    overrides.erase("experiment");
    unsigned threads = 1;
    if (overrides.contains("threads")) {
        if (!overrides.at("threads").is_number_integer() || overrides.at("threads").get<int>() < 1) {
            throw ConfigError("'threads' must be a positive integer");
        }
        threads = overrides.at("threads").get<unsigned>();
        overrides.erase("threads");
    }
    return resolve_config(document.at("experiment").get<std::string>(), overrides, threads);
}

MCReport run_experiment(const ExperimentConfig& config) {
    MCReport r = find_experiment(config.experiment).run(config);
    r.experiment = config.experiment;
    r.config = config.settings;
    r.provenance.config_hash = config.hash();
    r.provenance.seed = config.seed();
    r.provenance.version = kVersion;
    return r;
}

std::vector<std::string> procedure_names() {
    std::vector<std::string> out;
    for (const auto& [n, p] : procedures()) {
        out.push_back(n);
    }
    return out;
}

MCReport run_erp_study(const ExperimentConfig& config) { return run_rejection_study(config, false); }
MCReport run_ecp_study(const ExperimentConfig& config) { return run_rejection_study(config, true); }

MCReport demo_uniform_max(std::size_t n, std::size_t B, std::uint64_t seed) {
    return run_experiment(resolve_config("uniform-max", json{{"n", n}, {"B", B}, {"seed", seed}}));
}

MCReport demo_boundary(double mu, std::size_t n, std::size_t B, std::size_t m, std::uint64_t seed,
                       std::size_t mc_reps) {
    return run_experiment(resolve_config(
        "boundary", json{{"mu", mu}, {"n", n}, {"B", B}, {"m", m}, {"seed", seed}, {"mc_reps", mc_reps}}));
}

MCReport demo_maxscore_inconsistency(std::size_t n, std::size_t B, std::uint64_t seed) {
    return run_experiment(resolve_config("maxscore", json{{"n", n}, {"B", B}, {"seed", seed}}));
}

}  // namespace bootlab
