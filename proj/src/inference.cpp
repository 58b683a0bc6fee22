#include "bootlab/inference.hpp"

#include "bootlab/error.hpp"
#include "bootlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace bootlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// n^n if it does not exceed `limit`, otherwise nullopt.
std::optional<std::uint64_t> enumeration_count(std::size_t n, std::uint64_t limit) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (count > limit / n) {
            return std::nullopt;
        }
        count *= n;
    }
    return count;
}

// The r-th of the n^n index sequences, in base-n odometer order.
std::vector<std::size_t> enumerated_indices(std::size_t n, std::uint64_t r) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) {
        idx[i] = static_cast<std::size_t>(r % n);
        r /= n;
    }
    return idx;
}

std::optional<std::uint64_t> exact_enumeration(const ResamplePlan& plan, std::size_t n, EnumerationMode mode,
                                               std::uint64_t limit) {
    if (mode == EnumerationMode::monte_carlo) {
        return std::nullopt;
    }
    const auto* iid = std::get_if<IidPlan>(&plan);
    const bool eligible = iid != nullptr && (iid->n_out == 0 || iid->n_out == n);
    if (!eligible) {
        if (mode == EnumerationMode::exact) {
            throw InvalidInput("exact enumeration requires an i.i.d. plan with n_out = n");
        }
        return std::nullopt;
    }
    const auto count = enumeration_count(n, limit);
    if (!count && mode == EnumerationMode::exact) {
        throw InvalidInput("exact enumeration: n^n exceeds the enumeration limit");
    }
    return count;
}

std::vector<double> magnitudes(std::span<const double> v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::abs(x); });
    return out;
}

}  // namespace

Sample generate_resample(const ResamplePlan& plan, const Sample& data, SeedPolicy seed, std::uint64_t replicate) {
    return std::visit(
        Overloaded{
            [&](const IidPlan& p) {
                return draw_iid_resample(data, p.n_out == 0 ? data.size() : p.n_out, seed, replicate);
            },
            [&](const MOutOfNPlan& p) { return draw_m_of_n(data, p.m, seed, replicate); },
            [&](const SubsamplePlan& p) { return draw_subsample(data, p.m, seed, replicate); },
            [&](const ResidualPlan& p) {
                if (!p.fit) {
                    throw InvalidInput("residual plan requires a fit");
                }
                return residual_resample(*p.fit, seed, replicate);
            },
            [&](const ParametricPlan& p) {
                return parametric_resample(p.sampler, p.n_out == 0 ? data.size() : p.n_out, seed, replicate);
            },
            [&](const CustomPlan& p) { return p.generate(data, seed, replicate); },
        },
        plan);
}

std::string plan_name(const ResamplePlan& plan) {
    return std::visit(Overloaded{
                          [](const IidPlan&) { return std::string("iid"); },
                          [](const MOutOfNPlan&) { return std::string("m_out_of_n"); },
                          [](const SubsamplePlan&) { return std::string("subsample"); },
                          [](const ResidualPlan&) { return std::string("residual"); },
                          [](const ParametricPlan&) { return std::string("parametric"); },
                          [](const CustomPlan& p) { return p.name; },
                      },
                      plan);
}

BootstrapRun run_bootstrap(const Statistic& stat, const ResamplePlan& plan, const Sample& data,
                           const BootstrapOptions& options) {
    if (options.B == 0) {
        throw InvalidInput("bootstrap: B must be >= 1");
    }
    if (options.form == ReplicateForm::studentized && !stat.studentized()) {
        throw InvalidInput("bootstrap: statistic '" + stat.name + "' has no studentizer");
    }
    if (std::holds_alternative<ResidualPlan>(plan) && !std::get<ResidualPlan>(plan).fit) {
        throw InvalidInput("bootstrap: residual plan requires a fit");
    }
    const double full = stat.point(data);
    double full_scale = 1.0;
    if (options.form == ReplicateForm::studentized) {
        full_scale = stat.scale(data);
        if (!(full_scale > 0.0)) {
            throw EvaluationError("bootstrap: studentizer of '" + stat.name +
                                  "' is zero on the original sample (degenerate data)");
        }
    }

    const std::size_t n = data.size();
    const auto enumerated = exact_enumeration(plan, n, options.mode, options.enumeration_limit);
    const std::size_t count = enumerated ? static_cast<std::size_t>(*enumerated) : options.B;

    auto replicate_value = [&](std::size_t r) -> double {
        try {
            const Sample resample = enumerated ? Sample::gather(data, enumerated_indices(n, r))
                                               : generate_resample(plan, data, options.seed, r);
            const double value = stat.point(resample);
            if (!std::isfinite(value)) {
                throw EvaluationError("non-finite statistic value");
            }
            const auto n_star = static_cast<double>(resample.size());
            switch (options.form) {
                case ReplicateForm::raw:
                    return value;
                case ReplicateForm::centered:
                    return options.rate(resample.size()) * (value - full);
                case ReplicateForm::studentized: {
                    const double s = stat.scale(resample);
                    if (!(s >= kStudentizerFloor * full_scale)) {
                        return kNaN;
                    }
                    return std::sqrt(n_star) * (value - full) / s;
                }
            }
            return value;
        } catch (const ReplicateError&) {
            throw;
        } catch (const std::exception& e) {
            throw ReplicateError("statistic '" + stat.name + "' failed: " + e.what(), r, options.seed.master_seed);
        }
    };

    auto values = parallel_map<double>(count, options.threads, replicate_value);
    const auto kept_end = std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); });
    const auto discarded = static_cast<std::size_t>(values.end() - kept_end);
    values.erase(kept_end, values.end());
    if (static_cast<double>(discarded) > kMaxDiscardFraction * static_cast<double>(count) || values.empty()) {
        throw EvaluationError("bootstrap: " + std::to_string(discarded) + " of " + std::to_string(count) +
                              " replicates had a degenerate studentizer");
    }
    return {BootstrapDistribution(std::move(values), full), discarded, enumerated.has_value()};
}

BootstrapDistribution bootstrap_distribution(const Statistic& stat, const ResamplePlan& plan, const Sample& data,
                                             const BootstrapOptions& options) {
    return run_bootstrap(stat, plan, data, options).distribution;
}

double bias_estimate(const MeanFunctional& h, const Sample& data, const BiasOptions& options) {
    if (options.B == 0) {
        throw InvalidInput("bias_estimate: B must be >= 1");
    }
    const std::size_t n = data.size();
    const std::size_t d = data.dim();
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            mean[j] += data(i, j);
        }
    }
    for (auto& m : mean) {
        m /= static_cast<double>(n);
    }
    const double base = h(mean);
    if (!std::isfinite(base)) {
        throw EvaluationError("bias_estimate: h is not finite at the sample mean");
    }
    const auto enumerated = exact_enumeration(IidPlan{}, n, options.mode, options.enumeration_limit);
    const std::size_t count = enumerated ? static_cast<std::size_t>(*enumerated) : options.B;

    std::vector<double> star(d);
    double total = 0.0;
    for (std::size_t r = 0; r < count; ++r) {
        std::fill(star.begin(), star.end(), 0.0);
        auto accumulate_row = [&](std::size_t row) {
            for (std::size_t j = 0; j < d; ++j) {
                star[j] += data(row, j);
            }
        };
        if (enumerated) {
            std::uint64_t code = r;
            for (std::size_t i = 0; i < n; ++i) {
                accumulate_row(static_cast<std::size_t>(code % n));
                code /= n;
            }
        } else {
            CounterRng rng(options.seed, r);
            for (std::size_t i = 0; i < n; ++i) {
                accumulate_row(static_cast<std::size_t>(rng.uniform_index(n)));
            }
        }
        for (auto& s : star) {
            s /= static_cast<double>(n);
        }
        const double value = h(star);
        if (!std::isfinite(value)) {
            throw ReplicateError("bias_estimate: h is not finite", r, options.seed.master_seed);
        }
        total += value - base;
    }
    return total / static_cast<double>(count);
}

double bias_corrected(const MeanFunctional& h, const Sample& data, const BiasOptions& options) {
    std::vector<double> mean(data.dim(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dim(); ++j) {
            mean[j] += data(i, j);
        }
    }
    for (auto& m : mean) {
        m /= static_cast<double>(data.size());
    }
    return h(mean) - bias_estimate(h, data, options);
}

std::string to_string(Sidedness s) {
    switch (s) {
        case Sidedness::symmetric:
            return "symmetric";
        case Sidedness::upper:
            return "upper";
        case Sidedness::lower:
            return "lower";
    }
    return "symmetric";
}

Sidedness sidedness_from_string(const std::string& s) {
    if (s == "symmetric") {
        return Sidedness::symmetric;
    }
    if (s == "upper") {
        return Sidedness::upper;
    }
    if (s == "lower") {
        return Sidedness::lower;
    }
    throw InvalidInput("unknown sidedness '" + s + "' (expected symmetric, upper or lower)");
}

CriticalValue critical_value_from(std::span<const double> t_star, double alpha, Sidedness sided) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("critical value: alpha must lie in (0, 1)");
    }
    if (t_star.empty()) {
        throw InvalidInput("critical value: no replicates");
    }
    CriticalValue cv{alpha, 0.0, sided};
    switch (sided) {
        case Sidedness::symmetric:
            cv.z_star = rank_quantile(magnitudes(t_star), 1.0 - alpha);
            break;
        case Sidedness::upper:
            cv.z_star = rank_quantile(std::vector<double>(t_star.begin(), t_star.end()), 1.0 - alpha);
            break;
        case Sidedness::lower: {
            std::vector<double> negated(t_star.size());
            std::transform(t_star.begin(), t_star.end(), negated.begin(), [](double v) { return -v; });
            cv.z_star = -rank_quantile(std::move(negated), 1.0 - alpha);
            break;
        }
    }
    return cv;
}

TestResult decide(double t, std::span<const double> t_star, double alpha, Sidedness sided) {
    TestResult result;
    result.t = t;
    result.critical = critical_value_from(t_star, alpha, sided);
    result.B = t_star.size();
    std::size_t extreme = 0;
    switch (sided) {
        case Sidedness::symmetric:
            result.reject = std::abs(t) > result.critical.z_star;
            extreme = static_cast<std::size_t>(
                std::count_if(t_star.begin(), t_star.end(), [&](double v) { return std::abs(v) >= std::abs(t); }));
            break;
        case Sidedness::upper:
            result.reject = t > result.critical.z_star;
            extreme = static_cast<std::size_t>(
                std::count_if(t_star.begin(), t_star.end(), [&](double v) { return v >= t; }));
            break;
        case Sidedness::lower:
            result.reject = t < result.critical.z_star;
            extreme = static_cast<std::size_t>(
                std::count_if(t_star.begin(), t_star.end(), [&](double v) { return v <= t; }));
            break;
    }
    result.p_star = static_cast<double>(extreme) / static_cast<double>(t_star.size());
    return result;
}

TestResult normal_decision(double t, double alpha, Sidedness sided) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("normal_decision: alpha must lie in (0, 1)");
    }
    TestResult result;
    result.t = t;
    result.critical.level = alpha;
    result.critical.sided = sided;
    switch (sided) {
        case Sidedness::symmetric:
            result.critical.z_star = normal_quantile(1.0 - alpha / 2.0);
            result.reject = std::abs(t) > result.critical.z_star;
            result.p_star = 2.0 * (1.0 - normal_cdf(std::abs(t)));
            break;
        case Sidedness::upper:
            result.critical.z_star = normal_quantile(1.0 - alpha);
            result.reject = t > result.critical.z_star;
            result.p_star = 1.0 - normal_cdf(t);
            break;
        case Sidedness::lower:
            result.critical.z_star = normal_quantile(alpha);
            result.reject = t < result.critical.z_star;
            result.p_star = normal_cdf(t);
            break;
    }
    return result;
}

namespace {

BootstrapRun studentized_run(const Statistic& stat, const ResamplePlan& plan, const Sample& data, std::size_t B,
                             double alpha, SeedPolicy seed, unsigned threads) {
    if (!stat.studentized()) {
        throw InvalidInput("bootstrap-t: statistic '" + stat.name + "' has no studentizer");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("bootstrap-t: alpha must lie in (0, 1)");
    }
    if (static_cast<double>(B) < std::ceil(1.0 / alpha - 1e-9)) {
        throw InvalidInput("bootstrap-t: B must be at least ceil(1/alpha)");
    }
    BootstrapOptions options;
    options.B = B;
    options.seed = seed;
    options.form = ReplicateForm::studentized;
    options.mode = EnumerationMode::monte_carlo;
    options.threads = threads;
    return run_bootstrap(stat, plan, data, options);
}

}  // namespace

CriticalValue symmetric_critical_value(const Statistic& stat, const ResamplePlan& plan, const Sample& data,
                                       std::size_t B, double alpha, SeedPolicy seed) {
    const auto run = studentized_run(stat, plan, data, B, alpha, seed, 1);
    return critical_value_from(run.distribution.values(), alpha, Sidedness::symmetric);
}

CriticalValue one_sided_critical_value(const Statistic& stat, const ResamplePlan& plan, const Sample& data,
                                       std::size_t B, double alpha, SeedPolicy seed, Sidedness tail) {
    if (tail == Sidedness::symmetric) {
        throw InvalidInput("one_sided_critical_value: tail must be upper or lower");
    }
    const auto run = studentized_run(stat, plan, data, B, alpha, seed, 1);
    return critical_value_from(run.distribution.values(), alpha, tail);
}

TestResult bootstrap_t_test(const Statistic& stat, const ResamplePlan& plan, const Sample& data, double null_value,
                            const TestOptions& options) {
    const auto run = studentized_run(stat, plan, data, options.B, options.alpha, options.seed, options.threads);
    const double s = stat.scale(data);
    const double t = std::sqrt(static_cast<double>(data.size())) * (stat.point(data) - null_value) / s;
    auto result = decide(t, run.distribution.values(), options.alpha, options.sided);
    result.discarded = run.discarded;
    return result;
}

ConfidenceInterval t_interval(double estimate, double scale, std::size_t n, const CriticalValue& critical) {
    const double unit = scale / std::sqrt(static_cast<double>(n));
    constexpr double inf = std::numeric_limits<double>::infinity();
    ConfidenceInterval ci{estimate, estimate, 1.0 - critical.level};
    switch (critical.sided) {
        case Sidedness::symmetric:
            ci.lower = estimate - unit * critical.z_star;
            ci.upper = estimate + unit * critical.z_star;
            break;
        case Sidedness::upper:
            // t <= z (upper quantile) <=> mu >= estimate - unit * z
            ci.lower = estimate - unit * critical.z_star;
            ci.upper = inf;
            break;
        case Sidedness::lower:
            // t >= z (lower quantile) <=> mu <= estimate - unit * z
            ci.lower = -inf;
            ci.upper = estimate - unit * critical.z_star;
            break;
    }
    return ci;
}

ConfidenceInterval bootstrap_t_ci(const Statistic& stat, const ResamplePlan& plan, const Sample& data,
                                  const TestOptions& options) {
    const auto run = studentized_run(stat, plan, data, options.B, options.alpha, options.seed, options.threads);
    const auto critical = critical_value_from(run.distribution.values(), options.alpha, options.sided);
    return t_interval(stat.point(data), stat.scale(data), data.size(), critical);
}

nlohmann::json inference_report(const std::string& statistic, const BootstrapDistribution& dist,
                                const std::optional<CriticalValue>& critical,
                                const std::optional<ConfidenceInterval>& ci, std::optional<double> p_star,
                                SeedPolicy seed) {
    nlohmann::json report;
    report["statistic"] = statistic;
    report["B"] = dist.size();
    nlohmann::json q = nlohmann::json::object();
    for (double p : {0.01, 0.025, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.975, 0.99}) {
        q[format_double(p)] = quantile(dist, p);
    }
    report["quantiles"] = q;
    report["centering"] = dist.centering();
    if (critical) {
        report["critical_values"] = {{"alpha", critical->level},
                                     {"z_star", critical->z_star},
                                     {"sided", to_string(critical->sided)}};
    } else {
        report["critical_values"] = nullptr;
    }
    if (ci) {
        auto bound = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
        report["ci"] = {{"lower", bound(ci->lower)}, {"upper", bound(ci->upper)}, {"level", ci->level}};
    } else {
        report["ci"] = nullptr;
    }
    report["p_star"] = p_star ? nlohmann::json(*p_star) : nlohmann::json(nullptr);
    report["seed"] = {{"master_seed", seed.master_seed}, {"stream_id", seed.stream_id}};
    return report;
}

void write_replicates_csv(std::ostream& out, const BootstrapDistribution& dist) {
    out << "replicate_value\n";
    for (double v : dist.values()) {
        out << format_double(v) << '\n';
    }
}

}  // namespace bootlab
