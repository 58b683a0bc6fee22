#pragma once

#include "bootlab/distribution.hpp"
#include "bootlab/regression_fit.hpp"
#include "bootlab/resampling.hpp"
#include "bootlab/rng.hpp"
#include "bootlab/sample.hpp"
#include "bootlab/statistic.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace bootlab {

// ---------------------------------------------------------------------------
// Resample plans
// ---------------------------------------------------------------------------

/// Nonparametric bootstrap; n_out = 0 means "same size as the data".
struct IidPlan {
    std::size_t n_out = 0;
};
struct MOutOfNPlan {
    std::size_t m = 1;
};
struct SubsamplePlan {
    std::size_t m = 1;
};
/// Residual bootstrap around a fit; replicates are rows (y*, x_1..x_k).
struct ResidualPlan {
    std::shared_ptr<const RegressionFit> fit;
};
/// Draws from an estimated parametric law.
struct ParametricPlan {
    ScalarSampler sampler;
    std::size_t n_out = 0;
};
/// Any other scheme (wild, block, sieve, ...), supplied by its module.
struct CustomPlan {
    std::string name;
    std::function<Sample(const Sample& data, SeedPolicy seed, std::uint64_t replicate)> generate;
};

using ResamplePlan = std::variant<IidPlan, MOutOfNPlan, SubsamplePlan, ResidualPlan, ParametricPlan, CustomPlan>;

/// One pseudo-sample under `plan`.
[[nodiscard]] Sample generate_resample(const ResamplePlan& plan, const Sample& data, SeedPolicy seed,
                                       std::uint64_t replicate);
[[nodiscard]] std::string plan_name(const ResamplePlan& plan);

// ---------------------------------------------------------------------------
// Bootstrap distributions
// ---------------------------------------------------------------------------

/// How each replicate is mapped to a real value.
enum class ReplicateForm {
    raw,          ///< point(X*)
    centered,     ///< rate(n*) * (point(X*) - point(X))
    studentized,  ///< sqrt(n*) * (point(X*) - point(X)) / scale(X*)
};

/// Exact enumeration of all n^n resamples is used for i.i.d. plans with
/// n_out = n when n^n <= enumeration_limit, unless monte_carlo is forced.
enum class EnumerationMode { automatic, monte_carlo, exact };

struct BootstrapOptions {
    std::size_t B = 999;
    SeedPolicy seed{};
    ReplicateForm form = ReplicateForm::centered;
    RateFunction rate = [](std::size_t) { return 1.0; };
    EnumerationMode mode = EnumerationMode::automatic;
    std::uint64_t enumeration_limit = 1'000'000;
    unsigned threads = 1;
};

/// Replicate values with studentizer-guard bookkeeping.
struct BootstrapRun {
    BootstrapDistribution distribution;
    std::size_t discarded = 0;
    bool enumerated = false;
};

[[nodiscard]] BootstrapRun run_bootstrap(const Statistic& stat, const ResamplePlan& plan, const Sample& data,
                                         const BootstrapOptions& options);

[[nodiscard]] BootstrapDistribution bootstrap_distribution(const Statistic& stat, const ResamplePlan& plan,
                                                           const Sample& data, const BootstrapOptions& options);

/// Replicates with s* below this fraction of s_n are discarded ...
inline constexpr double kStudentizerFloor = 1e-12;
/// ... and the run fails when more than this fraction is discarded.
inline constexpr double kMaxDiscardFraction = 0.01;

// ---------------------------------------------------------------------------
// Bias correction
// ---------------------------------------------------------------------------

/// Smooth function of the (vector) sample mean.
using MeanFunctional = std::function<double(std::span<const double>)>;

struct BiasOptions {
    std::size_t B = 200;
    SeedPolicy seed{};
    EnumerationMode mode = EnumerationMode::automatic;
    std::uint64_t enumeration_limit = 1'000'000;
};

/// E*[h(mean*)] - h(mean), by simulation or exact enumeration.
[[nodiscard]] double bias_estimate(const MeanFunctional& h, const Sample& data, const BiasOptions& options);
/// h(mean) - bias_estimate.
[[nodiscard]] double bias_corrected(const MeanFunctional& h, const Sample& data, const BiasOptions& options);

// ---------------------------------------------------------------------------
// Bootstrap-t critical values, tests and intervals
// ---------------------------------------------------------------------------

enum class Sidedness { symmetric, upper, lower };

[[nodiscard]] std::string to_string(Sidedness s);
[[nodiscard]] Sidedness sidedness_from_string(const std::string& s);

struct CriticalValue {
    double level = 0.05;  ///< alpha
    double z_star = 0.0;
    Sidedness sided = Sidedness::symmetric;
};

/// Critical value from studentized replicates t*:
///   symmetric  rank-rule (1-alpha) quantile of |t*|
///   upper      rank-rule (1-alpha) quantile of t*
///   lower      minus the rank-rule (1-alpha) quantile of -t*
[[nodiscard]] CriticalValue critical_value_from(std::span<const double> t_star, double alpha, Sidedness sided);

struct TestOptions {
    std::size_t B = 999;
    double alpha = 0.05;
    SeedPolicy seed{};
    Sidedness sided = Sidedness::symmetric;
    unsigned threads = 1;
};

struct TestResult {
    bool reject = false;
    double t = 0.0;
    CriticalValue critical;
    double p_star = 1.0;
    std::size_t B = 0;
    std::size_t discarded = 0;
};

/// Decision for an observed t against replicates t* (rejection iff t is beyond
/// the critical value; p* is the fraction of replicates at least as extreme).
[[nodiscard]] TestResult decide(double t, std::span<const double> t_star, double alpha, Sidedness sided);

/// Decision using N(0,1) critical values (the first-order asymptotic test).
[[nodiscard]] TestResult normal_decision(double t, double alpha, Sidedness sided);

[[nodiscard]] CriticalValue symmetric_critical_value(const Statistic& stat, const ResamplePlan& plan,
                                                     const Sample& data, std::size_t B, double alpha,
                                                     SeedPolicy seed);
[[nodiscard]] CriticalValue one_sided_critical_value(const Statistic& stat, const ResamplePlan& plan,
                                                     const Sample& data, std::size_t B, double alpha,
                                                     SeedPolicy seed, Sidedness tail);

[[nodiscard]] TestResult bootstrap_t_test(const Statistic& stat, const ResamplePlan& plan, const Sample& data,
                                          double null_value, const TestOptions& options);

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
};

/// Interval from point estimate, s_n, n and a critical value.
[[nodiscard]] ConfidenceInterval t_interval(double estimate, double scale, std::size_t n,
                                            const CriticalValue& critical);

[[nodiscard]] ConfidenceInterval bootstrap_t_ci(const Statistic& stat, const ResamplePlan& plan,
                                                const Sample& data, const TestOptions& options);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

[[nodiscard]] nlohmann::json inference_report(const std::string& statistic, const BootstrapDistribution& dist,
                                              const std::optional<CriticalValue>& critical,
                                              const std::optional<ConfidenceInterval>& ci,
                                              std::optional<double> p_star, SeedPolicy seed);

void write_replicates_csv(std::ostream& out, const BootstrapDistribution& dist);

}  // namespace bootlab
