#pragma once

#include "bootlab/inference.hpp"
#include "bootlab/regression_fit.hpp"
#include "bootlab/rng.hpp"
#include "bootlab/sample.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace bootlab {

/// OLS by column-pivoted QR. Throws SingularDesign when the smallest |R_ii|
/// is below 1e-10 times the largest.
[[nodiscard]] RegressionFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y);

/// Response column `response` regressed on the other named columns of a sample.
[[nodiscard]] RegressionFit ols_fit(const Sample& data, const std::string& response,
                                    const std::vector<std::string>& regressors, bool intercept = true);

enum class HcVariant { hc0, hc1 };

/// Eicker-White sandwich (X'X)^-1 X' diag(e^2) X (X'X)^-1; hc1 scales by n/(n-k).
[[nodiscard]] Eigen::MatrixXd hccme(const RegressionFit& fit, HcVariant variant = HcVariant::hc1);

/// Mammen's two-point law: a*e with probability p, b*e otherwise.
struct MammenLaw {
    static constexpr double sqrt5 = 2.23606797749978969641;
    static constexpr double a = (1.0 - sqrt5) / 2.0;
    static constexpr double b = (1.0 + sqrt5) / 2.0;
    static constexpr double p = (1.0 + sqrt5) / (2.0 * sqrt5);
};

/// Draw number i of replicate `replicate`'s stream mapped through the Mammen law.
[[nodiscard]] double mammen_weight(double residual, SeedPolicy seed, std::uint64_t replicate, std::size_t i);

struct WildScheme {
    enum class Kind { mammen_two_point, multiplier };
    Kind kind = Kind::mammen_two_point;
    /// Mean-zero, unit-variance multiplier law; standard normal when empty.
    std::function<double(CounterRng&)> multiplier_law;
    /// Residual transform f; identity when empty.
    std::function<double(double)> transform;

    static WildScheme mammen() { return {}; }
    static WildScheme gaussian_multiplier() { return {Kind::multiplier, {}, {}}; }
};

/// Wild pseudo-errors e*_1..e*_n for one replicate.
[[nodiscard]] Eigen::VectorXd wild_errors(const Eigen::VectorXd& residuals, const WildScheme& scheme,
                                          SeedPolicy seed, std::uint64_t replicate);

/// Rows (y*, x_1..x_k) with y* = fitted + e*; the design is copied unchanged.
[[nodiscard]] Sample wild_resample(const RegressionFit& fit, const WildScheme& scheme, SeedPolicy seed,
                                   std::uint64_t replicate);

[[nodiscard]] ResamplePlan wild_plan(std::shared_ptr<const RegressionFit> fit, WildScheme scheme);

/// Precomputed projector for repeated OLS fits on one design.
class FixedDesign {
public:
    explicit FixedDesign(const Eigen::MatrixXd& X);

    [[nodiscard]] const Eigen::MatrixXd& design() const noexcept { return X_; }
    [[nodiscard]] const Eigen::MatrixXd& bread() const noexcept { return bread_; }
    [[nodiscard]] const Eigen::MatrixXd& projector() const noexcept { return projector_; }

    [[nodiscard]] Eigen::VectorXd coefficients(const Eigen::VectorXd& y) const { return projector_ * y; }
    /// HCCME variance of coefficient j from residuals e.
    [[nodiscard]] double hc_variance(const Eigen::VectorXd& e, Eigen::Index j, HcVariant variant) const;

private:
    Eigen::MatrixXd X_;
    Eigen::MatrixXd bread_;
    Eigen::MatrixXd projector_;
};

struct WildTestOptions {
    std::size_t B = 999;
    double alpha = 0.05;
    SeedPolicy seed{};
    Sidedness sided = Sidedness::symmetric;
    HcVariant variant = HcVariant::hc1;
};

/// HCCME t test of b_j = null_value with wild-bootstrap critical values.
[[nodiscard]] TestResult wild_bootstrap_t_test(const RegressionFit& fit, const WildScheme& scheme,
                                               Eigen::Index coef_index, double null_value,
                                               const WildTestOptions& options);

/// Same test, with the asymptotic N(0,1) critical value instead.
[[nodiscard]] TestResult asymptotic_hccme_t_test(const RegressionFit& fit, Eigen::Index coef_index,
                                                 double null_value, double alpha, Sidedness sided,
                                                 HcVariant variant = HcVariant::hc1);

[[nodiscard]] nlohmann::json fit_summary(const RegressionFit& fit);

}  // namespace bootlab
