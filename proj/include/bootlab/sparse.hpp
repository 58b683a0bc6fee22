#pragma once

#include "bootlab/inference.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace bootlab {

enum class PenaltyStage { lasso, alasso };

/// Solution of min_b sum_i (Y_i - X_i'b)^2 + sum_j lambda_j |b_j|.
struct PenalizedFit {
    Eigen::VectorXd coefficients;
    double lambda = 0.0;
    std::vector<Eigen::Index> active_set;
    Eigen::VectorXd residuals_centered;
    PenaltyStage stage = PenaltyStage::lasso;
    std::optional<Eigen::VectorXd> initial;
    Eigen::VectorXd penalty;  // per-coordinate lambda_j; +inf marks a coordinate fixed at 0
    bool degenerate = false;  // every initial coefficient was zero
    std::size_t sweeps = 0;
    double kkt_violation = 0.0;
};

struct CoordinateDescentSettings {
    std::size_t max_sweeps = 100'000;
    double tolerance = 1e-8;
};

/// Precomputed Gram matrix for repeated fits on the same design.
class GramDesign {
public:
    explicit GramDesign(Eigen::MatrixXd X);
    [[nodiscard]] const Eigen::MatrixXd& X() const noexcept { return X_; }
    [[nodiscard]] const Eigen::MatrixXd& gram() const noexcept { return G_; }

private:
    Eigen::MatrixXd X_;
    Eigen::MatrixXd G_;
};

[[nodiscard]] PenalizedFit weighted_lasso_fit(const GramDesign& design, const Eigen::VectorXd& Y,
                                              const Eigen::VectorXd& penalty,
                                              const CoordinateDescentSettings& settings = {});

[[nodiscard]] PenalizedFit lasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double lambda,
                                     const CoordinateDescentSettings& settings = {});

[[nodiscard]] PenalizedFit alasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double lambda,
                                      const Eigen::VectorXd& initial, const CoordinateDescentSettings& settings = {});
[[nodiscard]] PenalizedFit alasso_fit(const GramDesign& design, const Eigen::VectorXd& Y, double lambda,
                                      const Eigen::VectorXd& initial, const CoordinateDescentSettings& settings = {});

/// Largest per-coordinate violation of the stationarity conditions.
[[nodiscard]] double kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& b,
                                   const Eigen::VectorXd& penalty);

/// First-stage estimate: OLS when p < n, otherwise LASSO at `lambda`.
[[nodiscard]] Eigen::VectorXd alasso_initial(const GramDesign& design, const Eigen::VectorXd& Y, double lambda);

/// sqrt(n) times a noise scale.
[[nodiscard]] double default_lambda(std::size_t n, double noise_scale = 1.0);

/// s_n^2 = n c_A' sigma^2 (X_A'X_A)^-1 c_A from the OLS refit on the active set.
/// Returns 0 when c has no weight on the active set.
[[nodiscard]] double alasso_standard_error(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                           const std::vector<Eigen::Index>& active, const Eigen::VectorXd& c);

struct AlassoTestResult {
    TestResult bootstrap;
    TestResult asymptotic;
    PenalizedFit fit;
};

[[nodiscard]] AlassoTestResult alasso_residual_bootstrap_t(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                                           double lambda, const Eigen::VectorXd& c,
                                                           double null_value, const TestOptions& options);

}  // namespace bootlab
