#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace bootlab {

enum class CovarianceKind { classical, hccme };

/// Fitted regression: coefficients, fitted values and residuals.
///
/// Nonparametric fits leave `coefficients` empty and carry only
/// fitted values and residuals; `design` then holds the covariate(s).
struct RegressionFit {
    Eigen::MatrixXd design;
    Eigen::VectorXd response;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals_raw;
    Eigen::VectorXd residuals_centered;
    std::optional<double> sigma2_homoskedastic;
    Eigen::MatrixXd cov;
    CovarianceKind cov_kind = CovarianceKind::classical;

    [[nodiscard]] Eigen::Index n() const noexcept { return design.rows(); }
    [[nodiscard]] Eigen::Index k() const noexcept { return design.cols(); }
};

/// Residuals minus their sample mean.
[[nodiscard]] Eigen::VectorXd center(const Eigen::VectorXd& residuals);

/// Fit carrying only fitted values and raw residuals (e.g. a smoother);
/// residuals are centered here.
[[nodiscard]] RegressionFit nonparametric_fit(Eigen::MatrixXd design, Eigen::VectorXd response,
                                              Eigen::VectorXd fitted);

}  // namespace bootlab
