#pragma once

#include "bootlab/rng.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bootlab {

enum class KernelType { uniform, epanechnikov, biweight, triweight };

[[nodiscard]] double kernel_density(KernelType kernel, double t) noexcept;
[[nodiscard]] std::string to_string(KernelType kernel);
[[nodiscard]] KernelType kernel_from_string(const std::string& name);

/// Effective weights of a local polynomial smoother.
///
/// Row g holds w(at[g]) so that ghat(at[g]) = row . y. Points whose local
/// design is singular are refit with a lower degree; `effective_degree`
/// records what was used.
struct SmootherWeights {
    Eigen::MatrixXd W;
    std::vector<int> effective_degree;
};

[[nodiscard]] SmootherWeights local_poly_weights(const Eigen::VectorXd& x, const std::vector<double>& at, int degree,
                                                 double bandwidth, KernelType kernel);

struct LocalPolyFit {
    int degree = 1;
    double bandwidth = 0.0;
    KernelType kernel = KernelType::biweight;
    std::vector<double> grid;
    Eigen::VectorXd g_hat;
    Eigen::VectorXd weight_norms;  // S(x) = ||w(x)||^2
    double sigma2_hat = 0.0;
    Eigen::MatrixXd weights;
    std::vector<int> effective_degree;
    [[nodiscard]] bool degree_reduced(std::size_t g) const { return effective_degree[g] < degree; }
};

[[nodiscard]] LocalPolyFit local_poly_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int degree,
                                          double bandwidth, KernelType kernel, const std::vector<double>& grid);

/// Difference-based variance estimate for responses already ordered by covariate.
[[nodiscard]] double rice_variance(const Eigen::VectorXd& y_sorted);
/// Same, ordering by x first.
[[nodiscard]] double rice_variance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Leave-one-out squared-error choice among candidates; ties go to the smallest.
[[nodiscard]] double cv_bandwidth(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int degree, KernelType kernel,
                                  std::vector<double> candidates);

/// Evenly spaced candidate bandwidths from lo to hi inclusive.
[[nodiscard]] std::vector<double> bandwidth_grid(double lo, double hi, std::size_t count);
/// Evenly spaced evaluation points.
[[nodiscard]] std::vector<double> linear_grid(double lo, double hi, std::size_t count);

/// alpha grid used for calibration: 0.001, 0.002, ..., 0.300.
[[nodiscard]] std::vector<double> calibration_alpha_grid();

enum class BetaFlag { none, clamped_low, clamped_high };

struct BandOptions {
    int degree = 1;
    KernelType kernel = KernelType::biweight;
    double alpha0 = 0.05;
    double xi = 0.1;
    std::size_t B = 500;
    SeedPolicy seed{};
    unsigned threads = 1;
    std::optional<double> bandwidth;       // fixed bandwidth; otherwise cross-validated
    std::vector<double> bandwidth_candidates;  // empty -> default grid over the x range
};

struct BandResult {
    std::vector<double> grid;
    Eigen::VectorXd g_hat;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::VectorXd weight_norms;
    std::vector<double> beta_star;
    std::vector<BetaFlag> flags;
    double alpha_calibrated = 0.0;
    double z = 0.0;
    double xi = 0.0;
    double alpha0 = 0.0;
    double bandwidth = 0.0;
    double sigma2_hat = 0.0;
    std::size_t B = 0;
    std::vector<double> alpha_grid;
    Eigen::MatrixXd pi_star;  // grid points x alpha grid
};

[[nodiscard]] BandResult hh_band(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const std::vector<double>& grid,
                                 const BandOptions& options);

/// Per-point calibrated level from a coverage curve in alpha (non-increasing).
[[nodiscard]] double solve_beta(const std::vector<double>& alpha_grid, const Eigen::VectorXd& coverage, double alpha0,
                                BetaFlag* flag);

void write_band_csv(std::ostream& out, const BandResult& band);
[[nodiscard]] nlohmann::json band_summary(const BandResult& band, const SeedPolicy& seed);

}  // namespace bootlab
