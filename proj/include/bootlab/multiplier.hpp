#pragma once

#include "bootlab/optimize.hpp"
#include "bootlab/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bootlab {

/// Per-observation log densities log f_i(X_i, theta).
struct LogLikTerms {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::function<double(std::size_t i, const Eigen::VectorXd& theta)> log_density;
    /// Gradient of log f_i in theta; finite differences when empty.
    std::function<Eigen::VectorXd(std::size_t i, const Eigen::VectorXd& theta)> score;
    std::optional<Eigen::VectorXd> lower;
    std::optional<Eigen::VectorXd> upper;
};

/// sum_i w_i log f_i(theta); unit weights when `weights` is empty.
[[nodiscard]] double weighted_loglik(const LogLikTerms& terms, const Eigen::VectorXd& theta,
                                     const Eigen::VectorXd& weights = {});

struct MleResult {
    Eigen::VectorXd theta;
    double loglik = 0.0;
    bool non_unique = false;  // flat direction in the log-likelihood at theta
    bool at_bound = false;
    OptimizationResult optimization;
};

[[nodiscard]] MleResult mle(const LogLikTerms& terms, const Eigen::VectorXd& start,
                            const OptimizerSettings& settings = {}, const Eigen::VectorXd& weights = {});

// Built-in models.
/// N(theta, sigma^2) with sigma known.
[[nodiscard]] LogLikTerms gaussian_mean_model(std::vector<double> x, double sigma = 1.0);
/// Bernoulli(theta), theta in [0, 1].
[[nodiscard]] LogLikTerms bernoulli_model(std::vector<double> y);
/// y = X beta + N(0, exp(2 log_sigma)); theta = (beta, log_sigma).
[[nodiscard]] LogLikTerms linear_gaussian_model(Eigen::MatrixXd X, Eigen::VectorXd y);

enum class MultiplierLaw {
    gaussian,  // U = 1 + N(0, 1)
    poisson,   // U ~ Poisson(1)
    unit,      // U = 1
};
[[nodiscard]] double draw_multiplier(MultiplierLaw law, CounterRng& rng);
[[nodiscard]] std::string to_string(MultiplierLaw law);
[[nodiscard]] MultiplierLaw multiplier_law_from_string(const std::string& name);

/// Which parameter the starred likelihood is compared against.
///   estimate    LR* = 2[log L*(theta*) - log L*(theta_hat)]
///   null_value  LR* = 2[log L*(theta*) - log L*(theta_0)]
enum class LrCentering { estimate, null_value };

struct MultiplierLrOptions {
    std::size_t B = 499;
    double alpha = 0.05;
    SeedPolicy seed{};
    MultiplierLaw law = MultiplierLaw::gaussian;
    LrCentering centering = LrCentering::estimate;
    unsigned threads = 1;
    OptimizerSettings optimizer{};
    int replicate_restarts = 1;
};

struct MultiplierLrResult {
    double LR = 0.0;
    double z_star = 0.0;
    bool reject = false;
    double p_star = 1.0;
    Eigen::VectorXd theta_hat;
    std::size_t B = 0;
    std::size_t discarded = 0;
    std::vector<double> lr_star;
};

[[nodiscard]] MultiplierLrResult multiplier_lr_test(const LogLikTerms& terms, const Eigen::VectorXd& theta0,
                                                    const Eigen::VectorXd& start,
                                                    const MultiplierLrOptions& options);

struct SzBound {
    double value = 0.0;
    bool admissible = true;  // alpha <= 1 - 8 exp(-nu)
};

[[nodiscard]] SzBound sz_bound(std::size_t d, std::size_t n, double nu, double C, double alpha);

/// max_j n^{-1/2} sum_i X_ij e_i.
[[nodiscard]] double cck_statistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& e);

struct CckResult {
    double Z = 0.0;
    double z_star = 0.0;
    bool covered = false;  // Z <= z_star
    std::vector<double> replicates;
};

[[nodiscard]] CckResult cck_max_bootstrap(const Eigen::MatrixXd& X, std::size_t B, double alpha, SeedPolicy seed,
                                          unsigned threads = 1);

}  // namespace bootlab
