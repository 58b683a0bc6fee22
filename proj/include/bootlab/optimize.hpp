#pragma once

#include "bootlab/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bootlab {

struct Objective {
    std::function<double(const Eigen::VectorXd&)> value;
    /// Analytic gradient; central finite differences are used when empty.
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

struct OptimizerSettings {
    int max_iterations = 500;
    /// Converged when the (projected) gradient norm falls below this times the
    /// gradient norm at the starting point.
    double gradient_tolerance = 1e-8;
    /// Absolute floor on the gradient norm test.
    double gradient_floor = 1e-12;
    /// Restart 0 starts at `start`; restart r > 0 at start + perturbation * scale * N(0, I).
    int restarts = 5;
    double perturbation = 0.25;
    SeedPolicy seed{0x5eed, 0};
    /// Optional box constraints, handled by projection.
    std::optional<Eigen::VectorXd> lower;
    std::optional<Eigen::VectorXd> upper;
};

struct OptimizationResult {
    Eigen::VectorXd x;
    double value = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::size_t restart = 0;
    /// Coordinates that finished on a bound.
    std::vector<Eigen::Index> at_bound;
    std::vector<std::string> trace;
};

/// One quasi-Newton (BFGS) run from `start`.
[[nodiscard]] OptimizationResult bfgs(const Objective& objective, const Eigen::VectorXd& start,
                                      const OptimizerSettings& settings);

/// Multi-start BFGS reduced by (lowest value, lowest restart index). Throws
/// ConvergenceError with every restart's trace when no run converges.
[[nodiscard]] OptimizationResult minimize(const Objective& objective, const Eigen::VectorXd& start,
                                          const OptimizerSettings& settings);

[[nodiscard]] Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                               const Eigen::VectorXd& x);

}  // namespace bootlab
