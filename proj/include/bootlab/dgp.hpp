#pragma once

#include "bootlab/rng.hpp"
#include "bootlab/sample.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace bootlab {

/// A named pure data generator.
///
/// Univariate generators emit column `x`; regression generators emit `y`
/// followed by the covariates.
struct Dgp {
    std::string name;
    std::string description;
    nlohmann::json defaults;
    std::function<Sample(std::size_t n, const nlohmann::json& params, CounterRng& rng)> generate;
    /// Population value of the parameter the harness tests (mean, slope, ...).
    std::function<double(const nlohmann::json& params)> truth;
};

[[nodiscard]] const Dgp& find_dgp(const std::string& name);
[[nodiscard]] std::vector<std::string> dgp_names();

/// Defaults merged with `params`, validating key names.
[[nodiscard]] nlohmann::json resolve_dgp_params(const std::string& name, const nlohmann::json& params);

/// Stationary Gaussian AR(1) path.
[[nodiscard]] std::vector<double> simulate_ar1(std::size_t n, double phi, double sigma, CounterRng& rng);

}  // namespace bootlab
