#pragma once

#include "bootlab/config.hpp"
#include "bootlab/report.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bootlab {

struct ExperimentInfo {
    std::string name;
    std::string description;
    nlohmann::json defaults;
    std::function<MCReport(const ExperimentConfig&)> run;
};

[[nodiscard]] const std::vector<ExperimentInfo>& experiments();
[[nodiscard]] const ExperimentInfo& find_experiment(const std::string& name);

/// Builds a resolved config from a document of the form
/// {experiment: name, <setting>: value, ...}. `threads` may appear at top level.
[[nodiscard]] ExperimentConfig resolve_config(const nlohmann::json& document);
[[nodiscard]] ExperimentConfig resolve_config(const std::string& experiment, const nlohmann::json& overrides,
                                              unsigned threads = 1);

/// Runs the experiment and fills in config and provenance.
[[nodiscard]] MCReport run_experiment(const ExperimentConfig& config);

/// Test procedures available to the ERP/ECP studies.
[[nodiscard]] std::vector<std::string> procedure_names();

// Convenience entry points.
[[nodiscard]] MCReport demo_uniform_max(std::size_t n, std::size_t B, std::uint64_t seed);
[[nodiscard]] MCReport demo_boundary(double mu, std::size_t n, std::size_t B, std::size_t m, std::uint64_t seed,
                                     std::size_t mc_reps = 50);
[[nodiscard]] MCReport demo_maxscore_inconsistency(std::size_t n, std::size_t B, std::uint64_t seed);
[[nodiscard]] MCReport run_erp_study(const ExperimentConfig& config);
[[nodiscard]] MCReport run_ecp_study(const ExperimentConfig& config);

}  // namespace bootlab
