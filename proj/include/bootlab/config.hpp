#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace bootlab {

/// Parses YAML (or JSON, which is valid YAML) into a JSON value. Scalars become
/// integers, reals, booleans or strings in that order of preference.
[[nodiscard]] nlohmann::json yaml_to_json(const std::string& text);
/// Reads and parses a config file; throws ConfigError naming the path on failure.
[[nodiscard]] nlohmann::json load_config_document(const std::string& path);

/// Fully resolved experiment settings.
///
/// `settings` holds every semantically meaningful field after defaults are
/// merged in; thread count and output location are kept apart so they never
/// affect the hash.
struct ExperimentConfig {
    std::string experiment;
    nlohmann::json settings = nlohmann::json::object();
    unsigned threads = 1;

    [[nodiscard]] const nlohmann::json& at(const std::string& key) const;
    [[nodiscard]] bool has(const std::string& key) const { return settings.contains(key); }
    [[nodiscard]] double real(const std::string& key) const;
    [[nodiscard]] std::size_t count(const std::string& key) const;
    [[nodiscard]] std::string text(const std::string& key) const;
    [[nodiscard]] bool flag(const std::string& key) const;
    [[nodiscard]] std::vector<std::size_t> counts(const std::string& key) const;
    [[nodiscard]] std::vector<double> reals(const std::string& key) const;

    [[nodiscard]] std::uint64_t seed() const;
    [[nodiscard]] std::string hash() const;
};

/// Overlays `user` on `defaults`. Every user key must already exist in the
/// defaults and have a compatible type; nested objects merge recursively.
[[nodiscard]] nlohmann::json merge_settings(const nlohmann::json& defaults, const nlohmann::json& user,
                                            const std::string& where);

}  // namespace bootlab
