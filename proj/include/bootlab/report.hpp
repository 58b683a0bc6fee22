#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bootlab {

inline constexpr const char* kVersion = "0.1.0";

struct Estimate {
    std::string name;
    double value = 0.0;
    std::optional<double> se;

    friend bool operator==(const Estimate&, const Estimate&) = default;
};

struct ReportCell {
    std::string id;
    std::vector<Estimate> estimates;

    ReportCell& add(std::string name, double value, std::optional<double> se = std::nullopt);
    [[nodiscard]] const Estimate& at(const std::string& name) const;
    [[nodiscard]] double value(const std::string& name) const { return at(name).value; }

    friend bool operator==(const ReportCell&, const ReportCell&) = default;
};

struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string version = kVersion;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct MCReport {
    std::string experiment;
    nlohmann::json config = nlohmann::json::object();
    std::vector<ReportCell> cells;
    std::vector<std::string> notes;
    Provenance provenance;

    ReportCell& cell(const std::string& id);
    [[nodiscard]] const ReportCell& at(const std::string& id) const;

    friend bool operator==(const MCReport&, const MCReport&) = default;
};

/// Monte Carlo standard error of a proportion over R replications.
[[nodiscard]] double proportion_se(double p, std::size_t R);

/// Mean and standard error of the mean.
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};
[[nodiscard]] MeanSe mean_se(const std::vector<double>& values);

enum class ReportFormat { csv, json };
[[nodiscard]] ReportFormat report_format_from_string(const std::string& name);

[[nodiscard]] nlohmann::ordered_json report_to_json(const MCReport& report);
[[nodiscard]] MCReport report_from_json(const nlohmann::ordered_json& doc);

/// Long-form CSV: header `cell` then value/SE column pairs for every estimate name.
void write_report_csv(std::ostream& out, const MCReport& report);

[[nodiscard]] std::string emit_report(const MCReport& report, ReportFormat format);
/// Writes to `path`; throws std::runtime_error naming the path on I/O failure.
void emit_report(const MCReport& report, ReportFormat format, const std::string& path);

/// 64-bit FNV-1a of a byte string, printed as 16 hex digits.
[[nodiscard]] std::string fnv1a_hex(const std::string& bytes);

}  // namespace bootlab
