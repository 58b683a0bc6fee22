#include "bootlab/report.hpp"

#include "bootlab/error.hpp"
#include "bootlab/sample.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bootlab {

ReportCell& ReportCell::add(std::string name, double value, std::optional<double> se) {
    estimates.push_back({std::move(name), value, se});
    return *this;
}

const Estimate& ReportCell::at(const std::string& name) const {
    for (const auto& e : estimates) {
        if (e.name == name) {
            return e;
        }
    }
    throw InvalidInput("report cell '" + id + "' has no estimate '" + name + "'");
}

ReportCell& MCReport::cell(const std::string& id) {
    for (auto& c : cells) {
        if (c.id == id) {
            return c;
        }
    }
    cells.push_back({id, {}});
    return cells.back();
}

const ReportCell& MCReport::at(const std::string& id) const {
    for (const auto& c : cells) {
        if (c.id == id) {
            return c;
        }
    }
    throw InvalidInput("report has no cell '" + id + "'");
}

double proportion_se(double p, std::size_t R) {
    return R == 0 ? 0.0 : std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(R));
}

MeanSe mean_se(const std::vector<double>& values) {
    MeanSe out;
    if (values.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const auto R = static_cast<double>(values.size());
    out.mean = sum / R;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.se = std::sqrt(ss / (R - 1.0) / R);
    }
    return out;
}

ReportFormat report_format_from_string(const std::string& name) {
    if (name == "csv") {
        return ReportFormat::csv;
    }
    if (name == "json") {
        return ReportFormat::json;
    }
    throw ConfigError("unknown output format '" + name + "' (csv, json)");
}

nlohmann::ordered_json report_to_json(const MCReport& report) {
    nlohmann::ordered_json doc;
    doc["experiment"] = report.experiment;
    doc["provenance"] = {{"config_hash", report.provenance.config_hash},
                         {"seed", report.provenance.seed},
                         {"version", report.provenance.version}};
    doc["config"] = report.config;
    auto& cells = doc["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : report.cells) {
        nlohmann::ordered_json cell;
        cell["id"] = c.id;
        auto& est = cell["estimates"] = nlohmann::ordered_json::array();
        for (const auto& e : c.estimates) {
            nlohmann::ordered_json item;
            item["name"] = e.name;
            item["value"] = e.value;
            if (e.se) {
                item["se"] = *e.se;
            }
            est.push_back(std::move(item));
        }
        cells.push_back(std::move(cell));
    }
    doc["notes"] = report.notes;
    return doc;
}

namespace {

double number_or_nan(const nlohmann::ordered_json& v) {
    return v.is_null() ? std::nan("") : v.get<double>();
}

}  // namespace

MCReport report_from_json(const nlohmann::ordered_json& doc) {
    MCReport r;
    r.experiment = doc.at("experiment").get<std::string>();
    const auto& prov = doc.at("provenance");
    r.provenance.config_hash = prov.at("config_hash").get<std::string>();
    r.provenance.seed = prov.at("seed").get<std::uint64_t>();
    r.provenance.version = prov.at("version").get<std::string>();
    r.config = nlohmann::json::parse(doc.at("config").dump());
    for (const auto& c : doc.at("cells")) {
        ReportCell cell{c.at("id").get<std::string>(), {}};
        for (const auto& e : c.at("estimates")) {
            std::optional<double> se;
            if (e.contains("se")) {
                se = number_or_nan(e.at("se"));
            }
            cell.estimates.push_back({e.at("name").get<std::string>(), number_or_nan(e.at("value")), se});
        }
        r.cells.push_back(std::move(cell));
    }
    for (const auto& n : doc.at("notes")) {
        r.notes.push_back(n.get<std::string>());
    }
    return r;
}

void write_report_csv(std::ostream& out, const MCReport& report) {
    std::vector<std::string> names;
    for (const auto& c : report.cells) {
        for (const auto& e : c.estimates) {
            if (std::find(names.begin(), names.end(), e.name) == names.end()) {
                names.push_back(e.name);
            }
        }
    }
    out << "cell";
    for (const auto& n : names) {
        out << ',' << n << ',' << n << "_se";
    }
    out << '\n';
    for (const auto& c : report.cells) {
        out << c.id;
        for (const auto& n : names) {
            const Estimate* found = nullptr;
            for (const auto& e : c.estimates) {
                if (e.name == n) {
                    found = &e;
                    break;
                }
            }
            out << ',';
            if (found != nullptr) {
                out << format_double(found->value);
            }
            out << ',';
            if (found != nullptr && found->se) {
                out << format_double(*found->se);
            }
        }
        out << '\n';
    }
}

std::string emit_report(const MCReport& report, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::json) {
        out << report_to_json(report).dump(2) << '\n';
    } else {
        write_report_csv(out, report);
    }
    return out.str();
}

void emit_report(const MCReport& report, ReportFormat format, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    file << emit_report(report, format);
    file.close();
    if (!file) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace bootlab
