#include "bootlab/sample.hpp"

#include "bootlab/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace bootlab {

namespace {

std::vector<std::string> default_names(std::size_t dim) {
    std::vector<std::string> names;
    names.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        names.push_back("x" + std::to_string(j + 1));
    }
    return names;
}

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(trim(field));
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && text.front() == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw InvalidInput("CSV line " + std::to_string(line_no) + ": not a number: '" + text + "'");
    }
    return value;
}

}  // namespace

Sample::Sample(std::size_t dim, std::vector<double> flat, std::vector<std::string> names)
    : dim_(dim), flat_(std::move(flat)), names_(std::move(names)) {
    if (dim_ == 0) {
        throw InvalidInput("Sample: dimension must be >= 1");
    }
    if (flat_.empty()) {
        throw InvalidInput("Sample: at least one observation is required");
    }
    if (flat_.size() % dim_ != 0) {
        throw InvalidInput("Sample: data length is not a multiple of the dimension");
    }
    if (names_.empty()) {
        names_ = default_names(dim_);
    } else if (names_.size() != dim_) {
        throw InvalidInput("Sample: number of column names does not match dimension");
    }
}

Sample Sample::from_values(std::span<const double> values, std::string name) {
    return Sample(1, std::vector<double>(values.begin(), values.end()), {std::move(name)});
}

Sample Sample::from_rows(const std::vector<std::vector<double>>& rows, std::vector<std::string> names) {
    if (rows.empty()) {
        throw InvalidInput("Sample: at least one observation is required");
    }
    const std::size_t dim = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * dim);
    for (const auto& r : rows) {
        if (r.size() != dim) {
            throw InvalidInput("Sample: all observations must share one dimension");
        }
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return Sample(dim, std::move(flat), std::move(names));
}

Sample Sample::gather(const Sample& source, std::span<const std::size_t> indices) {
    const std::size_t d = source.dim();
    std::vector<double> flat(indices.size() * d);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto r = source.row(indices[i]);
        std::copy(r.begin(), r.end(), flat.begin() + static_cast<std::ptrdiff_t>(i * d));
    }
    return Sample(d, std::move(flat), source.names());
}

std::vector<double> Sample::column(std::size_t j) const {
    if (j >= dim()) {
        throw InvalidInput("Sample: column index out of range");
    }
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (*this)(i, j);
    }
    return out;
}

std::size_t Sample::column_index(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        throw InvalidInput("Sample: no column named '" + name + "'");
    }
    return static_cast<std::size_t>(it - names_.begin());
}

EmpiricalDistribution::EmpiricalDistribution(Sample support)
    : support_(std::move(support)),
      weights_(support_.size(), 1.0 / static_cast<double>(support_.size())) {}

EmpiricalDistribution::EmpiricalDistribution(Sample support, std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
    if (weights_.size() != support_.size()) {
        throw InvalidInput("EmpiricalDistribution: one weight per observation is required");
    }
    if (std::any_of(weights_.begin(), weights_.end(), [](double w) { return !(w >= 0.0); })) {
        throw InvalidInput("EmpiricalDistribution: weights must be non-negative");
    }
    const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidInput("EmpiricalDistribution: weights must sum to 1");
    }
}

double EmpiricalDistribution::cdf(std::span<const double> z) const {
    if (z.size() != support_.dim()) {
        throw InvalidInput("EmpiricalDistribution::cdf: dimension mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        const auto r = support_.row(i);
        bool below = true;
        for (std::size_t j = 0; j < r.size() && below; ++j) {
            below = r[j] <= z[j];
        }
        if (below) {
            total += weights_[i];
        }
    }
    return total;
}

std::string format_double(double value) {
    if (!std::isfinite(value)) {
        if (std::isnan(value)) {
            return "nan";
        }
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

Sample read_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> names;
    while (names.empty() && std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            names = split_csv_line(line);
        }
    }
    if (names.empty()) {
        throw InvalidInput("CSV: missing header row");
    }
    std::vector<double> flat;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != names.size()) {
            throw InvalidInput("CSV line " + std::to_string(line_no) + ": expected " +
                               std::to_string(names.size()) + " fields, found " +
                               std::to_string(fields.size()));
        }
        for (const auto& f : fields) {
            flat.push_back(parse_double(f, line_no));
        }
    }
    if (flat.empty()) {
        throw InvalidInput("CSV: no observations");
    }
    const std::size_t dim = names.size();
    return Sample(dim, std::move(flat), std::move(names));
}

Sample read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open '" + path + "'");
    }
    return read_csv(in);
}

void write_csv(std::ostream& out, const Sample& sample) {
    const auto& names = sample.names();
    for (std::size_t j = 0; j < names.size(); ++j) {
        out << (j ? "," : "") << names[j];
    }
    out << '\n';
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (std::size_t j = 0; j < sample.dim(); ++j) {
            out << (j ? "," : "") << format_double(sample(i, j));
        }
        out << '\n';
    }
}

Sample sample_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(std::string("JSON sample: ") + e.what());
    }
    if (!doc.is_array() || doc.empty()) {
        throw InvalidInput("JSON sample: expected a non-empty array of arrays");
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(doc.size());
    for (const auto& r : doc) {
        if (!r.is_array()) {
            throw InvalidInput("JSON sample: each observation must be an array");
        }
        std::vector<double> row;
        for (const auto& v : r) {
            if (!v.is_number()) {
                throw InvalidInput("JSON sample: non-numeric entry");
            }
            row.push_back(v.get<double>());
        }
        rows.push_back(std::move(row));
    }
    return Sample::from_rows(rows);
}

std::string sample_to_json(const Sample& sample) {
    nlohmann::json doc = nlohmann::json::array();
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto r = sample.row(i);
        doc.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return doc.dump();
}

}  // namespace bootlab
