#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bootlab {

/// Ordered collection of n >= 1 observations of common dimension d >= 1,
/// stored row-major. Regression data keep the response among the columns.
class Sample {
public:
    Sample(std::size_t dim, std::vector<double> flat, std::vector<std::string> names = {});

    static Sample from_values(std::span<const double> values, std::string name = "x");
    static Sample from_rows(const std::vector<std::vector<double>>& rows,
                            std::vector<std::string> names = {});

    /// Rows `indices` of `source`, in the given order (repeats allowed).
    static Sample gather(const Sample& source, std::span<const std::size_t> indices);

    [[nodiscard]] std::size_t size() const noexcept { return flat_.size() / dim_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {flat_.data() + i * dim_, dim_};
    }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept {
        return flat_[i * dim_ + j];
    }
    [[nodiscard]] std::span<const double> flat() const noexcept { return flat_; }
    [[nodiscard]] std::vector<double> column(std::size_t j) const;
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }

    /// Index of the named column; throws InvalidInput if absent.
    [[nodiscard]] std::size_t column_index(const std::string& name) const;

    friend bool operator==(const Sample&, const Sample&) = default;

private:
    std::size_t dim_;
    std::vector<double> flat_;
    std::vector<std::string> names_;
};

/// F_n: point masses on the rows of a sample. Weights default to 1/n.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(Sample support);
    EmpiricalDistribution(Sample support, std::vector<double> weights);

    [[nodiscard]] const Sample& support() const noexcept { return support_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

    /// Componentwise CDF F_n(z) = sum_i w_i I(X_i <= z).
    [[nodiscard]] double cdf(std::span<const double> z) const;

private:
    Sample support_;
    std::vector<double> weights_;
};

// CSV: header row of column names, one observation per line.
Sample read_csv(std::istream& in);
Sample read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const Sample& sample);

// JSON: array of arrays, one inner array per observation.
Sample sample_from_json(const std::string& text);
std::string sample_to_json(const Sample& sample);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace bootlab
