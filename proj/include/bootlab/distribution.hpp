#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace bootlab {

/// Empirical law of B replicate values; immutable once built.
class BootstrapDistribution {
public:
    /// `values` need not be sorted; B = values.size() must be >= 1.
    BootstrapDistribution(std::vector<double> values, double centering);

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double centering() const noexcept { return centering_; }

    /// Fraction of replicates <= tau.
    [[nodiscard]] double cdf(double tau) const noexcept;
    /// Fraction of replicates < tau (left limit of cdf).
    [[nodiscard]] double cdf_left(double tau) const noexcept;

    [[nodiscard]] double mean() const noexcept;
    [[nodiscard]] double variance() const noexcept;

private:
    std::vector<double> values_;
    double centering_;
};

/// Order statistic of rank ceil(p * B); p must lie in (0, 1).
[[nodiscard]] double quantile(const BootstrapDistribution& dist, double p);
/// Rank used by `quantile`, in [1, B].
[[nodiscard]] std::size_t quantile_rank(std::size_t count, double p);
/// Rank-rule quantile of an unsorted list (copied and sorted).
[[nodiscard]] double rank_quantile(std::vector<double> values, double p);

using Cdf = std::function<double(double)>;

/// sup_tau |G(tau) - F(tau)| evaluated at both one-sided limits of every jump of G.
/// `reference_left` supplies F(tau-) when the reference has atoms.
[[nodiscard]] double ks_distance(const BootstrapDistribution& dist, const Cdf& reference);
[[nodiscard]] double ks_distance(const BootstrapDistribution& dist, const Cdf& reference,
                                 const Cdf& reference_left);

[[nodiscard]] double normal_cdf(double z);
[[nodiscard]] double normal_quantile(double p);
[[nodiscard]] double student_t_quantile(double p, double dof);
[[nodiscard]] double chi_squared_quantile(double p, double dof);

}  // namespace bootlab
