#include "bootlab/distribution.hpp"

#include "bootlab/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bootlab {

BootstrapDistribution::BootstrapDistribution(std::vector<double> values, double centering)
    : values_(std::move(values)), centering_(centering) {
    if (values_.empty()) {
        throw InvalidInput("BootstrapDistribution: at least one replicate is required");
    }
    std::sort(values_.begin(), values_.end());
}

double BootstrapDistribution::cdf(double tau) const noexcept {
    const auto it = std::upper_bound(values_.begin(), values_.end(), tau);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double BootstrapDistribution::cdf_left(double tau) const noexcept {
    const auto it = std::lower_bound(values_.begin(), values_.end(), tau);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double BootstrapDistribution::mean() const noexcept {
    return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double BootstrapDistribution::variance() const noexcept {
    const double m = mean();
    double ss = 0.0;
    for (double v : values_) {
        ss += (v - m) * (v - m);
    }
    return ss / static_cast<double>(values_.size());
}

std::size_t quantile_rank(std::size_t count, double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidInput("quantile: probability must lie in (0, 1)");
    }
    // The small offset keeps products such as 0.95 * 20 from rounding up past an integer.
    const double scaled = p * static_cast<double>(count);
    auto rank = static_cast<std::size_t>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled)));
    return std::clamp<std::size_t>(rank, 1, count);
}

double quantile(const BootstrapDistribution& dist, double p) {
    return dist.values()[quantile_rank(dist.size(), p) - 1];
}

double rank_quantile(std::vector<double> values, double p) {
    if (values.empty()) {
        throw InvalidInput("rank_quantile: empty input");
    }
    const std::size_t rank = quantile_rank(values.size(), p);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
    return values[rank - 1];
}

double ks_distance(const BootstrapDistribution& dist, const Cdf& reference) {
    return ks_distance(dist, reference, reference);
}

double ks_distance(const BootstrapDistribution& dist, const Cdf& reference, const Cdf& reference_left) {
    const auto v = dist.values();
    const auto count = static_cast<double>(v.size());
    double sup = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) {
            ++j;
        }
        const double below = static_cast<double>(i) / count;
        const double at = static_cast<double>(j) / count;
        sup = std::max({sup, std::abs(below - reference_left(v[i])), std::abs(at - reference(v[i]))});
        i = j;
    }
    return sup;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidInput("normal_quantile: probability must lie in (0, 1)");
    }
    return boost::math::quantile(boost::math::normal_distribution<double>{}, p);
}

double student_t_quantile(double p, double dof) {
    return boost::math::quantile(boost::math::students_t_distribution<double>{dof}, p);
}

double chi_squared_quantile(double p, double dof) {
    return boost::math::quantile(boost::math::chi_squared_distribution<double>{dof}, p);
}

}  // namespace bootlab
