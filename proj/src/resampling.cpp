#include "bootlab/resampling.hpp"

#include "bootlab/error.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace bootlab {

namespace {

std::string describe_subset(std::span<const std::size_t> idx) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < idx.size(); ++i) {
        os << (i ? "," : "") << idx[i];
    }
    os << '}';
    return os.str();
}

// Advances `idx` to the next m-combination of {0..n-1} in lexicographic order.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t m = idx.size();
    std::size_t i = m;
    while (i > 0) {
        --i;
        if (idx[i] < n - m + i) {
            ++idx[i];
            for (std::size_t j = i + 1; j < m; ++j) {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    return false;
}

}  // namespace

Eigen::VectorXd center(const Eigen::VectorXd& residuals) {
    if (residuals.size() == 0) {
        return residuals;
    }
    return residuals.array() - residuals.mean();
}

RegressionFit nonparametric_fit(Eigen::MatrixXd design, Eigen::VectorXd response, Eigen::VectorXd fitted) {
    if (design.rows() != response.size() || fitted.size() != response.size()) {
        throw InvalidInput("nonparametric_fit: dimension mismatch");
    }
    RegressionFit fit;
    fit.design = std::move(design);
    fit.response = std::move(response);
    fit.fitted = std::move(fitted);
    fit.residuals_raw = fit.response - fit.fitted;
    fit.residuals_centered = center(fit.residuals_raw);
    return fit;
}

std::vector<std::size_t> iid_indices(std::size_t n, std::size_t n_out, CounterRng& rng) {
    std::vector<std::size_t> idx(n_out);
    for (auto& i : idx) {
        i = static_cast<std::size_t>(rng.uniform_index(n));
    }
    return idx;
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t m, CounterRng& rng) {
    // Partial Fisher-Yates; for m much smaller than n a rejection scheme would
    // avoid the O(n) buffer, but n here is a sample size.
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    return pool;
}

Sample draw_iid_resample(const Sample& data, std::size_t n_out, SeedPolicy seed, std::uint64_t replicate) {
    if (n_out == 0) {
        throw InvalidInput("draw_iid_resample: n_out must be >= 1");
    }
    CounterRng rng(seed, replicate);
    const auto idx = iid_indices(data.size(), n_out, rng);
    return Sample::gather(data, idx);
}

Sample draw_m_of_n(const Sample& data, std::size_t m, SeedPolicy seed, std::uint64_t replicate) {
    if (m == 0 || m >= data.size()) {
        throw InvalidInput("draw_m_of_n: require 1 <= m < n (m = " + std::to_string(m) +
                           ", n = " + std::to_string(data.size()) + ")");
    }
    return draw_iid_resample(data, m, seed, replicate);
}

Sample draw_subsample(const Sample& data, std::size_t m, SeedPolicy seed, std::uint64_t replicate) {
    if (m == 0 || m >= data.size()) {
        throw InvalidInput("draw_subsample: require 1 <= m < n (m = " + std::to_string(m) +
                           ", n = " + std::to_string(data.size()) + ")");
    }
    CounterRng rng(seed, replicate);
    const auto idx = subsample_indices(data.size(), m, rng);
    return Sample::gather(data, idx);
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    unsigned __int128 result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
        if (result > std::numeric_limits<std::uint64_t>::max()) {
            return std::numeric_limits<std::uint64_t>::max();
        }
    }
    return static_cast<std::uint64_t>(result);
}

BootstrapDistribution subsampling_distribution(const Statistic& stat, const Sample& data, std::size_t m,
                                               const RateFunction& rho, SeedPolicy seed,
                                               SubsamplingOptions options) {
    const std::size_t n = data.size();
    if (m == 0 || m >= n) {
        throw InvalidInput("subsampling_distribution: require 1 <= m < n");
    }
    const double rate = rho(m);
    if (!(rate > 0.0)) {
        throw InvalidInput("subsampling_distribution: rho(m) must be positive");
    }
    const double full = stat.point(data);
    auto evaluate = [&](std::span<const std::size_t> idx) {
        double value = std::numeric_limits<double>::quiet_NaN();
        try {
            value = stat.point(Sample::gather(data, idx));
        } catch (const std::exception& e) {
            throw EvaluationError("statistic '" + stat.name + "' failed on subset " + describe_subset(idx) +
                                  ": " + e.what());
        }
        if (!std::isfinite(value)) {
            throw EvaluationError("statistic '" + stat.name + "' is undefined on subset " + describe_subset(idx));
        }
        return rate * (value - full);
    };

    std::vector<double> values;
    const std::uint64_t count = binomial(n, m);
    if (count <= options.max_subsets) {
        values.reserve(count);
        std::vector<std::size_t> idx(m);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        do {
            values.push_back(evaluate(idx));
        } while (next_combination(idx, n));
    } else {
        values.reserve(options.max_subsets);
        for (std::size_t r = 0; r < options.max_subsets; ++r) {
            CounterRng rng(seed, r);
            const auto idx = subsample_indices(n, m, rng);
            values.push_back(evaluate(idx));
        }
    }
    return BootstrapDistribution(std::move(values), full);
}

Eigen::VectorXd residual_response(const RegressionFit& fit, CounterRng& rng) {
    const Eigen::Index n = fit.residuals_centered.size();
    if (n == 0 || fit.fitted.size() != n) {
        throw InvalidInput("residual_resample: fit lacks fitted values or residuals");
    }
    if (std::abs(fit.residuals_centered.mean()) > 1e-10 * std::max(1.0, fit.residuals_centered.cwiseAbs().maxCoeff())) {
        throw InvalidInput("residual_resample: residuals are not centered");
    }
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        y[i] = fit.fitted[i] + fit.residuals_centered[static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)))];
    }
    return y;
}

Sample regression_sample(const Eigen::VectorXd& response, const Eigen::MatrixXd& design) {
    const Eigen::Index n = response.size();
    const Eigen::Index k = design.cols();
    if (design.rows() != n) {
        throw InvalidInput("regression_sample: dimension mismatch");
    }
    std::vector<double> flat(static_cast<std::size_t>(n * (k + 1)));
    std::vector<std::string> names{"y"};
    for (Eigen::Index j = 0; j < k; ++j) {
        names.push_back("x" + std::to_string(j + 1));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto base = static_cast<std::size_t>(i * (k + 1));
        flat[base] = response[i];
        for (Eigen::Index j = 0; j < k; ++j) {
            flat[base + 1 + static_cast<std::size_t>(j)] = design(i, j);
        }
    }
    return Sample(static_cast<std::size_t>(k + 1), std::move(flat), std::move(names));
}

Sample residual_resample(const RegressionFit& fit, SeedPolicy seed, std::uint64_t replicate) {
    CounterRng rng(seed, replicate);
    return regression_sample(residual_response(fit, rng), fit.design);
}

Sample parametric_resample(const ScalarSampler& sampler, std::size_t n_out, SeedPolicy seed,
                           std::uint64_t replicate) {
    if (n_out == 0) {
        throw InvalidInput("parametric_resample: n_out must be >= 1");
    }
    CounterRng rng(seed, replicate);
    std::vector<double> values(n_out);
    for (auto& v : values) {
        v = sampler(rng);
    }
    return Sample(1, std::move(values));
}

}  // namespace bootlab
