#pragma once

#include "bootlab/distribution.hpp"
#include "bootlab/regression_fit.hpp"
#include "bootlab/rng.hpp"
#include "bootlab/sample.hpp"
#include "bootlab/statistic.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bootlab {

/// n_out rows drawn uniformly with replacement.
[[nodiscard]] Sample draw_iid_resample(const Sample& data, std::size_t n_out, SeedPolicy seed,
                                       std::uint64_t replicate);

/// m-out-of-n bootstrap: m < n rows drawn with replacement.
[[nodiscard]] Sample draw_m_of_n(const Sample& data, std::size_t m, SeedPolicy seed, std::uint64_t replicate);

/// m < n distinct rows; every m-subset is equally likely.
[[nodiscard]] Sample draw_subsample(const Sample& data, std::size_t m, SeedPolicy seed, std::uint64_t replicate);

/// Row indices behind the draws above, exposed for oracle tests.
[[nodiscard]] std::vector<std::size_t> iid_indices(std::size_t n, std::size_t n_out, CounterRng& rng);
[[nodiscard]] std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t m, CounterRng& rng);

/// Scale rho(m) applied to t_mk - t_n.
using RateFunction = std::function<double(std::size_t)>;

struct SubsamplingOptions {
    std::size_t max_subsets = 1'000'000;
};

/// G_nm: law of rho(m) (t_mk - t_n) over size-m subsamples without replacement.
/// Enumerates all C(n, m) subsets when that count is <= max_subsets, otherwise
/// averages over max_subsets random subsets.
[[nodiscard]] BootstrapDistribution subsampling_distribution(const Statistic& stat, const Sample& data,
                                                             std::size_t m, const RateFunction& rho,
                                                             SeedPolicy seed, SubsamplingOptions options = {});

/// Binomial coefficient, saturating at UINT64_MAX.
[[nodiscard]] std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept;

/// Residual bootstrap with the design fixed: returns rows (y*, x_1..x_k) with
/// y*_i = fitted_i + U*_i, U* drawn with replacement from the centered residuals.
[[nodiscard]] Sample residual_resample(const RegressionFit& fit, SeedPolicy seed, std::uint64_t replicate);

/// The response part of `residual_resample`.
[[nodiscard]] Eigen::VectorXd residual_response(const RegressionFit& fit, CounterRng& rng);

/// Joins a response vector and a design matrix into rows (y, x_1..x_k).
[[nodiscard]] Sample regression_sample(const Eigen::VectorXd& response, const Eigen::MatrixXd& design);

using ScalarSampler = std::function<double(CounterRng&)>;

/// n_out i.i.d. draws from a caller-supplied (estimated) law.
[[nodiscard]] Sample parametric_resample(const ScalarSampler& sampler, std::size_t n_out, SeedPolicy seed,
                                         std::uint64_t replicate);

}  // namespace bootlab
