#pragma once

#include "bootlab/inference.hpp"
#include "bootlab/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bootlab {

enum class ArMethod { yule_walker, least_squares };

struct ARFit {
    std::size_t order = 0;
    Eigen::VectorXd coefficients;  // a_1..a_p
    double mean = 0.0;
    Eigen::VectorXd residuals_centered;
    ArMethod method = ArMethod::yule_walker;
    double innovation_variance = 0.0;
};

/// Autocovariances with divisor n, lags 0..max_lag.
[[nodiscard]] std::vector<double> autocovariances(std::span<const double> series, std::size_t max_lag);

[[nodiscard]] ARFit yule_walker_fit(std::span<const double> series, std::size_t p);
[[nodiscard]] ARFit least_squares_ar_fit(std::span<const double> series, std::size_t p);
[[nodiscard]] ARFit ar_fit(std::span<const double> series, std::size_t p, ArMethod method);

/// Largest modulus among the companion-matrix eigenvalues.
[[nodiscard]] double spectral_radius(const Eigen::VectorXd& coefficients);

/// X_i - m = sum_j a_j (X_{i-j} - m) + U*_i, started at m, first burn_in values dropped.
[[nodiscard]] std::vector<double> ar_residual_bootstrap(const ARFit& fit, std::size_t n_out, std::size_t burn_in,
                                                        SeedPolicy seed, std::uint64_t replicate);

/// ceil((log n)^2), kept below n/4.
[[nodiscard]] std::size_t sieve_order(std::size_t n);

struct SieveSettings {
    std::optional<std::size_t> order;    // default sieve_order(n)
    std::optional<std::size_t> burn_in;  // default 10 p
    ArMethod method = ArMethod::yule_walker;
};

/// AR(p(n)) fit plus its residual bootstrap; the fit is done once.
class SieveBootstrap {
public:
    SieveBootstrap(std::span<const double> series, const SieveSettings& settings = {});
    [[nodiscard]] const ARFit& fit() const noexcept { return fit_; }
    [[nodiscard]] std::size_t burn_in() const noexcept { return burn_in_; }
    [[nodiscard]] std::vector<double> generate(std::size_t n_out, SeedPolicy seed, std::uint64_t replicate) const;

private:
    ARFit fit_;
    std::size_t burn_in_ = 0;
};

[[nodiscard]] std::vector<double> sieve_bootstrap(std::span<const double> series, std::size_t n_out,
                                                  SeedPolicy seed, std::uint64_t replicate,
                                                  const SieveSettings& settings = {});

struct BlockPlan {
    std::size_t block_length = 1;
    bool overlap = true;
    std::size_t n_out = 0;  // 0 -> series length
};

/// Number of admissible block start points.
[[nodiscard]] std::size_t block_count(std::size_t n, const BlockPlan& plan);

[[nodiscard]] std::vector<double> block_resample(std::span<const double> series, const BlockPlan& plan,
                                                 SeedPolicy seed, std::uint64_t replicate);

enum class BlockPurpose { bias_variance, one_sided, symmetric };

[[nodiscard]] std::size_t optimal_block_length(std::size_t n, BlockPurpose purpose, double c = 1.0);
[[nodiscard]] BlockPurpose block_purpose_from_string(const std::string& name);

/// Plans over one-column samples, for use with the generic bootstrap driver.
[[nodiscard]] ResamplePlan block_plan(BlockPlan plan);
[[nodiscard]] ResamplePlan sieve_plan(std::shared_ptr<const SieveBootstrap> sieve);

/// Bootstrap estimate of Var(sqrt(n) mean) from B generated series.
template <class Generator>
double bootstrap_mean_variance(Generator&& generate, std::size_t B, std::size_t n) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t r = 0; r < B; ++r) {
        const std::vector<double> s = generate(r);
        double m = 0.0;
        for (double v : s) {
            m += v;
        }
        m /= static_cast<double>(s.size());
        const double scaled = std::sqrt(static_cast<double>(n)) * m;
        sum += scaled;
        sum_sq += scaled * scaled;
    }
    const auto Bd = static_cast<double>(B);
    return (sum_sq - sum * sum / Bd) / (Bd - 1.0);
}

}  // namespace bootlab
