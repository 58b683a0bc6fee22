#include "bootlab/timeseries.hpp"

#include "bootlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bootlab {

std::vector<double> autocovariances(std::span<const double> series, std::size_t max_lag) {
    const std::size_t n = series.size();
    if (n == 0 || max_lag >= n) {
        throw InvalidInput("autocovariances: need max_lag < n");
    }
    const double m = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    std::vector<double> gamma(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) {
            s += (series[t] - m) * (series[t + k] - m);
        }
        gamma[k] = s / static_cast<double>(n);
    }
    return gamma;
}

namespace {

double series_mean(std::span<const double> series) {
    return std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
}

Eigen::VectorXd ar_residuals(std::span<const double> series, const Eigen::VectorXd& a, double m) {
    const std::size_t p = static_cast<std::size_t>(a.size());
    const std::size_t n = series.size();
    Eigen::VectorXd u(static_cast<Eigen::Index>(n - p));
    for (std::size_t t = p; t < n; ++t) {
        double pred = 0.0;
        for (std::size_t j = 1; j <= p; ++j) {
            pred += a[static_cast<Eigen::Index>(j - 1)] * (series[t - j] - m);
        }
        u[static_cast<Eigen::Index>(t - p)] = (series[t] - m) - pred;
    }
    return u;
}

void finish(ARFit& fit, std::span<const double> series) {
    Eigen::VectorXd u = ar_residuals(series, fit.coefficients, fit.mean);
    fit.innovation_variance = u.size() > 0 ? (u.array() - u.mean()).square().mean() : 0.0;
    if (u.size() > 0) {
        u.array() -= u.mean();
    }
    fit.residuals_centered = std::move(u);
}

}  // namespace

ARFit yule_walker_fit(std::span<const double> series, std::size_t p) {
    if (series.size() <= p + 1) {
        throw InvalidInput("yule_walker_fit: series length must exceed p + 1");
    }
    const auto gamma = autocovariances(series, p);
    if (!(gamma[0] > 0.0)) {
        throw SingularDesign("yule_walker_fit: zero sample variance (constant series)");
    }
    // Levinson-Durbin recursion.
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    double err = gamma[0];
    for (std::size_t k = 1; k <= p; ++k) {
        double acc = gamma[k];
        for (std::size_t j = 1; j < k; ++j) {
            acc -= a[static_cast<Eigen::Index>(j - 1)] * gamma[k - j];
        }
        const double reflection = acc / err;
        Eigen::VectorXd next = a;
        next[static_cast<Eigen::Index>(k - 1)] = reflection;
        for (std::size_t j = 1; j < k; ++j) {
            next[static_cast<Eigen::Index>(j - 1)] = a[static_cast<Eigen::Index>(j - 1)] -
                                                     reflection * a[static_cast<Eigen::Index>(k - j - 1)];
        }
        a = next;
        err *= 1.0 - reflection * reflection;
        if (!(err > 0.0)) {
            throw SingularDesign("yule_walker_fit: singular Toeplitz system at lag " + std::to_string(k));
        }
    }
    ARFit fit;
    fit.order = p;
    fit.coefficients = a;
    fit.mean = series_mean(series);
    fit.method = ArMethod::yule_walker;
    finish(fit, series);
    return fit;
}

ARFit least_squares_ar_fit(std::span<const double> series, std::size_t p) {
    const std::size_t n = series.size();
    if (n <= 2 * p + 1) {
        throw InvalidInput("least_squares_ar_fit: series too short for the requested order");
    }
    const double m = series_mean(series);
    const auto rows = static_cast<Eigen::Index>(n - p);
    Eigen::MatrixXd X(rows, static_cast<Eigen::Index>(p));
    Eigen::VectorXd y(rows);
    for (std::size_t t = p; t < n; ++t) {
        const auto r = static_cast<Eigen::Index>(t - p);
        y[r] = series[t] - m;
        for (std::size_t j = 1; j <= p; ++j) {
            X(r, static_cast<Eigen::Index>(j - 1)) = series[t - j] - m;
        }
    }
    ARFit fit;
    fit.order = p;
    fit.mean = m;
    fit.method = ArMethod::least_squares;
    if (p == 0) {
        fit.coefficients = Eigen::VectorXd(0);
    } else {
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
        if (qr.rank() < static_cast<Eigen::Index>(p)) {
            throw SingularDesign("least_squares_ar_fit: lagged design is rank deficient");
        }
        fit.coefficients = qr.solve(y);
    }
    finish(fit, series);
    return fit;
}

ARFit ar_fit(std::span<const double> series, std::size_t p, ArMethod method) {
    return method == ArMethod::yule_walker ? yule_walker_fit(series, p) : least_squares_ar_fit(series, p);
}

double spectral_radius(const Eigen::VectorXd& a) {
    const Eigen::Index p = a.size();
    if (p == 0) {
        return 0.0;
    }
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p, p);
    C.row(0) = a.transpose();
    for (Eigen::Index i = 1; i < p; ++i) {
        C(i, i - 1) = 1.0;
    }
    return C.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> ar_residual_bootstrap(const ARFit& fit, std::size_t n_out, std::size_t burn_in, SeedPolicy seed,
                                          std::uint64_t replicate) {
    const std::size_t p = fit.order;
    const auto nres = static_cast<std::uint64_t>(fit.residuals_centered.size());
    if (nres == 0) {
        throw InvalidInput("ar_residual_bootstrap: fit has no residuals");
    }
    CounterRng rng(seed, replicate);
    // Deviations from the mean; the first p slots are the initial lags (= m).
    std::vector<double> dev(p + burn_in + n_out, 0.0);
    for (std::size_t i = p; i < dev.size(); ++i) {
        double v = fit.residuals_centered[static_cast<Eigen::Index>(rng.uniform_index(nres))];
        for (std::size_t j = 1; j <= p; ++j) {
            v += fit.coefficients[static_cast<Eigen::Index>(j - 1)] * dev[i - j];
        }
        dev[i] = v;
    }
    std::vector<double> out(n_out);
    for (std::size_t i = 0; i < n_out; ++i) {
        out[i] = fit.mean + dev[p + burn_in + i];
    }
    return out;
}

std::size_t sieve_order(std::size_t n) {
    if (n < 8) {
        return 1;
    }
    const double l = std::log(static_cast<double>(n));
    auto p = static_cast<std::size_t>(std::ceil(l * l));
    const std::size_t cap = (n - 1) / 4;  // largest p with p < n/4
    return std::max<std::size_t>(1, std::min(p, cap));
}

SieveBootstrap::SieveBootstrap(std::span<const double> series, const SieveSettings& settings) {
    const std::size_t p = settings.order ? *settings.order : sieve_order(series.size());
    if (4 * p >= series.size()) {
        throw InvalidInput("sieve_bootstrap: order must satisfy p < n/4");
    }
    fit_ = ar_fit(series, p, settings.method);
    burn_in_ = settings.burn_in ? *settings.burn_in : 10 * p;
}

std::vector<double> SieveBootstrap::generate(std::size_t n_out, SeedPolicy seed, std::uint64_t replicate) const {
    return ar_residual_bootstrap(fit_, n_out, burn_in_, seed, replicate);
}

std::vector<double> sieve_bootstrap(std::span<const double> series, std::size_t n_out, SeedPolicy seed,
                                    std::uint64_t replicate, const SieveSettings& settings) {
    return SieveBootstrap(series, settings).generate(n_out, seed, replicate);
}

std::size_t block_count(std::size_t n, const BlockPlan& plan) {
    if (plan.block_length == 0 || plan.block_length > n) {
        throw InvalidInput("block_resample: block length must lie in [1, n]");
    }
    return plan.overlap ? n - plan.block_length + 1 : n / plan.block_length;
}

std::vector<double> block_resample(std::span<const double> series, const BlockPlan& plan, SeedPolicy seed,
                                   std::uint64_t replicate) {
    const std::size_t n = series.size();
    const std::size_t starts = block_count(n, plan);
    const std::size_t n_out = plan.n_out == 0 ? n : plan.n_out;
    const std::size_t l = plan.block_length;
    if (n_out < l) {
        throw InvalidInput("block_resample: output length must be at least the block length");
    }
    CounterRng rng(seed, replicate);
    std::vector<double> out;
    out.reserve(n_out + l);
    while (out.size() < n_out) {
        const auto k = static_cast<std::size_t>(rng.uniform_index(starts));
        const std::size_t start = plan.overlap ? k : k * l;
        out.insert(out.end(), series.begin() + static_cast<std::ptrdiff_t>(start),
                   series.begin() + static_cast<std::ptrdiff_t>(start + l));
    }
    out.resize(n_out);
    return out;
}

std::size_t optimal_block_length(std::size_t n, BlockPurpose purpose, double c) {
    if (!(c > 0.0)) {
        throw InvalidInput("optimal_block_length: c must be positive");
    }
    if (n <= 1) {
        return 1;
    }
    const double r = purpose == BlockPurpose::bias_variance ? 1.0 / 3.0
                     : purpose == BlockPurpose::one_sided   ? 1.0 / 4.0
                                                            : 1.0 / 5.0;
    // Guard against pow() landing a hair above an exact integer (1000^(1/3)).
    const double raw = c * std::pow(static_cast<double>(n), r);
    const double rounded = std::round(raw);
    const double v = std::abs(raw - rounded) < 1e-9 * rounded ? rounded : std::ceil(raw);
    return std::clamp<std::size_t>(static_cast<std::size_t>(v), 1, n);
}

BlockPurpose block_purpose_from_string(const std::string& name) {
    if (name == "bias_variance") {
        return BlockPurpose::bias_variance;
    }
    if (name == "one_sided") {
        return BlockPurpose::one_sided;
    }
    if (name == "symmetric") {
        return BlockPurpose::symmetric;
    }
    throw ConfigError("unknown block-length purpose '" + name + "' (bias_variance, one_sided, symmetric)");
}

namespace {

std::vector<double> first_column(const Sample& data) {
    if (data.dim() != 1) {
        throw InvalidInput("time-series plans expect a one-column sample");
    }
    return data.column(0);
}

}  // namespace

ResamplePlan block_plan(BlockPlan plan) {
    return CustomPlan{plan.overlap ? "moving-block" : "non-overlapping-block",
                      [plan](const Sample& data, SeedPolicy seed, std::uint64_t replicate) {
                          const auto s = first_column(data);
                          return Sample::from_values(block_resample(s, plan, seed, replicate), data.names().front());
                      }};
}

ResamplePlan sieve_plan(std::shared_ptr<const SieveBootstrap> sieve) {
    return CustomPlan{"sieve", [sieve](const Sample& data, SeedPolicy seed, std::uint64_t replicate) {
                          return Sample::from_values(sieve->generate(data.size(), seed, replicate),
                                                     data.names().front());
                      }};
}

}  // namespace bootlab
