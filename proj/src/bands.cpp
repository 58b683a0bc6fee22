#include "bootlab/bands.hpp"

#include "bootlab/distribution.hpp"
#include "bootlab/error.hpp"
#include "bootlab/parallel.hpp"
#include "bootlab/regression_fit.hpp"
#include "bootlab/sample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace bootlab {

double kernel_density(KernelType kernel, double t) noexcept {
    if (t <= -1.0 || t >= 1.0) {
        return 0.0;
    }
    const double w = 1.0 - t * t;
    switch (kernel) {
        case KernelType::uniform:
            return 0.5;
        case KernelType::epanechnikov:
            return 0.75 * w;
        case KernelType::biweight:
            return (15.0 / 16.0) * w * w;
        case KernelType::triweight:
            return (35.0 / 32.0) * w * w * w;
    }
    return 0.0;
}

std::string to_string(KernelType kernel) {
    switch (kernel) {
        case KernelType::uniform:
            return "uniform";
        case KernelType::epanechnikov:
            return "epanechnikov";
        case KernelType::biweight:
            return "biweight";
        case KernelType::triweight:
            return "triweight";
    }
    return "unknown";
}

KernelType kernel_from_string(const std::string& name) {
    for (auto k : {KernelType::uniform, KernelType::epanechnikov, KernelType::biweight, KernelType::triweight}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ConfigError("unknown kernel '" + name + "'");
}

namespace {

struct Sorted {
    std::vector<Eigen::Index> order;  // order[r] = original index of the r-th smallest x
    std::vector<double> x;
};

Sorted sort_by_x(const Eigen::VectorXd& x) {
    Sorted s;
    s.order.resize(static_cast<std::size_t>(x.size()));
    std::iota(s.order.begin(), s.order.end(), Eigen::Index{0});
    std::stable_sort(s.order.begin(), s.order.end(), [&](Eigen::Index a, Eigen::Index b) { return x[a] < x[b]; });
    s.x.reserve(s.order.size());
    for (Eigen::Index i : s.order) {
        s.x.push_back(x[i]);
    }
    return s;
}

// Local polynomial weights at point a over sorted x (positions into the sorted
// array), skipping position `skip`. Returns false when the window holds no data.
bool local_row(const std::vector<double>& xs, double a, int degree, double h, KernelType kernel, std::size_t skip,
               std::vector<std::size_t>& pos, std::vector<double>& weight, int& used_degree) {
    pos.clear();
    weight.clear();
    const auto lo = std::upper_bound(xs.begin(), xs.end(), a - h);
    std::vector<double> kern;
    for (auto it = lo; it != xs.end() && *it < a + h; ++it) {
        const auto p = static_cast<std::size_t>(it - xs.begin());
        const double k = kernel_density(kernel, (*it - a) / h);
        if (p == skip || k <= 0.0) {
            continue;
        }
        pos.push_back(p);
        kern.push_back(k);
    }
    if (pos.empty()) {
        return false;
    }
    const auto m = static_cast<Eigen::Index>(pos.size());
    for (int d = std::min<int>(degree, static_cast<int>(m) - 1); d >= 0; --d) {
        Eigen::MatrixXd Z(m, d + 1);
        for (Eigen::Index r = 0; r < m; ++r) {
            const double u = (xs[pos[static_cast<std::size_t>(r)]] - a) / h;
            double power = 1.0;
            for (int c = 0; c <= d; ++c) {
                Z(r, c) = power;
                power *= u;
            }
        }
        const Eigen::Map<const Eigen::VectorXd> K(kern.data(), m);
        const Eigen::MatrixXd M = Z.transpose() * K.asDiagonal() * Z;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) {
            continue;
        }
        const Eigen::VectorXd c = lu.solve(Eigen::VectorXd::Unit(d + 1, 0));
        const Eigen::VectorXd w = K.cwiseProduct(Z * c);
        weight.assign(w.data(), w.data() + m);
        used_degree = d;
        return true;
    }
    return false;
}

std::string point_label(double a) { return format_double(a); }

}  // namespace

SmootherWeights local_poly_weights(const Eigen::VectorXd& x, const std::vector<double>& at, int degree,
                                   double bandwidth, KernelType kernel) {
    if (!(bandwidth > 0.0)) {
        throw InvalidInput("local_poly_weights: bandwidth must be positive");
    }
    if (degree < 0) {
        throw InvalidInput("local_poly_weights: degree must be non-negative");
    }
    const Sorted s = sort_by_x(x);
    SmootherWeights out;
    out.W = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(at.size()), x.size());
    out.effective_degree.resize(at.size());
    std::vector<std::size_t> pos;
    std::vector<double> weight;
    for (std::size_t g = 0; g < at.size(); ++g) {
        int used = degree;
        if (!local_row(s.x, at[g], degree, bandwidth, kernel, s.x.size(), pos, weight, used)) {
            throw InvalidInput("local_poly_fit: empty kernel window at x = " + point_label(at[g]));
        }
        for (std::size_t r = 0; r < pos.size(); ++r) {
            out.W(static_cast<Eigen::Index>(g), s.order[pos[r]]) = weight[r];
        }
        out.effective_degree[g] = used;
    }
    return out;
}

LocalPolyFit local_poly_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int degree, double bandwidth,
                            KernelType kernel, const std::vector<double>& grid) {
    if (x.size() != y.size() || x.size() == 0) {
        throw InvalidInput("local_poly_fit: x and y must be non-empty and of equal length");
    }
    auto sw = local_poly_weights(x, grid, degree, bandwidth, kernel);
    LocalPolyFit fit;
    fit.degree = degree;
    fit.bandwidth = bandwidth;
    fit.kernel = kernel;
    fit.grid = grid;
    fit.g_hat = sw.W * y;
    fit.weight_norms = sw.W.rowwise().squaredNorm();
    fit.sigma2_hat = x.size() >= 2 ? rice_variance(x, y) : 0.0;
    fit.weights = std::move(sw.W);
    fit.effective_degree = std::move(sw.effective_degree);
    return fit;
}

double rice_variance(const Eigen::VectorXd& y_sorted) {
    const Eigen::Index n = y_sorted.size();
    if (n < 2) {
        throw InvalidInput("rice_variance: need n >= 2");
    }
    const Eigen::VectorXd d = y_sorted.tail(n - 1) - y_sorted.head(n - 1);
    return d.squaredNorm() / (2.0 * static_cast<double>(n - 1));
}

double rice_variance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size()) {
        throw InvalidInput("rice_variance: x and y lengths differ");
    }
    const Sorted s = sort_by_x(x);
    Eigen::VectorXd ys(y.size());
    for (std::size_t r = 0; r < s.order.size(); ++r) {
        ys[static_cast<Eigen::Index>(r)] = y[s.order[r]];
    }
    return rice_variance(ys);
}

double cv_bandwidth(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int degree, KernelType kernel,
                    std::vector<double> candidates) {
    if (candidates.empty()) {
        throw InvalidInput("cv_bandwidth: empty candidate grid");
    }
    if (candidates.size() == 1) {
        return candidates.front();
    }
    std::sort(candidates.begin(), candidates.end());
    const Sorted s = sort_by_x(x);
    std::vector<double> ys(s.order.size());
    for (std::size_t r = 0; r < s.order.size(); ++r) {
        ys[r] = y[s.order[r]];
    }
    double best_h = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pos;
    std::vector<double> weight;
    // Scores within this relative margin count as ties, so exactly reproduced
    // data do not pick a bandwidth on rounding noise.
    const double tie = 1e-10 * (1.0 + Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()))
                                          .squaredNorm());
    for (double h : candidates) {
        if (!(h > 0.0)) {
            continue;
        }
        double score = 0.0;
        bool admissible = true;
        for (std::size_t i = 0; i < ys.size() && admissible; ++i) {
            int used = degree;
            if (!local_row(s.x, s.x[i], degree, h, kernel, i, pos, weight, used)) {
                admissible = false;
                break;
            }
            double pred = 0.0;
            for (std::size_t r = 0; r < pos.size(); ++r) {
                pred += weight[r] * ys[pos[r]];
            }
            score += (ys[i] - pred) * (ys[i] - pred);
        }
        if (admissible && score < best_score - tie) {
            best_score = score;
            best_h = h;
        }
    }
    if (!std::isfinite(best_score)) {
        throw InvalidInput("cv_bandwidth: every candidate leaves some leave-one-out window empty");
    }
    return best_h;
}

std::vector<double> bandwidth_grid(double lo, double hi, std::size_t count) { return linear_grid(lo, hi, count); }

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

std::vector<double> calibration_alpha_grid() {
    std::vector<double> out(300);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<double>(i + 1) / 1000.0;
    }
    return out;
}

double solve_beta(const std::vector<double>& alpha_grid, const Eigen::VectorXd& coverage, double alpha0,
                  BetaFlag* flag) {
    const double target = 1.0 - alpha0;
    const auto m = alpha_grid.size();
    BetaFlag f = BetaFlag::none;
    double beta = 0.0;
    if (coverage[0] < target) {
        f = BetaFlag::clamped_low;
        beta = alpha_grid.front();
    } else if (coverage[static_cast<Eigen::Index>(m - 1)] >= target) {
        f = BetaFlag::clamped_high;
        beta = alpha_grid.back();
    } else {
        std::size_t k = 0;
        while (k + 1 < m && coverage[static_cast<Eigen::Index>(k + 1)] >= target) {
            ++k;
        }
        const double p0 = coverage[static_cast<Eigen::Index>(k)];
        const double p1 = coverage[static_cast<Eigen::Index>(k + 1)];
        beta = alpha_grid[k] + (p0 - target) / (p0 - p1) * (alpha_grid[k + 1] - alpha_grid[k]);
    }
    if (flag != nullptr) {
        *flag = f;
    }
    return beta;
}

BandResult hh_band(const Eigen::VectorXd& x_in, const Eigen::VectorXd& y_in, const std::vector<double>& grid,
                   const BandOptions& options) {
    if (x_in.size() != y_in.size() || x_in.size() < 2) {
        throw InvalidInput("hh_band: need at least two (x, y) pairs of equal length");
    }
    if (!(options.alpha0 > 0.0 && options.alpha0 < 1.0)) {
        throw InvalidInput("hh_band: alpha0 must lie in (0, 1)");
    }
    if (!(options.xi > 0.0 && options.xi <= 0.5)) {
        throw InvalidInput("hh_band: xi must lie in (0, 0.5]");
    }
    if (options.B < 100) {
        throw InvalidInput("hh_band: B must be at least 100");
    }
    if (grid.empty()) {
        throw InvalidInput("hh_band: empty evaluation grid");
    }
    const Sorted s = sort_by_x(x_in);
    const auto n = static_cast<Eigen::Index>(s.order.size());
    Eigen::VectorXd x(n);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        x[r] = x_in[s.order[static_cast<std::size_t>(r)]];
        y[r] = y_in[s.order[static_cast<std::size_t>(r)]];
    }

    double h = 0.0;
    if (options.bandwidth) {
        h = *options.bandwidth;
    } else {
        auto candidates = options.bandwidth_candidates;
        if (candidates.empty()) {
            const double range = x[n - 1] - x[0];
            candidates = bandwidth_grid(0.03 * range, 0.5 * range, 24);
        }
        h = cv_bandwidth(x, y, options.degree, options.kernel, candidates);
    }

    const auto grid_w = local_poly_weights(x, grid, options.degree, h, options.kernel);
    const std::vector<double> xs(x.data(), x.data() + n);
    const auto data_w = local_poly_weights(x, xs, options.degree, h, options.kernel);
    const Eigen::MatrixXd& Wg = grid_w.W;
    const Eigen::VectorXd g_hat = Wg * y;
    const Eigen::VectorXd fitted = data_w.W * y;
    const Eigen::VectorXd S = Wg.rowwise().squaredNorm();
    const Eigen::VectorXd root_S = S.cwiseSqrt();
    const double sigma2 = rice_variance(y);
    const Eigen::VectorXd resid = center(y - fitted);

    const auto G = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd ratios(G, static_cast<Eigen::Index>(options.B));
    const double scale = 1.0 + y.cwiseAbs().maxCoeff();
    parallel_for(options.B, options.threads, [&](std::size_t b) {
        CounterRng rng(options.seed, b);
        Eigen::VectorXd y_star(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            y_star[i] = fitted[i] + resid[static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)))];
        }
        const Eigen::VectorXd g_star = Wg * y_star;
        const double sigma_star = std::sqrt(rice_variance(y_star));
        auto col = ratios.col(static_cast<Eigen::Index>(b));
        for (Eigen::Index g = 0; g < G; ++g) {
            const double diff = std::abs(g_hat[g] - g_star[g]);
            const double unit = root_S[g] * sigma_star;
            if (unit > 1e-12 * scale) {
                col[g] = diff / unit;
            } else {
                col[g] = diff <= 1e-9 * scale ? 0.0 : std::numeric_limits<double>::infinity();
            }
        }
    });

    BandResult out;
    out.grid = grid;
    out.alpha_grid = calibration_alpha_grid();
    const auto A = static_cast<Eigen::Index>(out.alpha_grid.size());
    std::vector<double> z_grid(out.alpha_grid.size());
    for (std::size_t a = 0; a < z_grid.size(); ++a) {
        z_grid[a] = normal_quantile(1.0 - out.alpha_grid[a] / 2.0);
    }
    out.pi_star.resize(G, A);
    out.beta_star.resize(grid.size());
    out.flags.resize(grid.size());
    const auto Bd = static_cast<double>(options.B);
    std::vector<double> row(options.B);
    for (Eigen::Index g = 0; g < G; ++g) {
        for (std::size_t b = 0; b < options.B; ++b) {
            row[b] = ratios(g, static_cast<Eigen::Index>(b));
        }
        std::sort(row.begin(), row.end());
        for (Eigen::Index a = 0; a < A; ++a) {
            const auto covered = std::upper_bound(row.begin(), row.end(), z_grid[static_cast<std::size_t>(a)]) - row.begin();
            out.pi_star(g, a) = static_cast<double>(covered) / Bd;
        }
        const Eigen::VectorXd curve = out.pi_star.row(g).transpose();
        out.beta_star[static_cast<std::size_t>(g)] =
            solve_beta(out.alpha_grid, curve, options.alpha0, &out.flags[static_cast<std::size_t>(g)]);
    }
    out.alpha_calibrated = rank_quantile(out.beta_star, options.xi);
    out.z = normal_quantile(1.0 - out.alpha_calibrated / 2.0);
    const Eigen::VectorXd half = root_S * (std::sqrt(sigma2) * out.z);
    out.g_hat = g_hat;
    out.lower = g_hat - half;
    out.upper = g_hat + half;
    out.weight_norms = S;
    out.xi = options.xi;
    out.alpha0 = options.alpha0;
    out.bandwidth = h;
    out.sigma2_hat = sigma2;
    out.B = options.B;
    return out;
}

namespace {

const char* flag_name(BetaFlag f) {
    switch (f) {
        case BetaFlag::none:
            return "none";
        case BetaFlag::clamped_low:
            return "clamped_low";
        case BetaFlag::clamped_high:
            return "clamped_high";
    }
    return "none";
}

}  // namespace

void write_band_csv(std::ostream& out, const BandResult& band) {
    out << "x,g_hat,lower,upper,beta_star,flag\n";
    for (std::size_t g = 0; g < band.grid.size(); ++g) {
        const auto i = static_cast<Eigen::Index>(g);
        out << format_double(band.grid[g]) << ',' << format_double(band.g_hat[i]) << ','
            << format_double(band.lower[i]) << ',' << format_double(band.upper[i]) << ','
            << format_double(band.beta_star[g]) << ',' << flag_name(band.flags[g]) << '\n';
    }
}

nlohmann::json band_summary(const BandResult& band, const SeedPolicy& seed) {
    std::size_t flagged = 0;
    for (auto f : band.flags) {
        flagged += f != BetaFlag::none ? 1 : 0;
    }
    return nlohmann::json{{"alpha_calibrated", band.alpha_calibrated},
                          {"z_multiplier", band.z},
                          {"xi", band.xi},
                          {"alpha0", band.alpha0},
                          {"bandwidth", band.bandwidth},
                          {"sigma2_hat", band.sigma2_hat},
                          {"grid_points", band.grid.size()},
                          {"flagged_points", flagged},
                          {"B", band.B},
                          {"seed", seed.master_seed},
                          {"stream", seed.stream_id}};
}

}  // namespace bootlab
