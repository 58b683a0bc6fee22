#include "bootlab/bands.hpp"
#include "bootlab/dgp.hpp"
#include "bootlab/error.hpp"
#include "bootlab/parallel.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace bootlab;

namespace {

struct Xy {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
};

Xy sine_data(std::size_t n, double sigma, SeedPolicy seed) {
    CounterRng rng(seed, 0);
    const Sample s = find_dgp("sine_regression").generate(n, {{"sigma", sigma}}, rng);
    Xy d{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (std::size_t i = 0; i < n; ++i) {
        d.y[i] = s(i, 0);
        d.x[i] = s(i, 1);
    }
    return d;
}

std::vector<double> midpoints(std::size_t G) {
    std::vector<double> g(G);
    for (std::size_t i = 0; i < G; ++i) {
        g[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(G);
    }
    return g;
}

}  // namespace

TEST_CASE("kernels") {
    for (auto k : {KernelType::uniform, KernelType::epanechnikov, KernelType::biweight, KernelType::triweight}) {
        double integral = 0.0;
        const int steps = 20000;
        for (int i = 0; i < steps; ++i) {
            const double t = -1.0 + (i + 0.5) * 2.0 / steps;
            integral += kernel_density(k, t) * 2.0 / steps;
            CHECK(kernel_density(k, t) == kernel_density(k, -t));
        }
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(kernel_density(k, 1.5) == 0.0);
        CHECK(kernel_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS((void)kernel_from_string("gaussian"), ConfigError);
}

TEST_CASE("local_poly_fit") {
    const auto d = sine_data(200, 0.3, SeedPolicy{1, 0});
    const auto grid = midpoints(25);

    SUBCASE("constant reproduction and weight sums") {
        const Eigen::VectorXd c = Eigen::VectorXd::Constant(200, 4.25);
        for (int degree : {0, 1, 2}) {
            const auto fit = local_poly_fit(d.x, c, degree, 0.15, KernelType::biweight, grid);
            for (std::size_t g = 0; g < grid.size(); ++g) {
                CHECK(fit.g_hat[static_cast<Eigen::Index>(g)] == doctest::Approx(4.25).epsilon(1e-10));
                CHECK(std::abs(fit.weights.row(static_cast<Eigen::Index>(g)).sum() - 1.0) <= 1e-8);
                CHECK(fit.weight_norms[static_cast<Eigen::Index>(g)] > 0.0);
            }
        }
    }
    SUBCASE("degree 0 with a window spanning all data is the sample mean") {
        const auto fit = local_poly_fit(d.x, d.y, 0, 10.0, KernelType::uniform, grid);
        for (Eigen::Index g = 0; g < fit.g_hat.size(); ++g) {
            CHECK(fit.g_hat[g] == doctest::Approx(d.y.mean()).epsilon(1e-12));
        }
    }
    SUBCASE("linear reproduction") {
        const Eigen::VectorXd y = 3.0 * d.x;
        for (double h : {0.08, 0.2, 1.0}) {
            for (int degree : {1, 2}) {
                const auto fit = local_poly_fit(d.x, y, degree, h, KernelType::epanechnikov, grid);
                for (std::size_t g = 0; g < grid.size(); ++g) {
                    CHECK(std::abs(fit.g_hat[static_cast<Eigen::Index>(g)] - 3.0 * grid[g]) <= 1e-8);
                }
            }
        }
    }
    SUBCASE("empty window names the point") {
        Eigen::VectorXd x(4);
        x << 0.0, 0.1, 0.2, 0.3;
        try {
            (void)local_poly_fit(x, x, 1, 0.05, KernelType::biweight, {0.9});
            FAIL("expected InvalidInput");
        } catch (const InvalidInput& e) {
            CHECK(std::string(e.what()).find("0.9") != std::string::npos);
        }
    }
    SUBCASE("singular local design falls back to a lower degree") {
        Eigen::VectorXd x(6);
        x << 0.0, 0.0, 0.0, 1.0, 2.0, 3.0;
        const Eigen::VectorXd y = Eigen::VectorXd::Constant(6, 2.0);
        const auto fit = local_poly_fit(x, y, 1, 0.5, KernelType::uniform, {0.0, 2.0});
        CHECK(fit.degree_reduced(0));
        CHECK(fit.g_hat[0] == doctest::Approx(2.0));
    }
}

TEST_CASE("rice_variance") {
    CHECK(rice_variance(Eigen::Vector3d(0, 0, 0)) == 0.0);
    CHECK(rice_variance(Eigen::Vector3d(0, 1, 0)) == 0.5);
    CHECK_THROWS_AS((void)rice_variance(Eigen::VectorXd::Ones(1)), InvalidInput);
    // Ordering by x.
    CHECK(rice_variance(Eigen::Vector3d(2, 0, 1), Eigen::Vector3d(0, 0, 1)) == 0.5);

    CounterRng rng(SeedPolicy{2, 0}, 0);
    Eigen::VectorXd y(10000);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        y[i] = 1.5 * rng.normal();
    }
    CHECK(rice_variance(y) == doctest::Approx(2.25).epsilon(0.05));
}

TEST_CASE("cv_bandwidth") {
    const auto d = sine_data(200, 0.3, SeedPolicy{3, 0});
    CHECK(cv_bandwidth(d.x, d.y, 1, KernelType::biweight, {0.123}) == 0.123);
    CHECK_THROWS_AS((void)cv_bandwidth(d.x, d.y, 1, KernelType::biweight, {}), InvalidInput);
    const Eigen::VectorXd linear = (2.0 - 0.5 * d.x.array()).matrix();
    CHECK(cv_bandwidth(d.x, linear, 1, KernelType::biweight, {0.5, 0.2, 0.3}) == 0.2);
    CHECK_THROWS_AS((void)cv_bandwidth(d.x, d.y, 1, KernelType::biweight, {1e-6, 2e-6}), InvalidInput);
}

TEST_CASE("cv_bandwidth avoids the candidate endpoints, 100 replications") {
    const auto candidates = bandwidth_grid(0.02, 0.4, 20);
    const auto picks = parallel_map<double>(100, 1, [&](std::size_t r) {
        const auto d = sine_data(500, 0.3, SeedPolicy{50, r});
        return cv_bandwidth(d.x, d.y, 1, KernelType::biweight, candidates);
    });
    const auto interior = std::count_if(picks.begin(), picks.end(), [&](double h) {
        return h > candidates.front() && h < candidates.back();
    });
    CHECK(interior >= 90);
}

TEST_CASE("solve_beta") {
    const std::vector<double> alpha{0.01, 0.02, 0.03, 0.04};
    BetaFlag flag = BetaFlag::none;
    Eigen::Vector4d cov(0.99, 0.97, 0.94, 0.90);
    CHECK(solve_beta(alpha, cov, 0.05, &flag) == doctest::Approx(0.02 + (0.97 - 0.95) / (0.97 - 0.94) * 0.01));
    CHECK(flag == BetaFlag::none);
    CHECK(solve_beta(alpha, Eigen::Vector4d(0.9, 0.8, 0.7, 0.6), 0.05, &flag) == 0.01);
    CHECK(flag == BetaFlag::clamped_low);
    CHECK(solve_beta(alpha, Eigen::Vector4d::Ones(), 0.05, &flag) == 0.04);
    CHECK(flag == BetaFlag::clamped_high);
    // A larger alpha0 lowers the coverage target, so beta* cannot decrease.
    double prev = -1.0;
    for (double a0 = 0.005; a0 < 0.2; a0 += 0.005) {
        const double b = solve_beta(alpha, cov, a0, nullptr);
        CHECK(b >= prev);
        prev = b;
    }
    const auto grid = calibration_alpha_grid();
    REQUIRE(grid.size() == 300);
    CHECK(grid.front() == doctest::Approx(0.001));
    CHECK(grid.back() == doctest::Approx(0.3));
}

TEST_CASE("hh_band") {
    const auto d = sine_data(500, 0.3, SeedPolicy{4, 0});
    const auto grid = midpoints(50);
    BandOptions opt;
    opt.B = 500;
    opt.seed = SeedPolicy{5, 0};

    SUBCASE("calibrated multiplier widens the naive band") {
        const auto band = hh_band(d.x, d.y, grid, opt);
        MESSAGE("alpha* " << band.alpha_calibrated << " z " << band.z);
        CHECK(band.z >= 1.96);
        CHECK(band.alpha_calibrated > 0.0);
        CHECK(band.alpha_calibrated < 1.0);
        for (Eigen::Index g = 0; g < band.lower.size(); ++g) {
            CHECK(band.lower[g] <= band.upper[g]);
            for (Eigen::Index a = 1; a < band.pi_star.cols(); ++a) {
                REQUIRE(band.pi_star(g, a) <= band.pi_star(g, a - 1));
            }
        }
        // alpha* is the rank-rule xi-quantile of the per-point levels.
        std::vector<double> sorted = band.beta_star;
        std::sort(sorted.begin(), sorted.end());
        CHECK(band.alpha_calibrated == sorted[static_cast<std::size_t>(std::ceil(0.1 * 50)) - 1]);
    }
    SUBCASE("xi = 0.5 gives the median level") {
        opt.xi = 0.5;
        const auto band = hh_band(d.x, d.y, grid, opt);
        std::vector<double> sorted = band.beta_star;
        std::sort(sorted.begin(), sorted.end());
        CHECK(band.alpha_calibrated == sorted[24]);
    }
    SUBCASE("scaling y by 2 doubles the half-width exactly") {
        opt.bandwidth = 0.1;
        const auto a = hh_band(d.x, d.y, grid, opt);
        const auto b = hh_band(d.x, 2.0 * d.y, grid, opt);
        CHECK(b.alpha_calibrated == a.alpha_calibrated);
        CHECK(std::sqrt(b.sigma2_hat) == 2.0 * std::sqrt(a.sigma2_hat));
        for (Eigen::Index g = 0; g < a.lower.size(); ++g) {
            CHECK((b.upper[g] - b.g_hat[g]) == doctest::Approx(2.0 * (a.upper[g] - a.g_hat[g])).epsilon(1e-14));
        }
    }
    SUBCASE("noiseless data") {
        opt.bandwidth = 0.2;
        const Eigen::VectorXd y = (1.0 + 0.5 * d.x.array()).matrix();
        const auto band = hh_band(d.x, y, grid, opt);
        for (Eigen::Index g = 0; g < band.pi_star.rows(); ++g) {
            CHECK(band.pi_star.row(g).minCoeff() == 1.0);
            CHECK(band.flags[static_cast<std::size_t>(g)] == BetaFlag::clamped_high);
        }
        CHECK(band.alpha_calibrated == doctest::Approx(0.3));
    }
    SUBCASE("deterministic and thread invariant") {
        opt.bandwidth = 0.1;
        const auto a = hh_band(d.x, d.y, grid, opt);
        opt.threads = 3;
        const auto b = hh_band(d.x, d.y, grid, opt);
        CHECK(a.beta_star == b.beta_star);
        CHECK(a.pi_star == b.pi_star);
        CHECK(a.lower == b.lower);
    }
    SUBCASE("input validation") {
        opt.xi = 0.0;
        CHECK_THROWS_AS((void)hh_band(d.x, d.y, grid, opt), InvalidInput);
        opt.xi = 0.1;
        opt.B = 50;
        CHECK_THROWS_AS((void)hh_band(d.x, d.y, grid, opt), InvalidInput);
        opt.B = 500;
        opt.alpha0 = 1.0;
        CHECK_THROWS_AS((void)hh_band(d.x, d.y, grid, opt), InvalidInput);
    }
    SUBCASE("output schema") {
        opt.bandwidth = 0.1;
        const auto band = hh_band(d.x, d.y, grid, opt);
        std::ostringstream csv;
        write_band_csv(csv, band);
        CHECK(csv.str().rfind("x,g_hat,lower,upper,beta_star,flag", 0) == 0);
        const auto j = band_summary(band, opt.seed);
        for (const char* key : {"alpha_calibrated", "xi", "B", "seed"}) {
            CHECK(j.contains(key));
        }
    }
}
