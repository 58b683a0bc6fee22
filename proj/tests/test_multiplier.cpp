#include "bootlab/error.hpp"
#include "bootlab/experiments.hpp"
#include "bootlab/inference.hpp"
#include "bootlab/multiplier.hpp"
#include "bootlab/parallel.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace bootlab;

namespace {

std::vector<double> normal_draws(std::size_t n, double mu, SeedPolicy seed) {
    CounterRng rng(seed, 0);
    std::vector<double> x(n);
    for (auto& v : x) {
        v = mu + rng.normal();
    }
    return x;
}

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

}  // namespace

TEST_CASE("mle") {
    SUBCASE("Gaussian mean is the sample mean") {
        const auto x = normal_draws(50, 0.7, SeedPolicy{1, 0});
        const auto fit = mle(gaussian_mean_model(x), scalar(0.0));
        double mean = 0.0;
        for (double v : x) {
            mean += v / 50.0;
        }
        CHECK(std::abs(fit.theta[0] - mean) <= 1e-8);
        CHECK_FALSE(fit.non_unique);
        CHECK_FALSE(fit.at_bound);
    }
    SUBCASE("flat direction with a single observation") {
        LogLikTerms terms;
        terms.n = 1;
        terms.dim = 2;
        terms.log_density = [](std::size_t, const Eigen::VectorXd& t) {
            const double r = 1.0 - t[0] - t[1];
            return -0.5 * r * r;
        };
        const auto fit = mle(terms, Eigen::Vector2d(0.0, 0.0));
        CHECK(fit.non_unique);
        CHECK(fit.theta.sum() == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("Bernoulli with all successes sits on the boundary") {
        const auto fit = mle(bernoulli_model({1.0, 1.0, 1.0, 1.0}), scalar(0.5));
        CHECK(fit.at_bound);
        CHECK(fit.theta[0] == 1.0);
    }
    SUBCASE("Bernoulli interior") {
        const auto fit = mle(bernoulli_model({1.0, 0.0, 1.0, 1.0}), scalar(0.5));
        CHECK(fit.theta[0] == doctest::Approx(0.75).epsilon(1e-6));
        CHECK_THROWS_AS((void)bernoulli_model({0.0, 2.0}), InvalidInput);
    }
    SUBCASE("linear Gaussian regression matches OLS") {
        Eigen::MatrixXd X(6, 2);
        X << 1, 0, 1, 1, 1, 2, 1, 3, 1, 4, 1, 5;
        Eigen::VectorXd y(6);
        y << 0.1, 1.2, 1.9, 3.2, 3.9, 5.1;
        const auto fit = mle(linear_gaussian_model(X, y), Eigen::Vector3d(0.0, 0.0, 0.0));
        const Eigen::VectorXd ols = X.colPivHouseholderQr().solve(y);
        CHECK((fit.theta.head(2) - ols).norm() <= 1e-6);
        const double s2 = (y - X * ols).squaredNorm() / 6.0;
        CHECK(std::exp(2.0 * fit.theta[2]) == doctest::Approx(s2).epsilon(1e-5));
    }
    SUBCASE("weighted log-likelihood") {
        const auto terms = gaussian_mean_model({0.0, 2.0});
        const Eigen::Vector2d w(3.0, 1.0);
        const auto fit = mle(terms, scalar(0.0), {}, w);
        CHECK(fit.theta[0] == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(weighted_loglik(terms, scalar(1.0)) == doctest::Approx(2.0 * -0.5 * (1.0 + std::log(2.0 * M_PI))));
    }
}

TEST_CASE("multiplier laws") {
    for (auto law : {MultiplierLaw::gaussian, MultiplierLaw::poisson}) {
        CounterRng rng(SeedPolicy{2, 0}, 0);
        const std::size_t N = 200000;
        double m = 0.0;
        double m2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double u = draw_multiplier(law, rng);
            m += u / N;
            m2 += u * u / N;
        }
        CHECK(m == doctest::Approx(1.0).epsilon(0.01));
        CHECK(m2 - m * m == doctest::Approx(1.0).epsilon(0.02));
        CHECK(multiplier_law_from_string(to_string(law)) == law);
    }
    CounterRng rng(SeedPolicy{2, 0}, 0);
    CHECK(draw_multiplier(MultiplierLaw::unit, rng) == 1.0);
    CHECK_THROWS_AS((void)multiplier_law_from_string("rademacher"), ConfigError);
}

TEST_CASE("multiplier_lr_test") {
    MultiplierLrOptions opt;
    opt.B = 199;
    opt.seed = SeedPolicy{3, 0};
    SUBCASE("analytic LR on fixed data") {
        // Two observations: Gaussian multipliers often sum to a negative weight.
        opt.law = MultiplierLaw::unit;
        const auto res = multiplier_lr_test(gaussian_mean_model({0.0, 2.0}), scalar(0.0), scalar(0.0), opt);
        CHECK(std::abs(res.LR - 2.0) <= 1e-8);
        CHECK(res.theta_hat[0] == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("null at the estimate") {
        const auto x = normal_draws(30, 0.0, SeedPolicy{4, 0});
        const auto theta_hat = mle(gaussian_mean_model(x), scalar(0.0)).theta;
        const auto res = multiplier_lr_test(gaussian_mean_model(x), theta_hat, scalar(0.0), opt);
        CHECK(std::abs(res.LR) <= 1e-10);
        CHECK_FALSE(res.reject);
    }
    SUBCASE("non-negativity and the unit-multiplier identity") {
        const auto x = normal_draws(40, 0.3, SeedPolicy{5, 0});
        const auto res = multiplier_lr_test(gaussian_mean_model(x), scalar(0.0), scalar(0.0), opt);
        CHECK(res.LR >= 0.0);
        for (double v : res.lr_star) {
            CHECK(v >= -1e-8);
        }
        opt.law = MultiplierLaw::unit;
        opt.centering = LrCentering::null_value;
        const auto unit = multiplier_lr_test(gaussian_mean_model(x), scalar(0.0), scalar(0.0), opt);
        for (double v : unit.lr_star) {
            CHECK(v == doctest::Approx(unit.LR).epsilon(1e-8));
        }
    }
    SUBCASE("decision follows the rank-rule critical value") {
        const auto x = normal_draws(40, 0.5, SeedPolicy{6, 0});
        const auto res = multiplier_lr_test(gaussian_mean_model(x), scalar(0.0), scalar(0.0), opt);
        std::vector<double> sorted = res.lr_star;
        std::sort(sorted.begin(), sorted.end());
        CHECK(res.z_star == sorted[quantile_rank(sorted.size(), 0.95) - 1]);
        CHECK(res.reject == (res.LR > res.z_star));
        CHECK(res.reject);
    }
}

TEST_CASE("multiplier LR, Gaussian mean, n = 100, 2000 replications") {
    const auto report = run_experiment(resolve_config("multiplier-lr", nlohmann::json::object()));
    const auto& cell = report.at("gaussian/n=100");
    MESSAGE("rate " << cell.value("bootstrap_rate") << " z* " << cell.value("z_star"));
    CHECK(std::abs(cell.value("bootstrap_rate") - 0.05) <= 0.02);
    CHECK(cell.value("z_star") == doctest::Approx(3.841).epsilon(0.15));
    CHECK(report.at("fixed_data").value("abs_error") <= 1e-8);
}

TEST_CASE("sz_bound") {
    const auto b = sz_bound(1, 10000, 3.0, 1.0, 0.05);
    CHECK(b.value == doctest::Approx(std::pow(4e-4, 0.125)));
    CHECK(b.value == doctest::Approx(0.376).epsilon(1e-3));
    CHECK(b.admissible);
    CHECK(sz_bound(1, 100, 2.0, 1.0, 0.05).admissible == false);
    CHECK(sz_bound(1, 100, std::log(8.0 / 0.95) + 1e-9, 1.0, 0.05).admissible);
    double last = 1e9;
    for (std::size_t n : {10u, 100u, 1000u, 100000u, 10000000u}) {
        const double v = sz_bound(2, n, 3.0, 1.0, 0.05).value;
        CHECK(v < last);
        last = v;
    }
    CHECK(sz_bound(5, 1000, 3.0, 1.0, 0.05).value > sz_bound(2, 1000, 3.0, 1.0, 0.05).value);
    CHECK(sz_bound(2, 1000, 5.0, 1.0, 0.05).value > sz_bound(2, 1000, 3.0, 1.0, 0.05).value);
}

TEST_CASE("cck_max_bootstrap") {
    SUBCASE("constructed cancellation") {
        Eigen::MatrixXd X = Eigen::MatrixXd::Ones(2, 1);
        CHECK(cck_statistic(X, Eigen::Vector2d(1.0, -1.0)) == 0.0);
    }
    SUBCASE("p = 1 is the scalar normalized sum") {
        Eigen::MatrixXd X(4, 1);
        X << 1.0, -2.0, 0.5, 3.0;
        const Eigen::Vector4d e(0.3, -1.0, 2.0, 0.1);
        CHECK(cck_statistic(X, e) == doctest::Approx(X.col(0).dot(e) / 2.0));
        CHECK(cck_statistic(X, Eigen::Vector4d::Ones()) == doctest::Approx(2.5 / 2.0));
    }
    SUBCASE("z* non-decreasing in 1 - alpha; thread invariant") {
        CounterRng rng(SeedPolicy{7, 0}, 0);
        Eigen::MatrixXd X(50, 30);
        for (Eigen::Index i = 0; i < X.size(); ++i) {
            X.data()[i] = rng.normal();
        }
        double last = -1e300;
        for (double alpha : {0.5, 0.2, 0.1, 0.05, 0.01}) {
            const auto res = cck_max_bootstrap(X, 500, alpha, SeedPolicy{8, 0});
            CHECK(res.z_star >= last);
            last = res.z_star;
            CHECK(res.covered == (res.Z <= res.z_star));
        }
        const auto a = cck_max_bootstrap(X, 300, 0.05, SeedPolicy{9, 0}, 1);
        const auto b = cck_max_bootstrap(X, 300, 0.05, SeedPolicy{9, 0}, 3);
        CHECK(a.replicates == b.replicates);
    }
}

TEST_CASE("CCK coverage, n = 100, p = 200, 1000 replications") {
    const auto report = run_experiment(resolve_config("cck", nlohmann::json::object()));
    const double coverage = report.at("gaussian/n=100/p=200").value("coverage");
    MESSAGE("coverage " << coverage);
    CHECK(std::abs(coverage - 0.95) <= 0.03);
}
