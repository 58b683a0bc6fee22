#include "bootlab/dgp.hpp"
#include "bootlab/distribution.hpp"
#include "bootlab/error.hpp"
#include "bootlab/inference.hpp"
#include "bootlab/parallel.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

using namespace bootlab;

namespace {

Sample normal_sample(std::size_t n, SeedPolicy seed) {
    CounterRng rng(seed, 0);
    return find_dgp("gaussian").generate(n, nlohmann::json{{"mu", 0.0}, {"sigma", 1.0}}, rng);
}

Sample values(std::vector<double> v) { return Sample::from_values(v); }

}  // namespace

TEST_CASE("rank-rule quantile") {
    const BootstrapDistribution d({4.0, 2.0, 1.0, 3.0}, 0.0);
    CHECK(quantile(d, 0.75) == 3.0);
    CHECK(quantile(d, 1e-9) == 1.0);
    CHECK(quantile(d, 0.999) == 4.0);
    CHECK(quantile_rank(999, 0.95) == 950);
    CHECK(quantile_rank(1000, 0.95) == 950);
    CHECK(quantile_rank(4, 0.25) == 1);
    CHECK_THROWS_AS((void)quantile(d, 0.0), InvalidInput);
    CHECK_THROWS_AS((void)quantile(d, 1.0), InvalidInput);
    double last = -1e300;
    for (double p = 0.01; p < 1.0; p += 0.01) {
        const double q = quantile(d, p);
        CHECK(q >= last);
        last = q;
    }
    // Equivariance under a monotone relabeling.
    const BootstrapDistribution e({std::exp(4.0), std::exp(2.0), std::exp(1.0), std::exp(3.0)}, 0.0);
    CHECK(quantile(e, 0.6) == std::exp(quantile(d, 0.6)));
}

TEST_CASE("BootstrapDistribution CDF") {
    const BootstrapDistribution d({1.0, 2.0, 2.0, 3.0}, 2.0);
    CHECK(d.cdf(2.0) == 0.75);
    CHECK(d.cdf_left(2.0) == 0.25);
    CHECK(d.cdf(0.5) == 0.0);
    CHECK(d.mean() == 2.0);
    CHECK(d.variance() == doctest::Approx(0.5));
    CHECK(std::is_sorted(d.values().begin(), d.values().end()));
    CHECK_THROWS_AS(BootstrapDistribution({}, 0.0), InvalidInput);
}

TEST_CASE("ks_distance") {
    SUBCASE("unit point mass at 0 against the standard normal") {
        CHECK(ks_distance(BootstrapDistribution({0.0}, 0.0), normal_cdf) == doctest::Approx(0.5));
    }
    SUBCASE("values at reference quantiles leave at most 1/B") {
        std::vector<double> v;
        const std::size_t B = 400;
        for (std::size_t i = 1; i <= B; ++i) {
            v.push_back(normal_quantile((static_cast<double>(i) - 0.5) / B));
        }
        CHECK(ks_distance(BootstrapDistribution(v, 0.0), normal_cdf) <= 1.0 / B + 1e-12);
    }
    SUBCASE("reference with an atom") {
        const Cdf censored = [](double z) { return z >= 0.0 ? normal_cdf(z) : 0.0; };
        const Cdf censored_left = [](double z) { return z > 0.0 ? normal_cdf(z) : 0.0; };
        const BootstrapDistribution d({0.0, 0.0, 1.0, 2.0}, 0.0);
        // At 0: G jumps 0 -> 0.5 and F jumps 0 -> 0.5; the largest gap is at 1 or 2.
        const double expected = std::max({std::abs(0.5 - normal_cdf(1.0)), std::abs(0.75 - normal_cdf(1.0)),
                                          std::abs(0.75 - normal_cdf(2.0)), std::abs(1.0 - normal_cdf(2.0))});
        CHECK(ks_distance(d, censored, censored_left) == doctest::Approx(expected));
    }
}

TEST_CASE("bootstrap_distribution") {
    BootstrapOptions raw;
    raw.form = ReplicateForm::raw;
    SUBCASE("one-point data") {
        raw.mode = EnumerationMode::monte_carlo;
        raw.B = 50;
        const auto d = bootstrap_distribution(Statistic::mean(), IidPlan{}, values({4.5}), raw);
        CHECK(d.cdf_left(4.5) == 0.0);
        CHECK(d.cdf(4.5) == 1.0);
    }
    SUBCASE("exact law of the mean of {1,2,3}") {
        raw.mode = EnumerationMode::exact;
        const auto run = run_bootstrap(Statistic::mean(), IidPlan{}, values({1.0, 2.0, 3.0}), raw);
        CHECK(run.enumerated);
        REQUIRE(run.distribution.size() == 27);
        std::map<long, int> counts;
        for (double v : run.distribution.values()) {
            ++counts[std::lround(3.0 * v)];
        }
        const std::map<long, int> expected{{3, 1}, {4, 3}, {5, 6}, {6, 7}, {7, 6}, {8, 3}, {9, 1}};
        CHECK(counts == expected);
        CHECK(run.distribution.cdf(2.0 + 1e-12) - run.distribution.cdf_left(2.0 - 1e-12) ==
              doctest::Approx(7.0 / 27.0));
    }
    SUBCASE("Monte Carlo converges to the enumeration") {
        raw.mode = EnumerationMode::exact;
        const auto exact = bootstrap_distribution(Statistic::mean(), IidPlan{}, values({1.0, 2.0, 3.0}), raw);
        raw.mode = EnumerationMode::monte_carlo;
        raw.B = 100000;
        raw.seed = SeedPolicy{3, 0};
        const auto mc = bootstrap_distribution(Statistic::mean(), IidPlan{}, values({1.0, 2.0, 3.0}), raw);
        double sup = 0.0;
        for (int k = 3; k <= 9; ++k) {
            sup = std::max(sup, std::abs(exact.cdf(k / 3.0 + 1e-9) - mc.cdf(k / 3.0 + 1e-9)));
        }
        CHECK(sup <= 0.01);
    }
    SUBCASE("automatic mode enumerates only when n^n is small") {
        raw.B = 10;
        CHECK(run_bootstrap(Statistic::mean(), IidPlan{}, values({1, 2, 3, 4, 5, 6, 7}), raw).enumerated);
        CHECK_FALSE(run_bootstrap(Statistic::mean(), IidPlan{}, values({1, 2, 3, 4, 5, 6, 7, 8}), raw).enumerated);
    }
    SUBCASE("failures carry the replicate index and seed") {
        const Statistic bad{"bad",
                            [](const Sample& s) {
                                if (s(0, 0) > 2.5) {
                                    throw EvaluationError("boom");
                                }
                                return 0.0;
                            },
                            {}};
        raw.mode = EnumerationMode::monte_carlo;
        raw.B = 100;
        raw.seed = SeedPolicy{77, 0};
        try {
            (void)bootstrap_distribution(bad, IidPlan{}, values({1.0, 2.0, 3.0}), raw);
            FAIL("expected a ReplicateError");
        } catch (const ReplicateError& e) {
            CHECK(e.seed() == 77);
            CHECK(e.replicate() < 100);
        }
    }
    SUBCASE("identical across thread counts") {
        const Sample data = normal_sample(30, SeedPolicy{1, 0});
        BootstrapOptions opt;
        opt.B = 500;
        opt.seed = SeedPolicy{2, 0};
        opt.form = ReplicateForm::studentized;
        const auto a = bootstrap_distribution(Statistic::mean(), IidPlan{}, data, opt);
        opt.threads = 3;
        const auto b = bootstrap_distribution(Statistic::mean(), IidPlan{}, data, opt);
        CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin(), b.values().end()));
    }
}

TEST_CASE("bias_estimate and bias_corrected") {
    const Sample data = values({1.0, 2.0, 3.0});
    BiasOptions exact;
    exact.mode = EnumerationMode::exact;
    const MeanFunctional square = [](std::span<const double> m) { return m[0] * m[0]; };
    const MeanFunctional linear = [](std::span<const double> m) { return 2.0 * m[0] + 1.0; };
    CHECK(bias_estimate(square, data, exact) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
    CHECK(bias_corrected(square, data, exact) == doctest::Approx(34.0 / 9.0).epsilon(1e-12));
    CHECK(std::abs(bias_estimate(linear, data, exact)) < 1e-14);
    CHECK(bias_corrected(linear, data, exact) == doctest::Approx(5.0).epsilon(1e-14));

    const MeanFunctional bad = [](std::span<const double> m) { return m[0] > 2.9 ? std::nan("") : m[0]; };
    CHECK_THROWS_AS((void)bias_estimate(bad, data, exact), EvaluationError);

    // N(0,1), n = 20: E(mean^2) = 1/20; the bootstrap estimate tracks it and the
    // corrected estimator's bias is O(n^-2).
    const std::size_t R = 2000;
    auto reps = parallel_map<std::pair<double, double>>(R, 1, [&](std::size_t r) {
        const Sample x = normal_sample(20, SeedPolicy{40, r});
        BiasOptions opt;
        opt.B = 200;
        opt.seed = SeedPolicy{41, r};
        return std::pair{bias_estimate(square, x, opt), bias_corrected(square, x, opt)};
    });
    double est = 0.0;
    double corr = 0.0;
    for (const auto& [b, c] : reps) {
        est += b / R;
        corr += c / R;
    }
    CHECK(est == doctest::Approx(0.05 * 19.0 / 20.0).epsilon(0.05));
    CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("critical values from replicates") {
    const std::vector<double> abs_t{1.0, 2.0, 3.0, 4.0};
    CHECK(critical_value_from(abs_t, 0.25, Sidedness::symmetric).z_star == 3.0);
    const std::vector<double> t{-2.0, -1.0, 1.0, 2.0};
    // Rank rule: ceil(0.75 * 4) = 3rd order statistic.
    CHECK(critical_value_from(t, 0.25, Sidedness::upper).z_star == 1.0);
    CHECK(critical_value_from(t, 0.25, Sidedness::lower).z_star == -1.0);
    CHECK(critical_value_from(t, 0.25, Sidedness::symmetric).z_star == 2.0);
    CHECK(critical_value_from(t, 0.25, Sidedness::symmetric).z_star >= 0.0);
}

TEST_CASE("symmetric and one-sided bootstrap-t critical values") {
    SUBCASE("Gaussian data, n = 100") {
        const Sample data = normal_sample(100, SeedPolicy{12, 0});
        const auto z = symmetric_critical_value(Statistic::mean(), IidPlan{}, data, 999, 0.05, SeedPolicy{13, 0});
        CHECK(std::abs(z.z_star - 1.984) <= 0.15);
        CHECK(z.sided == Sidedness::symmetric);
    }
    SUBCASE("constant data is degenerate") {
        CHECK_THROWS_AS((void)symmetric_critical_value(Statistic::mean(), IidPlan{}, values(std::vector(10, 1.0)), 999,
                                                       0.05, SeedPolicy{1, 0}),
                        EvaluationError);
    }
    SUBCASE("B below ceil(1/alpha) is rejected") {
        CHECK_THROWS_AS((void)symmetric_critical_value(Statistic::mean(), IidPlan{}, normal_sample(10, {1, 0}), 19,
                                                       0.05, SeedPolicy{1, 0}),
                        InvalidInput);
    }
    SUBCASE("a symmetric cloud gives mirrored one-sided values") {
        const Sample data = normal_sample(200, SeedPolicy{14, 0});
        const auto up = one_sided_critical_value(Statistic::mean(), IidPlan{}, data, 4999, 0.05, SeedPolicy{15, 0},
                                                 Sidedness::upper);
        const auto lo = one_sided_critical_value(Statistic::mean(), IidPlan{}, data, 4999, 0.05, SeedPolicy{15, 0},
                                                 Sidedness::lower);
        CHECK(up.z_star == doctest::Approx(-lo.z_star).epsilon(0.15));
    }
    SUBCASE("centered exponential, n = 15: the studentized mean is left-skewed") {
        double up = 0.0;
        double lo = 0.0;
        const int R = 40;
        for (int r = 0; r < R; ++r) {
            CounterRng rng(SeedPolicy{7, static_cast<std::uint64_t>(r)}, 0);
            const Sample d = find_dgp("centered_exponential").generate(15, {{"rate", 1.0}}, rng);
            up += one_sided_critical_value(Statistic::mean(), IidPlan{}, d, 1999, 0.05,
                                           SeedPolicy{8, static_cast<std::uint64_t>(r)}, Sidedness::upper)
                      .z_star /
                  R;
            lo += one_sided_critical_value(Statistic::mean(), IidPlan{}, d, 1999, 0.05,
                                           SeedPolicy{9, static_cast<std::uint64_t>(r)}, Sidedness::lower)
                      .z_star /
                  R;
        }
        CHECK(lo < -1.645);
        CHECK(-lo > up);
        CHECK(up < 1.645);
    }
}

TEST_CASE("bootstrap_t_test") {
    SUBCASE("t = 0 is never rejected") {
        const Sample data = values({-2.0, -1.5, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 1.5, 2.0});
        for (double alpha : {0.05, 0.5, 0.9}) {
            const auto res = bootstrap_t_test(Statistic::mean(), IidPlan{}, data, 0.0,
                                              TestOptions{999, alpha, SeedPolicy{1, 0}, Sidedness::symmetric, 1});
            CHECK(res.t == 0.0);
            CHECK_FALSE(res.reject);
        }
    }
    SUBCASE("t beyond every replicate") {
        const Sample data = normal_sample(40, SeedPolicy{2, 0});
        const auto res = bootstrap_t_test(Statistic::mean(), IidPlan{}, data, 50.0,
                                          TestOptions{999, 0.05, SeedPolicy{3, 0}, Sidedness::symmetric, 1});
        CHECK(res.reject);
        CHECK(res.p_star == 0.0);
    }
    SUBCASE("decide with explicit replicates") {
        const std::vector<double> t{-2.0, -1.0, 1.0, 2.0};
        const auto d = decide(1.5, t, 0.25, Sidedness::upper);
        CHECK(d.reject);
        CHECK(d.p_star == 0.25);
        CHECK_FALSE(decide(1.5, t, 0.25, Sidedness::symmetric).reject);
        CHECK(decide(1.5, t, 0.25, Sidedness::symmetric).p_star == 0.5);
        CHECK(decide(-1.5, t, 0.25, Sidedness::lower).reject);
    }
    SUBCASE("normal decision") {
        CHECK(normal_decision(1.97, 0.05, Sidedness::symmetric).reject);
        CHECK_FALSE(normal_decision(1.95, 0.05, Sidedness::symmetric).reject);
        CHECK(normal_decision(1.7, 0.05, Sidedness::upper).reject);
        CHECK(normal_decision(-1.7, 0.05, Sidedness::lower).reject);
    }
}

TEST_CASE("ERP and ECP under Gaussian data, n = 15, 10000 replications") {
    const std::size_t R = 10000;
    struct Rep {
        bool reject;
        bool covered;
    };
    const auto reps = parallel_map<Rep>(R, 1, [](std::size_t r) {
        const Sample data = normal_sample(15, SeedPolicy{500, r});
        const TestOptions opt{999, 0.05, SeedPolicy{501, r}, Sidedness::symmetric, 1};
        const auto test = bootstrap_t_test(Statistic::mean(), IidPlan{}, data, 0.0, opt);
        const auto ci = bootstrap_t_ci(Statistic::mean(), IidPlan{}, data, opt);
        return Rep{test.reject, ci.lower <= 0.0 && 0.0 <= ci.upper};
    });
    std::size_t rejections = 0;
    std::size_t covered = 0;
    for (const auto& r : reps) {
        rejections += r.reject ? 1 : 0;
        covered += r.covered ? 1 : 0;
        // Duality: same data, same seed.
        CHECK(r.reject != r.covered);
    }
    CHECK(std::abs(static_cast<double>(rejections) / R - 0.05) <= 0.01);
    CHECK(std::abs(static_cast<double>(covered) / R - 0.95) <= 0.01);
}

TEST_CASE("t_interval") {
    const auto ci = t_interval(0.0, 1.0, 100, CriticalValue{0.05, 2.0, Sidedness::symmetric});
    CHECK(ci.lower == doctest::Approx(-0.2));
    CHECK(ci.upper == doctest::Approx(0.2));
    CHECK(ci.level == doctest::Approx(0.95));
    const auto point = t_interval(1.5, 3.0, 10, CriticalValue{0.05, 0.0, Sidedness::symmetric});
    CHECK(point.lower == 1.5);
    CHECK(point.upper == 1.5);
    const auto upper = t_interval(1.0, 1.0, 100, CriticalValue{0.05, 1.5, Sidedness::upper});
    CHECK(upper.lower == doctest::Approx(0.85));
    CHECK(std::isinf(upper.upper));
    const auto lower = t_interval(1.0, 1.0, 100, CriticalValue{0.05, -1.5, Sidedness::lower});
    CHECK(lower.upper == doctest::Approx(1.15));
}

TEST_CASE("test/interval duality at a fixed seed") {
    const Sample data = normal_sample(25, SeedPolicy{60, 0});
    const TestOptions opt{999, 0.1, SeedPolicy{61, 0}, Sidedness::symmetric, 1};
    const auto ci = bootstrap_t_ci(Statistic::mean(), IidPlan{}, data, opt);
    for (double mu0 = -1.0; mu0 <= 1.0; mu0 += 0.05) {
        const bool outside = mu0 < ci.lower || mu0 > ci.upper;
        CHECK(bootstrap_t_test(Statistic::mean(), IidPlan{}, data, mu0, opt).reject == outside);
    }
}

TEST_CASE("studentizer guard") {
    // Two distinct values, one rare: some resamples are constant.
    std::vector<double> x(6, 0.0);
    x[0] = 1.0;
    BootstrapOptions opt;
    opt.B = 2000;
    opt.form = ReplicateForm::studentized;
    opt.mode = EnumerationMode::monte_carlo;
    opt.seed = SeedPolicy{9, 0};
    // P(resample constant) = (5/6)^6 ~ 0.33 > 1%.
    CHECK_THROWS_AS((void)run_bootstrap(Statistic::mean(), IidPlan{}, values(x), opt), EvaluationError);
    std::vector<double> y(40);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = i < 20 ? 0.0 : 1.0;
    }
    const auto run = run_bootstrap(Statistic::mean(), IidPlan{}, values(y), opt);
    CHECK(run.discarded == 0);
}

TEST_CASE("inference report schema") {
    const BootstrapDistribution d({-1.0, 0.0, 1.0, 2.0}, 0.5);
    const auto j = inference_report("mean", d, CriticalValue{0.05, 2.0, Sidedness::symmetric},
                                    ConfidenceInterval{-1.0, 1.0, 0.95}, 0.2, SeedPolicy{5, 6});
    for (const char* key : {"statistic", "B", "quantiles", "critical_values", "ci", "p_star", "seed"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["B"] == 4);
    CHECK(j["seed"]["master_seed"] == 5);
    std::ostringstream csv;
    write_replicates_csv(csv, d);
    CHECK(csv.str().rfind("replicate", 0) == 0);
}
