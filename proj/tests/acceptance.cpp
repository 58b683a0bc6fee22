// Runs every acceptance experiment at its default configuration and prints one
// PASS/FAIL line per criterion. Criterion 13 re-runs all of them with
// --alt-threads workers and compares the emitted bytes.

#include "bootlab/experiments.hpp"
#include "bootlab/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace bootlab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string experiment;
    double limit_seconds;
    std::function<Outcome(const MCReport&)> check;
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

Outcome enumeration(const MCReport& r) {
    const double sup = r.at("cdf").value("sup_distance_mc_vs_exact");
    const double bias = r.at("bias_square").value("monte_carlo");
    const bool ok = sup <= 0.01 && std::abs(bias - 2.0 / 9.0) <= 0.01;
    return {ok, "sup distance " + fmt(sup) + " (<= 0.01), bias " + fmt(bias) + " vs 2/9 (+-0.01)"};
}

Outcome uniform_max(const MCReport& r) {
    const double atom = r.at("atom_at_zero").value("p_star_zero");
    const double exact = 1.0 - std::pow(1.0 - 1.0 / 1000.0, 1000.0);
    const double ks = r.at("limit_law").value("ks_to_limit");
    const bool ok = std::abs(atom - exact) <= 0.03 && ks > 0.2;
    return {ok, "P*(T*=0) " + fmt(atom) + " vs " + fmt(exact) + " (+-0.03), KS to exp limit " + fmt(ks) + " (> 0.2)"};
}

Outcome boundary(const MCReport& r) {
    const auto& ks = r.at("ks_to_censored_normal");
    const double full = ks.value("full_n");
    const double sub = ks.value("m_out_of_n");
    return {sub < full, "mean KS m-out-of-n " + fmt(sub) + " < full-n " + fmt(full)};
}

Outcome mammen(const MCReport& r) {
    const auto& id = r.at("identities");
    const bool exact = id.value("mean_error") == 0.0 && std::abs(id.value("second_moment_error")) <= 1e-15 &&
                       std::abs(id.value("third_moment_error")) <= 1e-15;
    const auto& s = r.at("sample_moments");
    double worst = 0.0;
    for (const char* z : {"moment1_z", "moment2_z", "moment3_z"}) {
        worst = std::max(worst, std::abs(s.value(z)));
    }
    return {exact && worst <= 3.0,
            std::string("identities ") + (exact ? "exact" : "violated") + ", max |z| " + fmt(worst) + " (<= 3)"};
}

Outcome erp_mean(const MCReport& r) {
    const auto& cell = r.at("centered_exponential/n=15");
    const auto& boot = cell.at("bootstrap_erp");
    const auto& asym = cell.at("asymptotic_erp");
    const auto& oracle = r.at("gaussian/n=15").at("exact_t_rate");
    const bool has_se = boot.se && asym.se && oracle.se;
    const bool ok = has_se && std::abs(boot.value) <= std::abs(asym.value) &&
                    std::abs(oracle.value - 0.05) <= 3.0 * *oracle.se;
    return {ok, "|ERP| bootstrap " + fmt(boot.value) + " (se " + fmt(boot.se.value_or(NAN), 2) + ") <= asymptotic " +
                    fmt(asym.value) + " (se " + fmt(asym.se.value_or(NAN), 2) + "); Gaussian oracle t rate " +
                    fmt(oracle.value) + " within 3 se of 0.05"};
}

Outcome bias(const MCReport& r) {
    const auto& cell = r.at("gaussian/n=20");
    const double raw = cell.value("raw_bias");
    const double corrected = cell.value("corrected_bias");
    const bool ok = std::abs(raw - 0.05) <= 0.01 && std::abs(corrected) < 0.01;
    return {ok, "raw bias " + fmt(raw) + " (0.05 +- 0.01), corrected " + fmt(corrected) + " (|.| < 0.01)"};
}

Outcome wild(const MCReport& r) {
    const auto& cell = r.at("heteroskedastic_linear/n=25");
    const double boot = cell.value("bootstrap_erp");
    const double asym = cell.value("asymptotic_erp");
    return {std::abs(boot) <= std::abs(asym), "|ERP| wild " + fmt(boot) + " <= HCCME asymptotic " + fmt(asym)};
}

Outcome hh_band(const MCReport& r) {
    std::size_t points = 0;
    std::size_t covered = 0;
    for (const auto& cell : r.cells) {
        if (cell.id.rfind("x=", 0) == 0) {
            ++points;
            covered += cell.value("coverage") >= 0.93 ? 1 : 0;
        }
    }
    const double z_min = r.at("summary").value("z_multiplier_min");
    const double frac = points ? static_cast<double>(covered) / static_cast<double>(points) : 0.0;
    const bool ok = points == 50 && frac >= 0.9 && z_min >= 1.96;
    return {ok, "coverage >= 0.93 at " + std::to_string(covered) + "/" + std::to_string(points) +
                    " grid points (>= 90%), smallest z multiplier " + fmt(z_min) + " (>= 1.96)"};
}

Outcome alasso(const MCReport& r) {
    const double rec = r.at("support").value("recovery_rate");
    const double rate = r.at("test").value("bootstrap_rate");
    const bool ok = rec >= 0.95 && std::abs(rate - 0.05) <= 0.03;
    return {ok, "support recovery " + fmt(rec) + " (>= 0.95), bootstrap-t rejection " + fmt(rate) + " (0.05 +- 0.03)"};
}

Outcome time_series(const MCReport& r) {
    const auto& cell = r.at("long_run_variance");
    const double sieve = cell.value("sieve");
    const double block = cell.value("block");
    const bool ok = std::abs(sieve / 4.0 - 1.0) <= 0.2 && std::abs(block / 4.0 - 1.0) <= 0.2 &&
                    cell.value("block_length") == 8.0;
    return {ok, "sieve " + fmt(sieve) + ", block (l=" + fmt(cell.value("block_length")) + ") " + fmt(block) +
                    " vs 4 (+-20%)"};
}

Outcome multiplier_lr(const MCReport& r) {
    const double rate = r.at("gaussian/n=100").value("bootstrap_rate");
    const double err = r.at("fixed_data").value("abs_error");
    const bool ok = std::abs(rate - 0.05) <= 0.02 && err <= 1e-8;
    return {ok, "rejection " + fmt(rate) + " (0.05 +- 0.02), |LR - n(xbar - theta0)^2| " + fmt(err, 2) + " (<= 1e-8)"};
}

Outcome cck(const MCReport& r) {
    const double cov = r.at("gaussian/n=100/p=200").value("coverage");
    return {std::abs(cov - 0.95) <= 0.03, "P(Z <= z*) " + fmt(cov) + " (0.95 +- 0.03)"};
}

unsigned parse_threads(int argc, char** argv, const char* flag, unsigned fallback) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::strcmp(argv[i], flag) == 0) {
            return static_cast<unsigned>(std::strtoul(argv[i + 1], nullptr, 10));
        }
    }
    return fallback;
}

}  // namespace

int main(int argc, char** argv) {
    const unsigned threads = std::max(1u, parse_threads(argc, argv, "--threads", 1));
    const unsigned alt = std::max(1u, parse_threads(argc, argv, "--alt-threads", 3));
    const std::vector<Criterion> criteria{
        {1, "enumeration", 10, enumeration},  {2, "uniform-max", 60, uniform_max},
        {3, "boundary", 300, boundary},       {4, "mammen", 10, mammen},
        {5, "erp-mean", 1800, erp_mean},      {6, "bias", 600, bias},
        {7, "wild", 1800, wild},              {8, "hh-band", 3600, hh_band},
        {9, "alasso", 1800, alasso},          {10, "time-series", 1200, time_series},
        {11, "multiplier-lr", 1200, multiplier_lr}, {12, "cck", 1200, cck},
    };

    int failures = 0;
    std::vector<std::string> emitted;
    for (const auto& c : criteria) {
        Outcome out;
        double seconds = 0.0;
        try {
            const auto start = std::chrono::steady_clock::now();
            const auto report = run_experiment(resolve_config(c.experiment, nlohmann::json::object(), threads));
            seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            out = c.check(report);
            emitted.push_back(emit_report(report, ReportFormat::json) + emit_report(report, ReportFormat::csv));
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
            emitted.emplace_back();
        }
        const bool in_time = seconds < c.limit_seconds;
        const bool pass = out.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("criterion %2d %s [%s] %s; %.1f s (< %.0f s)\n", c.id, pass ? "PASS" : "FAIL",
                    c.experiment.c_str(), out.detail.c_str(), seconds, c.limit_seconds);
        std::fflush(stdout);
    }

    std::vector<std::string> differing;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            const auto report =
                run_experiment(resolve_config(criteria[i].experiment, nlohmann::json::object(), alt));
            if (emitted[i].empty() ||
                emit_report(report, ReportFormat::json) + emit_report(report, ReportFormat::csv) != emitted[i]) {
                differing.push_back(criteria[i].experiment);
            }
        } catch (const std::exception&) {
            differing.push_back(criteria[i].experiment);
        }
    }
    std::string detail = "JSON and CSV reports at --threads " + std::to_string(threads) + " and " +
                         std::to_string(alt) + " byte-identical for " +
                         std::to_string(criteria.size() - differing.size()) + "/" + std::to_string(criteria.size()) +
                         " experiments";
    for (const auto& name : differing) {
        detail += (name == differing.front() ? "; differ: " : ", ") + name;
    }
    failures += differing.empty() ? 0 : 1;
    std::printf("criterion 13 %s [determinism] %s\n", differing.empty() ? "PASS" : "FAIL", detail.c_str());
    return failures == 0 ? 0 : 1;
}
