#include "bootlab/dgp.hpp"

#include "bootlab/config.hpp"
#include "bootlab/error.hpp"

#include <cmath>
#include <map>

namespace bootlab {

namespace {

double p(const nlohmann::json& params, const char* key) { return params.at(key).get<double>(); }

Sample column(std::vector<double> v) { return Sample::from_values(v, "x"); }

std::vector<double> beta_vector(const nlohmann::json& params) {
    return params.at("beta").get<std::vector<double>>();
}

std::vector<Dgp> build_registry() {
    std::vector<Dgp> r;
    r.push_back({"gaussian", "x ~ N(mu, sigma^2)", {{"mu", 0.0}, {"sigma", 1.0}},
                 [](std::size_t n, const nlohmann::json& q, CounterRng& rng) {
                     std::vector<double> v(n);
                     for (auto& x : v) {
                         x = p(q, "mu") + p(q, "sigma") * rng.normal();
                     }
                     return column(std::move(v));
                 },
                 [](const nlohmann::json& q) { return p(q, "mu"); }});
    r.push_back({"centered_exponential", "x = E - 1/rate, E ~ Exp(rate)", {{"rate", 1.0}},
                 [](std::size_t n, const nlohmann::json& q, CounterRng& rng) {
                     std::vector<double> v(n);
                     const double rate = p(q, "rate");
                     for (auto& x : v) {
                         x = (rng.exponential() - 1.0) / rate;
                     }
                     return column(std::move(v));
                 },
                 [](const nlohmann::json&) { return 0.0; }});
    r.push_back({"t3", "x = mu + Student t with 3 degrees of freedom", {{"mu", 0.0}},
                 [](std::size_t n, const nlohmann::json& q, CounterRng& rng) {
                     std::vector<double> v(n);
                     for (auto& x : v) {
                         x = p(q, "mu") + rng.student_t(3);
                     }
                     return column(std::move(v));
                 },
                 [](const nlohmann::json& q) { return p(q, "mu"); }});
    r.push_back({"uniform", "x ~ U[0, theta]", {{"theta", 1.0}},
                 [](std::size_t n, const nlohmann::json& q, CounterRng& rng) {
                     std::vector<double> v(n);
                     for (auto& x : v) {
                         x = p(q, "theta") * rng.uniform();
                     }
                     return column(std::move(v));
                 },
                 [](const nlohmann::json& q) { return p(q, "theta"); }});
    r.push_back({"heteroskedastic_linear", "y = b0 + b1 x + |x| e; x, e ~ N(0,1)", {{"beta0", 1.0}, {"beta1", 1.0}},
                 [](std::size_t n, const nlohmann::json& q, CounterRng& rng) {
                     std::vector<std::vector<double>> rows(n);
                     for (auto& row : rows) {
                         const double x = rng.normal();
                         const double e = rng.normal();
                         row = {p(q, "beta0") + p(q, "beta1") * x + std::abs(x) * e, x};
                     }
                     return Sample::from_rows(rows, {"y", "x"});
                 },
                 [](const nlohmann::json& q) { return p(q, "beta1"); }});
    r.push_back({"symmetric_linear", "y = b0 + b1 x + e; x ~ N(0,1), e ~ scale * t3", 
                 {{"beta0", 1.0}, {"beta1", 1.0}, {"scale", 1.0}},
                 [](std::size_t n, const nlohmann::json& q, CounterRng& rng) {
                     std::vector<std::vector<double>> rows(n);
                     for (auto& row : rows) {
                         const double x = rng.normal();
                         row = {p(q, "beta0") + p(q, "beta1") * x + p(q, "scale") * rng.student_t(3), x};
                     }
                     return Sample::from_rows(rows, {"y", "x"});
                 },
                 [](const nlohmann::json& q) { return p(q, "beta1"); }});
    r.push_back({"ar1", "x_t = phi x_{t-1} + sigma u_t, stationary start", {{"phi", 0.5}, {"sigma", 1.0}},
                 [](std::size_t n, const nlohmann::json& q, CounterRng& rng) {
                     return column(simulate_ar1(n, p(q, "phi"), p(q, "sigma"), rng));
                 },
                 [](const nlohmann::json&) { return 0.0; }});
    r.push_back({"logistic_latent_binary",
                 "y = 1{x1 + beta x2 + u > 0}, u logistic; x1 ~ N(0, 4), x2 ~ N(0,1)",
                 {{"beta", 1.0}},
                 [](std::size_t n, const nlohmann::json& q, CounterRng& rng) {
                     std::vector<std::vector<double>> rows(n);
                     for (auto& row : rows) {
                         const double x1 = 2.0 * rng.normal();
                         const double x2 = rng.normal();
                         const double u = rng.uniform_open();
                         const double latent = x1 + p(q, "beta") * x2 + std::log(u / (1.0 - u));
                         row = {latent > 0.0 ? 1.0 : 0.0, x1, x2};
                     }
                     return Sample::from_rows(rows, {"y", "x1", "x2"});
                 },
                 [](const nlohmann::json& q) { return p(q, "beta"); }});
    r.push_back({"sparse_linear", "y = X beta + sigma e; X, e ~ N(0,1), no intercept",
                 {{"beta", {1.5, -1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}}, {"sigma", 1.0}},
                 [](std::size_t n, const nlohmann::json& q, CounterRng& rng) {
                     const auto beta = beta_vector(q);
                     std::vector<std::vector<double>> rows(n, std::vector<double>(beta.size() + 1));
                     for (auto& row : rows) {
                         double mean = 0.0;
                         for (std::size_t j = 0; j < beta.size(); ++j) {
                             row[j + 1] = rng.normal();
                             mean += beta[j] * row[j + 1];
                         }
                         row[0] = mean + p(q, "sigma") * rng.normal();
                     }
                     std::vector<std::string> names{"y"};
                     for (std::size_t j = 0; j < beta.size(); ++j) {
                         names.push_back("x" + std::to_string(j + 1));
                     }
                     return Sample::from_rows(rows, names);
                 },
                 [](const nlohmann::json& q) { return beta_vector(q).at(0); }});
    r.push_back({"sine_regression", "y = sin(2 pi x) + sigma e; x ~ U(0,1)", {{"sigma", 0.3}},
                 [](std::size_t n, const nlohmann::json& q, CounterRng& rng) {
                     std::vector<std::vector<double>> rows(n);
                     for (auto& row : rows) {
                         const double x = rng.uniform();
                         row = {std::sin(2.0 * M_PI * x) + p(q, "sigma") * rng.normal(), x};
                     }
                     return Sample::from_rows(rows, {"y", "x"});
                 },
                 [](const nlohmann::json&) { return 0.0; }});
    return r;
}

const std::vector<Dgp>& registry() {
    static const std::vector<Dgp> r = build_registry();
    return r;
}

}  // namespace

const Dgp& find_dgp(const std::string& name) {
    for (const auto& d : registry()) {
        if (d.name == name) {
            return d;
        }
    }
    std::string names;
    for (const auto& d : registry()) {
        names += (names.empty() ? "" : ", ") + d.name;
    }
    throw ConfigError("unknown dgp '" + name + "' (available: " + names + ")");
}

std::vector<std::string> dgp_names() {
    std::vector<std::string> out;
    for (const auto& d : registry()) {
        out.push_back(d.name);
    }
    return out;
}

nlohmann::json resolve_dgp_params(const std::string& name, const nlohmann::json& params) {
    return merge_settings(find_dgp(name).defaults, params, "dgp_params");
}

std::vector<double> simulate_ar1(std::size_t n, double phi, double sigma, CounterRng& rng) {
    if (!(std::abs(phi) < 1.0)) {
        throw InvalidInput("simulate_ar1: |phi| must be below 1");
    }
    std::vector<double> x(n);
    double prev = sigma / std::sqrt(1.0 - phi * phi) * rng.normal();
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = t == 0 ? prev : phi * prev + sigma * rng.normal();
        prev = x[t];
    }
    return x;
}

}  // namespace bootlab
