#include "bootlab/multiplier.hpp"

#include "bootlab/distribution.hpp"
#include "bootlab/error.hpp"
#include "bootlab/inference.hpp"
#include "bootlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bootlab {

double weighted_loglik(const LogLikTerms& terms, const Eigen::VectorXd& theta, const Eigen::VectorXd& weights) {
    double total = 0.0;
    const bool unit = weights.size() == 0;
    for (std::size_t i = 0; i < terms.n; ++i) {
        const double w = unit ? 1.0 : weights[static_cast<Eigen::Index>(i)];
        if (w != 0.0) {
            total += w * terms.log_density(i, theta);
        }
    }
    return total;
}

namespace {

Objective negative_loglik(const LogLikTerms& terms, const Eigen::VectorXd& weights) {
    const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(terms.n, 1));
    Objective obj;
    obj.value = [&terms, &weights, inv_n](const Eigen::VectorXd& theta) {
        const double v = -weighted_loglik(terms, theta, weights) * inv_n;
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };
    if (terms.score) {
        obj.gradient = [&terms, &weights, inv_n](const Eigen::VectorXd& theta) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(terms.dim));
            const bool unit = weights.size() == 0;
            for (std::size_t i = 0; i < terms.n; ++i) {
                const double w = unit ? 1.0 : weights[static_cast<Eigen::Index>(i)];
                if (w != 0.0) {
                    g -= w * terms.score(i, theta);
                }
            }
            return Eigen::VectorXd(g * inv_n);
        };
    }
    return obj;
}

}  // namespace

MleResult mle(const LogLikTerms& terms, const Eigen::VectorXd& start, const OptimizerSettings& settings,
              const Eigen::VectorXd& weights) {
    if (static_cast<std::size_t>(start.size()) != terms.dim) {
        throw InvalidInput("mle: start has the wrong dimension");
    }
    OptimizerSettings s = settings;
    if (terms.lower && !s.lower) {
        s.lower = terms.lower;
    }
    if (terms.upper && !s.upper) {
        s.upper = terms.upper;
    }
    const Objective obj = negative_loglik(terms, weights);
    MleResult out;
    out.optimization = minimize(obj, start, s);
    out.theta = out.optimization.x;
    out.loglik = weighted_loglik(terms, out.theta, weights);
    out.at_bound = !out.optimization.at_bound.empty();
    if (!out.at_bound) {
        // Curvature check by central differences of the gradient.
        const auto d = static_cast<Eigen::Index>(terms.dim);
        auto grad = [&](const Eigen::VectorXd& x) {
            return obj.gradient ? obj.gradient(x) : numeric_gradient(obj.value, x);
        };
        Eigen::MatrixXd H(d, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            const double step = 1e-4 * (1.0 + std::abs(out.theta[j]));
            Eigen::VectorXd up = out.theta;
            Eigen::VectorXd down = out.theta;
            up[j] += step;
            down[j] -= step;
            H.col(j) = (grad(up) - grad(down)) / (2.0 * step);
        }
        H = 0.5 * (H + H.transpose()).eval();
        const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues();
        out.non_unique = eig.minCoeff() <= 1e-8 * (1.0 + eig.cwiseAbs().maxCoeff());
    }
    return out;
}

LogLikTerms gaussian_mean_model(std::vector<double> x, double sigma) {
    if (x.empty() || !(sigma > 0.0)) {
        throw InvalidInput("gaussian_mean_model: need data and sigma > 0");
    }
    LogLikTerms t;
    t.n = x.size();
    t.dim = 1;
    const double inv_var = 1.0 / (sigma * sigma);
    const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma);
    auto data = std::make_shared<std::vector<double>>(std::move(x));
    t.log_density = [data, inv_var, log_norm](std::size_t i, const Eigen::VectorXd& th) {
        const double r = (*data)[i] - th[0];
        return log_norm - 0.5 * inv_var * r * r;
    };
    t.score = [data, inv_var](std::size_t i, const Eigen::VectorXd& th) {
        return Eigen::VectorXd::Constant(1, inv_var * ((*data)[i] - th[0])).eval();
    };
    return t;
}

LogLikTerms bernoulli_model(std::vector<double> y) {
    if (y.empty()) {
        throw InvalidInput("bernoulli_model: no data");
    }
    for (double v : y) {
        if (v != 0.0 && v != 1.0) {
            throw InvalidInput("bernoulli_model: observations must be 0 or 1");
        }
    }
    LogLikTerms t;
    t.n = y.size();
    t.dim = 1;
    auto data = std::make_shared<std::vector<double>>(std::move(y));
    t.log_density = [data](std::size_t i, const Eigen::VectorXd& th) {
        return (*data)[i] == 1.0 ? std::log(th[0]) : std::log1p(-th[0]);
    };
    t.score = [data](std::size_t i, const Eigen::VectorXd& th) {
        const double p = th[0];
        const double g = (*data)[i] == 1.0 ? 1.0 / p : -1.0 / (1.0 - p);
        return Eigen::VectorXd::Constant(1, std::isfinite(g) ? g : std::copysign(1e300, g)).eval();
    };
    t.lower = Eigen::VectorXd::Constant(1, 0.0);
    t.upper = Eigen::VectorXd::Constant(1, 1.0);
    return t;
}

LogLikTerms linear_gaussian_model(Eigen::MatrixXd X, Eigen::VectorXd y) {
    if (X.rows() != y.size() || X.rows() == 0) {
        throw InvalidInput("linear_gaussian_model: dimension mismatch");
    }
    LogLikTerms t;
    t.n = static_cast<std::size_t>(X.rows());
    const Eigen::Index k = X.cols();
    t.dim = static_cast<std::size_t>(k + 1);
    auto Xp = std::make_shared<Eigen::MatrixXd>(std::move(X));
    auto yp = std::make_shared<Eigen::VectorXd>(std::move(y));
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    t.log_density = [Xp, yp, k, half_log_2pi](std::size_t i, const Eigen::VectorXd& th) {
        const auto r = static_cast<Eigen::Index>(i);
        const double log_sigma = th[k];
        const double e = ((*yp)[r] - Xp->row(r).dot(th.head(k))) * std::exp(-log_sigma);
        return -half_log_2pi - log_sigma - 0.5 * e * e;
    };
    t.score = [Xp, yp, k](std::size_t i, const Eigen::VectorXd& th) {
        const auto r = static_cast<Eigen::Index>(i);
        const double inv_sigma = std::exp(-th[k]);
        const double e = ((*yp)[r] - Xp->row(r).dot(th.head(k))) * inv_sigma;
        Eigen::VectorXd g(k + 1);
        g.head(k) = e * inv_sigma * Xp->row(r).transpose();
        g[k] = e * e - 1.0;
        return g;
    };
    return t;
}

double draw_multiplier(MultiplierLaw law, CounterRng& rng) {
    switch (law) {
        case MultiplierLaw::gaussian:
            return 1.0 + rng.normal();
        case MultiplierLaw::poisson:
            return static_cast<double>(rng.poisson_unit());
        case MultiplierLaw::unit:
            return 1.0;
    }
    return 1.0;
}

std::string to_string(MultiplierLaw law) {
    switch (law) {
        case MultiplierLaw::gaussian:
            return "gaussian";
        case MultiplierLaw::poisson:
            return "poisson";
        case MultiplierLaw::unit:
            return "unit";
    }
    return "unknown";
}

MultiplierLaw multiplier_law_from_string(const std::string& name) {
    for (auto law : {MultiplierLaw::gaussian, MultiplierLaw::poisson, MultiplierLaw::unit}) {
        if (to_string(law) == name) {
            return law;
        }
    }
    throw ConfigError("unknown multiplier law '" + name + "' (gaussian, poisson, unit)");
}

MultiplierLrResult multiplier_lr_test(const LogLikTerms& terms, const Eigen::VectorXd& theta0,
                                      const Eigen::VectorXd& start, const MultiplierLrOptions& options) {
    if (static_cast<std::size_t>(theta0.size()) != terms.dim) {
        throw InvalidInput("multiplier_lr_test: theta0 has the wrong dimension");
    }
    if (!(options.alpha > 0.0 && options.alpha < 1.0) || options.B == 0) {
        throw InvalidInput("multiplier_lr_test: need B > 0 and alpha in (0, 1)");
    }
    const auto fit = mle(terms, start, options.optimizer);
    MultiplierLrResult out;
    out.theta_hat = fit.theta;
    out.LR = std::max(0.0, 2.0 * (fit.loglik - weighted_loglik(terms, theta0)));
    out.B = options.B;

    OptimizerSettings refit = options.optimizer;
    refit.restarts = options.replicate_restarts;
    const Eigen::VectorXd& anchor = options.centering == LrCentering::estimate ? fit.theta : theta0;
    const auto n = static_cast<Eigen::Index>(terms.n);
    constexpr double kDiscarded = std::numeric_limits<double>::quiet_NaN();
    auto lr_star = parallel_map<double>(options.B, options.threads, [&](std::size_t r) {
        CounterRng rng(options.seed, r);
        Eigen::VectorXd U(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            U[i] = draw_multiplier(options.law, rng);
        }
        try {
            const auto star = mle(terms, fit.theta, refit, U);
            return 2.0 * (star.loglik - weighted_loglik(terms, anchor, U));
        } catch (const ConvergenceError&) {
            return kDiscarded;
        }
    });
    const auto kept_end = std::remove_if(lr_star.begin(), lr_star.end(), [](double v) { return std::isnan(v); });
    out.discarded = static_cast<std::size_t>(lr_star.end() - kept_end);
    lr_star.erase(kept_end, lr_star.end());
    if (static_cast<double>(out.discarded) > kMaxDiscardFraction * static_cast<double>(options.B) ||
        lr_star.empty()) {
        throw EvaluationError("multiplier_lr_test: " + std::to_string(out.discarded) +
                              " replicate maximizations failed");
    }
    out.z_star = std::max(0.0, rank_quantile(lr_star, 1.0 - options.alpha));
    out.reject = out.LR > out.z_star;
    const auto extreme = std::count_if(lr_star.begin(), lr_star.end(), [&](double v) { return v >= out.LR; });
    out.p_star = static_cast<double>(extreme) / static_cast<double>(lr_star.size());
    out.lr_star = std::move(lr_star);
    return out;
}

SzBound sz_bound(std::size_t d, std::size_t n, double nu, double C, double alpha) {
    if (d == 0 || n == 0 || !(nu > 0.0) || !(C > 0.0)) {
        throw InvalidInput("sz_bound: need d >= 1, n >= 1, nu > 0, C > 0");
    }
    SzBound out;
    out.value = C * std::pow((static_cast<double>(d) + nu) / static_cast<double>(n), 0.125);
    out.admissible = alpha <= 1.0 - 8.0 * std::exp(-nu);
    return out;
}

double cck_statistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& e) {
    if (e.size() != X.rows()) {
        throw InvalidInput("cck_statistic: multiplier vector has the wrong length");
    }
    return (X.transpose() * e).maxCoeff() / std::sqrt(static_cast<double>(X.rows()));
}

CckResult cck_max_bootstrap(const Eigen::MatrixXd& X, std::size_t B, double alpha, SeedPolicy seed,
                            unsigned threads) {
    const Eigen::Index n = X.rows();
    if (n < 2 || X.cols() < 1) {
        throw InvalidInput("cck_max_bootstrap: need n >= 2 and p >= 1");
    }
    if (B == 0 || !(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("cck_max_bootstrap: need B > 0 and alpha in (0, 1)");
    }
    const double inv_root_n = 1.0 / std::sqrt(static_cast<double>(n));
    CckResult out;
    out.Z = X.colwise().sum().maxCoeff() * inv_root_n;
    Eigen::MatrixXd E(static_cast<Eigen::Index>(B), n);
    parallel_for(B, threads, [&](std::size_t b) {
        CounterRng rng(seed, b);
        for (Eigen::Index i = 0; i < n; ++i) {
            E(static_cast<Eigen::Index>(b), i) = rng.normal();
        }
    });
    const Eigen::MatrixXd S = E * X;
    out.replicates.resize(B);
    for (std::size_t b = 0; b < B; ++b) {
        out.replicates[b] = S.row(static_cast<Eigen::Index>(b)).maxCoeff() * inv_root_n;
    }
    out.z_star = rank_quantile(out.replicates, 1.0 - alpha);
    out.covered = out.Z <= out.z_star;
    return out;
}

}  // namespace bootlab
