#include "bootlab/sparse.hpp"

#include "bootlab/error.hpp"
#include "bootlab/linear.hpp"
#include "bootlab/parallel.hpp"
#include "bootlab/regression_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bootlab {

GramDesign::GramDesign(Eigen::MatrixXd X) : X_(std::move(X)), G_(X_.transpose() * X_) {
    if (X_.cols() == 0 || X_.rows() == 0) {
        throw InvalidInput("GramDesign: empty design");
    }
}

namespace {

double soft_threshold(double z, double gamma) {
    if (z > gamma) {
        return z - gamma;
    }
    if (z < -gamma) {
        return z + gamma;
    }
    return 0.0;
}

double duality_gap(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& b,
                   const Eigen::VectorXd& penalty) {
    const Eigen::VectorXd r = Y - X * b;
    const Eigen::VectorXd score = 2.0 * (X.transpose() * r);
    double s = 1.0;
    double primal = r.squaredNorm();
    for (Eigen::Index j = 0; j < b.size(); ++j) {
        if (std::isfinite(penalty[j])) {
            primal += penalty[j] * std::abs(b[j]);
            if (std::abs(score[j]) > 0.0) {
                s = std::min(s, penalty[j] / std::abs(score[j]));
            }
        }
    }
    const Eigen::VectorXd theta = s * r;
    return primal - (2.0 * theta.dot(Y) - theta.squaredNorm());
}

}  // namespace

double kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& penalty) {
    const Eigen::VectorXd score = 2.0 * (X.transpose() * (Y - X * b));
    double worst = 0.0;
    for (Eigen::Index j = 0; j < b.size(); ++j) {
        if (!std::isfinite(penalty[j])) {
            continue;
        }
        const double v = b[j] == 0.0 ? std::max(0.0, std::abs(score[j]) - penalty[j])
                                     : std::abs(score[j] - penalty[j] * (b[j] > 0.0 ? 1.0 : -1.0));
        worst = std::max(worst, v);
    }
    return worst;
}

PenalizedFit weighted_lasso_fit(const GramDesign& design, const Eigen::VectorXd& Y, const Eigen::VectorXd& penalty,
                                const CoordinateDescentSettings& settings) {
    const Eigen::MatrixXd& X = design.X();
    const Eigen::MatrixXd& G = design.gram();
    const Eigen::Index p = X.cols();
    if (Y.size() != X.rows() || penalty.size() != p) {
        throw InvalidInput("lasso_fit: dimension mismatch");
    }
    const Eigen::VectorXd c = X.transpose() * Y;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd Gb = Eigen::VectorXd::Zero(p);
    std::vector<bool> free(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        free[static_cast<std::size_t>(j)] = std::isfinite(penalty[j]) && G(j, j) > 0.0;
    }
    const double scale = 1.0 + penalty.unaryExpr([](double v) { return std::isfinite(v) ? v : 0.0; }).maxCoeff();

    // One pass over the listed coordinates; returns the largest change in the
    // score scale G_jj * |delta b_j|.
    auto sweep = [&](bool active_only) {
        double biggest = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (!free[static_cast<std::size_t>(j)] || (active_only && b[j] == 0.0)) {
                continue;
            }
            const double gjj = G(j, j);
            const double z = c[j] - Gb[j] + gjj * b[j];
            const double next = soft_threshold(z, 0.5 * penalty[j]) / gjj;
            const double delta = next - b[j];
            if (delta != 0.0) {
                Gb += delta * G.col(j);
                b[j] = next;
                biggest = std::max(biggest, gjj * std::abs(delta));
            }
        }
        return biggest;
    };

    PenalizedFit fit;
    const double tol = settings.tolerance * scale;
    bool converged = false;
    while (fit.sweeps < settings.max_sweeps) {
        ++fit.sweeps;
        if (sweep(false) <= tol) {
            converged = true;
            break;
        }
        while (fit.sweeps < settings.max_sweeps) {
            ++fit.sweeps;
            if (sweep(true) <= tol) {
                break;
            }
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "lasso_fit: no convergence after " << fit.sweeps << " sweeps; duality gap "
            << duality_gap(X, Y, b, penalty);
        throw ConvergenceError(msg.str());
    }
    fit.coefficients = b;
    fit.penalty = penalty;
    fit.lambda = scale - 1.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (b[j] != 0.0) {
            fit.active_set.push_back(j);
        }
    }
    fit.residuals_centered = center(Y - X * b);
    fit.kkt_violation = kkt_violation(X, Y, b, penalty);
    return fit;
}

PenalizedFit lasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double lambda,
                       const CoordinateDescentSettings& settings) {
    if (!(lambda > 0.0)) {
        throw InvalidInput("lasso_fit: lambda must be positive");
    }
    auto fit = weighted_lasso_fit(GramDesign(X), Y, Eigen::VectorXd::Constant(X.cols(), lambda), settings);
    fit.lambda = lambda;
    fit.stage = PenaltyStage::lasso;
    return fit;
}

PenalizedFit alasso_fit(const GramDesign& design, const Eigen::VectorXd& Y, double lambda,
                        const Eigen::VectorXd& initial, const CoordinateDescentSettings& settings) {
    if (!(lambda > 0.0)) {
        throw InvalidInput("alasso_fit: lambda must be positive");
    }
    const Eigen::Index p = design.X().cols();
    if (initial.size() != p) {
        throw InvalidInput("alasso_fit: initial estimate has wrong length");
    }
    Eigen::VectorXd penalty(p);
    bool any = false;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (initial[j] == 0.0) {
            penalty[j] = std::numeric_limits<double>::infinity();
        } else {
            penalty[j] = lambda / std::abs(initial[j]);
            any = true;
        }
    }
    PenalizedFit fit;
    if (any) {
        fit = weighted_lasso_fit(design, Y, penalty, settings);
    } else {
        fit.coefficients = Eigen::VectorXd::Zero(p);
        fit.residuals_centered = center(Y);
        fit.penalty = penalty;
        fit.degenerate = true;
    }
    fit.lambda = lambda;
    fit.stage = PenaltyStage::alasso;
    fit.initial = initial;
    return fit;
}

PenalizedFit alasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double lambda,
                        const Eigen::VectorXd& initial, const CoordinateDescentSettings& settings) {
    return alasso_fit(GramDesign(X), Y, lambda, initial, settings);
}

Eigen::VectorXd alasso_initial(const GramDesign& design, const Eigen::VectorXd& Y, double lambda) {
    const Eigen::MatrixXd& X = design.X();
    if (X.cols() < X.rows()) {
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(design.gram());
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
            return ldlt.solve(X.transpose() * Y);
        }
    }
    return weighted_lasso_fit(design, Y, Eigen::VectorXd::Constant(X.cols(), lambda)).coefficients;
}

double default_lambda(std::size_t n, double noise_scale) { return std::sqrt(static_cast<double>(n)) * noise_scale; }

double alasso_standard_error(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                             const std::vector<Eigen::Index>& active, const Eigen::VectorXd& c) {
    const auto m = static_cast<Eigen::Index>(active.size());
    const Eigen::Index n = X.rows();
    if (m == 0 || m >= n) {
        return 0.0;
    }
    Eigen::MatrixXd XA(n, m);
    Eigen::VectorXd cA(m);
    for (Eigen::Index a = 0; a < m; ++a) {
        XA.col(a) = X.col(active[static_cast<std::size_t>(a)]);
        cA[a] = c[active[static_cast<std::size_t>(a)]];
    }
    if (cA.cwiseAbs().maxCoeff() == 0.0) {
        return 0.0;
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(XA.transpose() * XA);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        return 0.0;
    }
    const Eigen::VectorXd bA = ldlt.solve(XA.transpose() * Y);
    const double sigma2 = (Y - XA * bA).squaredNorm() / static_cast<double>(n - m);
    const double v = static_cast<double>(n) * sigma2 * cA.dot(ldlt.solve(cA));
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

AlassoTestResult alasso_residual_bootstrap_t(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double lambda,
                                             const Eigen::VectorXd& c, double null_value,
                                             const TestOptions& options) {
    if (c.size() != X.cols() || c.cwiseAbs().maxCoeff() == 0.0) {
        throw InvalidInput("alasso_residual_bootstrap_t: contrast must be a non-zero p-vector");
    }
    const GramDesign design(X);
    const Eigen::Index n = X.rows();
    const double root_n = std::sqrt(static_cast<double>(n));
    auto fit = alasso_fit(design, Y, lambda, alasso_initial(design, Y, lambda));
    if (fit.active_set.empty()) {
        throw EvaluationError("alasso_residual_bootstrap_t: empty active set");
    }
    const double s_n = alasso_standard_error(X, Y, fit.active_set, c);
    if (!(s_n > 0.0)) {
        throw EvaluationError("alasso_residual_bootstrap_t: contrast has no weight on the selected active set");
    }
    const double estimate = c.dot(fit.coefficients);
    const double t = root_n * (estimate - null_value) / s_n;
    const Eigen::VectorXd fitted = X * fit.coefficients;
    const Eigen::VectorXd& resid = fit.residuals_centered;

    constexpr double kDiscarded = std::numeric_limits<double>::quiet_NaN();
    auto t_star = parallel_map<double>(options.B, options.threads, [&](std::size_t r) {
        CounterRng rng(options.seed, r);
        Eigen::VectorXd y_star(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            y_star[i] = fitted[i] + resid[static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)))];
        }
        try {
            const auto star = alasso_fit(design, y_star, lambda, alasso_initial(design, y_star, lambda));
            const double s = alasso_standard_error(X, y_star, star.active_set, c);
            if (!(s > 0.0)) {
                return kDiscarded;
            }
            return root_n * (c.dot(star.coefficients) - estimate) / s;
        } catch (const ConvergenceError&) {
            return kDiscarded;
        }
    });
    const auto kept_end = std::remove_if(t_star.begin(), t_star.end(), [](double v) { return std::isnan(v); });
    const auto discarded = static_cast<std::size_t>(t_star.end() - kept_end);
    t_star.erase(kept_end, t_star.end());
    if (static_cast<double>(discarded) > kMaxDiscardFraction * static_cast<double>(options.B) || t_star.empty()) {
        throw EvaluationError("alasso_residual_bootstrap_t: " + std::to_string(discarded) +
                              " replicates had an empty active set on the contrast");
    }
    AlassoTestResult out{decide(t, t_star, options.alpha, options.sided), normal_decision(t, options.alpha, options.sided),
                         std::move(fit)};
    out.bootstrap.discarded = discarded;
    return out;
}

}  // namespace bootlab
