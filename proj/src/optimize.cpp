#include "bootlab/optimize.hpp"

#include "bootlab/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bootlab {

namespace {

struct Box {
    const std::optional<Eigen::VectorXd>& lower;
    const std::optional<Eigen::VectorXd>& upper;

    [[nodiscard]] Eigen::VectorXd project(Eigen::VectorXd x) const {
        if (lower) {
            x = x.cwiseMax(*lower);
        }
        if (upper) {
            x = x.cwiseMin(*upper);
        }
        return x;
    }

    // Gradient with components that push against an active bound removed.
    [[nodiscard]] Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, Eigen::VectorXd g) const {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (lower && x[i] <= (*lower)[i] && g[i] > 0.0) {
                g[i] = 0.0;
            }
            if (upper && x[i] >= (*upper)[i] && g[i] < 0.0) {
                g[i] = 0.0;
            }
        }
        return g;
    }
};

}  // namespace

Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

OptimizationResult bfgs(const Objective& objective, const Eigen::VectorXd& start, const OptimizerSettings& settings) {
    const Box box{settings.lower, settings.upper};
    auto grad = [&](const Eigen::VectorXd& x) {
        return objective.gradient ? objective.gradient(x) : numeric_gradient(objective.value, x);
    };
    const Eigen::Index d = start.size();

    OptimizationResult result;
    Eigen::VectorXd x = box.project(start);
    double fx = objective.value(x);
    Eigen::VectorXd g = grad(x);
    Eigen::VectorXd pg = box.projected_gradient(x, g);
    const double g0 = pg.norm();
    const double threshold = std::max(settings.gradient_tolerance * g0, settings.gradient_floor);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d);
    bool scaled = false;

    if (!std::isfinite(fx)) {
        result.trace.push_back("objective not finite at start");
    }
    int it = 0;
    for (; it < settings.max_iterations && std::isfinite(fx); ++it) {
        if (pg.norm() <= threshold) {
            result.converged = true;
            break;
        }
        Eigen::VectorXd dir = -(H * pg);
        if (dir.dot(pg) >= 0.0) {
            H.setIdentity();
            dir = -pg;
        }
        if (!scaled) {
            dir /= std::max(1.0, pg.norm());
        }
        // Backtracking line search with the Armijo condition.
        double step = 1.0;
        Eigen::VectorXd x_new;
        double f_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        Eigen::VectorXd g_roundoff;
        const double roundoff = 1e-12 * (1.0 + std::abs(fx));
        for (int ls = 0; ls < 60; ++ls) {
            x_new = box.project(x + step * dir);
            f_new = objective.value(x_new);
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * g.dot(x_new - x)) {
                accepted = true;
                break;
            }
            // Near the optimum the decrease falls below roundoff; accept a step
            // that keeps f within roundoff and shrinks the gradient.
            if (std::isfinite(f_new) && f_new <= fx + roundoff) {
                g_roundoff = grad(x_new);
                if (box.projected_gradient(x_new, g_roundoff).norm() < 0.9 * pg.norm()) {
                    accepted = true;
                    break;
                }
                g_roundoff.resize(0);
            }
            step *= 0.5;
        }
        if (!accepted || (x_new - x).norm() == 0.0) {
            result.trace.push_back("line search stalled at iteration " + std::to_string(it));
            break;
        }
        const Eigen::VectorXd g_new = g_roundoff.size() == d ? g_roundoff : grad(x_new);
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (!scaled) {
                H *= sy / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
        }
        x = x_new;
        fx = f_new;
        g = g_new;
        pg = box.projected_gradient(x, g);
    }
    if (!result.converged && std::isfinite(fx) && pg.norm() <= threshold) {
        result.converged = true;
    }
    result.x = x;
    result.value = fx;
    result.gradient_norm = pg.norm();
    result.iterations = it;
    for (Eigen::Index i = 0; i < d; ++i) {
        if ((settings.lower && x[i] <= (*settings.lower)[i]) || (settings.upper && x[i] >= (*settings.upper)[i])) {
            result.at_bound.push_back(i);
        }
    }
    std::ostringstream os;
    os << "iterations=" << it << " value=" << fx << " |grad|=" << result.gradient_norm << " threshold=" << threshold
       << (result.converged ? " converged" : " not converged");
    result.trace.push_back(os.str());
    return result;
}

OptimizationResult minimize(const Objective& objective, const Eigen::VectorXd& start,
                            const OptimizerSettings& settings) {
    const int restarts = std::max(1, settings.restarts);
    std::optional<OptimizationResult> best;
    std::vector<std::string> all_traces;
    const double scale = std::max(1.0, start.cwiseAbs().maxCoeff());
    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXd x0 = start;
        if (r > 0) {
            CounterRng rng(settings.seed, static_cast<std::uint64_t>(r));
            for (Eigen::Index i = 0; i < x0.size(); ++i) {
                x0[i] += settings.perturbation * scale * rng.normal();
            }
        }
        auto run = bfgs(objective, x0, settings);
        run.restart = static_cast<std::size_t>(r);
        for (const auto& line : run.trace) {
            all_traces.push_back("restart " + std::to_string(r) + ": " + line);
        }
        if (run.converged && (!best || run.value < best->value)) {
            best = std::move(run);
        }
    }
    if (!best) {
        std::ostringstream os;
        os << "optimizer did not converge in any of " << restarts << " restarts";
        for (const auto& line : all_traces) {
            os << "\n  " << line;
        }
        throw ConvergenceError(os.str());
    }
    best->trace = std::move(all_traces);
    return *best;
}

}  // namespace bootlab
