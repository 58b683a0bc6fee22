#include "bootlab/smoothed.hpp"

#include "bootlab/error.hpp"
#include "bootlab/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace bootlab {

SmoothKernel::SmoothKernel(double bandwidth, Family family) : h_(bandwidth), family_(family) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw InvalidInput("SmoothKernel: bandwidth must be positive and finite");
    }
}

SmoothKernel SmoothKernel::with_order(double bandwidth, int order) {
    if (order <= 2) {
        return SmoothKernel(bandwidth, Family::integrated_biweight);
    }
    if (order == 3) {
        return SmoothKernel(bandwidth, Family::integrated_triweight);
    }
    throw InvalidInput("SmoothKernel: smoothness orders 2 and 3 are available");
}

double SmoothKernel::H(double v) const noexcept {
    if (v <= -1.0) {
        return 0.0;
    }
    if (v >= 1.0) {
        return 1.0;
    }
    const double v2 = v * v;
    if (family_ == Family::integrated_biweight) {
        return 0.5 + (15.0 / 16.0) * v * (1.0 - v2 * (2.0 / 3.0) + v2 * v2 / 5.0);
    }
    return 0.5 + (35.0 / 32.0) * v * (1.0 - v2 + v2 * v2 * (3.0 / 5.0) - v2 * v2 * v2 / 7.0);
}

double SmoothKernel::dH(double v) const noexcept {
    if (v <= -1.0 || v >= 1.0) {
        return 0.0;
    }
    const double w = 1.0 - v * v;
    if (family_ == Family::integrated_biweight) {
        return (15.0 / 16.0) * w * w;
    }
    return (35.0 / 32.0) * w * w * w;
}

double SmoothKernel::d2H(double v) const noexcept {
    if (v <= -1.0 || v >= 1.0) {
        return 0.0;
    }
    const double w = 1.0 - v * v;
    if (family_ == Family::integrated_biweight) {
        return (15.0 / 16.0) * (-4.0 * v) * w;
    }
    return (35.0 / 32.0) * (-6.0 * v) * w * w;
}

double default_bandwidth(double scale, std::size_t n) {
    return scale * std::pow(static_cast<double>(n), -0.2);
}

// ---------------------------------------------------------------------------
// LAD
// ---------------------------------------------------------------------------

double lad_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& b) {
    const Eigen::VectorXd r = Y - X * b;
    double total = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        total += std::abs(r[i]);
    }
    return total;
}

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

bool is_intercept_only(const Eigen::MatrixXd& X) {
    if (X.cols() != 1) {
        return false;
    }
    const double c = X(0, 0);
    return c != 0.0 && (X.col(0).array() == c).all();
}

Eigen::VectorXd irls_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
    Eigen::VectorXd b = ols_fit(X, Y).coefficients;
    const double scale = std::max((Y - X * b).cwiseAbs().mean(), 1e-12 * std::max(1.0, Y.cwiseAbs().maxCoeff()));
    for (double taper = 0.1; taper >= 1e-10; taper *= 0.1) {
        const double delta = taper * scale;
        for (int it = 0; it < 100; ++it) {
            const Eigen::VectorXd r = Y - X * b;
            const Eigen::VectorXd w = (r.array().square() + delta * delta).rsqrt();
            const Eigen::MatrixXd XtW = X.transpose() * w.asDiagonal();
            const Eigen::VectorXd next = (XtW * X).ldlt().solve(XtW * Y);
            const double change = (next - b).cwiseAbs().maxCoeff();
            b = next;
            if (change <= 1e-13 * (1.0 + b.cwiseAbs().maxCoeff())) {
                break;
            }
        }
    }
    return b;
}

// Rows with the smallest |r| that together form a nonsingular k x k system.
std::vector<Eigen::Index> initial_basis(const Eigen::MatrixXd& X, const Eigen::VectorXd& r) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(r[a]) < std::abs(r[b]); });
    std::vector<Eigen::Index> basis;
    Eigen::MatrixXd rows(0, k);
    for (Eigen::Index i : order) {
        Eigen::MatrixXd trial(rows.rows() + 1, k);
        trial << rows, X.row(i);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(trial);
        lu.setThreshold(1e-10);
        if (lu.rank() == trial.rows()) {
            rows = trial;
            basis.push_back(i);
            if (static_cast<Eigen::Index>(basis.size()) == k) {
                break;
            }
        }
    }
    if (static_cast<Eigen::Index>(basis.size()) < k) {
        throw SingularDesign("lad_fit: design does not have full column rank");
    }
    return basis;
}

struct VertexResult {
    Eigen::VectorXd b;
    bool certified = false;
    bool non_unique = false;
};

// Exterior-point descent between vertices of the LAD objective: each step
// releases the basic observation with the largest |dual| and moves along the
// resulting edge to the weighted-median breakpoint.
VertexResult vertex_descent(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, std::vector<Eigen::Index> basis) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    VertexResult out;
    const double zero_tol = 1e-12 * std::max(1.0, Y.cwiseAbs().maxCoeff());
    for (Eigen::Index iter = 0; iter < 50 * n; ++iter) {
        Eigen::MatrixXd XS(k, k);
        Eigen::VectorXd YS(k);
        for (Eigen::Index j = 0; j < k; ++j) {
            XS.row(j) = X.row(basis[static_cast<std::size_t>(j)]);
            YS[j] = Y[basis[static_cast<std::size_t>(j)]];
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(XS);
        out.b = lu.solve(YS);
        Eigen::VectorXd r = Y - X * out.b;
        std::vector<bool> in_basis(static_cast<std::size_t>(n), false);
        for (Eigen::Index i : basis) {
            in_basis[static_cast<std::size_t>(i)] = true;
            r[i] = 0.0;
        }
        Eigen::VectorXd g = Eigen::VectorXd::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!in_basis[static_cast<std::size_t>(i)] && std::abs(r[i]) > zero_tol) {
                g += sgn(r[i]) * X.row(i).transpose();
            }
        }
        const Eigen::VectorXd u = XS.transpose().partialPivLu().solve(-g);
        Eigen::Index j_out = 0;
        const double umax = u.cwiseAbs().maxCoeff(&j_out);
        if (umax <= 1.0 + 1e-9) {
            out.certified = true;
            out.non_unique = umax >= 1.0 - 1e-9;
            return out;
        }
        const double sigma = -sgn(u[j_out]);
        Eigen::VectorXd unit = Eigen::VectorXd::Zero(k);
        unit[j_out] = sigma;
        const Eigen::VectorXd d = lu.solve(unit);
        const Eigen::VectorXd z = X * d;

        double slope = 1.0 - umax;
        std::vector<std::pair<double, Eigen::Index>> breaks;
        Eigen::Index degenerate_entry = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (in_basis[static_cast<std::size_t>(i)] || std::abs(z[i]) <= 1e-14) {
                continue;
            }
            if (std::abs(r[i]) <= zero_tol) {
                slope += std::abs(z[i]);
                if (degenerate_entry < 0) {
                    degenerate_entry = i;
                }
                continue;
            }
            const double t = r[i] / z[i];
            if (t > 0.0) {
                breaks.emplace_back(t, i);
            }
        }
        Eigen::Index entering = -1;
        if (slope >= 0.0) {
            entering = degenerate_entry;
        } else {
            std::sort(breaks.begin(), breaks.end());
            for (const auto& [t, i] : breaks) {
                slope += 2.0 * std::abs(z[i]);
                if (slope >= 0.0) {
                    entering = i;
                    break;
                }
            }
        }
        if (entering < 0) {
            return out;  // unbounded direction cannot occur for a full-rank design; give up
        }
        basis[static_cast<std::size_t>(j_out)] = entering;
    }
    return out;
}

}  // namespace

LadResult lad_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (Y.size() != n || k == 0) {
        throw InvalidInput("lad_fit: dimension mismatch");
    }
    if (n <= k) {
        throw InvalidInput("lad_fit: need n > k");
    }
    LadResult result;
    if (is_intercept_only(X)) {
        std::vector<double> ratio(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            ratio[static_cast<std::size_t>(i)] = Y[i] / X(i, 0);
        }
        std::sort(ratio.begin(), ratio.end());
        const std::size_t lower = (ratio.size() - 1) / 2;
        result.coefficients = Eigen::VectorXd::Constant(1, ratio[lower]);
        result.non_unique = ratio.size() % 2 == 0 && ratio[lower] != ratio[lower + 1];
        result.certified = true;
        result.objective = lad_objective(X, Y, result.coefficients);
        return result;
    }

    const Eigen::VectorXd b_path = irls_path(X, Y);
    const auto vertex = vertex_descent(X, Y, initial_basis(X, Y - X * b_path));
    const double obj_vertex = lad_objective(X, Y, vertex.b);
    const double obj_path = lad_objective(X, Y, b_path);
    result.certified = vertex.certified;
    result.non_unique = vertex.non_unique;
    const double slack = 1e-9 * std::max(1.0, obj_vertex);
    if ((vertex.non_unique && obj_path <= obj_vertex + slack) || (!vertex.certified && obj_path < obj_vertex)) {
        result.coefficients = b_path;
        result.objective = obj_path;
    } else {
        result.coefficients = vertex.b;
        result.objective = obj_vertex;
    }
    return result;
}

// ---------------------------------------------------------------------------
// SLAD
// ---------------------------------------------------------------------------

namespace {

struct SladTerms {
    double rho;
    double psi;
    double curvature;
};

SladTerms slad_terms(double r, const SmoothKernel& kernel) {
    const double h = kernel.bandwidth();
    const double v = r / h;
    const double H = kernel.H(v);
    const double dH = kernel.dH(v);
    return {r * (2.0 * H - 1.0), 2.0 * H - 1.0 + 2.0 * v * dH, (4.0 * dH + 2.0 * v * kernel.d2H(v)) / h};
}

}  // namespace

double slad_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& b,
                      const SmoothKernel& kernel) {
    const Eigen::VectorXd r = Y - X * b;
    double total = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        total += slad_terms(r[i], kernel).rho;
    }
    return total;
}

Eigen::VectorXd slad_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& b,
                              const SmoothKernel& kernel) {
    const Eigen::VectorXd r = Y - X * b;
    Eigen::VectorXd psi(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        psi[i] = slad_terms(r[i], kernel).psi;
    }
    return -(X.transpose() * psi);
}

SladFit slad_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const SmoothKernel& kernel,
                 const SladOptions& options) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (Y.size() != n || n <= k) {
        throw InvalidInput("slad_fit: need matching dimensions and n > k");
    }
    const Eigen::VectorXd start = options.start ? *options.start : lad_fit(X, Y).coefficients;
    const double inv_n = 1.0 / static_cast<double>(n);
    Objective objective{[&](const Eigen::VectorXd& b) { return inv_n * slad_objective(X, Y, b, kernel); },
                        [&](const Eigen::VectorXd& b) -> Eigen::VectorXd {
                            return inv_n * slad_gradient(X, Y, b, kernel);
                        }};
    OptimizerSettings settings = options.optimizer;
    settings.gradient_floor = std::max(settings.gradient_floor, 1e-13 * (1.0 + X.cwiseAbs().mean()));
    SladFit out;
    out.optimization = minimize(objective, start, settings);
    const Eigen::VectorXd& b = out.optimization.x;

    const Eigen::VectorXd r = Y - X * b;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(k, k);
    Eigen::MatrixXd Omega = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto terms = slad_terms(r[i], kernel);
        const Eigen::VectorXd x = X.row(i).transpose();
        D.noalias() += terms.curvature * x * x.transpose();
        Omega.noalias() += terms.psi * terms.psi * x * x.transpose();
    }
    D *= inv_n;
    Omega *= inv_n;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(D);
    if (!lu.isInvertible()) {
        throw EvaluationError("slad_fit: smoothed Hessian is singular (bandwidth too small?)");
    }
    const Eigen::MatrixXd Dinv = lu.inverse();
    out.V = Dinv * Omega * Dinv;
    out.V = 0.5 * (out.V + out.V.transpose());

    out.fit.design = X;
    out.fit.response = Y;
    out.fit.coefficients = b;
    out.fit.fitted = X * b;
    out.fit.residuals_raw = r;
    out.fit.residuals_centered = center(r);
    out.fit.cov = out.V * inv_n;
    out.fit.cov_kind = CovarianceKind::hccme;
    return out;
}

SmoothedTestResult slad_t_test(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const SmoothKernel& kernel,
                               Eigen::Index coef_index, double null_value, const SmoothedTestOptions& options) {
    if (coef_index < 0 || coef_index >= X.cols()) {
        throw InvalidInput("slad_t_test: coefficient index out of range");
    }
    const auto base = slad_fit(X, Y, kernel);
    const double root_n = std::sqrt(static_cast<double>(X.rows()));
    const double b_hat = base.fit.coefficients[coef_index];
    const double t = root_n * (b_hat - null_value) / std::sqrt(base.V(coef_index, coef_index));

    SladOptions refit;
    refit.start = base.fit.coefficients;
    refit.optimizer.restarts = options.refit_restarts;
    std::vector<double> t_star;
    t_star.reserve(options.B);
    std::size_t discarded = 0;
    for (std::size_t r = 0; r < options.B; ++r) {
        CounterRng rng(options.seed, r);
        const Eigen::VectorXd y_star = residual_response(base.fit, rng);
        try {
            const auto star = slad_fit(X, y_star, kernel, refit);
            const double v = star.V(coef_index, coef_index);
            if (!(v > 0.0)) {
                ++discarded;
                continue;
            }
            t_star.push_back(root_n * (star.fit.coefficients[coef_index] - b_hat) / std::sqrt(v));
        } catch (const std::runtime_error&) {
            ++discarded;
        }
    }
    if (static_cast<double>(discarded) > kMaxDiscardFraction * static_cast<double>(options.B) || t_star.empty()) {
        throw EvaluationError("slad_t_test: " + std::to_string(discarded) + " bootstrap refits failed");
    }
    SmoothedTestResult out{decide(t, t_star, options.alpha, options.sided), normal_decision(t, options.alpha, options.sided)};
    out.bootstrap.discarded = discarded;
    return out;
}

// ---------------------------------------------------------------------------
// Maximum score / SMS
// ---------------------------------------------------------------------------

BinaryResponseData::BinaryResponseData(Eigen::VectorXd y_in, Eigen::MatrixXd X_in)
    : y(std::move(y_in)), X(std::move(X_in)) {
    if (y.size() != X.rows() || X.cols() == 0) {
        throw InvalidInput("BinaryResponseData: dimension mismatch");
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) {
            throw InvalidInput("BinaryResponseData: responses must be 0 or 1");
        }
    }
    std::set<double> distinct(X.col(0).data(), X.col(0).data() + X.rows());
    if (static_cast<Eigen::Index>(distinct.size()) <= X.cols()) {
        throw InvalidInput("BinaryResponseData: first covariate must take more than k distinct values");
    }
}

double max_score_objective(const BinaryResponseData& data, const Eigen::VectorXd& b) {
    const Eigen::VectorXd index = data.X * b;
    double score = 0.0;
    for (Eigen::Index i = 0; i < index.size(); ++i) {
        if (index[i] >= 0.0) {
            score += 2.0 * data.y[i] - 1.0;
        }
    }
    return score;
}

MaxScoreResult max_score_fit(const BinaryResponseData& data, const MaxScoreGrid& grid) {
    const Eigen::Index k = data.X.cols();
    if (k > 3) {
        throw InvalidInput("max_score_fit: grid search supports k <= 3 covariates");
    }
    if (grid.points < 2 || !(grid.half_width > 0.0)) {
        throw InvalidInput("max_score_fit: grid needs >= 2 points and positive half-width");
    }
    const double step = 2.0 * grid.half_width / static_cast<double>(grid.points - 1);
    auto node = [&](std::size_t i) { return -grid.half_width + step * static_cast<double>(i); };
    MaxScoreResult best;
    best.score = -std::numeric_limits<double>::infinity();
    best.cell_width = step;
    Eigen::VectorXd b(k);
    auto consider = [&] {
        const double s = max_score_objective(data, b);
        if (s > best.score) {
            best.score = s;
            best.coefficients = b;
        }
    };
    for (double sign : {1.0, -1.0}) {
        b[0] = sign;
        if (k == 1) {
            consider();
        } else if (k == 2) {
            for (std::size_t i = 0; i < grid.points; ++i) {
                b[1] = node(i);
                consider();
            }
        } else {
            for (std::size_t i = 0; i < grid.points; ++i) {
                for (std::size_t j = 0; j < grid.points; ++j) {
                    b[1] = node(i);
                    b[2] = node(j);
                    consider();
                }
            }
        }
    }
    return best;
}

double sms_objective(const BinaryResponseData& data, const Eigen::VectorXd& b, const SmoothKernel& kernel) {
    const Eigen::VectorXd index = data.X * b;
    double total = 0.0;
    for (Eigen::Index i = 0; i < index.size(); ++i) {
        total += (2.0 * data.y[i] - 1.0) * kernel.H(index[i] / kernel.bandwidth());
    }
    return total;
}

Eigen::VectorXd sms_gradient(const BinaryResponseData& data, const Eigen::VectorXd& b, const SmoothKernel& kernel) {
    const double h = kernel.bandwidth();
    const Eigen::VectorXd index = data.X * b;
    Eigen::VectorXd w(index.size());
    for (Eigen::Index i = 0; i < index.size(); ++i) {
        w[i] = (2.0 * data.y[i] - 1.0) * kernel.dH(index[i] / h) / h;
    }
    return data.X.transpose() * w;
}

namespace {

Eigen::VectorXd with_sign(double sign, const Eigen::VectorXd& free) {
    Eigen::VectorXd b(free.size() + 1);
    b[0] = sign;
    b.tail(free.size()) = free;
    return b;
}

Eigen::MatrixXd sms_covariance(const BinaryResponseData& data, const Eigen::VectorXd& b, const SmoothKernel& kernel) {
    const Eigen::Index k = b.size();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
    if (k == 1) {
        return cov;
    }
    const double h = kernel.bandwidth();
    const Eigen::Index m = k - 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
    const Eigen::VectorXd index = data.X * b;
    for (Eigen::Index i = 0; i < index.size(); ++i) {
        const double v = index[i] / h;
        const double sgn_y = 2.0 * data.y[i] - 1.0;
        const Eigen::VectorXd x = data.X.row(i).tail(m).transpose();
        A.noalias() += sgn_y * kernel.d2H(v) / (h * h) * x * x.transpose();
        const Eigen::VectorXd g = sgn_y * kernel.dH(v) / h * x;
        S.noalias() += g * g.transpose();
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) {
        throw EvaluationError("sms_fit: Hessian of the smoothed score is singular");
    }
    const Eigen::MatrixXd Ainv = lu.inverse();
    cov.bottomRightCorner(m, m) = Ainv * S * Ainv;
    cov = 0.5 * (cov + cov.transpose()).eval();
    return cov;
}

}  // namespace

Eigen::VectorXd sms_pilot_direction(const BinaryResponseData& data) {
    const Eigen::Index k = data.X.cols();
    const Eigen::VectorXd target = (2.0 * data.y.array() - 1.0).matrix();
    const Eigen::VectorXd c = data.X.colPivHouseholderQr().solve(target);
    return c[0] != 0.0 ? Eigen::VectorXd(c.tail(k - 1) / c[0]) : Eigen::VectorXd::Zero(k - 1);
}

double sms_default_bandwidth(const BinaryResponseData& data) {
    const Eigen::Index k = data.X.cols();
    Eigen::VectorXd b = Eigen::VectorXd::Ones(k);
    b.tail(k - 1) = sms_pilot_direction(data);
    const Eigen::VectorXd index = data.X * b;
    const double mean = index.mean();
    const double sd = std::sqrt((index.array() - mean).square().sum() / static_cast<double>(index.size() - 1));
    return default_bandwidth(sd, static_cast<std::size_t>(index.size()));
}

SmsFit sms_fit(const BinaryResponseData& data, const SmoothKernel& kernel, const SmsOptions& options) {
    const Eigen::Index k = data.X.cols();
    const auto n = static_cast<double>(data.X.rows());
    std::vector<double> signs = options.sign ? std::vector<double>{*options.sign >= 0 ? 1.0 : -1.0}
                                             : std::vector<double>{1.0, -1.0};
    SmsFit best;
    best.objective = -std::numeric_limits<double>::infinity();

    if (k == 1) {
        for (double s : signs) {
            const Eigen::VectorXd b = Eigen::VectorXd::Constant(1, s);
            const double value = sms_objective(data, b, kernel);
            if (value > best.objective) {
                best.objective = value;
                best.coefficients = b;
            }
        }
        best.cov = Eigen::MatrixXd::Zero(1, 1);
        return best;
    }

    const Eigen::VectorXd free_start = options.start ? *options.start : sms_pilot_direction(data);
    std::vector<std::string> traces;
    for (double s : signs) {
        // For b_1 = s the OLS direction (or its negative) has free part s * c_free / c_1.
        const Eigen::VectorXd start = options.start ? free_start : Eigen::VectorXd(s * free_start);
        Objective objective{
            [&, s](const Eigen::VectorXd& free) { return -sms_objective(data, with_sign(s, free), kernel) / n; },
            [&, s](const Eigen::VectorXd& free) -> Eigen::VectorXd {
                return -sms_gradient(data, with_sign(s, free), kernel).tail(k - 1) / n;
            }};
        OptimizerSettings settings = options.optimizer;
        settings.gradient_floor = std::max(settings.gradient_floor, 1e-12);
        try {
            auto run = minimize(objective, start, settings);
            const double value = -run.value * n;
            if (value > best.objective) {
                best.objective = value;
                best.coefficients = with_sign(s, run.x);
                best.optimization = std::move(run);
            }
        } catch (const ConvergenceError& e) {
            traces.push_back(std::string("branch b1=") + (s > 0 ? "+1" : "-1") + ": " + e.what());
        }
    }
    if (!std::isfinite(best.objective)) {
        std::string what = "sms_fit: no sign branch converged";
        for (const auto& t : traces) {
            what += "\n" + t;
        }
        throw ConvergenceError(what);
    }
    best.cov = sms_covariance(data, best.coefficients, kernel);
    return best;
}

std::vector<double> sms_t_replicates(const BinaryResponseData& data, const SmsFit& fit, const SmoothKernel& kernel,
                                     Eigen::Index coef_index, std::size_t B, SeedPolicy seed, int refit_restarts,
                                     std::size_t* discarded) {
    const Eigen::Index n = data.X.rows();
    const Eigen::Index k = data.X.cols();
    SmsOptions refit;
    refit.start = Eigen::VectorXd(fit.coefficients.tail(k - 1));
    refit.sign = fit.coefficients[0];
    refit.optimizer.restarts = refit_restarts;
    std::vector<double> t_star;
    t_star.reserve(B);
    std::size_t dropped = 0;
    for (std::size_t r = 0; r < B; ++r) {
        CounterRng rng(seed, r);
        Eigen::VectorXd y(n);
        Eigen::MatrixXd X(n, k);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto j = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
            y[i] = data.y[j];
            X.row(i) = data.X.row(j);
        }
        try {
            const BinaryResponseData star_data(std::move(y), std::move(X));
            const auto star = sms_fit(star_data, kernel, refit);
            const double v = star.cov(coef_index, coef_index);
            if (!(v > 0.0)) {
                ++dropped;
                continue;
            }
            t_star.push_back((star.coefficients[coef_index] - fit.coefficients[coef_index]) / std::sqrt(v));
        } catch (const std::exception&) {
            ++dropped;
        }
    }
    if (discarded != nullptr) {
        *discarded = dropped;
    }
    return t_star;
}

SmoothedTestResult sms_t_test(const BinaryResponseData& data, const SmoothKernel& kernel, Eigen::Index coef_index,
                              double null_value, const SmoothedTestOptions& options) {
    if (coef_index < 1 || coef_index >= data.X.cols()) {
        throw InvalidInput("sms_t_test: coefficient index must address a free component (1..k-1)");
    }
    const auto fit = sms_fit(data, kernel);
    const double v = fit.cov(coef_index, coef_index);
    if (!(v > 0.0)) {
        throw EvaluationError("sms_t_test: non-positive variance estimate");
    }
    const double t = (fit.coefficients[coef_index] - null_value) / std::sqrt(v);
    std::size_t discarded = 0;
    const auto t_star =
        sms_t_replicates(data, fit, kernel, coef_index, options.B, options.seed, options.refit_restarts, &discarded);
    if (static_cast<double>(discarded) > kMaxDiscardFraction * static_cast<double>(options.B) || t_star.empty()) {
        throw EvaluationError("sms_t_test: " + std::to_string(discarded) + " bootstrap refits failed");
    }
    SmoothedTestResult out{decide(t, t_star, options.alpha, options.sided), normal_decision(t, options.alpha, options.sided)};
    out.bootstrap.discarded = discarded;
    return out;
}

}  // namespace bootlab
