#include "bootlab/linear.hpp"

#include "bootlab/distribution.hpp"
#include "bootlab/error.hpp"

#include <cmath>
#include <sstream>

namespace bootlab {

namespace {

constexpr double kRankTolerance = 1e-10;

// (X'X)^-1 from a pivoted QR of X, checking the rank condition.
Eigen::MatrixXd inverse_gram(const Eigen::MatrixXd& X, const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr) {
    const Eigen::Index k = X.cols();
    const auto& r = qr.matrixR();
    const double largest = std::abs(r(0, 0));
    std::vector<Eigen::Index> weak;
    for (Eigen::Index i = 0; i < k; ++i) {
        if (!(std::abs(r(i, i)) > kRankTolerance * largest)) {
            weak.push_back(qr.colsPermutation().indices()[i]);
        }
    }
    if (largest == 0.0 || !weak.empty()) {
        std::ostringstream os;
        os << "singular design: columns {";
        if (largest == 0.0) {
            for (Eigen::Index j = 0; j < k; ++j) {
                os << (j ? "," : "") << j;
            }
        }
        for (std::size_t i = 0; i < weak.size(); ++i) {
            os << (i ? "," : "") << weak[i];
        }
        os << "} are linearly dependent on the others";
        throw SingularDesign(os.str());
    }
    const Eigen::MatrixXd R = r.topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd inner = Rinv * Rinv.transpose();
    const auto& perm = qr.colsPermutation();
    return perm * inner * perm.transpose();
}

}  // namespace

RegressionFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (k == 0 || n == 0) {
        throw InvalidInput("ols_fit: empty design");
    }
    if (Y.size() != n) {
        throw InvalidInput("ols_fit: response length does not match design rows");
    }
    if (n < k) {
        throw InvalidInput("ols_fit: need n >= k");
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    RegressionFit fit;
    fit.design = X;
    fit.response = Y;
    const Eigen::MatrixXd bread = inverse_gram(X, qr);
    fit.coefficients = qr.solve(Y);
    fit.fitted = X * fit.coefficients;
    fit.residuals_raw = Y - fit.fitted;
    fit.residuals_centered = center(fit.residuals_raw);
    if (n > k) {
        fit.sigma2_homoskedastic = fit.residuals_raw.squaredNorm() / static_cast<double>(n - k);
        fit.cov = *fit.sigma2_homoskedastic * bread;
    } else {
        fit.cov = Eigen::MatrixXd::Zero(k, k);
    }
    fit.cov_kind = CovarianceKind::classical;
    return fit;
}

RegressionFit ols_fit(const Sample& data, const std::string& response, const std::vector<std::string>& regressors,
                      bool intercept) {
    const std::size_t y_col = data.column_index(response);
    const auto n = static_cast<Eigen::Index>(data.size());
    const auto k = static_cast<Eigen::Index>(regressors.size() + (intercept ? 1 : 0));
    Eigen::MatrixXd X(n, k);
    Eigen::VectorXd Y(n);
    std::vector<std::size_t> cols;
    for (const auto& name : regressors) {
        cols.push_back(data.column_index(name));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = static_cast<std::size_t>(i);
        Y[i] = data(row, y_col);
        Eigen::Index j = 0;
        if (intercept) {
            X(i, j++) = 1.0;
        }
        for (std::size_t c : cols) {
            X(i, j++) = data(row, c);
        }
    }
    return ols_fit(X, Y);
}

Eigen::MatrixXd hccme(const RegressionFit& fit, HcVariant variant) {
    const Eigen::MatrixXd& X = fit.design;
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    const Eigen::MatrixXd bread = inverse_gram(X, qr);
    const Eigen::MatrixXd weighted = X.array().colwise() * fit.residuals_raw.array().square();
    const Eigen::MatrixXd meat = X.transpose() * weighted;
    Eigen::MatrixXd cov = bread * meat * bread;
    if (variant == HcVariant::hc1) {
        if (n <= k) {
            throw InvalidInput("hccme: hc1 requires n > k");
        }
        cov *= static_cast<double>(n) / static_cast<double>(n - k);
    }
    return 0.5 * (cov + cov.transpose());
}

double mammen_weight(double residual, SeedPolicy seed, std::uint64_t replicate, std::size_t i) {
    CounterRng rng(seed, replicate);
    rng.seek(i);
    return (rng.uniform() < MammenLaw::p ? MammenLaw::a : MammenLaw::b) * residual;
}

Eigen::VectorXd wild_errors(const Eigen::VectorXd& residuals, const WildScheme& scheme, SeedPolicy seed,
                            std::uint64_t replicate) {
    CounterRng rng(seed, replicate);
    Eigen::VectorXd e(residuals.size());
    for (Eigen::Index i = 0; i < residuals.size(); ++i) {
        if (scheme.kind == WildScheme::Kind::mammen_two_point) {
            e[i] = (rng.uniform() < MammenLaw::p ? MammenLaw::a : MammenLaw::b) * residuals[i];
        } else {
            const double u = scheme.multiplier_law ? scheme.multiplier_law(rng) : rng.normal();
            const double f = scheme.transform ? scheme.transform(residuals[i]) : residuals[i];
            e[i] = u * f;
        }
    }
    return e;
}

Sample wild_resample(const RegressionFit& fit, const WildScheme& scheme, SeedPolicy seed, std::uint64_t replicate) {
    const Eigen::VectorXd y = fit.fitted + wild_errors(fit.residuals_raw, scheme, seed, replicate);
    return regression_sample(y, fit.design);
}

ResamplePlan wild_plan(std::shared_ptr<const RegressionFit> fit, WildScheme scheme) {
    if (!fit) {
        throw InvalidInput("wild_plan: fit is required");
    }
    return CustomPlan{"wild", [fit = std::move(fit), scheme = std::move(scheme)](const Sample&, SeedPolicy seed,
                                                                                 std::uint64_t replicate) {
                          return wild_resample(*fit, scheme, seed, replicate);
                      }};
}

FixedDesign::FixedDesign(const Eigen::MatrixXd& X) : X_(X) {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    bread_ = inverse_gram(X, qr);
    projector_ = bread_ * X.transpose();
}

double FixedDesign::hc_variance(const Eigen::VectorXd& e, Eigen::Index j, HcVariant variant) const {
    const double v = (projector_.row(j).transpose().array().square() * e.array().square()).sum();
    if (variant == HcVariant::hc1) {
        const auto n = static_cast<double>(X_.rows());
        const auto k = static_cast<double>(X_.cols());
        return v * n / (n - k);
    }
    return v;
}

TestResult wild_bootstrap_t_test(const RegressionFit& fit, const WildScheme& scheme, Eigen::Index coef_index,
                                 double null_value, const WildTestOptions& options) {
    if (coef_index < 0 || coef_index >= fit.k()) {
        throw InvalidInput("wild_bootstrap_t_test: coefficient index out of range");
    }
    if (options.B == 0) {
        throw InvalidInput("wild_bootstrap_t_test: B must be >= 1");
    }
    const FixedDesign design(fit.design);
    const double b_hat = fit.coefficients[coef_index];
    const double se = std::sqrt(design.hc_variance(fit.residuals_raw, coef_index, options.variant));
    if (!(se > 0.0)) {
        throw EvaluationError("wild_bootstrap_t_test: HCCME standard error is zero");
    }
    const double t = (b_hat - null_value) / se;

    std::vector<double> t_star;
    t_star.reserve(options.B);
    std::size_t discarded = 0;
    for (std::size_t r = 0; r < options.B; ++r) {
        const Eigen::VectorXd y = fit.fitted + wild_errors(fit.residuals_raw, scheme, options.seed, r);
        const Eigen::VectorXd b = design.coefficients(y);
        const Eigen::VectorXd e = y - fit.design * b;
        const double se_star = std::sqrt(design.hc_variance(e, coef_index, options.variant));
        if (!(se_star >= kStudentizerFloor * se)) {
            ++discarded;
            continue;
        }
        t_star.push_back((b[coef_index] - b_hat) / se_star);
    }
    if (static_cast<double>(discarded) > kMaxDiscardFraction * static_cast<double>(options.B) || t_star.empty()) {
        throw EvaluationError("wild_bootstrap_t_test: too many degenerate replicates");
    }
    auto result = decide(t, t_star, options.alpha, options.sided);
    result.discarded = discarded;
    return result;
}

TestResult asymptotic_hccme_t_test(const RegressionFit& fit, Eigen::Index coef_index, double null_value,
                                   double alpha, Sidedness sided, HcVariant variant) {
    const Eigen::MatrixXd cov = hccme(fit, variant);
    const double se = std::sqrt(cov(coef_index, coef_index));
    return normal_decision((fit.coefficients[coef_index] - null_value) / se, alpha, sided);
}

nlohmann::json fit_summary(const RegressionFit& fit) {
    nlohmann::json j;
    j["n"] = fit.n();
    j["k"] = fit.k();
    j["coefficients"] = std::vector<double>(fit.coefficients.data(), fit.coefficients.data() + fit.coefficients.size());
    std::vector<std::vector<double>> cov;
    for (Eigen::Index r = 0; r < fit.cov.rows(); ++r) {
        std::vector<double> row;
        for (Eigen::Index c = 0; c < fit.cov.cols(); ++c) {
            row.push_back(fit.cov(r, c));
        }
        cov.push_back(std::move(row));
    }
    j["cov"] = cov;
    j["cov_kind"] = fit.cov_kind == CovarianceKind::classical ? "classical" : "hccme";
    j["sigma2"] = fit.sigma2_homoskedastic ? nlohmann::json(*fit.sigma2_homoskedastic) : nlohmann::json(nullptr);
    return j;
}

}  // namespace bootlab
