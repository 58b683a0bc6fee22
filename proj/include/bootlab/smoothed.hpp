#pragma once

#include "bootlab/inference.hpp"
#include "bootlab/optimize.hpp"
#include "bootlab/regression_fit.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace bootlab {

/// H with H(v) = 0 for v <= -1, H(v) = 1 for v >= 1, smooth in between,
/// together with a bandwidth h > 0.
class SmoothKernel {
public:
    enum class Family {
        integrated_biweight,   ///< C^2: H' = (15/16)(1 - v^2)^2
        integrated_triweight,  ///< C^3: H' = (35/32)(1 - v^2)^3
    };

    explicit SmoothKernel(double bandwidth, Family family = Family::integrated_biweight);

    /// Kernel with at least `order` continuous derivatives (2 or 3).
    static SmoothKernel with_order(double bandwidth, int order);

    [[nodiscard]] double bandwidth() const noexcept { return h_; }
    [[nodiscard]] Family family() const noexcept { return family_; }

    [[nodiscard]] double H(double v) const noexcept;
    [[nodiscard]] double dH(double v) const noexcept;
    [[nodiscard]] double d2H(double v) const noexcept;

private:
    double h_;
    Family family_;
};

/// c * n^{-1/5}.
[[nodiscard]] double default_bandwidth(double scale, std::size_t n);

// ---------------------------------------------------------------------------
// LAD / SLAD
// ---------------------------------------------------------------------------

struct LadResult {
    Eigen::VectorXd coefficients;
    double objective = 0.0;
    /// The minimizer is not unique (flat face of the objective).
    bool non_unique = false;
    /// The subgradient optimality condition was verified.
    bool certified = false;
};

[[nodiscard]] double lad_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& b);

/// argmin_b sum |Y_i - b'X_i|. Intercept-only designs return the lower median;
/// otherwise a certified vertex solution, or the limit of the tapered IRLS path
/// when the minimizer is not unique.
[[nodiscard]] LadResult lad_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y);

/// sum (Y_i - b'X_i) [2 H((Y_i - b'X_i)/h) - 1]
[[nodiscard]] double slad_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& b,
                                    const SmoothKernel& kernel);
[[nodiscard]] Eigen::VectorXd slad_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                            const Eigen::VectorXd& b, const SmoothKernel& kernel);

struct SladFit {
    /// `fit.cov` is V / n, the covariance estimate of the coefficients.
    RegressionFit fit;
    /// Sandwich estimate of V in n^{1/2}(b - beta) -> N(0, V).
    Eigen::MatrixXd V;
    OptimizationResult optimization;
};

struct SladOptions {
    OptimizerSettings optimizer{};
    /// Starting point; the LAD solution when empty.
    std::optional<Eigen::VectorXd> start;
};

[[nodiscard]] SladFit slad_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const SmoothKernel& kernel,
                               const SladOptions& options = {});

struct SmoothedTestOptions {
    std::size_t B = 399;
    double alpha = 0.05;
    SeedPolicy seed{};
    Sidedness sided = Sidedness::symmetric;
    /// Restarts used for each bootstrap refit (warm-started at the estimate).
    int refit_restarts = 1;
};

struct SmoothedTestResult {
    TestResult bootstrap;
    TestResult asymptotic;
};

/// t = n^{1/2}(b_j - null)/V_jj^{1/2} with residual-bootstrap critical values.
[[nodiscard]] SmoothedTestResult slad_t_test(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                             const SmoothKernel& kernel, Eigen::Index coef_index, double null_value,
                                             const SmoothedTestOptions& options);

// ---------------------------------------------------------------------------
// Maximum score / SMS
// ---------------------------------------------------------------------------

/// Binary response data; the first design column must be continuous.
struct BinaryResponseData {
    Eigen::VectorXd y;  ///< entries in {0, 1}
    Eigen::MatrixXd X;

    BinaryResponseData(Eigen::VectorXd y, Eigen::MatrixXd X);
};

/// sum (2 Y_i - 1) I(b'X_i >= 0)
[[nodiscard]] double max_score_objective(const BinaryResponseData& data, const Eigen::VectorXd& b);

struct MaxScoreGrid {
    double half_width = 5.0;
    std::size_t points = 401;
};

struct MaxScoreResult {
    Eigen::VectorXd coefficients;
    double score = 0.0;
    double cell_width = 0.0;
};

/// Exhaustive search over {b : |b_1| = 1} x grid^(k-1); k <= 3.
[[nodiscard]] MaxScoreResult max_score_fit(const BinaryResponseData& data, const MaxScoreGrid& grid = {});

/// sum (2 Y_i - 1) H(b'X_i / h)
[[nodiscard]] double sms_objective(const BinaryResponseData& data, const Eigen::VectorXd& b,
                                   const SmoothKernel& kernel);
[[nodiscard]] Eigen::VectorXd sms_gradient(const BinaryResponseData& data, const Eigen::VectorXd& b,
                                           const SmoothKernel& kernel);

struct SmsFit {
    Eigen::VectorXd coefficients;  ///< |b_1| = 1 exactly
    double objective = 0.0;
    /// Sandwich covariance of the coefficients (row/column 0 are zero).
    Eigen::MatrixXd cov;
    OptimizationResult optimization;
};

struct SmsOptions {
    OptimizerSettings optimizer{};
    /// Initial free components (b_2..b_k) for the +1 branch; linear-probability
    /// OLS direction when empty.
    std::optional<Eigen::VectorXd> start;
    /// Restrict to one sign branch of b_1 (bootstrap refits).
    std::optional<double> sign;
};

/// Free components (b_2..b_k) of the linear-probability OLS direction with b_1 = 1.
[[nodiscard]] Eigen::VectorXd sms_pilot_direction(const BinaryResponseData& data);

/// c * n^{-1/5} with c the standard deviation of the pilot index x'b.
[[nodiscard]] double sms_default_bandwidth(const BinaryResponseData& data);

[[nodiscard]] SmsFit sms_fit(const BinaryResponseData& data, const SmoothKernel& kernel, const SmsOptions& options = {});

/// Pairs-bootstrap t test for a free coefficient (index >= 1) of the SMS estimator.
[[nodiscard]] SmoothedTestResult sms_t_test(const BinaryResponseData& data, const SmoothKernel& kernel,
                                            Eigen::Index coef_index, double null_value,
                                            const SmoothedTestOptions& options);

/// Studentized SMS replicates t*_b from the pairs bootstrap (used by the demo).
[[nodiscard]] std::vector<double> sms_t_replicates(const BinaryResponseData& data, const SmsFit& fit,
                                                   const SmoothKernel& kernel, Eigen::Index coef_index,
                                                   std::size_t B, SeedPolicy seed, int refit_restarts,
                                                   std::size_t* discarded = nullptr);

}  // namespace bootlab
