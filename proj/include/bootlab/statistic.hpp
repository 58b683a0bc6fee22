#pragma once

#include "bootlab/sample.hpp"

#include <cstddef>
#include <functional>
#include <string>

namespace bootlab {

/// A point functional with an optional studentizer.
///
/// `scale` returns s_n, the standard error of n^{1/2} * point, so that
/// t_n = n^{1/2} (point - mu0) / s_n.
struct Statistic {
    std::string name;
    std::function<double(const Sample&)> point;
    std::function<double(const Sample&)> scale;

    [[nodiscard]] bool studentized() const noexcept { return static_cast<bool>(scale); }

    /// Mean of one column, studentized by the (n-1)-divisor standard deviation.
    static Statistic mean(std::size_t column = 0);
    /// Sample maximum of one column; no studentizer.
    static Statistic maximum(std::size_t column = 0);
};

}  // namespace bootlab
