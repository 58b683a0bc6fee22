#include "bootlab/statistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bootlab {

Statistic Statistic::mean(std::size_t column) {
    auto point = [column](const Sample& s) {
        double total = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            total += s(i, column);
        }
        return total / static_cast<double>(s.size());
    };
    auto scale = [column, point](const Sample& s) {
        const std::size_t n = s.size();
        if (n < 2) {
            return 0.0;
        }
        const double m = point(s);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = s(i, column) - m;
            ss += d * d;
        }
        return std::sqrt(ss / static_cast<double>(n - 1));
    };
    return {"mean", point, scale};
}

Statistic Statistic::maximum(std::size_t column) {
    auto point = [column](const Sample& s) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < s.size(); ++i) {
            best = std::max(best, s(i, column));
        }
        return best;
    };
    return {"maximum", point, {}};
}

}  // namespace bootlab
