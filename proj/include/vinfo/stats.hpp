#pragma once

#include <span>

namespace vinfo {

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p_value = 1.0;  // two-sided
};

// Two-sample unequal-variance t-test. Groups of size one contribute zero variance.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

// Product-moment correlation; throws UndefinedError on zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace vinfo
