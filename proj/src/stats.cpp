#include "vinfo/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "vinfo/error.hpp"

namespace vinfo {
namespace {

std::pair<double, double> mean_var(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    const double m = s / static_cast<double>(v.size());
    if (v.size() < 2) return {m, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, ss / static_cast<double>(v.size() - 1)};
}

}  // namespace

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw UndefinedError("t-test needs two non-empty groups");
    const auto [ma, va] = mean_var(a);
    const auto [mb, vb] = mean_var(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double sa = va / na, sb = vb / nb;
    WelchResult r;
    const double se2 = sa + sb;
    if (se2 == 0.0) {
        r.t = ma == mb ? 0.0 : std::copysign(INFINITY, ma - mb);
        r.df = na + nb - 2.0;
        r.p_value = ma == mb ? 1.0 : 0.0;
        return r;
    }
    r.t = (ma - mb) / std::sqrt(se2);
    const double denom = (a.size() > 1 ? sa * sa / (na - 1.0) : 0.0) + (b.size() > 1 ? sb * sb / (nb - 1.0) : 0.0);
    r.df = denom > 0.0 ? se2 * se2 / denom : na + nb - 2.0;
    r.df = std::max(r.df, 1.0);
    boost::math::students_t dist(r.df);
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
    return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("correlation inputs differ in length");
    if (x.size() < 3) throw ValidationError("correlation needs at least 3 paired values");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw UndefinedError("correlation undefined: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace vinfo
