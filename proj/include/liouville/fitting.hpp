#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace liouville {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

// Least-squares slope of log|y| against log x.
inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(std::abs(ys[i]));
    }
    return fit_line(lx, ly).slope;
}

inline double slope_through_origin(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.empty()) throw std::invalid_argument("slope_through_origin: size mismatch");
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += xs[i] * ys[i];
        sxx += xs[i] * xs[i];
    }
    return sxy / sxx;
}

// Log-spaced sample points in [lo, hi].
inline std::vector<double> log_spaced(double lo, double hi, int count) {
    if (count < 2 || lo <= 0.0 || hi <= lo) throw std::invalid_argument("log_spaced: bad range");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double l0 = std::log(lo), l1 = std::log(hi);
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / (count - 1));
    return out;
}

} // namespace liouville
