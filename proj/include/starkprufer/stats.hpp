#pragma once

// Small regression and summary helpers used by the residual-exponent fits.

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"

namespace starkprufer {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw validity_error("fit_line: need >= 2 matching points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw validity_error("fit_line: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - f.intercept - f.slope * x[i];
            ss += r * r;
        }
        f.slope_stderr = std::sqrt(ss / static_cast<double>(n - 2) / sxx);
    }
    return f;
}

// Least-squares slope of log|y| against log x over points with y != 0.
inline LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] > 0.0 && std::fabs(y[i]) > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(std::fabs(y[i])));
        }
    }
    return fit_line(lx, ly);
}

// Oscillating residuals: split [x_min, x_max] into `bins` geometric bins,
// take the RMS of y in each bin and fit log RMS against the log bin centre.
inline LineFit fit_loglog_binned(const std::vector<double>& x, const std::vector<double>& y,
                                 int bins) {
    if (x.empty() || x.size() != y.size()) throw validity_error("fit_loglog_binned: bad data");
    const double lo = *std::min_element(x.begin(), x.end());
    const double hi = *std::max_element(x.begin(), x.end());
    if (!(lo > 0.0 && hi > lo)) throw validity_error("fit_loglog_binned: need positive range");
    const double step = std::log(hi / lo) / bins;
    std::vector<double> cx, cy;
    for (int b = 0; b < bins; ++b) {
        const double a = lo * std::exp(step * b), c = lo * std::exp(step * (b + 1));
        double ss = 0.0;
        int cnt = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const bool last = b + 1 == bins;
            if (x[i] >= a && (x[i] < c || (last && x[i] <= c))) {
                ss += y[i] * y[i];
                ++cnt;
            }
        }
        if (cnt > 0 && ss > 0.0) {
            cx.push_back(std::sqrt(a * c));
            cy.push_back(std::sqrt(ss / cnt));
        }
    }
    return fit_loglog(cx, cy);
}

struct Summary {
    double mean = 0.0;
    double stderr_ = 0.0;
    double median = 0.0;
};

inline Summary summarize(std::vector<double> v) {
    if (v.empty()) throw validity_error("summarize: empty sample");
    Summary s;
    const double n = static_cast<double>(v.size());
    for (double x : v) s.mean += x;
    s.mean /= n;
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.stderr_ = std::sqrt(ss / (n - 1.0) / n);
    }
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    s.median = v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    return s;
}

}  // namespace starkprufer
