#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace holofol {

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    int n = 0;
};

inline MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr m;
    m.n = (int)xs.size();
    if (m.n == 0) return m;
    double s = 0.0;
    for (double x : xs) s += x;
    m.mean = s / m.n;
    if (m.n > 1) {
        double q = 0.0;
        for (double x : xs) q += (x - m.mean) * (x - m.mean);
        m.stderr_ = std::sqrt(q / (m.n - 1) / m.n);
    }
    return m;
}

// true when removing the largest 1% of the sample moves the mean by at least
// 5 standard errors of the full-sample mean
inline bool heavy_tail_alarm(std::vector<double> values) {
    if (values.size() < 100) return false;
    MeanStderr full = mean_stderr(values);
    if (!(full.stderr_ > 0.0)) return false;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    size_t drop = sorted.size() / 100;
    if (drop == 0) drop = 1;
    sorted.resize(sorted.size() - drop);
    MeanStderr trimmed = mean_stderr(sorted);
    return std::fabs(trimmed.mean - full.mean) >= 5.0 * full.stderr_;
}

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need at least two points");
    double n = (double)x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    LinearFit f;
    double denom = n * sxx - sx * sx;
    f.slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0, ybar = sy / n;
    for (size_t i = 0; i < x.size(); ++i) {
        double pred = f.intercept + f.slope * x[i];
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

} // namespace holofol
