#pragma once

// Least-squares fits and threshold searches over sweep series.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quenchlab/error.hpp"

namespace quenchlab {

// Concurrence below this counts as zero when locating entangled windows.
inline constexpr double concurrence_threshold = 1e-6;

struct FitResult {
    std::string model;  // "linear", "power", "log"
    double slope = 0.0;
    double intercept = 0.0;
    double slope_error = 0.0;  // standard error from the residuals
    double r_squared = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::vector<double> x;
    std::vector<double> residuals;

    // power: y = amplitude x^slope
    [[nodiscard]] double amplitude() const { return std::exp(intercept); }
    // log: y = slope ln(x) + intercept crosses zero here
    [[nodiscard]] double zero_crossing() const { return std::exp(-intercept / slope); }
};

inline nlohmann::json to_json(const FitResult& f)
{
    nlohmann::json j;
    j["model"] = f.model;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["slope_error"] = f.slope_error;
    j["r_squared"] = f.r_squared;
    j["window"] = {f.window_lo, f.window_hi};
    j["points"] = f.x.size();
    if (f.model == "power") {
        j["exponent"] = f.slope;
        j["amplitude"] = f.amplitude();
    }
    if (f.model == "log") {
        j["zero_crossing"] = f.zero_crossing();
    }
    return j;
}

// Ordinary least squares y = slope x + intercept.
inline FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw ConfigError("linear fit needs at least two (x, y) pairs");
    }
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw ConfigError("linear fit needs distinct x values");
    }
    FitResult f;
    f.model = "linear";
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        f.residuals.push_back(r);
        ss_res += r * r;
    }
    f.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    f.slope_error = x.size() > 2 ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;
    f.x = x;
    f.window_lo = *std::min_element(x.begin(), x.end());
    f.window_hi = *std::max_element(x.begin(), x.end());
    return f;
}

namespace detail {

inline void select_window(const std::vector<double>& x, const std::vector<double>& y, double lo,
                          double hi, std::vector<double>& wx, std::vector<double>& wy)
{
    if (x.size() != y.size()) {
        throw ConfigError("series x and y differ in length");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= lo && x[i] <= hi) {
            wx.push_back(x[i]);
            wy.push_back(y[i]);
        }
    }
}

}  // namespace detail

// ln y = slope ln x + intercept over points with lo <= x <= hi.  Short
// threshold series (one point per noise level) pass a smaller min_points.
inline FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                               double lo = 0.0,
                               double hi = std::numeric_limits<double>::infinity(),
                               std::size_t min_points = 5)
{
    std::vector<double> wx, wy;
    detail::select_window(x, y, lo, hi, wx, wy);
    if (wx.size() < std::max<std::size_t>(min_points, 3)) {
        throw ConfigError("power-law fit needs >= " + std::to_string(std::max<std::size_t>(min_points, 3)) +
                          " points in the window, got " +
                          std::to_string(wx.size()));
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < wx.size(); ++i) {
        if (!(wy[i] > 0.0) || !(wx[i] > 0.0)) {
            std::ostringstream msg;
            msg << "power-law fit: non-positive value y = " << wy[i] << " at x = " << wx[i];
            throw NumericalError(msg.str());
        }
        lx.push_back(std::log(wx[i]));
        ly.push_back(std::log(wy[i]));
    }
    auto f = fit_linear(lx, ly);
    f.model = "power";
    f.x = wx;
    f.window_lo = wx.front();
    f.window_hi = wx.back();
    return f;
}

// y = slope ln x + intercept over points with lo < x < hi.
inline FitResult fit_log_scaling(const std::vector<double>& x, const std::vector<double>& y,
                                 double lo, double hi)
{
    std::vector<double> wx, wy;
    detail::select_window(x, y, std::nextafter(lo, hi), std::nextafter(hi, lo), wx, wy);
    if (wx.size() < 6) {
        throw ConfigError("logarithmic fit needs >= 6 points in (" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "), got " + std::to_string(wx.size()));
    }
    std::vector<double> lx;
    for (const double v : wx) {
        lx.push_back(std::log(v));
    }
    auto f = fit_linear(lx, wy);
    f.model = "log";
    f.x = wx;
    f.window_lo = lo;
    f.window_hi = hi;
    return f;
}

// lo, lo 10^(1/ppd), ... up to hi; hi itself is always the last point.
inline std::vector<double> geometric_grid(double lo, double hi, int points_per_decade = 24)
{
    if (!(lo > 0.0) || !(hi >= lo) || points_per_decade < 1) {
        throw ConfigError("geometric grid needs 0 < lo <= hi and points per decade >= 1");
    }
    std::vector<double> g;
    const double span = std::log10(hi / lo) * points_per_decade;
    const auto steps = static_cast<int>(std::floor(span + 1e-9));
    for (int i = 0; i <= steps; ++i) {
        g.push_back(lo * std::pow(10.0, static_cast<double>(i) / points_per_decade));
    }
    if (hi / g.back() - 1.0 > 1e-9) {
        g.push_back(hi);
    } else {
        g.back() = hi;
    }
    return g;
}

using ConcurrenceProbe = std::function<double(double)>;

// Smallest tau with probe(tau) > eps, by bisection on [lo, hi].  The result is
// the upper end of the final bracket.
inline double estimate_tau0(const ConcurrenceProbe& probe, double lo = 1.0, double hi = 4.0,
                            int iterations = 20, double eps = concurrence_threshold)
{
    if (!(probe(lo) <= eps) || !(probe(hi) > eps)) {
        std::ostringstream msg;
        msg << "no onset of concurrence in [" << lo << ", " << hi << "]";
        throw NumericalError(msg.str());
    }
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        (probe(mid) > eps ? hi : lo) = mid;
    }
    return hi;
}

struct EntangledWindow {
    double tau_c = 0.0;          // largest tau with concurrence above threshold
    std::vector<double> taus;    // scan grid
    std::vector<double> values;  // probe on the scan grid
};

// Coarse scan over `grid`, then bisection between the last entangled grid
// point and its successor.
inline EntangledWindow estimate_tau_c(const ConcurrenceProbe& probe,
                                      const std::vector<double>& grid, int iterations = 20,
                                      double eps = concurrence_threshold)
{
    if (grid.size() < 2 || !std::is_sorted(grid.begin(), grid.end())) {
        throw ConfigError("tau_c scan needs an ascending grid of >= 2 points");
    }
    EntangledWindow w;
    w.taus = grid;
    for (const double t : grid) {
        w.values.push_back(probe(t));
    }
    std::size_t last = grid.size();
    for (std::size_t i = grid.size(); i-- > 0;) {
        if (w.values[i] > eps) {
            last = i;
            break;
        }
    }
    if (last == grid.size()) {
        throw NumericalError("no entangled window: concurrence <= threshold on the whole scan");
    }
    if (last + 1 == grid.size()) {
        throw NumericalError("entangled window extends past the end of the scan grid");
    }
    double lo = grid[last], hi = grid[last + 1];
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        (probe(mid) > eps ? lo : hi) = mid;
    }
    w.tau_c = lo;
    return w;
}

// Minimum of ln n against ln tau by a parabola through the discrete minimum
// and its two neighbours.
inline double estimate_tau_opt(const std::vector<double>& tau, const std::vector<double>& n)
{
    if (tau.size() != n.size() || tau.size() < 3) {
        throw ConfigError("tau_opt needs >= 3 (tau, n) pairs");
    }
    const auto it = std::min_element(n.begin(), n.end());
    const auto i = static_cast<std::size_t>(it - n.begin());
    if (i == 0 || i + 1 == n.size()) {
        throw NumericalError("defect density has no interior minimum over the scan");
    }
    const double x0 = std::log(tau[i - 1]), x1 = std::log(tau[i]), x2 = std::log(tau[i + 1]);
    const double y0 = std::log(n[i - 1]), y1 = std::log(n[i]), y2 = std::log(n[i + 1]);
    // vertex of the interpolating parabola
    const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if (den == 0.0) {
        return tau[i];
    }
    return std::exp(x1 - 0.5 * num / den);
}

inline double max_value(const std::vector<double>& y)
{
    if (y.empty()) {
        throw ConfigError("maximum of an empty series");
    }
    return *std::max_element(y.begin(), y.end());
}

}  // namespace quenchlab
