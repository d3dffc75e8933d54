#ifndef NLC_FIT_HPP
#define NLC_FIT_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

namespace nlc {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;  // max |y_i - (a + b x_i)|
    double range = 0.0;         // max y - min y
};

/// Ordinary least squares y ~ intercept + slope x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 paired samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    f.range = *hi - *lo;
    for (std::size_t i = 0; i < x.size(); ++i) {
        f.max_residual = std::max(f.max_residual, std::abs(y[i] - f.intercept - f.slope * x[i]));
    }
    return f;
}

struct EnvelopeFit {
    double kappa = 0.0;
    double offset = 0.0;  // C
    double rms = 0.0;
    bool flat = false;    // trace constant, kappa undetermined
};

/** Least-squares fit of E(t) ~ E(0) exp(-kappa t) + C with kappa >= 0.
 *
 * For fixed kappa the optimal C is the mean of E - E(0) exp(-kappa t), so
 * the problem reduces to one dimension in kappa: a log-spaced scan seeded
 * at kappa = 1 followed by golden-section refinement.
 */
inline EnvelopeFit fit_envelope(std::span<const double> t, std::span<const double> e)
{
    if (t.size() != e.size() || t.size() < 3) throw std::invalid_argument("fit_envelope: need >= 3 samples");
    const double e0 = e[0];
    const double n = static_cast<double>(t.size());

    auto offset_for = [&](double kappa) {
        double s = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) s += e[i] - e0 * std::exp(-kappa * (t[i] - t[0]));
        return s / n;
    };
    auto cost = [&](double kappa) {
        const double c = offset_for(kappa);
        double s = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double r = e[i] - e0 * std::exp(-kappa * (t[i] - t[0])) - c;
            s += r * r;
        }
        return s;
    };

    EnvelopeFit fit;
    const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
    if (*hi - *lo <= 1e-14 * std::max(1.0, std::abs(*hi))) {
        fit.flat = true;
        fit.kappa = 1.0;
        fit.offset = offset_for(1.0);
        return fit;
    }

    // scan log10(kappa) in [-4, 6], starting from the kappa = 1 guess
    double best_log = 0.0;
    double best = cost(1.0);
    const int samples = 201;
    for (int i = 0; i < samples; ++i) {
        const double lk = -4.0 + 10.0 * i / (samples - 1);
        const double c = cost(std::pow(10.0, lk));
        if (c < best) {
            best = c;
            best_log = lk;
        }
    }
    const double step = 10.0 / (samples - 1);
    double a = best_log - step, b = best_log + step;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = cost(std::pow(10.0, x1)), f2 = cost(std::pow(10.0, x2));
    for (int it = 0; it < 100; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = cost(std::pow(10.0, x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = cost(std::pow(10.0, x2));
        }
    }
    double lk = 0.5 * (a + b);
    if (cost(std::pow(10.0, lk)) > best) lk = best_log;
    fit.kappa = std::pow(10.0, lk);
    // boundary of the constraint: a non-decaying trace fits best at kappa = 0
    if (cost(0.0) <= cost(fit.kappa)) fit.kappa = 0.0;
    fit.offset = offset_for(fit.kappa);
    fit.rms = std::sqrt(cost(fit.kappa) / n);
    return fit;
}

} // namespace nlc

#endif // NLC_FIT_HPP
