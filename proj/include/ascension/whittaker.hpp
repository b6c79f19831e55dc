#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "errors.hpp"
#include "ode.hpp"

namespace ascension {

struct WhittakerParams {
    int tau = 0;     // first index kappa
    double s1 = 0;   // second index is i s1
    double a = 1;    // frequency; argument is 2 a y
};

// value and y-derivative of W_{tau, i s1}(2 a y), both as exp(log_scale) * (w, dw)
struct WhittakerValue {
    double y = 0;
    double log_scale = 0;
    double w = 0;
    double dw = 0;

    double value() const { return std::exp(log_scale) * w; }
    double derivative() const { return std::exp(log_scale) * dw; }
};

namespace whittaker_detail {

// x where the asymptotic series is started: the term ratio stays below ~1/8 there
inline double seed_point(const WhittakerParams& p) {
    const double k = p.tau + 0.5;
    return 8.0 * (p.s1 * p.s1 + k * k) + 200.0;
}

// W ~ e^{-x/2} x^kappa sum t_n, t_n = t_{n-1} ((n - 1/2 - kappa)^2 + s1^2) / (-n x)
// returns (log scale, S, dS/dx relative to the scale incl. the prefactor derivative)
struct Seed {
    double x, log_scale, w, dw;
};

inline Seed asymptotic_seed(const WhittakerParams& p, double x) {
    double S = 1, dS = 0, t = 1;
    for (int n = 1; n < 200; ++n) {
        const double h = n - 0.5 - p.tau;
        t *= (h * h + p.s1 * p.s1) / (-n * x);
        S += t;
        dS += -n * t / x;
        if (std::abs(t) < 1e-18 * std::abs(S)) break;
        if (n == 199) throw domain_error("Whittaker seed: asymptotic series did not converge");
    }
    const double L = -0.5 * x + p.tau * std::log(x);
    return {x, L, S, (-0.5 + p.tau / x) * S + dS};
}

}  // namespace whittaker_detail

// W_{tau, i s1}(2 a y) and its y-derivative at every y in ys (any order), by
// inward integration of W'' = (1/4 - kappa/x - (1/4 + s1^2)/x^2) W in x = 2 a y,
// renormalizing the state and carrying the logarithm of the scale.
inline std::vector<WhittakerValue> whittaker_eval(const WhittakerParams& p, std::vector<double> ys,
                                                  double rtol = 1e-13) {
    if (!(p.a > 0)) throw domain_error("Whittaker frequency a must be positive");
    for (double y : ys)
        if (!(y > 0)) throw domain_error("Whittaker argument must be positive");
    const double x0 = whittaker_detail::seed_point(p);
    for (double y : ys)
        if (2 * p.a * y > x0) throw domain_error("argument beyond the asymptotic seed point");

    std::vector<std::size_t> order(ys.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return ys[i] > ys[j]; });

    const auto seed = whittaker_detail::asymptotic_seed(p, x0);
    double L = seed.log_scale;
    ode::state<2> st{seed.w, seed.dw};
    const double kap = p.tau, c2 = 0.25 + p.s1 * p.s1;
    auto rhs = [&](const ode::state<2>& q, ode::state<2>& dq, double x) {
        dq[0] = q[1];
        dq[1] = (0.25 - kap / x - c2 / (x * x)) * q[0];
    };
    ode::options opt;
    opt.rtol = rtol;
    opt.atol = 1e-30;
    opt.h0 = 1.0;

    std::vector<WhittakerValue> out(ys.size());
    double x = x0;
    const double chunk = 20.0;  // renormalize at least this often (e^{10} growth)
    for (std::size_t idx : order) {
        const double target = 2 * p.a * ys[idx];
        while (x > target) {
            const double next = std::max(target, x - chunk);
            const double times[1] = {next};
            ode::integrate_to<2>(rhs, st, x, times, opt, [](std::size_t, double, const ode::state<2>&) {});
            x = next;
            const double m = std::max(std::abs(st[0]), std::abs(st[1]));
            if (m > 0) {
                st[0] /= m;
                st[1] /= m;
                L += std::log(m);
            }
        }
        // dW/dy = 2a dW/dx
        out[idx] = {ys[idx], L, st[0], 2 * p.a * st[1]};
    }
    return out;
}

inline double whittaker_W(const WhittakerParams& p, double y) { return whittaker_eval(p, {y}).front().value(); }

struct Peak {
    double abscissa;
    double ordinate;  // |W| at the peak
};

// local maxima of |W| in [ylo, yhi]: grid scan, then Brent refinement (golden
// section with parabolic steps) to 1e-6 in y
inline std::vector<Peak> whittaker_peaks(const WhittakerParams& p, double ylo, double yhi, double scale = 1.0,
                                         double step = 2e-3) {
    if (!(yhi > ylo)) throw domain_error("empty peak range");
    const auto n = static_cast<std::size_t>(std::ceil((yhi - ylo) / step)) + 1;
    std::vector<double> ys(n);
    for (std::size_t k = 0; k < n; ++k) ys[k] = ylo + (yhi - ylo) * static_cast<double>(k) / static_cast<double>(n - 1);
    const auto vals = whittaker_eval(p, ys);
    std::vector<Peak> peaks;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double a = std::abs(vals[k - 1].value()), b = std::abs(vals[k].value()), c = std::abs(vals[k + 1].value());
        if (!(b > a && b >= c)) continue;
        auto f = [&](double y) { return -std::abs(whittaker_W(p, y)); };
        // 2^-24 relative in y is well below 1e-6 here
        const auto r = boost::math::tools::brent_find_minima(f, ys[k - 1], ys[k + 1], 24);
        peaks.push_back({r.first, -r.second * scale});
    }
    return peaks;
}

inline Peak highest_peak(const std::vector<Peak>& peaks) {
    if (peaks.empty()) throw domain_error("no peak in range");
    return *std::max_element(peaks.begin(), peaks.end(),
                             [](const Peak& a, const Peak& b) { return a.ordinate < b.ordinate; });
}

// normalization of the tau-th scaled wave: prod_{k<tau} sqrt(s1^2 + (k+1/2)^2)
inline double whittaker_ascension_norm(double s1, int tau) {
    double n = 1;
    for (int k = 0; k < tau; ++k) n *= std::sqrt(s1 * s1 + (k + 0.5) * (k + 0.5));
    return n;
}

}  // namespace ascension
