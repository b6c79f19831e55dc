#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ascension::quad {

namespace detail {

// one 31-point Kronrod panel; Boost reports the error in [-1, 1] units, so rescale it
template <class F>
double gk_panel(F& f, double a, double b, double& err, double& L1) {
    using gk = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double r = gk::integrate(f, a, b, 0, 0.0, &err, &L1);
    err *= 0.5 * (b - a);
    return r;
}

template <class F>
double gk_bisect(F& f, double a, double b, double abs_tol, unsigned depth) {
    double err = 0, L1 = 0;
    const double r = gk_panel(f, a, b, err, L1);
    if (depth == 0 || err <= abs_tol) return r;
    const double mid = 0.5 * (a + b);
    return gk_bisect(f, a, mid, abs_tol / 2, depth - 1) + gk_bisect(f, mid, b, abs_tol / 2, depth - 1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod (15/31 nested Gauss-Legendre pair) with interval bisection.
// The tolerance is relative to the L1 norm of f over [a, b], so integrands that
// vanish or cancel do not force bisection down to max_depth.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-13, unsigned max_depth = 15) {
    if (a == b) return 0.0;
    if (b < a) return -integrate(f, b, a, tol, max_depth);
    double err = 0, L1 = 0;
    const double r = detail::gk_panel(f, a, b, err, L1);
    const double abs_tol = tol * L1;
    if (max_depth == 0 || err <= abs_tol) return r;
    const double mid = 0.5 * (a + b);
    return detail::gk_bisect(f, a, mid, abs_tol / 2, max_depth - 1) +
           detail::gk_bisect(f, mid, b, abs_tol / 2, max_depth - 1);
}

template <class T>
struct kahan {
    T sum{};
    T c{};
    void add(T x) {
        T y = x - c;
        T t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    T value() const { return sum; }
};

struct nodes {
    std::vector<double> x;
    std::vector<double> w;
};

// Composite 20-point Gauss-Legendre on [a, b] split into `panels` equal pieces.
inline nodes composite_gauss(double a, double b, std::size_t panels) {
    using gl = boost::math::quadrature::gauss<double, 20>;
    const auto& abs = gl::abscissa();
    const auto& wts = gl::weights();
    nodes out;
    out.x.reserve(panels * 20);
    out.w.reserve(panels * 20);
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        const double mid = lo + h / 2;
        const double half = h / 2;
        // abscissae are the 10 nonnegative nodes; mirror them
        for (std::size_t k = abs.size(); k-- > 0;) {
            out.x.push_back(mid - half * abs[k]);
            out.w.push_back(half * wts[k]);
        }
        for (std::size_t k = 0; k < abs.size(); ++k) {
            out.x.push_back(mid + half * abs[k]);
            out.w.push_back(half * wts[k]);
        }
    }
    return out;
}

}  // namespace ascension::quad
