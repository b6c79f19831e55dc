#pragma once

#include <array>
#include <cmath>
#include <span>

#include <boost/numeric/odeint.hpp>

#include "errors.hpp"

namespace ascension::ode {

template <std::size_t N>
using state = std::array<double, N>;

struct options {
    double rtol = 1e-11;
    double atol = 1e-14;
    double h0 = 1e-3;
    std::size_t max_steps = 50'000'000;
};

// Adaptive Runge-Kutta-Fehlberg 7(8). Integrates x from t0 through every entry of
// `times` (monotone, all on the same side of t0) and calls obs(i, t_i, x) at each.
// Steps are clipped so every requested time is hit exactly.
template <std::size_t N, class Rhs, class Obs>
void integrate_to(Rhs&& rhs, state<N>& x, double t0, std::span<const double> times, const options& opt,
                  Obs&& obs) {
    namespace oi = boost::numeric::odeint;
    using stepper_t = oi::runge_kutta_fehlberg78<state<N>>;
    auto stepper = oi::make_controlled(opt.atol, opt.rtol, stepper_t());

    auto sys = [&](const state<N>& s, state<N>& ds, double t) { rhs(s, ds, t); };

    double t = t0;
    double dir = 0;
    for (double ti : times) {
        if (ti != t0) {
            dir = ti > t0 ? 1.0 : -1.0;
            break;
        }
    }
    double h = dir * opt.h0;
    std::size_t steps = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double target = times[i];
        while ((target - t) * dir > 0) {
            double dt = h;
            bool clipped = false;
            if ((t + dt - target) * dir >= 0) {
                dt = target - t;
                clipped = true;
            }
            // try_step advances t and rewrites dt with the next suggestion
            auto res = stepper.try_step(sys, x, t, dt);
            if (res == oi::success) {
                if (clipped) {
                    t = target;
                } else {
                    h = dt;
                }
            } else {
                h = dt;
            }
            if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t))) {
                throw integration_error("step size underflow", t);
            }
            if (++steps > opt.max_steps) throw integration_error("step budget exhausted", t);
        }
        t = target;
        obs(i, t, x);
    }
}

}  // namespace ascension::ode
