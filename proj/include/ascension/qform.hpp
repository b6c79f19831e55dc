#pragma once

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "quadrature.hpp"

namespace ascension {

// Q_{B,m}(beta) = 2 B m tan(beta) - m^2 + 1/cos^2(beta) + B^2
inline double Q(double B, double m, double beta) {
    const double c = std::cos(beta);
    return 2 * B * m * std::tan(beta) - m * m + 1.0 / (c * c) + B * B;
}

inline double Q_prime(double B, double m, double beta) {
    const double c = std::cos(beta);
    return (2 * B * m + 2 * std::tan(beta)) / (c * c);
}

// beta = gd(t) maps the real line onto (-pi/2, pi/2); sin = tanh t, cos = sech t
inline double gd(double t) { return std::atan(std::sinh(t)); }
inline double gd_inv(double beta) { return std::asinh(std::tan(beta)); }

// Q cos^2(beta) written in t = gd^-1(beta); bounded, tends to 1 at both ends
inline double qhat(double B, double m, double t) {
    const double sech = 1.0 / std::cosh(t), th = std::tanh(t);
    return 1.0 + 2 * B * m * th * sech + (B * B - m * m) * sech * sech;
}

// integral of sqrt(Q) from 0 to beta (= integral of sqrt(qhat) dt)
inline double int_sqrtQ(double B, double m, double beta) {
    if (!(std::abs(beta) < std::numbers::pi / 2)) throw domain_error("beta outside (-pi/2, pi/2)");
    const double T = gd_inv(beta);
    return quad::integrate([&](double t) { return std::sqrt(qhat(B, m, t)); }, 0.0, T);
}

}  // namespace ascension
