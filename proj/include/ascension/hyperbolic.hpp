#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

#include "errors.hpp"
#include "ode.hpp"

namespace ascension {

using cplx = std::complex<double>;

struct HPoint {
    double x = 0;
    double y = 1;

    cplx z() const { return {x, y}; }
    static HPoint from(cplx z) { return {z.real(), z.imag()}; }
};

// (a b; c d) acting by z -> (az+b)/(cz+d). Also used as the frame-bundle
// representative of a unit tangent vector: M <-> (M(i), M'(i)*up).
struct MobiusMap {
    double a = 1, b = 0, c = 0, d = 1;

    double det() const { return a * d - b * c; }

    MobiusMap operator*(const MobiusMap& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }

    MobiusMap inverse() const { return {d, -b, -c, a}; }

    MobiusMap normalized() const {
        const double s = std::sqrt(det());
        return {a / s, b / s, c / s, d / s};
    }

    cplx apply(cplx z) const { return (a * z + b) / (c * z + d); }

    // derivative of the Mobius map at z
    cplx derivative(cplx z) const {
        const cplx q = c * z + d;
        return 1.0 / (q * q);
    }

    static MobiusMap identity() { return {}; }
};

inline double max_entry_diff(const MobiusMap& p, const MobiusMap& q) {
    return std::max({std::abs(p.a - q.a), std::abs(p.b - q.b), std::abs(p.c - q.c), std::abs(p.d - q.d)});
}

// distance in PSL(2,R): min over the sign ambiguity
inline double psl_distance(const MobiusMap& p, const MobiusMap& q) {
    const MobiusMap mq{-q.a, -q.b, -q.c, -q.d};
    return std::min(max_entry_diff(p, q), max_entry_diff(p, mq));
}

inline void check_isometry(const MobiusMap& m) {
    if (!(std::abs(m.det() - 1.0) <= 1e-9)) throw invalid_isometry("Mobius map with det != 1");
}

inline HPoint mobius_apply(const MobiusMap& m, const HPoint& p) {
    check_isometry(m);
    return HPoint::from(m.apply(p.z()));
}

inline double hyperbolic_distance(const HPoint& p, const HPoint& q) {
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    const double arg = (dx * dx + dy * dy) / (2.0 * p.y * q.y);
    // acosh(1+u) written to keep precision for small u
    return std::log1p(arg + std::sqrt(arg * (arg + 2.0)));
}

struct TangentVec {
    HPoint base;
    double vx = 0;
    double vy = 0;

    double length() const { return std::hypot(vx, vy) / base.y; }
    cplx v() const { return {vx, vy}; }
};

struct CotangentPt {
    HPoint base;
    double xi1 = 0;
    double xi2 = 0;
};

struct CylPoint {
    double beta = 0;
    double sigma = 0;
};

// ---- one-parameter subgroups ----------------------------------------------

// exp(t X) for a traceless 2x2 matrix X
inline MobiusMap expm_traceless(const MobiusMap& X, double t) {
    const double q = -X.det();  // X^2 = q I
    double ch, sh;              // exp(tX) = ch I + sh X
    if (q > 1e-300) {
        const double r = std::sqrt(q);
        ch = std::cosh(r * t);
        sh = std::sinh(r * t) / r;
    } else if (q < -1e-300) {
        const double r = std::sqrt(-q);
        ch = std::cos(r * t);
        sh = std::sin(r * t) / r;
    } else {
        ch = 1.0;
        sh = t;
    }
    return {ch + sh * X.a, sh * X.b, sh * X.c, ch + sh * X.d};
}

namespace generators {
inline constexpr MobiusMap geodesic{0.5, 0.0, 0.0, -0.5};
// counterclockwise rotation at unit angular rate
inline constexpr MobiusMap rotation{0.0, 0.5, -0.5, 0.0};

// flow of a vector of speed r turning clockwise (to the right) with curvature kappa
inline MobiusMap curving(double r, double kappa) {
    return {r * 0.5, -r * kappa * 0.5, r * kappa * 0.5, -r * 0.5};
}

// field-B magnetic flow at speed r: r*G - B*R
inline MobiusMap magnetic(double r, double B) { return curving(r, B / r); }
}  // namespace generators

inline MobiusMap rotation_matrix(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return {c, s, -s, c};
}

inline MobiusMap diag_flow(double t) { return {std::exp(t / 2), 0.0, 0.0, std::exp(-t / 2)}; }

// ---- frames <-> tangent vectors ---------------------------------------------

struct Frame {
    MobiusMap g;       // unit-determinant representative
    double speed = 1;  // hyperbolic length of the vector
};

inline Frame frame_of(const TangentVec& v) {
    const double r = v.length();
    const double theta = (r > 0) ? std::atan2(-v.vx, v.vy) : 0.0;
    const double sy = std::sqrt(v.base.y);
    const MobiusMap p{sy, v.base.x / sy, 0.0, 1.0 / sy};
    return {p * rotation_matrix(theta), r};
}

inline TangentVec vector_of(const Frame& f) {
    const cplx i{0, 1};
    const MobiusMap& g = f.g;
    const cplx q = g.c * i + g.d;
    const cplx base = g.apply(i);
    const cplx v = f.speed * i / (q * q);
    return {HPoint::from(base), v.real(), v.imag()};
}

// ---- vector operations ------------------------------------------------------

inline TangentVec rotate(const TangentVec& v, double theta) {
    const cplx r = v.v() * std::polar(1.0, theta);
    return {v.base, r.real(), r.imag()};
}

inline TangentVec scale(const TangentVec& v, double c) { return {v.base, v.vx * c, v.vy * c}; }

inline TangentVec phi_B(const CotangentPt& p, double B) {
    const double y = p.base.y;
    return {p.base, y * y * p.xi1 - B * y, y * y * p.xi2};
}

inline CotangentPt phi_B_inv(const TangentVec& v, double B) {
    const double y = v.base.y;
    return {v.base, (v.vx + B * y) / (y * y), v.vy / (y * y)};
}

inline double hamiltonian(const CotangentPt& p, double B) {
    const double y = p.base.y;
    const double u = y * p.xi1 - B;
    const double w = y * p.xi2;
    return 0.5 * (u * u + w * w);
}

// ---- closed-form flows ------------------------------------------------------

inline TangentVec flow_by(const TangentVec& v, const MobiusMap& X, double t) {
    if (t == 0) return v;  // skip the frame round trip
    Frame f = frame_of(v);
    f.g = f.g * expm_traceless(X, t);
    return vector_of(f);
}

inline TangentVec geodesic_flow(const TangentVec& v, double t) {
    const double r = v.length();
    if (!(r > 0)) throw domain_error("geodesic flow needs a nonzero vector");
    return flow_by(v, generators::magnetic(r, 0.0), t);
}

inline TangentVec hypercyclic_flow(const TangentVec& v, double B, double t) {
    const double r = std::sqrt(B * B + 1);
    if (!(std::abs(v.length() - r) <= 1e-8)) throw domain_error("hypercyclic flow needs |v| = sqrt(B^2+1)");
    return flow_by(v, generators::magnetic(r, B), t);
}

inline TangentVec horocyclic_flow(const TangentVec& v, double t) {
    if (!(std::abs(v.length() - 1.0) <= 1e-8)) throw domain_error("horocyclic flow needs |v| = 1");
    return flow_by(v, generators::curving(1.0, 1.0), t);
}

// Sc_{sqrt(B^2+1)} R_{-pi/2} h0_{ln(B+sqrt(B^2+1))} R_{pi/2}: shift by
// asinh(B) along the left normal, so that T_B h0_t = h^B_t T_B with h^B the
// right-curving flow of H_B. The mirrored composition (shift to the right)
// conjugates h0 to h^{-B} instead.
inline TangentVec transport_T_B(const TangentVec& v, double B) {
    if (!(std::abs(v.length() - 1.0) <= 1e-8)) throw domain_error("T_B needs a unit vector");
    TangentVec w = rotate(v, std::numbers::pi / 2);
    w = geodesic_flow(w, std::asinh(B));
    w = rotate(w, -std::numbers::pi / 2);
    return scale(w, std::sqrt(B * B + 1));
}

// ---- magnetic Hamiltonian flow, integrated numerically ----------------------

inline CotangentPt flow_hamiltonian(const CotangentPt& p, double B, double t, double tol = 1e-10) {
    if (!(tol > 0)) throw domain_error("tolerance must be positive");
    if (t == 0) return p;
    ode::state<4> s{p.base.x, p.base.y, p.xi1, p.xi2};
    auto rhs = [B](const ode::state<4>& q, ode::state<4>& dq, double) {
        const double y = q[1], x1 = q[2], x2 = q[3];
        const double u = y * x1 - B;
        dq[0] = y * u;
        dq[1] = y * y * x2;
        dq[2] = 0.0;
        dq[3] = -(u * x1 + y * x2 * x2);
    };
    const double times[1] = {t};
    ode::options opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-3;
    ode::integrate_to<4>(rhs, s, 0.0, times, opt, [](std::size_t, double, const ode::state<4>&) {});
    return {{s[0], s[1]}, s[2], s[3]};
}

// ---- cylinder coordinates z = i exp(sigma - i beta) -------------------------

inline HPoint cyl_to_halfplane(const CylPoint& c) {
    if (!(std::abs(c.beta) < std::numbers::pi / 2)) throw domain_error("beta outside (-pi/2, pi/2)");
    const double r = std::exp(c.sigma);
    return {r * std::sin(c.beta), r * std::cos(c.beta)};
}

inline CylPoint halfplane_to_cyl(const HPoint& p) {
    return {std::atan2(p.x, p.y), 0.5 * std::log(p.x * p.x + p.y * p.y)};
}

// ---- geodesic curvature of a sampled curve ----------------------------------

// Signed geodesic curvature (positive = turning left) from 4th-order central
// differences of a parametrized curve; uses k_g = y k_e + x'/|z'| for the
// conformal factor 1/y.
template <class Curve>
double geodesic_curvature(Curve&& curve, double t, double h = 1e-3) {
    const HPoint m2 = curve(t - 2 * h), m1 = curve(t - h), p0 = curve(t), p1 = curve(t + h), p2 = curve(t + 2 * h);
    const double dx = (m2.x - 8 * m1.x + 8 * p1.x - p2.x) / (12 * h);
    const double dy = (m2.y - 8 * m1.y + 8 * p1.y - p2.y) / (12 * h);
    const double ddx = (-m2.x + 16 * m1.x - 30 * p0.x + 16 * p1.x - p2.x) / (12 * h * h);
    const double ddy = (-m2.y + 16 * m1.y - 30 * p0.y + 16 * p1.y - p2.y) / (12 * h * h);
    const double sp = std::hypot(dx, dy);
    const double ke = (dx * ddy - dy * ddx) / (sp * sp * sp);
    return p0.y * ke + dx / sp;
}

template <class Curve>
double hyperbolic_speed(Curve&& curve, double t, double h = 1e-3) {
    const HPoint m2 = curve(t - 2 * h), m1 = curve(t - h), p0 = curve(t), p1 = curve(t + h), p2 = curve(t + 2 * h);
    const double dx = (m2.x - 8 * m1.x + 8 * p1.x - p2.x) / (12 * h);
    const double dy = (m2.y - 8 * m1.y + 8 * p1.y - p2.y) / (12 * h);
    return std::hypot(dx, dy) / p0.y;
}

}  // namespace ascension
