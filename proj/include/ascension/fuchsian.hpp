#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "hyperbolic.hpp"
#include "quadrature.hpp"

namespace ascension {

// ((cz+d)/(c zbar+d))^tau
inline cplx automorphy_factor(const MobiusMap& m, const HPoint& p, int tau) {
    if (tau == 0) return 1.0;
    const cplx z = p.z();
    const cplx r = (m.c * z + m.d) / (m.c * std::conj(z) + m.d);
    return std::polar(1.0, static_cast<double>(tau) * std::arg(r));
}

struct FuchsianGroup {
    enum class Kind { cylinder, octagon };

    Kind kind = Kind::cylinder;
    double l = 0;                       // neck length (cylinder)
    std::vector<MobiusMap> generators;  // free generators
    // side pairings; for the octagon pairing[j] maps side (j+4)%8 onto side j
    std::vector<MobiusMap> pairings;
    std::vector<HPoint> vertices;  // octagon vertices, vertex j between side j and side j+1
    HPoint center{0, 1};
};

inline FuchsianGroup cylinder_group(double l) {
    if (!(l > 0)) throw domain_error("neck length must be positive");
    FuchsianGroup g;
    g.kind = FuchsianGroup::Kind::cylinder;
    g.l = l;
    g.generators = {diag_flow(l)};
    g.pairings = {diag_flow(l), diag_flow(-l)};
    return g;
}

namespace octagon {

inline constexpr double side_angle = std::numbers::pi / 4;

// distance from the centre to the side midpoints: cosh d = cot(pi/8)
inline double midpoint_distance() { return std::acosh(1.0 + std::numbers::sqrt2); }

// distance from the centre to the vertices: cosh R = cot^2(pi/8)
inline double vertex_distance() { return std::acosh(3.0 + 2.0 * std::numbers::sqrt2); }

// point at distance rho from i in direction psi (measured counterclockwise from "up")
inline HPoint polar_point(double rho, double psi) {
    return HPoint::from((rotation_matrix(psi) * diag_flow(rho)).apply({0, 1}));
}

// hyperbolic distance from i to the boundary of the octagon along direction psi
inline double boundary_distance(double psi) {
    const double th = std::tanh(midpoint_distance());
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 8; ++j) {
        double a = std::remainder(psi - j * side_angle, 2 * std::numbers::pi);
        const double c = std::cos(a);
        if (c <= th) continue;
        best = std::min(best, std::atanh(th / c));
    }
    return best;
}

}  // namespace octagon

inline FuchsianGroup octagon_group() {
    FuchsianGroup g;
    g.kind = FuchsianGroup::Kind::octagon;
    const double t = 2 * octagon::midpoint_distance();
    for (int k = 0; k < 4; ++k) {
        const double th = k * octagon::side_angle;
        g.generators.push_back(rotation_matrix(th) * diag_flow(t) * rotation_matrix(-th));
    }
    g.pairings.resize(8);
    for (int k = 0; k < 4; ++k) {
        g.pairings[k] = g.generators[k];
        g.pairings[k + 4] = g.generators[k].inverse();
    }
    const double R = octagon::vertex_distance();
    for (int j = 0; j < 8; ++j) g.vertices.push_back(octagon::polar_point(R, (j + 0.5) * octagon::side_angle));
    return g;
}

// g0 g1^-1 g2 g3^-1 g0^-1 g1 g2^-1 g3
inline MobiusMap octagon_relator(const FuchsianGroup& g) {
    const auto& a = g.generators;
    return a[0] * a[1].inverse() * a[2] * a[3].inverse() * a[0].inverse() * a[1] * a[2].inverse() * a[3];
}

// area of the octagon in hyperbolic polar coordinates about its centre
inline double octagon_area() {
    double total = 0;
    for (int j = 0; j < 16; ++j) {
        const double lo = j * std::numbers::pi / 8, hi = lo + std::numbers::pi / 8;
        total += quad::integrate([](double psi) { return std::cosh(octagon::boundary_distance(psi)) - 1.0; }, lo, hi,
                                 1e-13);
    }
    return total;
}

inline double cosh_distance_to_i(const HPoint& p) { return (p.x * p.x + p.y * p.y + 1.0) / (2.0 * p.y); }

struct Reduction {
    HPoint point;
    MobiusMap map;  // map(point) == input
};

inline Reduction reduce_to_domain(const HPoint& z, const FuchsianGroup& g) {
    if (!(z.y > 0)) throw domain_error("point outside the upper half-plane");
    if (g.kind == FuchsianGroup::Kind::cylinder) {
        const CylPoint c = halfplane_to_cyl(z);
        const double n = std::floor(c.sigma / g.l);
        if (n == 0) return {z, MobiusMap::identity()};
        const HPoint r = cyl_to_halfplane({c.beta, c.sigma - n * g.l});
        return {r, diag_flow(n * g.l)};
    }
    HPoint cur = z;
    MobiusMap acc = MobiusMap::identity();  // acc(z) == cur
    double dcur = cosh_distance_to_i(cur);
    for (int step = 0;; ++step) {
        if (step >= 10000) throw reduction_error("reduction did not terminate");
        int best = -1;
        double dbest = dcur;
        HPoint pbest = cur;
        for (int j = 0; j < static_cast<int>(g.pairings.size()); ++j) {
            const HPoint q = HPoint::from(g.pairings[j].apply(cur.z()));
            const double dq = cosh_distance_to_i(q);
            if (dq < dbest * (1.0 - 1e-14)) {
                best = j;
                dbest = dq;
                pbest = q;
            }
        }
        if (best < 0) break;
        cur = pbest;
        dcur = dbest;
        acc = (g.pairings[best] * acc).normalized();
    }
    return {cur, acc.inverse()};
}

}  // namespace ascension
