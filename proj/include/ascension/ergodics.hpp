#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fuchsian.hpp"
#include "hyperbolic.hpp"
#include "profiles.hpp"
#include "quadrature.hpp"

namespace ascension {

enum class FlowKind { geodesic, hypercyclic, horocyclic };

struct FlowSpec {
    FlowKind kind = FlowKind::geodesic;
    double B = 0;  // hypercyclic only

    static FlowSpec geodesic() { return {FlowKind::geodesic, 0}; }
    static FlowSpec hypercyclic(double B) { return {FlowKind::hypercyclic, B}; }
    static FlowSpec horocyclic() { return {FlowKind::horocyclic, 0}; }

    double speed() const { return kind == FlowKind::hypercyclic ? std::sqrt(B * B + 1) : 1.0; }

    MobiusMap generator() const {
        switch (kind) {
            case FlowKind::geodesic: return generators::magnetic(1.0, 0.0);
            case FlowKind::hypercyclic: return generators::magnetic(speed(), B);
            case FlowKind::horocyclic: return generators::curving(1.0, 1.0);
        }
        return {};
    }

    std::string name() const {
        switch (kind) {
            case FlowKind::geodesic: return "geodesic";
            case FlowKind::hypercyclic: return "hypercyclic";
            case FlowKind::horocyclic: return "horocyclic";
        }
        return "";
    }
};

// isometry acting on a tangent vector
inline TangentVec push_forward(const MobiusMap& m, const TangentVec& v) {
    check_isometry(m);
    Frame f = frame_of(v);
    f.g = m * f.g;
    return vector_of(f);
}

// direction of v, counterclockwise from "up"; the same angle frame_of uses
inline double direction_angle(const TangentVec& v) { return std::atan2(-v.vx, v.vy); }

inline bool in_domain(const HPoint& p, const FuchsianGroup& g, double rel = 1e-12) {
    const double d = cosh_distance_to_i(p);
    for (const auto& m : g.pairings)
        if (cosh_distance_to_i(HPoint::from(m.apply(p.z()))) < d * (1 - rel)) return false;
    return true;
}

// Steps the frame by right multiplication with exp(step X) and folds the base
// point back into the fundamental domain after every step. Lengths and steps
// are flow times; the initial vector is a unit vector, rescaled to the speed of
// the flow. visit(k, frame) sees samples k = 0 .. n-1.
template <class Visit>
void walk_orbit(const FlowSpec& flow, const TangentVec& v0, const FuchsianGroup& group, double step, std::size_t n,
                Visit&& visit) {
    if (!(std::abs(v0.length() - 1.0) <= 1e-8)) throw domain_error("orbit needs a unit initial vector");
    if (!(step > 0)) throw domain_error("orbit step must be positive");
    Frame f = frame_of(v0);
    f.speed = flow.speed();
    const MobiusMap E = expm_traceless(flow.generator(), step);
    auto fold = [&] {
        const auto r = reduce_to_domain(HPoint::from(f.g.apply({0, 1})), group);
        f.g = r.map.inverse() * f.g;
    };
    fold();
    for (std::size_t k = 0; k < n; ++k) {
        visit(k, static_cast<const Frame&>(f));
        f.g = f.g * E;
        fold();
        if ((k + 1) % 1000 == 0) f.g = f.g.normalized();
    }
}

struct OrbitSample {
    FlowSpec flow;
    TangentVec initial;
    double step = 1e-2;
    double length = 0;
    std::vector<TangentVec> samples;  // reduced, at flow times k * step
};

inline std::size_t step_count(double length, double step) {
    if (!(length > 0)) throw domain_error("orbit length must be positive");
    if (!(step > 0)) throw domain_error("orbit step must be positive");
    return static_cast<std::size_t>(std::llround(length / step));
}

inline OrbitSample sample_orbit(const FlowSpec& flow, const TangentVec& v0, double length, double step = 1e-2,
                                const FuchsianGroup& group = octagon_group()) {
    OrbitSample o{flow, v0, step, length, {}};
    const std::size_t n = step_count(length, step);
    o.samples.reserve(n);
    walk_orbit(flow, v0, group, step, n, [&](std::size_t, const Frame& f) { o.samples.push_back(vector_of(f)); });
    return o;
}

// observable on the unit tangent bundle: base point in the domain and direction angle
using SurfaceFn = std::function<double(const HPoint&, double)>;

inline double birkhoff_average(const OrbitSample& o, const SurfaceFn& f) {
    if (o.samples.empty()) throw domain_error("empty orbit");
    quad::kahan<double> sum;
    for (const auto& v : o.samples) sum.add(f(v.base, direction_angle(v)));
    return sum.value() / static_cast<double>(o.samples.size());
}

// integral over the octagon of f dA, polar coordinates about i, 16 angular
// panels split at the sides and vertices
template <class F>
double octagon_integral(F&& f, double tol = 1e-10) {
    double total = 0;
    for (int j = 0; j < 16; ++j) {
        const double lo = j * std::numbers::pi / 8, hi = lo + std::numbers::pi / 8;
        total += quad::integrate(
            [&](double psi) {
                return quad::integrate(
                    [&](double rho) { return f(octagon::polar_point(rho, psi)) * std::sinh(rho); }, 0.0,
                    octagon::boundary_distance(psi), tol);
            },
            lo, hi, tol);
    }
    return total;
}

struct TestObservable {
    std::string name;
    SurfaceFn f;
    double mean = 0;      // Liouville mean
    double abs_mean = 0;  // Liouville mean of |f|, sets the scale of the error
};

inline double relative_error(const TestObservable& o, double average) {
    return std::abs(average - o.mean) / o.abs_mean;
}

// smooth radial bump of hyperbolic radius r about c, 1 within r/2
inline SurfaceFn radial_bump(HPoint c, double r) {
    return [c, r](const HPoint& p, double) { return bump(hyperbolic_distance(p, c) / (2 * r)); };
}

inline TestObservable bump_observable(std::string name, HPoint c, double r) {
    TestObservable o{std::move(name), radial_bump(c, r), 0, 0};
    const auto g = radial_bump(c, r);
    o.mean = octagon_integral([&](const HPoint& p) { return g(p, 0.0); }) / octagon_area();
    o.abs_mean = o.mean;
    return o;
}

// 8 spatial bumps on an interior grid (centre plus a ring) and 4 low harmonics
// of the direction angle, each weighted by a central bump so it is smooth on
// the surface. Every support stays inside the octagon, so no observable sees
// the side identifications.
inline std::vector<TestObservable> standard_family() {
    std::vector<TestObservable> fam;
    const double ring = 0.75, r = 0.7, rc = 1.2;
    fam.push_back(bump_observable("bump_0", {0, 1}, r));
    for (int k = 0; k < 7; ++k) {
        const HPoint c = octagon::polar_point(ring, 0.3 + 2 * std::numbers::pi * k / 7);
        fam.push_back(bump_observable("bump_" + std::to_string(k + 1), c, r));
    }
    const auto w = radial_bump({0, 1}, rc);
    const double wmean = octagon_integral([&](const HPoint& p) { return w(p, 0.0); }) / octagon_area();
    // mean of |cos k theta| over the circle is 2/pi
    const int harm[4] = {1, 1, 2, 2};
    for (int j = 0; j < 4; ++j) {
        const int k = harm[j];
        const bool c = j % 2 == 0;
        SurfaceFn f = [w, k, c](const HPoint& p, double th) { return w(p, th) * (c ? std::cos(k * th) : std::sin(k * th)); };
        fam.push_back({std::string(c ? "cos" : "sin") + std::to_string(k), f, 0.0, wmean * 2 / std::numbers::pi});
    }
    return fam;
}

// fixed generic starting vector: first draw of a seeded generator, base point
// within 0.5 of the centre
inline TangentVec standard_initial_vector(std::uint64_t seed = 4242) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(0, 1);
    const double rho = 0.5 * u(g), psi = 2 * std::numbers::pi * u(g), th = 2 * std::numbers::pi * u(g);
    const HPoint p = octagon::polar_point(rho, psi);
    return {p, -std::sin(th) * p.y, std::cos(th) * p.y};
}

inline std::vector<TestObservable> constant_family() {
    return {{"one", [](const HPoint&, double) { return 1.0; }, 1.0, 1.0}};
}

struct SeriesPoint {
    double length = 0;
    double discrepancy = 0;      // max relative error
    double abs_discrepancy = 0;  // max |average - mean|
    std::vector<double> errors;  // relative, per observable
};

// one orbit up to the last length; discrepancies of its initial segments
inline std::vector<SeriesPoint> equidistribution_series(const FlowSpec& flow, const TangentVec& v0,
                                                        const std::vector<double>& lengths,
                                                        const std::vector<TestObservable>& family, double step = 1e-2,
                                                        const FuchsianGroup& group = octagon_group()) {
    if (lengths.empty()) throw domain_error("no lengths given");
    for (std::size_t k = 1; k < lengths.size(); ++k)
        if (!(lengths[k] > lengths[k - 1])) throw domain_error("lengths must be increasing");
    std::vector<std::size_t> marks;
    for (double L : lengths) marks.push_back(step_count(L, step));
    std::vector<quad::kahan<double>> sums(family.size());
    std::vector<SeriesPoint> out;
    std::size_t next = 0;
    walk_orbit(flow, v0, group, step, marks.back(), [&](std::size_t k, const Frame& f) {
        const TangentVec v = vector_of(f);
        const double th = direction_angle(v);
        for (std::size_t j = 0; j < family.size(); ++j) sums[j].add(family[j].f(v.base, th));
        while (next < marks.size() && k + 1 == marks[next]) {
            SeriesPoint pt{lengths[next], 0, 0, {}};
            for (std::size_t j = 0; j < family.size(); ++j) {
                const double avg = sums[j].value() / static_cast<double>(k + 1);
                const double e = relative_error(family[j], avg);
                pt.errors.push_back(e);
                pt.discrepancy = std::max(pt.discrepancy, e);
                pt.abs_discrepancy = std::max(pt.abs_discrepancy, std::abs(avg - family[j].mean));
            }
            out.push_back(std::move(pt));
            ++next;
        }
    });
    return out;
}

// The B-hypercycle equidistant from the geodesic of v0, built as the base point
// of h0_{asinh B} R_{pi/2}(gamma0'(t)), against the orbit of T_B(v0) under the
// hypercyclic flow. Both run at speed sqrt(B^2+1), so the flow times agree with
// the arclength parametrization up to the common factor. Returns the largest
// base-point distance over n+1 equally spaced times in [0, arc_length].
inline double tb_shift_check(const TangentVec& v0, double B, double arc_length, int n = 1000) {
    if (!(std::abs(v0.length() - 1.0) <= 1e-8)) throw domain_error("tb_shift_check needs a unit vector");
    const double r = std::sqrt(B * B + 1);
    const TangentVec w0 = transport_T_B(v0, B);
    double dev = 0;
    for (int k = 0; k <= n; ++k) {
        const double s = arc_length * k / n;  // arclength on the equidistant curve
        const double t = s / r;               // the underlying geodesic time
        const TangentVec g = geodesic_flow(v0, t);
        const HPoint a = geodesic_flow(rotate(g, std::numbers::pi / 2), std::asinh(B)).base;
        const HPoint b = hypercyclic_flow(w0, B, t).base;
        dev = std::max(dev, hyperbolic_distance(a, b));
    }
    return dev;
}

}  // namespace ascension
