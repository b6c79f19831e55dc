#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "hyperbolic.hpp"
#include "ode.hpp"
#include "qform.hpp"

namespace ascension {

enum class Branch { I, II };

// Sampled eigenwave exp(i m sigma) w(beta) of D^tau with eigenvalue s^2,
// tau = B1 s, m = mtilde s. Normalized by w(0) = 1 for the pure branches.
struct CylWave {
    double B1 = 0;
    double mtilde = 0;
    double s = 1;
    Branch branch = Branch::I;
    std::vector<double> grid;
    std::vector<cplx> values;
    std::vector<cplx> derivs;

    double tau() const { return B1 * s; }
    double m() const { return mtilde * s; }
};

// value and derivative at beta = 0
struct WaveData {
    cplx w;
    cplx dw;
};

inline WaveData initial_data(double B1, double mtilde, double s, Branch br) {
    const double q0 = Q(B1, mtilde, 0.0), qp0 = Q_prime(B1, mtilde, 0.0);
    const double sg = br == Branch::I ? 1.0 : -1.0;
    return {1.0, cplx(-qp0 / (4 * q0), B1 * s + sg * s * std::sqrt(q0))};
}

// w'' from the ODE: w'' = -s^2 Q w + 2 i tau w' + tau^2 w
inline cplx ode_second_derivative(double B1, double mtilde, double s, double beta, cplx w, cplx dw) {
    const double tau = B1 * s;
    return -s * s * Q(B1, mtilde, beta) * w + cplx(0, 2 * tau) * dw + tau * tau * w;
}

inline void check_grid(std::span<const double> grid) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(std::abs(grid[k]) < std::numbers::pi / 2)) throw domain_error("grid point outside (-pi/2, pi/2)");
        if (k > 0 && !(grid[k] > grid[k - 1])) throw domain_error("grid must be strictly increasing");
    }
}

// Integrates the Q-form (w e^{-i tau beta})'' + s^2 Q (w e^{-i tau beta}) = 0 from
// beta = 0 outwards to every grid point.
inline CylWave solve_wave_from(double B1, double mtilde, double s, WaveData at0, std::span<const double> grid,
                               double tol = 1e-11) {
    if (!(s > 0)) throw domain_error("s must be positive");
    if (!(tol > 0)) throw domain_error("tolerance must be positive");
    check_grid(grid);
    const double tau = B1 * s;
    CylWave out;
    out.B1 = B1;
    out.mtilde = mtilde;
    out.s = s;
    out.grid.assign(grid.begin(), grid.end());
    out.values.resize(grid.size());
    out.derivs.resize(grid.size());

    // g = w e^{-i tau beta}: state (Re g, Im g, Re g', Im g')
    const cplx g0 = at0.w, dg0 = at0.dw - cplx(0, tau) * at0.w;
    auto rhs = [&](const ode::state<4>& x, ode::state<4>& dx, double b) {
        const double k = -s * s * Q(B1, mtilde, b);
        dx[0] = x[2];
        dx[1] = x[3];
        dx[2] = k * x[0];
        dx[3] = k * x[1];
    };
    ode::options opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-2 * std::max(std::abs(g0), 1e-300);
    opt.h0 = 0.1 / (s * std::sqrt(Q(B1, mtilde, 0.0)) + 1.0);
    auto store = [&](std::size_t idx, double b, const ode::state<4>& x) {
        const cplx g(x[0], x[1]), dg(x[2], x[3]);
        const cplx e = std::polar(1.0, tau * b);
        out.values[idx] = g * e;
        out.derivs[idx] = (dg + cplx(0, tau) * g) * e;
    };

    std::size_t split = 0;
    while (split < grid.size() && grid[split] < 0) ++split;
    // negative part, integrated backwards
    if (split > 0) {
        std::vector<double> back(grid.rend() - static_cast<std::ptrdiff_t>(split), grid.rend());
        ode::state<4> x{g0.real(), g0.imag(), dg0.real(), dg0.imag()};
        ode::integrate_to<4>(rhs, x, 0.0, back, opt,
                             [&](std::size_t i, double b, const ode::state<4>& st) { store(split - 1 - i, b, st); });
    }
    if (split < grid.size()) {
        std::span<const double> fwd = grid.subspan(split);
        ode::state<4> x{g0.real(), g0.imag(), dg0.real(), dg0.imag()};
        ode::integrate_to<4>(rhs, x, 0.0, fwd, opt,
                             [&](std::size_t i, double b, const ode::state<4>& st) { store(split + i, b, st); });
    }
    return out;
}

inline CylWave solve_wave(double B1, double mtilde, double s, Branch br, std::span<const double> grid,
                          double tol = 1e-11) {
    if (!(std::abs(mtilde) <= 0.5)) throw domain_error("|mtilde| must be <= 1/2");
    CylWave w = solve_wave_from(B1, mtilde, s, initial_data(B1, mtilde, s, br), grid, tol);
    w.branch = br;
    return w;
}

inline std::vector<double> uniform_grid(double a, double b, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    return g;
}

// exp(i tau beta +- i s int sqrt(Q) - 1/4 ln(Q(beta)/Q(0)))
inline cplx wkb_eval(double B1, double mtilde, double s, Branch br, double beta) {
    if (beta == 0) return 1.0;
    const double sg = br == Branch::I ? 1.0 : -1.0;
    const double phase = B1 * s * beta + sg * s * int_sqrtQ(B1, mtilde, beta);
    const double amp = std::pow(Q(B1, mtilde, 0.0) / Q(B1, mtilde, beta), 0.25);
    return std::polar(amp, phase);
}

// ---- raising, lowering and D^tau in separated form --------------------------

inline double raising_norm(double s, double tau) { return std::sqrt(s * s + tau * (tau + 1)); }

// tau w + i cos(beta) e^{i beta} (m w + w')
inline cplx raise_point(double m, double tau, double beta, cplx w, cplx dw) {
    const cplx f = cplx(0, 1) * std::cos(beta) * std::polar(1.0, beta);
    return tau * w + f * (m * w + dw);
}

// derivative of the raised function; needs w''
inline cplx raise_point_derivative(double m, double tau, double beta, cplx w, cplx dw, cplx d2w) {
    const cplx f = cplx(0, 1) * std::cos(beta) * std::polar(1.0, beta);
    const cplx df = -std::polar(1.0, 2 * beta);  // d/dbeta of i cos e^{i beta}
    return tau * dw + df * (m * w + dw) + f * (m * dw + d2w);
}

inline std::vector<cplx> apply_raising(double m, double tau, std::span<const double> grid, std::span<const cplx> w,
                                       std::span<const cplx> dw, double norm = 1.0) {
    std::vector<cplx> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = raise_point(m, tau, grid[k], w[k], dw[k]) / norm;
    return out;
}

inline std::vector<cplx> apply_raising(const CylWave& w, bool normalized) {
    const double n = normalized ? raising_norm(w.s, w.tau()) : 1.0;
    return apply_raising(w.m(), w.tau(), w.grid, w.values, w.derivs, n);
}

// L_tau = conj K_{-tau} conj: -tau w - i cos(beta) e^{-i beta} (w' - m w)
inline std::vector<cplx> apply_lowering(double m, double tau, std::span<const double> grid, std::span<const cplx> w,
                                        std::span<const cplx> dw) {
    std::vector<cplx> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double b = grid[k];
        const cplx f = cplx(0, 1) * std::cos(b) * std::polar(1.0, -b);
        out[k] = -tau * w[k] - f * (dw[k] - m * w[k]);
    }
    return out;
}

// -cos^2 w'' + 2 i tau cos^2 w' + (m^2 cos^2 - 2 tau m sin cos) w
inline cplx D_tau_point(double m, double tau, double beta, cplx w, cplx dw, cplx d2w) {
    const double c = std::cos(beta), sn = std::sin(beta);
    return -c * c * d2w + cplx(0, 2 * tau * c * c) * dw + (m * m * c * c - 2 * tau * m * sn * c) * w;
}

inline std::vector<cplx> apply_D_tau(double m, double tau, std::span<const double> grid, std::span<const cplx> w,
                                     std::span<const cplx> dw, std::span<const cplx> d2w) {
    std::vector<cplx> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = D_tau_point(m, tau, grid[k], w[k], dw[k], d2w[k]);
    return out;
}

// second derivatives of a solver wave, from the ODE itself
inline std::vector<cplx> second_derivatives(const CylWave& w) {
    std::vector<cplx> out(w.grid.size());
    for (std::size_t k = 0; k < w.grid.size(); ++k)
        out[k] = ode_second_derivative(w.B1, w.mtilde, w.s, w.grid[k], w.values[k], w.derivs[k]);
    return out;
}

inline std::vector<cplx> apply_D_tau(const CylWave& w) {
    const auto d2 = second_derivatives(w);
    return apply_D_tau(w.m(), w.tau(), w.grid, w.values, w.derivs, d2);
}

// 5-point central differences on a uniform grid (one-sided 5-point stencils at the ends)
inline std::vector<cplx> fd_derivative(std::span<const cplx> f, double h) {
    const std::size_t n = f.size();
    if (n < 5) throw domain_error("need at least 5 samples");
    std::vector<cplx> d(n);
    for (std::size_t k = 2; k + 2 < n; ++k) d[k] = (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12 * h);
    auto fwd = [&](std::size_t k) {
        return (-25.0 * f[k] + 48.0 * f[k + 1] - 36.0 * f[k + 2] + 16.0 * f[k + 3] - 3.0 * f[k + 4]) / (12 * h);
    };
    auto bwd = [&](std::size_t k) {
        return (25.0 * f[k] - 48.0 * f[k - 1] + 36.0 * f[k - 2] - 16.0 * f[k - 3] + 3.0 * f[k - 4]) / (12 * h);
    };
    auto skew_fwd = [&](std::size_t k) {  // at index 1
        return (-3.0 * f[k - 1] - 10.0 * f[k] + 18.0 * f[k + 1] - 6.0 * f[k + 2] + f[k + 3]) / (12 * h);
    };
    auto skew_bwd = [&](std::size_t k) {
        return (3.0 * f[k + 1] + 10.0 * f[k] - 18.0 * f[k - 1] + 6.0 * f[k - 2] - f[k - 3]) / (12 * h);
    };
    d[0] = fwd(0);
    d[1] = skew_fwd(1);
    d[n - 1] = bwd(n - 1);
    d[n - 2] = skew_bwd(n - 2);
    return d;
}

// ---- transfer coefficients --------------------------------------------------

// two-term closed form of c1 as printed
inline cplx c1(double B1, double mtilde, double s) {
    const double q0 = B1 * B1 - mtilde * mtilde + 1;
    const double sq = std::sqrt(q0), r = std::sqrt(1 + B1 * B1);
    const cplx i(0, 1);
    const cplx main = (sq - i * mtilde) / r;
    const cplx corr = ((-sq + i * mtilde) * B1 / (2 * (1 + B1 * B1)) + i * mtilde * B1 / (2 * q0)) / r;
    return main + corr / s;
}

inline cplx c2_II(double B1, double mtilde, double s) {
    const double q0 = B1 * B1 - mtilde * mtilde + 1;
    const double sq = std::sqrt(q0), r = std::sqrt(1 + B1 * B1);
    const cplx i(0, 1);
    const cplx main = (-sq - i * mtilde) / r;
    const cplx corr = ((sq + i * mtilde) * B1 / (2 * (1 + B1 * B1)) + i * mtilde * B1 / (2 * q0)) / r;
    return main + corr / s;
}

// Coefficient actually multiplying w^I_{B1+1/s} in the normalized raising of
// w^I_{B1}, to O(s^-2). With w(0)=1 normalization this is -c1: the raised
// value at 0 is (i mtilde - sqrt Q(0)) s / sqrt(s^2+tau(tau+1)) + O(1/s).
inline cplx transfer_coefficient(double B1, double mtilde, double s) { return -c1(B1, mtilde, s); }
inline cplx transfer_coefficient_II(double B1, double mtilde, double s) { return -c2_II(B1, mtilde, s); }

// coefficients in the (w^I, w^II) basis at parameters (B1, mtilde, s) from data at beta = 0
inline std::pair<cplx, cplx> decompose_I_II(cplx value0, cplx deriv0, double B1, double mtilde, double s) {
    const double q0 = Q(B1, mtilde, 0.0);
    if (!(q0 > 0)) throw domain_error("degenerate I/II system: Q(0) <= 0");
    const cplx dI = initial_data(B1, mtilde, s, Branch::I).dw;
    const cplx dII = initial_data(B1, mtilde, s, Branch::II).dw;
    const cplx det = dII - dI;  // = -2 i s sqrt(Q(0))
    if (!(std::abs(det) > 1e-300)) throw domain_error("degenerate I/II system");
    const cplx cII = (deriv0 - value0 * dI) / det;
    return {value0 - cII, cII};
}

// ---- ascension ----------------------------------------------------------------

// normalized raising of the solution with data `d` at beta = 0 (degree tau,
// frequency m), returned as data of the raised solution at beta = 0
inline WaveData raise_data(double m, double tau, double s, WaveData d) {
    const double B1 = tau / s, mt = m / s;
    const cplx d2 = ode_second_derivative(B1, mt, s, 0.0, d.w, d.dw);
    const double n = raising_norm(s, tau);
    return {raise_point(m, tau, 0.0, d.w, d.dw) / n, raise_point_derivative(m, tau, 0.0, d.w, d.dw, d2) / n};
}

struct Ascension {
    int steps = 0;            // [Bs]
    WaveData data;            // exact raised data at beta = 0, degree [Bs]
    cplx cI = 1, cII = 0;     // its I/II decomposition at degree [Bs]
    cplx transfer_product = 1;  // prod of transfer coefficients (closed form)
    CylWave exact;            // exact ascension sampled on the grid
    CylWave omega;            // w^I_{[Bs]/s, mtilde} times the product
};

// Ascension of e^{i m sigma} w^I_{0, m/s}. The exact chain composes the 2x2
// action of each normalized raising on data at beta = 0 (the raised function
// solves the degree-(tau+1) ODE, so value and derivative at 0 determine it);
// only the final wave is integrated.
inline Ascension ascend(double m, double s, double B, std::span<const double> grid, double tol = 1e-11) {
    const double mt = m / s;
    if (!(std::abs(mt) <= 0.5)) throw domain_error("|m/s| must be <= 1/2");
    Ascension a;
    a.steps = static_cast<int>(std::floor(B * s + 1e-9));
    if (a.steps < 0) throw domain_error("ascension needs B >= 0");
    WaveData d = initial_data(0.0, mt, s, Branch::I);
    for (int tau = 0; tau < a.steps; ++tau) {
        d = raise_data(m, tau, s, d);
        a.transfer_product *= transfer_coefficient(tau / s, mt, s);
    }
    a.data = d;
    const double Bf = a.steps / s;
    std::tie(a.cI, a.cII) = decompose_I_II(d.w, d.dw, Bf, mt, s);
    if (!grid.empty()) {
        a.exact = solve_wave_from(Bf, mt, s, d, grid, tol);
        a.omega = solve_wave(Bf, mt, s, Branch::I, grid, tol);
        for (auto& v : a.omega.values) v *= a.transfer_product;
        for (auto& v : a.omega.derivs) v *= a.transfer_product;
    }
    return a;
}

}  // namespace ascension
