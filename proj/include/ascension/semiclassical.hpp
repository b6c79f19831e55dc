#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"
#include "harmonics.hpp"
#include "hyperbolic.hpp"
#include "phase_transport.hpp"
#include "profiles.hpp"
#include "quadrature.hpp"

namespace ascension {

// a0 = phi1(eta) phi2(beta) phi3(sigma). Widths of the beta and sigma profiles
// default to eps; the eta profile always has width eps.
struct Observable {
    double eta0 = 0.2;
    double beta0 = 0.0;
    double sigma0 = 0.0;
    double eps = 0.2;
    double beta_width = 0;   // 0 means eps
    double sigma_width = 0;  // 0 means eps

    double wb() const { return beta_width > 0 ? beta_width : eps; }
    double ws() const { return sigma_width > 0 ? sigma_width : eps; }

    double phi1(double eta) const { return bump((eta - eta0) / eps); }
    double phi2(double beta) const { return bump((beta - beta0) / wb()); }
    double phi3(double sigma) const { return bump((sigma - sigma0) / ws()); }
    // 1 for xi >= 1/2 (all of Omega^0 has xi >= sqrt(3)/2), 0 for xi <= 0
    static double phi4(double xi) { return smooth_step(2.0 * xi); }
    // 1 on the eta-support of phi1, 0 outside (-0.49, 0.49)
    double phi5(double eta) const {
        const double p = std::abs(eta0) + eps / 2 + 0.01;
        return smooth_step((0.49 - std::abs(eta)) / (0.49 - p));
    }

    double a0(double beta, double sigma, double eta) const { return phi1(eta) * phi2(beta) * phi3(sigma); }

    double beta_lo() const { return beta0 - wb() / 2; }
    double beta_hi() const { return beta0 + wb() / 2; }
};

inline void check_observable(const Observable& o) {
    if (!(o.eps > 0)) throw domain_error("observable width must be positive");
    if (!(std::abs(o.eta0) + o.eps / 2 + 0.01 < 0.49)) throw domain_error("eta profile must sit inside (-0.48, 0.48)");
    if (!(o.beta_lo() > -std::numbers::pi / 2 && o.beta_hi() < std::numbers::pi / 2))
        throw domain_error("beta profile must sit inside (-pi/2, pi/2)");
}

// a1(beta', sigma, eta) = (dPhi^-1/dbeta') phi1 phi2(Phi^-1) phi3(sigma - f4(Phi^-1)) exp(-2 f3(Phi^-1)),
// with Phi, f3, f4 taken at (B, eta)
inline double a1(const Observable& o, double B, double beta, double sigma, double eta) {
    const PhaseTable t(B, eta);
    const double tb = PhaseTable::to_t(beta), to = t.Phi_inv_t(tb);
    const double bo = gd(to);
    return o.phi1(eta) * o.phi2(bo) * o.phi3(sigma - t.f4_t(to, tb)) / t.A(beta);
}

// int phi3(sigma) e^{i k sigma} d sigma, cached per k
class SigmaTransform {
public:
    explicit SigmaTransform(const Observable& o) : o_(o) {}
    cplx operator()(double k) const {
        auto it = cache_.find(k);
        if (it != cache_.end()) return it->second;
        const double lo = o_.sigma0 - o_.ws() / 2, hi = o_.sigma0 + o_.ws() / 2;
        const double re = quad::integrate([&](double x) { return o_.phi3(x) * std::cos(k * x); }, lo, hi, 1e-12);
        const double im = quad::integrate([&](double x) { return o_.phi3(x) * std::sin(k * x); }, lo, hi, 1e-12);
        return cache_[k] = cplx(re, im);
    }

private:
    Observable o_;
    mutable std::map<double, cplx> cache_;
};

// ---- frequency expansions ---------------------------------------------------

// sum over lattice frequencies m_j = 2 pi j / l of e^{i m sigma} (alpha w^I + alpha^II w^II),
// waves of degree tau at parameter s
struct WaveCoeffs {
    double s = 1;
    double l = 1;
    int tau = 0;
    std::vector<int> index;
    std::vector<cplx> alpha;
    std::vector<cplx> alpha_II;

    std::size_t size() const { return index.size(); }
    double m(std::size_t k) const { return 2 * std::numbers::pi * index[k] / l; }
    double mtilde(std::size_t k) const { return m(k) / s; }
    double B1() const { return tau / s; }
    double norm2() const {
        double n = 0;
        for (std::size_t k = 0; k < size(); ++k) n += std::norm(alpha[k]) + std::norm(alpha_II[k]);
        return n;
    }
};

// K^{-1/2} sum over lattice frequencies with |m - eta0 s| <= sqrt K of e^{i m sigma} w^I_{0, m/s}
inline WaveCoeffs geodesic_packet(double s, double eta0, double K, double l) {
    if (!(s > 0)) throw domain_error("s must be positive");
    if (!(std::abs(eta0) < 0.5)) throw domain_error("|eta0| must be below 1/2");
    if (!(K >= 1)) throw domain_error("K must be at least 1");
    if (!(l > 0)) throw domain_error("neck length must be positive");
    WaveCoeffs c;
    c.s = s;
    c.l = l;
    const double step = 2 * std::numbers::pi / l, r = std::sqrt(K), c0 = eta0 * s;
    const auto j0 = static_cast<int>(std::ceil((c0 - r) / step - 1e-12));
    const auto j1 = static_cast<int>(std::floor((c0 + r) / step + 1e-12));
    for (int j = j0; j <= j1; ++j) {
        if (std::abs(step * j - c0) > r * (1 + 1e-12)) continue;
        if (std::abs(step * j / s) > 0.5) throw domain_error("packet frequency beyond |m/s| = 1/2");
        c.index.push_back(j);
        c.alpha.push_back(1.0 / r);
        c.alpha_II.push_back(0.0);
    }
    if (c.index.empty()) throw domain_error("empty packet: no lattice frequency within sqrt(K) of eta0 s");
    return c;
}

// alpha_{B,m} = alpha_m prod_{tau < [Bs]} (transfer coefficient)
inline WaveCoeffs ascend_coeffs(const WaveCoeffs& c, double B) {
    if (c.tau != 0) throw domain_error("ascend_coeffs starts from degree 0");
    if (!(B >= 0)) throw domain_error("ascension needs B >= 0");
    for (const auto& a : c.alpha_II)
        if (a != cplx(0)) throw domain_error("ascend_coeffs needs alpha^II == 0");
    WaveCoeffs out = c;
    out.tau = static_cast<int>(std::floor(B * c.s + 1e-9));
    for (std::size_t k = 0; k < c.size(); ++k) {
        cplx p = 1;
        for (int tau = 0; tau < out.tau; ++tau) p *= transfer_coefficient(tau / c.s, c.mtilde(k), c.s);
        out.alpha[k] *= p;
    }
    return out;
}

// ---- double sums --------------------------------------------------------------

struct FreqWindow {
    double max_diff = 0;  // |m - m'| <= max_diff
    double max_abs = 0;   // |m|, |m'| <= max_abs
};

inline FreqWindow default_window(double s, double eta_max = 0.5) { return {std::pow(s, 0.125), s * eta_max}; }

// beta-side data of one frequency on the quadrature nodes
struct FreqColumn {
    std::vector<cplx> w;      // wave samples
    std::vector<double> g;    // beta weight without the oscillating phase
    std::vector<double> f4;   // sigma shift (0 on the a0 side)
};

namespace sc_detail {

// sum_{m, m'} alpha_m conj(alpha_m') phi1(m~) phi5(m~') F3(m - m') int g_m e^{i(m-m') f4_m} w_m conj(w_m')
inline cplx assemble(const WaveCoeffs& c, const Observable& o, const FreqWindow& win, const quad::nodes& nd,
                     const std::vector<FreqColumn>& cols) {
    const SigmaTransform F3(o);
    quad::kahan<cplx> total;
    for (std::size_t a = 0; a < c.size(); ++a) {
        const double ma = c.m(a);
        if (std::abs(ma) > win.max_abs) continue;
        const double w1 = o.phi1(ma / c.s);
        if (w1 == 0) continue;
        for (std::size_t b = 0; b < c.size(); ++b) {
            const double mb = c.m(b), k = ma - mb;
            if (std::abs(mb) > win.max_abs || std::abs(k) > win.max_diff * (1 + 1e-12)) continue;
            const double w5 = o.phi5(mb / c.s);
            if (w5 == 0) continue;
            quad::kahan<cplx> q;
            for (std::size_t j = 0; j < nd.x.size(); ++j) {
                const double g = cols[a].g[j];
                if (g == 0) continue;
                q.add(nd.w[j] * g * std::polar(1.0, k * cols[a].f4[j]) * cols[a].w[j] * std::conj(cols[b].w[j]));
            }
            total.add(c.alpha[a] * std::conj(c.alpha[b]) * w1 * w5 * F3(k) * q.value());
        }
    }
    return total.value();
}

inline std::vector<cplx> wave_on(const WaveCoeffs& c, std::size_t k, std::span<const double> grid) {
    return solve_wave(c.B1(), c.mtilde(k), c.s, Branch::I, grid).values;
}

}  // namespace sc_detail

// <Op(a0 phi4) u, u> for u given by degree-0 coefficients, reduced to w^I waves
inline cplx quad_form_a0(const WaveCoeffs& c, const Observable& o, const FreqWindow& win, std::size_t panels = 12) {
    check_observable(o);
    const auto nd = quad::composite_gauss(o.beta_lo(), o.beta_hi(), panels);
    std::vector<FreqColumn> cols(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        cols[k].w = sc_detail::wave_on(c, k, nd.x);
        cols[k].g.resize(nd.x.size());
        cols[k].f4.assign(nd.x.size(), 0.0);
        for (std::size_t j = 0; j < nd.x.size(); ++j) cols[k].g[j] = o.phi2(nd.x[j]);
    }
    return sc_detail::assemble(c, o, win, nd, cols);
}

// <Op(a1 phi4) u_B, u_B> for degree-[Bs] coefficients; a1 is built at B = [Bs]/s
// with eta = m/s for the left frequency
inline cplx quad_form_a1(const WaveCoeffs& c, const Observable& o, const FreqWindow& win, std::size_t panels = 12) {
    check_observable(o);
    const double B = c.B1();
    if (B == 0) return quad_form_a0(c, o, win, panels);
    std::vector<PhaseTable> tabs;
    double lo = o.beta_hi(), hi = o.beta_lo();
    for (std::size_t k = 0; k < c.size(); ++k) {
        tabs.emplace_back(B, c.mtilde(k));
        lo = std::min(lo, tabs.back().Phi(o.beta_lo()));
        hi = std::max(hi, tabs.back().Phi(o.beta_hi()));
    }
    const auto nd = quad::composite_gauss(lo, hi, panels);
    std::vector<FreqColumn> cols(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        cols[k].w = sc_detail::wave_on(c, k, nd.x);
        cols[k].g.assign(nd.x.size(), 0.0);
        cols[k].f4.assign(nd.x.size(), 0.0);
        if (o.phi1(c.mtilde(k)) == 0) continue;
        for (std::size_t j = 0; j < nd.x.size(); ++j) {
            const double tb = PhaseTable::to_t(nd.x[j]), to = tabs[k].Phi_inv_t(tb);
            const double p2 = o.phi2(gd(to));
            if (p2 == 0) continue;
            cols[k].g[j] = p2 / tabs[k].A(nd.x[j]);
            cols[k].f4[j] = tabs[k].f4_t(to, tb);
        }
    }
    return sc_detail::assemble(c, o, win, nd, cols);
}

struct TransportRow {
    double s = 0;
    cplx lhs, rhs;
    double rel_diff = 0;
};

// lhs: geodesic packet against a0; rhs: its ascension to degree [Bs] against a1
inline TransportRow measure_transport(double s, double B, double eta0, double K, double l, const Observable& o) {
    const auto u0 = geodesic_packet(s, eta0, K, l);
    const auto uB = ascend_coeffs(u0, B);
    TransportRow r;
    r.s = s;
    r.lhs = quad_form_a0(u0, o, default_window(s));
    r.rhs = quad_form_a1(uB, o, default_window(s, eta_limit(uB.B1())));
    r.rel_diff = std::abs(r.lhs - r.rhs) / std::abs(r.lhs);
    return r;
}

inline std::vector<TransportRow> measure_transport_check(std::span<const double> s_list, double B, double eta0,
                                                         double K, double l, const Observable& o) {
    std::vector<TransportRow> out;
    for (double s : s_list) out.push_back(measure_transport(s, B, eta0, K, l, o));
    return out;
}

// ---- xi-quantized forms -------------------------------------------------------

// chi(beta) psi(xi) with xi measured in units of Lambda (xi = k / Lambda for the
// Fourier variable k of beta), sigma-independent
struct XiObservable {
    double beta0 = 0;
    double beta_width = 0.2;
    double xi_lo = 0;     // psi supported in [xi_lo, xi_hi]
    double xi_hi = 0;
    double Lambda = 1;

    double chi(double beta) const { return bump((beta - beta0) / beta_width); }
    // plateau on the middle half of [xi_lo, xi_hi]
    double psi(double xi) const { return bump((xi - 0.5 * (xi_lo + xi_hi)) / (xi_hi - xi_lo)); }
};

struct XiForm {
    double value = 0;  // (1/2 pi) sum |alpha|^2-weighted int psi(k/Lambda) |F(chi u_m)(k)|^2 dk, times l
    double mass = 0;   // the same with psi == 1
};

namespace sc_detail {

// F(chi u_m)(k) = int chi(beta) u_m(beta) e^{-i k beta} d beta on fixed nodes
inline cplx fourier_at(const quad::nodes& nd, const std::vector<cplx>& f, double k) {
    quad::kahan<cplx> acc;
    for (std::size_t j = 0; j < nd.x.size(); ++j) acc.add(nd.w[j] * f[j] * std::polar(1.0, -k * nd.x[j]));
    return acc.value();
}

}  // namespace sc_detail

// <psi(D_beta / Lambda) chi u, chi u> over one period of sigma; the sigma integral
// decouples the frequencies, leaving l sum_m <psi(D/Lambda) chi u_m, chi u_m>
inline XiForm xi_form(const WaveCoeffs& c, const XiObservable& ob, std::size_t beta_panels = 24,
                      std::size_t k_panels = 0) {
    if (!(ob.xi_hi > ob.xi_lo)) throw domain_error("empty xi window");
    const double lo = ob.beta0 - ob.beta_width / 2, hi = ob.beta0 + ob.beta_width / 2;
    if (!(lo > -std::numbers::pi / 2 && hi < std::numbers::pi / 2)) throw domain_error("beta window outside (-pi/2, pi/2)");
    const auto nd = quad::composite_gauss(lo, hi, beta_panels);
    const double klo = ob.Lambda * ob.xi_lo, khi = ob.Lambda * ob.xi_hi;
    // |F|^2 varies on the scale 2 pi / beta_width in k
    if (k_panels == 0)
        k_panels = static_cast<std::size_t>(std::ceil((khi - klo) * ob.beta_width / (2 * std::numbers::pi))) + 4;
    const auto kn = quad::composite_gauss(klo, khi, k_panels);
    XiForm out;
    quad::kahan<double> val, mass;
    for (std::size_t m = 0; m < c.size(); ++m) {
        std::vector<cplx> f(nd.x.size(), 0.0);
        const bool hasI = c.alpha[m] != cplx(0), hasII = c.alpha_II[m] != cplx(0);
        if (!hasI && !hasII) continue;
        if (hasI) {
            const auto w = solve_wave(c.B1(), c.mtilde(m), c.s, Branch::I, nd.x).values;
            for (std::size_t j = 0; j < f.size(); ++j) f[j] += c.alpha[m] * w[j];
        }
        if (hasII) {
            const auto w = solve_wave(c.B1(), c.mtilde(m), c.s, Branch::II, nd.x).values;
            for (std::size_t j = 0; j < f.size(); ++j) f[j] += c.alpha_II[m] * w[j];
        }
        double ms = 0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            f[j] *= ob.chi(nd.x[j]);
            ms += nd.w[j] * std::norm(f[j]);
        }
        mass.add(c.l * ms);
        quad::kahan<double> v;
        for (std::size_t j = 0; j < kn.x.size(); ++j) {
            const double p = ob.psi(kn.x[j] / ob.Lambda);
            if (p == 0) continue;
            v.add(kn.w[j] * p * std::norm(sc_detail::fourier_at(nd, f, kn.x[j])));
        }
        val.add(c.l * v.value() / (2 * std::numbers::pi));
    }
    out.value = val.value();
    out.mass = mass.value();
    return out;
}

// H_b on the cylinder, ((xi - b)^2 cos^2 + (eta cos - b sin)^2) / 2
inline double cylinder_hamiltonian(double b, double beta, double xi, double eta) {
    const double c = std::cos(beta), sn = std::sin(beta);
    const double u = (xi - b) * c, v = eta * c - b * sn;
    return 0.5 * (u * u + v * v);
}

// smallest xi such that H_b - E >= gap for all xi' >= xi on the box
// [beta_lo, beta_hi] x [eta_lo, eta_hi] (sampled on a fine grid)
inline double off_shell_xi(double b, double E, double gap, double beta_lo, double beta_hi, double eta_lo,
                           double eta_hi) {
    double x = b;
    const int n = 64;
    for (int i = 0; i <= n; ++i) {
        const double beta = beta_lo + (beta_hi - beta_lo) * i / n, c = std::cos(beta);
        for (int j = 0; j <= n; ++j) {
            const double eta = eta_lo + (eta_hi - eta_lo) * j / n;
            const double v = eta * c - b * std::sin(beta);
            x = std::max(x, b + std::sqrt(std::max(0.0, 2 * (E + gap) - v * v)) / c);
        }
    }
    return x;
}

// off-shell observable above the shell {H_b = E}, with xi in units of Lambda and
// the eta range of the coefficients scaled by s / Lambda
inline XiObservable off_shell_observable(const WaveCoeffs& c, double b, double E, double gap, double Lambda,
                                         double beta0 = 0, double beta_width = 0.2, double xi_width = 1.0) {
    double elo = 1e300, ehi = -1e300;
    for (std::size_t k = 0; k < c.size(); ++k) {
        elo = std::min(elo, c.m(k) / Lambda);
        ehi = std::max(ehi, c.m(k) / Lambda);
    }
    const double xlo = off_shell_xi(b, E, gap, beta0 - beta_width / 2, beta0 + beta_width / 2, elo, ehi);
    return {beta0, beta_width, xlo, xlo + xi_width, Lambda};
}

// value / mass of an off-shell form
inline double energy_shell_test(const WaveCoeffs& c, const XiObservable& ob) {
    const auto f = xi_form(c, ob);
    return f.mass > 0 ? f.value / f.mass : 0.0;
}

// ---- packet density -------------------------------------------------------------

struct Concentration {
    double fraction = 0;               // mass within `radius` of the ridge / total mass
    std::vector<double> beta, ridge;   // ridge sigma(beta)
};

// |u|^2 on beta in [-beta_max, beta_max], sigma over one period centred at 0,
// against the area element d beta d sigma / cos^2 beta. The ridge is the argmax of
// |u|^2 in sigma per beta row (parabolic refinement); distance to it is the
// hyperbolic distance to the nearest ridge point.
inline Concentration packet_concentration(const WaveCoeffs& c, double beta_max, double radius, std::size_t nb = 161,
                                          std::size_t ns = 400) {
    if (!(beta_max > 0 && beta_max < std::numbers::pi / 2)) throw domain_error("beta_max outside (0, pi/2)");
    const auto bg = uniform_grid(-beta_max, beta_max, nb);
    std::vector<double> sg(ns);
    for (std::size_t k = 0; k < ns; ++k) sg[k] = -c.l / 2 + c.l * (static_cast<double>(k) + 0.5) / static_cast<double>(ns);
    std::vector<std::vector<cplx>> waves;
    for (std::size_t m = 0; m < c.size(); ++m) waves.push_back(solve_wave(c.B1(), c.mtilde(m), c.s, Branch::I, bg).values);
    std::vector<double> dens(nb * ns);
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t k = 0; k < ns; ++k) {
            cplx u = 0;
            for (std::size_t m = 0; m < c.size(); ++m) u += c.alpha[m] * std::polar(1.0, c.m(m) * sg[k]) * waves[m][i];
            dens[i * ns + k] = std::norm(u);
        }
    Concentration out;
    out.beta = bg;
    const double ds = c.l / static_cast<double>(ns);
    for (std::size_t i = 0; i < nb; ++i) {
        const double* row = &dens[i * ns];
        const std::size_t k = static_cast<std::size_t>(std::max_element(row, row + ns) - row);
        const double a = row[(k + ns - 1) % ns], b = row[k], d = row[(k + 1) % ns];
        const double den = a - 2 * b + d;
        out.ridge.push_back(sg[k] + (den != 0 ? 0.5 * (a - d) / den * ds : 0.0));
    }
    std::vector<HPoint> ridge_pts;
    for (std::size_t i = 0; i < nb; ++i) ridge_pts.push_back(cyl_to_halfplane({bg[i], out.ridge[i]}));
    double inside = 0, total = 0;
    for (std::size_t i = 0; i < nb; ++i) {
        const double cb = std::cos(bg[i]);
        for (std::size_t k = 0; k < ns; ++k) {
            const double wgt = dens[i * ns + k] / (cb * cb);
            total += wgt;
            const HPoint p = cyl_to_halfplane({bg[i], sg[k]});
            double dmin = 1e300;
            for (const auto& q : ridge_pts) dmin = std::min(dmin, hyperbolic_distance(p, q));
            if (dmin <= radius) inside += wgt;
        }
    }
    out.fraction = inside / total;
    return out;
}

}  // namespace ascension
