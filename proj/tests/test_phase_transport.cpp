#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ascension/harmonics.hpp"
#include "ascension/hyperbolic.hpp"
#include "ascension/phase_transport.hpp"

using namespace ascension;

namespace {

std::mt19937_64& rng() {
    static std::mt19937_64 g(31337);
    return g;
}
double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

constexpr double half_pi = std::numbers::pi / 2;

}  // namespace

TEST(Phase, PExamples) {
    EXPECT_EQ(phase_P(0.7, 0.3, 0.0), 0.0);
    for (double b : {-1.5, -0.3, 0.2, 1.0, 1.55})
        EXPECT_NEAR(phase_P(0, 0, b), std::log(std::tan(b / 2 + std::numbers::pi / 4)), 1e-11);
    // B*beta + integral by plain quadrature in beta
    for (double b : {-1.2, 0.5, 1.3}) {
        const double ref = 0.8 * b + quad::integrate([](double x) { return std::sqrt(Q(0.8, -0.4, x)); }, 0.0, b, 1e-12);
        EXPECT_NEAR(phase_P(0.8, -0.4, b), ref, 1e-10);
    }
    EXPECT_THROW(phase_P(0, 0.6, 0.1), domain_error);
    EXPECT_THROW(phase_P(0, 0.1, half_pi), domain_error);
}

TEST(Phase, PMonotone) {
    // dP/dbeta = B + sqrt(Q) > 0 for B >= 0, and for B < 0 inside the admissible eta window
    for (int k = 0; k < 1000; ++k) {
        const double B = uni(-2, 3);
        const double lim = B >= 0 ? 0.5 : eta_limit(B);
        const double m = uni(-lim, lim);
        double b1 = uni(-1.56, 1.56), b2 = uni(-1.56, 1.56);
        if (b1 > b2) std::swap(b1, b2);
        if (b2 - b1 < 1e-6) continue;
        EXPECT_GT(phase_P(B, m, b2), phase_P(B, m, b1));
    }
}

TEST(Phase, B1B4Examples) {
    for (double B : {0.0, 0.5, 3.0}) {
        EXPECT_EQ(b1(B, 0.0), 0.0);
        EXPECT_EQ(b4(B, 0.0), 0.0);
    }
    EXPECT_EQ(b4(0.0, 0.3), 0.0);
    // db4/deta against central differences of the quadrature
    for (double B : {0.3, 1.0, 2.5}) {
        for (double eta : {-0.4, 0.0, 0.25}) {
            const double h = 1e-5;
            const double fd = (b4(B, eta + h) - b4(B, eta - h)) / (2 * h);
            EXPECT_NEAR(fd, db4_deta(B, eta), 1e-8);
        }
    }
}

TEST(Phase, B3AndB7) {
    // b3 = Re of the 1/s term of log c1
    const double s = 1e6;
    for (double B : {0.0, 0.4, 1.5}) {
        for (double m : {-0.5, 0.0, 0.3}) {
            EXPECT_LT(std::abs(std::log(std::abs(c1(B, m, s))) - b3(B, m) / s), 1e-9);
            EXPECT_NEAR(b7(B, m), b7_closed(B, m), 1e-12);
        }
    }
}

TEST(Phase, PhiExamples) {
    for (double m : {-0.5, 0.0, 0.35}) {
        const PhaseTable t(0.0, m);
        for (double b : {-1.4, 0.0, 0.9}) EXPECT_NEAR(t.Phi(b), b, 1e-14);
    }
    for (int k = 0; k < 200; ++k) {
        const double B = uni(0, 3), m = uni(-0.5, 0.5);
        const PhaseTable t(B, m);
        const double b = uni(-1.55, 1.55);
        const double p = t.Phi(b);
        EXPECT_NEAR(t.Phi_inv(p), b, 1e-9);
        // defining equation
        EXPECT_LT(std::abs(phase_P(B, m, p) - phase_P(0, m, b) + t.b4()), 1e-10);
        // monotone, positive derivative
        const double p2 = t.Phi(b + 1e-3);
        EXPECT_GT(p2, p);
        EXPECT_GT(t.dPhi_dbeta(b), 0);
    }
}

TEST(Phase, DerivativeAndChainRule) {
    const double h = 1e-5;
    for (int k = 0; k < 1000; ++k) {
        const double B = uni(0, 3), m = uni(-0.5, 0.5), b = uni(-1.4, 1.4);
        const PhaseTable t(B, m);
        const double fd = (t.Phi(b + h) - t.Phi(b - h)) / (2 * h);
        EXPECT_GT(fd, 0);
        EXPECT_NEAR(fd, t.dPhi_dbeta(b), 1e-7 * fd);
        // (Phi^-1)'(Phi(beta)) * Phi'(beta) = 1
        const double p = t.Phi(b);
        const double fdi = (t.Phi_inv(p + h) - t.Phi_inv(p - h)) / (2 * h);
        EXPECT_NEAR(fdi * fd, 1.0, 1e-7);
    }
}

TEST(Phase, RangeError) {
    // with a huge field Phi pulls points inward, so the inverse of a point near the
    // boundary lies beyond the bracket
    const PhaseTable t(40.0, 0.0);
    EXPECT_TRUE(std::isfinite(t.Phi(half_pi - 1e-12)));
    EXPECT_THROW(t.Phi_inv(half_pi - 1e-12), range_error);
    EXPECT_THROW(t.Phi_inv(-half_pi + 1e-12), range_error);
}

TEST(Phase, DPhiDm) {
    for (double m : {-0.3, 0.0, 0.4})
        for (double b : {-1.0, 0.5}) EXPECT_EQ(dPhi_dm(0.0, m, b), 0.0);
    const double h = 1e-5;
    for (double B : {0.5, 1.0, 2.0}) {
        for (double m : {-0.4, 0.0, 0.2, 0.45}) {
            for (double b : {-1.3, -0.4, 0.0, 0.7, 1.4}) {
                const double fd = (Phi(B, m + h, b) - Phi(B, m - h, b)) / (2 * h);
                EXPECT_NEAR(dPhi_dm(B, m, b), fd, 1e-6) << B << " " << m << " " << b;
            }
        }
    }
}

TEST(Phase, F3F4Examples) {
    for (double b : {-1.2, 0.0, 0.8}) {
        EXPECT_NEAR(f3(0.0, b, 0.3), 0.0, 1e-15);
        EXPECT_EQ(f4(0.0, b, 0.3), 0.0);
    }
    // f3 definition in beta-space
    const PhaseTable t(0.8, 0.25);
    for (double b : {-1.0, 0.3, 1.2}) {
        const double ref = 0.25 * (std::log(Q(0, 0.25, b)) - std::log(Q(0.8, 0.25, t.Phi(b))));
        EXPECT_NEAR(t.f3(b), ref, 1e-11);
    }
}

TEST(Phase, F4VanishesLinearlyAtTheBoundary) {
    // f4(pi/2 - d) / d converges as d -> 0: past a transient (long for larger B)
    // successive differences shrink geometrically
    for (double B : {0.5, 1.5}) {
        for (double m : {-0.3, 0.2}) {
            const PhaseTable t(B, m);
            for (double sgn : {1.0, -1.0}) {
                std::vector<double> r;
                for (int k = 12; k <= 24; ++k) {
                    const double d = std::ldexp(1.0, -k);
                    r.push_back(t.f4(sgn * (half_pi - d)) / d);
                }
                for (std::size_t k = 2; k < r.size(); ++k)
                    EXPECT_LT(std::abs(r[k] - r[k - 1]), 0.75 * std::abs(r[k - 1] - r[k - 2]) + 1e-6)
                        << B << " " << m << " " << sgn << " " << k;
                EXPECT_NEAR(r[r.size() - 5], r.back(), 1e-3 * std::abs(r.back()));
            }
        }
    }
}

TEST(Phase, ModulusTransport) {
    // |ascended wave (Phi(beta))| / |w^I_{0,m}(beta)| -> exp(f3) with O(1/s) error
    const double B = 0.5, mt = 0.2;
    const PhaseTable t(B, mt);
    std::vector<double> betas;
    for (int k = 0; k <= 20; ++k) betas.push_back(-1.0 + 0.1 * k);
    std::vector<double> img;
    for (double b : betas) img.push_back(t.Phi(b));
    std::vector<double> errs;
    for (double s : {100.0, 200.0}) {
        const auto a = ascend(mt * s, s, B, img);
        const auto w0 = solve_wave(0, mt, s, Branch::I, betas);
        double e = 0;
        for (std::size_t k = 0; k < betas.size(); ++k) {
            const double ratio = std::abs(a.exact.values[k]) / std::abs(w0.values[k]);
            e = std::max(e, std::abs(ratio / std::exp(t.f3(betas[k])) - 1));
        }
        errs.push_back(e);
        EXPECT_LT(e, 5 / s);
    }
    EXPECT_LT(errs[1], 0.7 * errs[0]);
}

TEST(Phase, PrintedModulusCarriesSpuriousB7) {
    // adding b7 to the modulus exponent (as when |w| is taken to be Q^{-1/4}) misses by exp(b7)
    const PhaseTable t(0.5, 0.2);
    const double s = 200;
    const std::vector<double> betas{0.0}, img{t.Phi(0.0)};
    const auto a = ascend(0.2 * s, s, 0.5, img);
    const auto w0 = solve_wave(0, 0.2, s, Branch::I, betas);
    const double ratio = std::abs(a.exact.values[0]) / std::abs(w0.values[0]);
    EXPECT_GT(std::abs(ratio / std::exp(t.b7() + t.f3(0.0)) - 1), 0.05);
    EXPECT_NEAR(ratio, std::exp(t.f3(0.0)), 5 / s);
}

TEST(Transport, GAndAExamples) {
    const CylPhase p{0.4, 1.2, 0.1};
    const auto q = G_map(0.0, p);
    EXPECT_NEAR(q.beta, p.beta, 1e-14);
    EXPECT_EQ(q.sigma, p.sigma);
    EXPECT_EQ(q.eta, p.eta);
    EXPECT_NEAR(A_density(0.0, p), 1.0, 1e-12);
    for (int k = 0; k < 1000; ++k) {
        const double B = uni(0, 2.5);
        const double lim = eta_limit(B);
        const CylPhase x{uni(-1.5, 1.5), uni(-3, 3), uni(-lim, lim) * 0.999};
        const auto y = G_map(B, x);
        EXPECT_EQ(y.eta, x.eta);
        EXPECT_GT(A_density(B, y), 0);
    }
    EXPECT_THROW(G_map(1.0, {0.1, 0, 0.75}), domain_error);
    EXPECT_THROW(G_map(0.0, {0.1, 0, 0.5}), domain_error);
    EXPECT_THROW(A_density(3.0, {0.1, 0, 0.4}), domain_error);
}

TEST(Transport, DensityIsJacobianTimesModulus) {
    // A(beta) = Phi'(Phi^-1 beta) exp(2 f3(Phi^-1 beta))
    const PhaseTable t(1.2, -0.3);
    for (double b : {-1.2, 0.0, 0.9}) {
        const double bo = t.Phi_inv(b);
        EXPECT_NEAR(t.A(b), t.dPhi_dbeta(bo) * std::exp(2 * t.f3(bo)), 1e-10);
    }
}

TEST(Transport, IdealPointStability) {
    // the distance from a point to its image settles to a finite limit toward both ends
    for (double B : {0.5, 2.0}) {
        for (double eta : {-0.3, 0.0, 0.25}) {
            if (std::abs(eta) >= eta_limit(B)) continue;
            for (double sgn : {-1.0, 1.0}) {
                std::vector<double> d;
                for (int k = 1; k <= 30; ++k) {
                    const CylPhase p{sgn * (half_pi - std::ldexp(1.0, -k)), 0.3, eta};
                    const auto q = G_map(B, p);
                    d.push_back(
                        hyperbolic_distance(cyl_to_halfplane({p.beta, p.sigma}), cyl_to_halfplane({q.beta, q.sigma})));
                }
                const double lim = d.back();
                EXPECT_TRUE(std::isfinite(lim));
                for (double x : d) EXPECT_LT(x, lim + 1e-6) << "B=" << B << " eta=" << eta;
                EXPECT_NEAR(d[d.size() - 6], lim, 1e-4) << "B=" << B << " eta=" << eta;
            }
        }
    }
}
