#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "qform.hpp"
#include "quadrature.hpp"

namespace ascension {

inline void check_mtilde(double m) {
    if (!(std::abs(m) <= 0.5)) throw domain_error("|mtilde| must be <= 1/2");
}

// P_{B,m}(beta) = B beta + int_0^beta sqrt(Q)
inline double phase_P(double B, double m, double beta) {
    check_mtilde(m);
    return B * beta + int_sqrtQ(B, m, beta);
}

inline double b1(double B2, double m) { return -std::atan(m / std::sqrt(B2 * B2 - m * m + 1)); }

inline double b4(double B, double m) {
    check_mtilde(m);
    return quad::integrate([m](double B2) { return b1(B2, m); }, 0.0, B);
}

// d b4 / d eta, closed form
inline double db4_deta(double B, double eta) {
    return 0.5 * std::log1p(-eta * eta) - std::log(B + std::sqrt(B * B - eta * eta + 1));
}

// Re of the 1/s coefficient of log c1
inline double b3(double B, double m) { return -B / (2 * (B * B - m * m + 1)); }

inline double b7(double B, double m) {
    check_mtilde(m);
    return quad::integrate([m](double B2) { return b3(B2, m); }, 0.0, B);
}

inline double b7_closed(double B, double m) { return -0.25 * std::log((B * B - m * m + 1) / (1 - m * m)); }

// Phase transport for fixed (B, mtilde). Phi solves P_B(Phi(beta)) = P_0(beta) - b4.
// Everything runs in t = gd^-1(beta) so that integrands stay bounded up to the
// ideal boundary.
class PhaseTable {
public:
    PhaseTable(double B, double m) : B_(B), m_(m) {
        check_mtilde(m);
        b4_ = ascension::b4(B, m);
        b7_ = ascension::b7(B, m);
        db4_ = db4_deta(B, m);
    }

    double B() const { return B_; }
    double mtilde() const { return m_; }
    double b4() const { return b4_; }
    double b7() const { return b7_; }

    // P_{B1,m}(gd t)
    double P_t(double B1, double t) const { return B1 * gd(t) + I(B1, 0.0, t); }

    double Phi_t(double t) const { return B_ == 0 ? t : solve(B_, P_t(0.0, t) - b4_, t); }
    double Phi_inv_t(double t) const { return B_ == 0 ? t : solve(0.0, P_t(B_, t) + b4_, t); }

    double Phi(double beta) const { return gd(Phi_t(to_t(beta))); }
    double Phi_inv(double beta) const { return gd(Phi_inv_t(to_t(beta))); }

    // dPhi/dbeta = sqrt(Q_0(beta)) / (B + sqrt(Q_B(Phi)))
    double dPhi_dbeta(double beta) const {
        const double t = to_t(beta), tp = Phi_t(t);
        return std::sqrt(Q(0.0, m_, beta)) / (B_ + std::sqrt(Q(B_, m_, gd(tp))));
    }

    // numerator of the eta-derivative quotient; this is f4
    double f4_t(double t) const { return f4_t(t, Phi_t(t)); }
    double f4_t(double t, double tp) const { return B_ == 0 ? 0.0 : J(0.0, 0.0, t) - J(B_, 0.0, tp) - db4_; }

    double dPhi_dm(double beta) const {
        const double t = to_t(beta), tp = Phi_t(t);
        return f4_t(t, tp) / (B_ + std::sqrt(Q(B_, m_, gd(tp))));
    }

    double f4(double beta) const { return f4_t(to_t(beta)); }

    // log of |ascended wave (Phi)| / |w_0(beta)| in the limit: (ln Q_0(beta) - ln Q_B(Phi))/4.
    // With waves normalized by w(0) = 1 their modulus is (Q(0)/Q)^{1/4}, and the
    // Q_B(0)/Q_0(0) part of that cancels exp(b7) from the c1 product exactly, so b7
    // does not appear here. ln Q = ln qhat + 2 ln cosh t.
    double f3_t(double t, double tp) const {
        return 0.25 * (std::log(qhat(0.0, m_, t)) - std::log(qhat(B_, m_, tp))) + 0.5 * (lncosh(t) - lncosh(tp));
    }
    double f3(double beta) const {
        const double t = to_t(beta);
        return f3_t(t, Phi_t(t));
    }

    // (dPhi^-1/dbeta)^-1 exp(2 f3(Phi^-1(beta))) at a point beta of the transported side
    double A(double beta) const {
        const double t = to_t(beta), to = Phi_inv_t(t);
        const double dphi = std::sqrt(Q(0.0, m_, gd(to))) / (B_ + std::sqrt(Q(B_, m_, beta)));
        return dphi * std::exp(2 * f3_t(to, t));
    }

    static double to_t(double beta) {
        if (!(std::abs(beta) < std::numbers::pi / 2)) throw domain_error("beta outside (-pi/2, pi/2)");
        return gd_inv(beta);
    }

    // |t| beyond which beta is within 1e-9 of the boundary
    static double t_limit() {
        static const double v = gd_inv(std::numbers::pi / 2 - 1e-9);
        return v;
    }

private:
    static double lncosh(double t) {
        const double a = std::abs(t);
        return a + std::log1p(std::exp(-2 * a)) - std::numbers::ln2;
    }

    double I(double B1, double a, double b) const {
        return quad::integrate([&](double t) { return std::sqrt(qhat(B1, m_, t)); }, a, b);
    }

    // int d sqrt(Q_{B1,eta})/d eta dbeta in t
    double J(double B1, double a, double b) const {
        return quad::integrate(
            [&](double t) {
                const double sech = 1 / std::cosh(t);
                return (B1 * std::tanh(t) * sech - m_ * sech * sech) / std::sqrt(qhat(B1, m_, t));
            },
            a, b);
    }

    // t with P_{B1}(gd t) = target; safeguarded Newton from t0
    double solve(double B1, double target, double t0) const {
        const double lim = t_limit();
        double t = std::clamp(t0, -lim, lim);
        double P = P_t(B1, t);
        for (int it = 0; it < 100; ++it) {
            const double F = P - target;
            if (std::abs(F) <= 1e-13 * std::max(1.0, std::abs(target))) return t;
            const double dF = B1 / std::cosh(t) + std::sqrt(qhat(B1, m_, t));
            double tn = t - F / dF;
            tn = std::clamp(tn, t - 4.0, t + 4.0);
            if (std::abs(tn) > lim) {
                // the root lies beyond the bracket if P at the edge still falls short
                const double edge = std::copysign(lim, tn);
                const double Pe = P_t(B1, edge);
                if ((edge > 0 && Pe < target) || (edge < 0 && Pe > target))
                    throw range_error("Phi: no root inside (-pi/2+1e-9, pi/2-1e-9)");
                tn = 0.5 * (t + edge);
            }
            P += B1 * (gd(tn) - gd(t)) + I(B1, t, tn);
            t = tn;
        }
        throw range_error("Phi: Newton iteration did not converge");
    }

    double B_, m_;
    double b4_, b7_, db4_;
};

inline double Phi(double B, double m, double beta) { return PhaseTable(B, m).Phi(beta); }
inline double Phi_inv(double B, double m, double beta) { return PhaseTable(B, m).Phi_inv(beta); }
inline double dPhi_dm(double B, double m, double beta) { return PhaseTable(B, m).dPhi_dm(beta); }
inline double f3(double B, double beta, double m) { return PhaseTable(B, m).f3(beta); }
inline double f4(double B, double beta, double m) { return PhaseTable(B, m).f4(beta); }

// largest admissible |eta|: eta_max < 1/2 and B eta_max < sqrt(1 - eta_max^2)
inline double eta_limit(double B) { return std::min(0.5, 1.0 / std::sqrt(1.0 + B * B)); }

inline void check_eta(double B, double eta) {
    if (!(std::abs(eta) < eta_limit(B))) throw domain_error("eta outside the admissible window");
}

struct CylPhase {
    double beta = 0;
    double sigma = 0;
    double eta = 0;
};

inline CylPhase G_map(double B, const CylPhase& p) {
    check_eta(B, p.eta);
    const PhaseTable tab(B, p.eta);
    const double t = PhaseTable::to_t(p.beta), tp = tab.Phi_t(t);
    return {gd(tp), p.sigma + tab.f4_t(t, tp), p.eta};
}

inline double A_density(double B, const CylPhase& p) {
    check_eta(B, p.eta);
    return PhaseTable(B, p.eta).A(p.beta);
}

}  // namespace ascension
