#pragma once

// Real-argument Airy functions Ai, Bi and their derivatives.
//
// |u| <= 10: Taylor expansion of the Airy ODE y'' = u y about anchors spaced
//            1/8 apart. Anchor values are generated once in long double by
//            Taylor stepping: from the closed forms at u = 0 for Bi and for
//            Ai on u <= 0, and backwards from the asymptotic value at u = 12
//            for Ai on u > 0, where forward stepping would be unstable.
// |u| > 10:  the standard asymptotic expansions (exponential for u > 0,
//            modulus-phase for u < 0). At xi = (2/3)|u|^{3/2} >= 21 their
//            smallest term is below 1e-18.
//
// The continuous phase Phi(u) = arg(Bi(u) + i Ai(u)), Phi(0) = pi/6, is
// produced alongside; it is the phase of the reference solution.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace starkprufer {

struct AiryValues {
    double ai = 0.0;
    double bi = 0.0;
    double ai_prime = 0.0;
    double bi_prime = 0.0;
};

namespace detail {

inline constexpr double kAiryTaylorRadius = 10.0;
inline constexpr double kAiryValidatedMin = -1.0e4;
inline constexpr double kAiryValidatedMax = 100.0;

// u_k and v_k of the Airy asymptotic expansions.
struct AiryAsymptoticCoefficients {
    static constexpr int kTerms = 64;
    std::array<long double, kTerms> u{};
    std::array<long double, kTerms> v{};

    AiryAsymptoticCoefficients() {
        u[0] = 1.0L;
        v[0] = 1.0L;
        for (int k = 1; k < kTerms; ++k) {
            const long double kk = k;
            u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) /
                   ((2 * kk - 1) * 216 * kk);
            v[k] = -(6 * kk + 1) / (6 * kk - 1) * u[k];
        }
    }
};

inline const AiryAsymptoticCoefficients& airy_coefficients() {
    static const AiryAsymptoticCoefficients c;
    return c;
}

// Number of asymptotic terms to use at a given xi: stop once terms fall below
// the target or begin to grow.
inline int airy_term_count(long double xi) {
    const auto& co = airy_coefficients();
    long double t = 1.0L;
    for (int k = 1; k < AiryAsymptoticCoefficients::kTerms; ++k) {
        const long double next = std::fabs(co.u[k]) / std::pow(xi, static_cast<long double>(k));
        if (next < 1e-21L || next > t) return k;
        t = next;
    }
    return AiryAsymptoticCoefficients::kTerms;
}

// sum_k c_k (-i/xi)^k for the u (sel = 0) or v (sel = 1) coefficients.
template <class T>
std::complex<T> airy_oscillatory_series(T xi, int terms, int sel) {
    const auto& co = airy_coefficients();
    const std::complex<T> w(T(0), T(-1) / xi);
    std::complex<T> s(0, 0);
    for (int k = terms - 1; k >= 0; --k) {
        const T ck = static_cast<T>(sel == 0 ? co.u[k] : co.v[k]);
        s = s * w + ck;
    }
    return s;
}

// sum_k sign^k c_k xi^{-k}.
template <class T>
T airy_exponential_series(T xi, int terms, int sel, int sign) {
    const auto& co = airy_coefficients();
    const T w = T(sign) / xi;
    T s = 0;
    for (int k = terms - 1; k >= 0; --k) {
        const T ck = static_cast<T>(sel == 0 ? co.u[k] : co.v[k]);
        s = s * w + ck;
    }
    return s;
}

// Taylor step of (y, y') for y'' = u y from u = a to u = a + d.
inline void airy_taylor_step(long double a, long double d, long double& y, long double& yp) {
    long double cm1 = 0.0L, c0 = y, c1 = yp;
    long double sum = c0 + c1 * d;
    long double dsum = c1;
    long double dk = d;  // d^k for the coefficient c_{k}
    int small_run = 0;
    for (int k = 0; k < 80; ++k) {
        const long double c2 = (a * c0 + cm1) / ((k + 1.0L) * (k + 2.0L));
        const long double term = c2 * dk * d;          // c_{k+2} d^{k+2}
        const long double dterm = (k + 2) * c2 * dk;   // (k+2) c_{k+2} d^{k+1}
        sum += term;
        dsum += dterm;
        const long double scale = std::fabs(sum) + std::fabs(dsum) * std::fabs(d) + 1e-300L;
        if (std::fabs(term) + std::fabs(dterm * d) < 1e-22L * scale) {
            if (++small_run >= 3) break;
        } else {
            small_run = 0;
        }
        cm1 = c0;
        c0 = c1;
        c1 = c2;
        dk *= d;
    }
    y = sum;
    yp = dsum;
}

struct AiryAnchor {
    long double ai, ai_prime, bi, bi_prime;
    double phase;        // continuous arg(Bi + i Ai) for u <= 0, else atan2
    double phase_slope;  // d phase / du = -1 / (pi (Ai^2 + Bi^2))
};

inline constexpr double kAnchorStep = 0.125;
inline constexpr double kAnchorLo = -kAiryTaylorRadius;
inline constexpr double kAnchorHi = 12.0;

// Exponential-side asymptotics in long double (used to seed the Ai backward sweep).
inline void airy_exponential_ld(long double u, long double& ai, long double& aip, long double& bi,
                                long double& bip) {
    const long double pi = std::numbers::pi_v<long double>;
    const long double xi = 2.0L / 3.0L * u * std::sqrt(u);
    const int terms = airy_term_count(xi);
    const long double q = std::pow(u, 0.25L);
    const long double em = std::exp(-xi), ep = std::exp(xi);
    ai = em / (2 * std::sqrt(pi) * q) * airy_exponential_series<long double>(xi, terms, 0, -1);
    aip = -q * em / (2 * std::sqrt(pi)) * airy_exponential_series<long double>(xi, terms, 1, -1);
    bi = ep / (std::sqrt(pi) * q) * airy_exponential_series<long double>(xi, terms, 0, 1);
    bip = q * ep / std::sqrt(pi) * airy_exponential_series<long double>(xi, terms, 1, 1);
}

class AiryTable {
public:
    AiryTable() {
        const int n = static_cast<int>(std::lround((kAnchorHi - kAnchorLo) / kAnchorStep)) + 1;
        anchors_.resize(static_cast<std::size_t>(n));
        const int i0 = zero_index();
        const long double g13 = std::tgamma(1.0L / 3.0L);
        const long double g23 = std::tgamma(2.0L / 3.0L);
        const long double ai0 = 1.0L / (std::pow(3.0L, 2.0L / 3.0L) * g23);
        const long double aip0 = -1.0L / (std::pow(3.0L, 1.0L / 3.0L) * g13);
        const long double bi0 = 1.0L / (std::pow(3.0L, 1.0L / 6.0L) * g23);
        const long double bip0 = std::pow(3.0L, 1.0L / 6.0L) / g13;
        anchors_[i0] = {ai0, aip0, bi0, bip0, 0.0, 0.0};

        // Oscillatory side: both solutions are stable.
        long double ya = ai0, ypa = aip0, yb = bi0, ypb = bip0;
        for (int i = i0; i > 0; --i) {
            const long double a = node(i);
            airy_taylor_step(a, -kAnchorStep, ya, ypa);
            airy_taylor_step(a, -kAnchorStep, yb, ypb);
            anchors_[i - 1] = {ya, ypa, yb, ypb, 0.0, 0.0};
        }
        // Bi grows to the right: forward sweep.
        yb = bi0;
        ypb = bip0;
        for (int i = i0; i + 1 < n; ++i) {
            airy_taylor_step(node(i), kAnchorStep, yb, ypb);
            anchors_[i + 1].bi = yb;
            anchors_[i + 1].bi_prime = ypb;
        }
        // Ai decays to the right: backward sweep from the asymptotic value.
        long double bi_unused, bip_unused;
        airy_exponential_ld(node(n - 1), ya, ypa, bi_unused, bip_unused);
        anchors_[n - 1].ai = ya;
        anchors_[n - 1].ai_prime = ypa;
        for (int i = n - 1; i > i0; --i) {
            airy_taylor_step(node(i), -kAnchorStep, ya, ypa);
            if (i - 1 > i0) {
                anchors_[i - 1].ai = ya;
                anchors_[i - 1].ai_prime = ypa;
            }
        }
        backward_ai_at_zero_ = static_cast<double>(ya);

        build_phase(i0);
    }

    static int zero_index() {
        return static_cast<int>(std::lround(-kAnchorLo / kAnchorStep));
    }
    static long double node(int i) {
        return static_cast<long double>(kAnchorLo) + static_cast<long double>(i) * kAnchorStep;
    }

    const AiryAnchor& anchor(int i) const { return anchors_[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(anchors_.size()); }

    // Ai(0) reached by stepping backwards from u = 12 (self-consistency probe).
    double backward_ai_at_zero() const { return backward_ai_at_zero_; }

    int nearest(double u) const {
        return static_cast<int>(std::lround((u - kAnchorLo) / kAnchorStep));
    }

    void evaluate(double u, long double& ai, long double& aip, long double& bi,
                  long double& bip) const {
        const int i = nearest(u);
        const AiryAnchor& an = anchor(i);
        const long double a = node(i);
        const long double d = static_cast<long double>(u) - a;
        ai = an.ai;
        aip = an.ai_prime;
        bi = an.bi;
        bip = an.bi_prime;
        if (d != 0.0L) {
            airy_taylor_step(a, d, ai, aip);
            airy_taylor_step(a, d, bi, bip);
        }
    }

private:
    // Unwraps arg(Bi + i Ai) from u = 0 leftwards with sub-steps small enough
    // that each changes the argument by less than pi/2.
    void build_phase(int i0) {
        const double pi = std::numbers::pi;
        for (int i = i0; i < size(); ++i) {
            auto& an = anchors_[static_cast<std::size_t>(i)];
            an.phase = std::atan2(static_cast<double>(an.ai), static_cast<double>(an.bi));
            an.phase_slope = slope(an.ai, an.bi);
        }
        double phase = anchors_[static_cast<std::size_t>(i0)].phase;
        for (int i = i0; i > 0; --i) {
            const long double a = node(i);
            const auto& cur = anchors_[static_cast<std::size_t>(i)];
            long double ya = cur.ai, ypa = cur.ai_prime, yb = cur.bi, ypb = cur.bi_prime;
            double pos = 0.0;
            while (pos < kAnchorStep) {
                const double rate = std::fabs(slope(ya, yb));
                double h = std::min(0.25, 1.0 / (4.0 * std::max(1.0, rate)));
                h = std::min(h, kAnchorStep - pos);
                pos += h;
                ya = cur.ai;
                ypa = cur.ai_prime;
                yb = cur.bi;
                ypb = cur.bi_prime;
                airy_taylor_step(a, -pos, ya, ypa);
                airy_taylor_step(a, -pos, yb, ypb);
                const double raw = std::atan2(static_cast<double>(ya), static_cast<double>(yb));
                const double jump = raw - phase;
                const double wrapped = jump - 2.0 * pi * std::round(jump / (2.0 * pi));
                if (std::fabs(wrapped) >= pi / 2)
                    throw precision_error("Airy phase unwrap step exceeded pi/2");
                phase += wrapped;
            }
            auto& prev = anchors_[static_cast<std::size_t>(i - 1)];
            prev.phase = phase;
            prev.phase_slope = slope(prev.ai, prev.bi);
        }
    }

    static double slope(long double ai, long double bi) {
        return static_cast<double>(-1.0L / (std::numbers::pi_v<long double> * (ai * ai + bi * bi)));
    }

    std::vector<AiryAnchor> anchors_;
    double backward_ai_at_zero_ = 0.0;
};

inline const AiryTable& airy_table() {
    static const AiryTable table;
    return table;
}

// Oscillatory-side modulus-phase data for u = -z, z > 10:
//   Bi(u) + i Ai(u)   = pi^{-1/2} z^{-1/4} e^{i(xi + pi/4)} pq
//   Bi'(u) + i Ai'(u) = pi^{-1/2} z^{ 1/4} e^{i(xi - pi/4)} rs
struct AiryOscillatory {
    long double xi;
    std::complex<double> pq;
    std::complex<double> rs;
};

inline AiryOscillatory airy_oscillatory(long double z) {
    AiryOscillatory o;
    o.xi = 2.0L / 3.0L * z * std::sqrt(z);
    const int terms = airy_term_count(o.xi);
    const double xi = static_cast<double>(o.xi);
    o.pq = airy_oscillatory_series<double>(xi, terms, 0);
    o.rs = airy_oscillatory_series<double>(xi, terms, 1);
    return o;
}

// Continuous phase Phi(u) = arg(Bi + i Ai), anchored at Phi(0) = pi/6, for
// u in the Taylor region (u >= -10); the value (ai, bi) must be the Airy
// values at u.
inline double airy_phase_taylor(double u, double ai, double bi) {
    const double raw = std::atan2(ai, bi);
    if (u >= 0.0) return raw;
    const auto& table = airy_table();
    const int i = table.nearest(u);
    const AiryAnchor& an = table.anchor(i);
    const double pred = an.phase + an.phase_slope * (u - static_cast<double>(AiryTable::node(i)));
    const double two_pi = 2.0 * std::numbers::pi;
    return raw + two_pi * std::round((pred - raw) / two_pi);
}

}  // namespace detail

// Ai, Bi, Ai', Bi' at real x; validated for x in [-1e4, 100].
inline AiryValues airy(double x) {
    if (!std::isfinite(x)) throw domain_error("airy: argument is not finite");
    if (x < detail::kAiryValidatedMin || x > detail::kAiryValidatedMax)
        throw domain_error("airy: argument outside the validated range [-1e4, 100]");
    AiryValues r;
    if (std::fabs(x) <= detail::kAiryTaylorRadius) {
        long double ai, aip, bi, bip;
        detail::airy_table().evaluate(x, ai, aip, bi, bip);
        r = {static_cast<double>(ai), static_cast<double>(bi), static_cast<double>(aip),
             static_cast<double>(bip)};
        return r;
    }
    if (x > 0.0) {
        long double ai, aip, bi, bip;
        detail::airy_exponential_ld(x, ai, aip, bi, bip);
        r = {static_cast<double>(ai), static_cast<double>(bi), static_cast<double>(aip),
             static_cast<double>(bip)};
        return r;
    }
    const long double z = -static_cast<long double>(x);
    const auto o = detail::airy_oscillatory(z);
    const long double pi = std::numbers::pi_v<long double>;
    const long double amp = 1.0L / (std::sqrt(pi) * std::pow(z, 0.25L));
    const long double ph = o.xi + pi / 4;
    const std::complex<long double> e(std::cos(ph), std::sin(ph));
    const std::complex<long double> v = amp * e * std::complex<long double>(o.pq);
    const long double damp = std::pow(z, 0.25L) / std::sqrt(pi);
    const std::complex<long double> ed(std::cos(o.xi - pi / 4), std::sin(o.xi - pi / 4));
    const std::complex<long double> dv = damp * ed * std::complex<long double>(o.rs);
    r.bi = static_cast<double>(v.real());
    r.ai = static_cast<double>(v.imag());
    r.bi_prime = static_cast<double>(dv.real());
    r.ai_prime = static_cast<double>(dv.imag());
    return r;
}

}  // namespace starkprufer
