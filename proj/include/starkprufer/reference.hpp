#pragma once

// The Stark reference solution
//   zeta(x) = (pi / F^{1/3})^{1/2} (i Ai(u) + Bi(u)),   u = -F^{1/3}(x + E/F),
// with Wronskian zeta conj(zeta)' - zeta' conj(zeta) = -2i, continuous phase
// gamma (zeta = |zeta| e^{i gamma}, gamma(0) in (-pi, pi]) and
// gamma' = Im(zeta'/zeta) = |zeta|^{-2}.
//
// For u < -10 the modulus-phase expansion gives gamma directly as
// xi + pi/4 + arg(pq), so no unwrapping is needed far out; the branch there
// coincides with the one unwrapped from u = 0 (checked at construction).

#include <cmath>
#include <complex>
#include <numbers>

#include "airy.hpp"
#include "errors.hpp"
#include "jet.hpp"
#include "params.hpp"

namespace starkprufer {

using cplx = std::complex<double>;

struct PhasePoint {
    double x = 0.0;
    cplx zeta;
    cplx zeta_prime;
    double gamma = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
};

class ReferenceSolution {
public:
    // Most negative u accepted; beyond it the absolute phase error eps*gamma
    // exceeds ~1e-3 and the double representation of gamma is meaningless.
    static constexpr double kMinArgument = -1.0e9;

    explicit ReferenceSolution(ModelParams params) : params_(params) {
        params_.validate();
        f13_ = std::cbrt(params_.F);
        f13l_ = std::cbrt(static_cast<long double>(params_.F));
        shift_l_ = static_cast<long double>(params_.E) / static_cast<long double>(params_.F);
        amplitude_ = std::sqrt(std::numbers::pi / f13_);
        const double phi0 = raw_phase(0.0);
        branch_ = std::ceil((phi0 - std::numbers::pi) / (2.0 * std::numbers::pi));
        check_branch_junction();
    }

    const ModelParams& params() const { return params_; }
    double amplitude() const { return amplitude_; }

    // u = -F^{1/3}(x + E/F)
    double argument(double x) const {
        return static_cast<double>(-f13l_ * (static_cast<long double>(x) + shift_l_));
    }

    void check_domain(double x) const {
        if (!std::isfinite(x)) throw domain_error("reference solution: x is not finite");
        const double u = argument(x);
        if (u > detail::kAiryValidatedMax || u < kMinArgument)
            throw domain_error("reference solution: x maps outside the validated Airy range");
    }

    PhasePoint eval(double x) const {
        check_domain(x);
        PhasePoint p;
        p.x = x;
        const long double z = f13l_ * (static_cast<long double>(x) + shift_l_);
        cplx ratio;  // zeta'/zeta
        if (z > detail::kAiryTaylorRadius) {
            const auto o = detail::airy_oscillatory(z);
            const long double pi = std::numbers::pi_v<long double>;
            const long double phase =
                o.xi + pi / 4 + std::arg(o.pq) - 2 * pi * static_cast<long double>(branch_);
            const double modulus = amplitude_ / std::sqrt(std::numbers::pi) /
                                   static_cast<double>(std::pow(z, 0.25L)) * std::abs(o.pq);
            p.gamma = static_cast<double>(phase);
            p.zeta = modulus * cplx(static_cast<double>(std::cos(phase)),
                                    static_cast<double>(std::sin(phase)));
            ratio = cplx(0.0, f13_ * static_cast<double>(std::sqrt(z))) * o.rs / o.pq;
            p.zeta_prime = p.zeta * ratio;
        } else {
            const double u = static_cast<double>(-z);
            const AiryValues a = airy(u);
            p.zeta = amplitude_ * cplx(a.bi, a.ai);
            p.zeta_prime = -f13_ * amplitude_ * cplx(a.bi_prime, a.ai_prime);
            p.gamma = detail::airy_phase_taylor(u, a.ai, a.bi) - 2.0 * std::numbers::pi * branch_;
            ratio = p.zeta_prime / p.zeta;
        }
        p.gamma1 = ratio.imag();
        // gamma'' = -Im((zeta'/zeta)^2) + Im(zeta''/zeta); the last term vanishes
        // because zeta'' = -(F x + E) zeta with a real factor.
        p.gamma2 = -2.0 * ratio.real() * ratio.imag();
        return p;
    }

    // Taylor coefficients of gamma about x0 to order N.
    template <int N>
    Jet<N> gamma_taylor(double x0) const {
        check_domain(x0);
        const long double z = f13l_ * (static_cast<long double>(x0) + shift_l_);
        if (z > detail::kAiryTaylorRadius) return gamma_taylor_asymptotic<N>(x0, z);
        return gamma_taylor_ode<N>(x0);
    }

    // gamma(x_ref + dx) - gamma(x_ref), evaluated in extended precision on the
    // oscillatory side so that the two large phases do not cancel in double.
    long double gamma_offset_ld(double x_ref, double dx) const {
        const long double x1 = static_cast<long double>(x_ref) + static_cast<long double>(dx);
        check_domain(x_ref);
        check_domain(static_cast<double>(x1));
        const long double z0 = f13l_ * (static_cast<long double>(x_ref) + shift_l_);
        const long double z1 = f13l_ * (x1 + shift_l_);
        if (z0 > detail::kAiryTaylorRadius && z1 > detail::kAiryTaylorRadius) {
            const auto o0 = detail::airy_oscillatory(z0);
            const auto o1 = detail::airy_oscillatory(z1);
            return (o1.xi - o0.xi) + static_cast<long double>(std::arg(o1.pq) - std::arg(o0.pq));
        }
        return static_cast<long double>(eval(static_cast<double>(x1)).gamma - eval(x_ref).gamma);
    }
    double gamma_offset(double x_ref, double dx) const {
        return static_cast<double>(gamma_offset_ld(x_ref, dx));
    }

    // Jet of y -> gamma(x_ref + dx(y)) - gamma(x_ref) with the accurate constant term.
    template <int N>
    Jet<N> gamma_offset_jet(double x_ref, const Jet<N>& dx) const {
        Jet<N> r = compose(gamma_taylor<N>(x_ref + dx.c[0]), dx);
        r.c[0] = gamma_offset(x_ref, dx.c[0]);
        return r;
    }

    // Jets of gamma and gamma' composed with an arbitrary inner jet.
    template <int N>
    Jet<N> gamma_jet(const Jet<N>& x) const {
        return compose(gamma_taylor<N>(x.c[0]), x);
    }
    template <int N>
    Jet<N> gamma1_jet(const Jet<N>& x) const {
        const Jet<N + 1> g = gamma_taylor<N + 1>(x.c[0]);
        return compose(resize<N>(derivative(g)), x);
    }

private:
    double raw_phase(double x) const {
        const long double z = f13l_ * (static_cast<long double>(x) + shift_l_);
        if (z > detail::kAiryTaylorRadius) {
            const auto o = detail::airy_oscillatory(z);
            return static_cast<double>(o.xi + std::numbers::pi_v<long double> / 4 +
                                       std::arg(o.pq));
        }
        const double u = static_cast<double>(-z);
        const AiryValues a = airy(u);
        return detail::airy_phase_taylor(u, a.ai, a.bi);
    }

    // The unwrapped table and the asymptotic phase must agree at u = -10.
    static void check_branch_junction() {
        static const bool ok = [] {
            const double u = -detail::kAiryTaylorRadius;
            const AiryValues a = airy(u);
            const double inner = detail::airy_phase_taylor(u, a.ai, a.bi);
            const auto o = detail::airy_oscillatory(static_cast<long double>(-u));
            const double outer =
                static_cast<double>(o.xi + std::numbers::pi_v<long double> / 4 + std::arg(o.pq));
            return std::fabs(inner - outer) < 1e-9;
        }();
        if (!ok) throw precision_error("Airy phase branches disagree at the switch radius");
    }

    template <int N>
    Jet<N> gamma_taylor_asymptotic(double x0, long double z0) const {
        // gamma(x) = xi + pi/4 + arg(pq(xi)) - 2 pi k, xi = (2/3) z^{3/2},
        // z = F^{1/3}(x + E/F); the big constant xi(x0) is kept separately.
        const auto& co = detail::airy_coefficients();
        const long double xi0 = 2.0L / 3.0L * z0 * std::sqrt(z0);
        const int terms = detail::airy_term_count(xi0);
        Jet<N> t = Jet<N>::variable(0.0);                       // x - x0
        Jet<N> z = (t + static_cast<double>(z0 / f13l_)) * f13_;  // z(x)
        Jet<N> xi = pow(z, 1.5) * (2.0 / 3.0);
        Jet<N> w = 1.0 / xi;
        // pq = sum u_k (-i w)^k split into real and imaginary parts.
        Jet<N> re(0.0), im(0.0), wk(1.0);
        for (int k = 0; k < terms; ++k) {
            const double ck = static_cast<double>(co.u[k]);
            switch (k % 4) {
                case 0: re += wk * ck; break;
                case 1: im -= wk * ck; break;
                case 2: re -= wk * ck; break;
                default: im += wk * ck; break;
            }
            wk = wk * w;
        }
        Jet<N> g = xi + atan(im / re);
        g.c[0] = static_cast<double>(xi0 + std::numbers::pi_v<long double> / 4 +
                                     std::atan2(static_cast<long double>(im.c[0]),
                                                static_cast<long double>(re.c[0])) -
                                     2 * std::numbers::pi_v<long double> *
                                         static_cast<long double>(branch_));
        (void)x0;
        return g;
    }

    template <int N>
    Jet<N> gamma_taylor_ode(double x0) const {
        // zeta'' = -(F x + E) zeta gives the complex Taylor coefficients; then
        // gamma' = |zeta|^{-2} and gamma is its antiderivative.
        const PhasePoint p = eval(x0);
        const double a = params_.F * x0 + params_.E;
        std::array<cplx, N + 2> c{};
        c[0] = p.zeta;
        c[1] = p.zeta_prime;
        for (int k = 0; k + 2 <= N + 1; ++k) {
            const cplx prev = k >= 1 ? c[k - 1] : cplx(0.0);
            c[k + 2] = -(a * c[k] + params_.F * prev) / ((k + 1.0) * (k + 2.0));
        }
        Jet<N> re, im;
        for (int k = 0; k <= N; ++k) {
            re.c[k] = c[k].real();
            im.c[k] = c[k].imag();
        }
        const Jet<N> g1 = 1.0 / (re * re + im * im);
        Jet<N> g;
        g.c[0] = p.gamma;
        for (int k = 1; k <= N; ++k) g.c[k] = g1.c[k - 1] / k;
        return g;
    }

    ModelParams params_;
    double f13_ = 1.0;
    long double f13l_ = 1.0L;
    long double shift_l_ = 0.0L;
    double amplitude_ = 1.0;
    double branch_ = 0.0;
};

// Large-x expansion (2 sqrt(F)/3) x^{3/2} + (E/sqrt(F)) x^{1/2} + pi/4 and its
// first two derivatives' leading terms. The constant is pi/4 under the
// gamma(0) in (-pi, pi] anchor.
inline double gamma_asymptotic(const ModelParams& m, double x, int order) {
    if (!(x > 0.0) || !std::isfinite(x)) throw domain_error("gamma_asymptotic: x must be > 0");
    const double sf = std::sqrt(m.F);
    switch (order) {
        case 0:
            return 2.0 * sf / 3.0 * x * std::sqrt(x) + m.E / sf * std::sqrt(x) +
                   std::numbers::pi / 4.0;
        case 1: return sf * std::sqrt(x);
        case 2: return sf / 2.0 / std::sqrt(x);
        default: throw validity_error("gamma_asymptotic: order must be 0, 1 or 2");
    }
}

}  // namespace starkprufer
