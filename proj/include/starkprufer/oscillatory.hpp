#pragma once

// One-dimensional oscillatory integrals  I = int_a^b u(x) e^{i omega phi(x)} dx:
// an adaptive Gauss-Kronrod oracle, the non-stationary expansion obtained by
// repeated integration by parts, and the stationary-phase expansion with
// boundary contributions. Amplitudes and phases are generic callables so the
// expansion operators can evaluate them on derivative towers.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "expsum.hpp"
#include "jet.hpp"
#include "prufer.hpp"
#include "reference.hpp"

namespace starkprufer {

// Derivative order carried through the expansions; L_2 needs d^12 and the
// stationary remainder bound needs d^{2k} u for k <= 3.
inline constexpr int kOscOrder = 14;
using OscJet = Jet<kOscOrder>;
inline constexpr int kMaxExpansionOrder = 3;
inline constexpr int kProbePoints = 512;

template <class U, class P>
struct PhaseProblem {
    double a = 0.0;
    double b = 1.0;
    double omega = 1.0;
    U u;
    P phi;
    int k = 1;
};

template <class U, class P>
PhaseProblem(double, double, double, U, P, int) -> PhaseProblem<U, P>;

namespace detail {

template <class F>
double first_derivative(const F& f, double x) {
    return f(Jet<1>::variable(x)).c[1];
}

template <class U, class P>
void check_problem(const PhaseProblem<U, P>& pr) {
    if (!(pr.a < pr.b) || !std::isfinite(pr.a) || !std::isfinite(pr.b))
        throw validity_error("phase problem: need a finite interval a < b");
    if (!(pr.omega > 0.0)) throw validity_error("phase problem: need omega > 0");
    if (pr.k < 1 || pr.k > kMaxExpansionOrder) throw validity_error("phase problem: k must be 1, 2 or 3");
}

inline double probe_point(double a, double b, int i) {
    return a + (b - a) * static_cast<double>(i) / (kProbePoints - 1);
}

// min and max of |phi'| on the probe grid.
template <class P>
std::pair<double, double> phase_slope_range(const P& phi, double a, double b) {
    double lo = INFINITY, hi = 0.0;
    for (int i = 0; i < kProbePoints; ++i) {
        const double d = std::fabs(first_derivative(phi, probe_point(a, b, i)));
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return {lo, hi};
}

// sup norms of u^(m), m = 0..M, on the probe grid.
template <class U>
std::vector<double> derivative_sup_norms(const U& u, double a, double b, int M) {
    std::vector<double> s(static_cast<std::size_t>(M + 1), 0.0);
    for (int i = 0; i < kProbePoints; ++i) {
        const OscJet j = u(OscJet::variable(probe_point(a, b, i)));
        for (int m = 0; m <= M; ++m)
            s[static_cast<std::size_t>(m)] = std::max(s[static_cast<std::size_t>(m)], std::fabs(j.derivative(m)));
    }
    return s;
}

}  // namespace detail

struct OracleResult {
    cplx value;
    double error_estimate = 0.0;
};

// int_a^b u e^{i omega phi} dx by 61-point Gauss-Kronrod rules on
// panels that each hold at most half an oscillation; real and imaginary
// parts are integrated separately. Target absolute error 1e-12 max(1, omega^{1/2}).
template <class U, class P>
OracleResult quadrature_oracle(const PhaseProblem<U, P>& pr) {
    detail::check_problem(pr);
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto [lo, hi] = detail::phase_slope_range(pr.phi, pr.a, pr.b);
    (void)lo;
    const double oscillations = pr.omega * hi * (pr.b - pr.a) / (2.0 * std::numbers::pi);
    const double panel_count = std::max(8.0, std::ceil(2.0 * oscillations));
    if (panel_count > 1e7) throw resource_error("quadrature_oracle: more than 1e7 panels");
    const double target = 1e-12 * std::max(1.0, std::sqrt(pr.omega));
    const auto re = [&](double x) { return pr.u(x) * std::cos(pr.omega * pr.phi(x)); };
    const auto im = [&](double x) { return pr.u(x) * std::sin(pr.omega * pr.phi(x)); };
    // One 61-point rule per panel; the panel count doubles until the summed
    // Kronrod error estimate meets the target.
    long panels = static_cast<long>(panel_count);
    for (int attempt = 0; attempt < 6; ++attempt, panels *= 2) {
        double sr = 0.0, si = 0.0, err = 0.0;
        const double h = (pr.b - pr.a) / static_cast<double>(panels);
        for (long p = 0; p < panels; ++p) {
            const double x0 = pr.a + h * static_cast<double>(p);
            const double x1 = p + 1 == panels ? pr.b : x0 + h;
            // |Kronrod - Gauss| per panel; the estimate reported by
            // gauss_kronrod itself is not rescaled to the panel width.
            const double kr = gauss_kronrod<double, 61>::integrate(re, x0, x1, 0, 0.0);
            const double ki = gauss_kronrod<double, 61>::integrate(im, x0, x1, 0, 0.0);
            err += std::fabs(kr - gauss<double, 30>::integrate(re, x0, x1)) +
                   std::fabs(ki - gauss<double, 30>::integrate(im, x0, x1));
            sr += kr;
            si += ki;
        }
        if (err <= target) return {cplx(sr, si), err};
    }
    throw convergence_error("quadrature_oracle: error estimate above tolerance");
}

// B^j u at x for j = 0..count-1, where B^0 v = v and B^j v = (v_{j-1}/phi')'.
template <class U, class P>
std::vector<double> boundary_operators(const U& u, const P& phi, double x, int count) {
    if (count > kOscOrder) throw validity_error("boundary_operators: order too high");
    OscJet B = u(OscJet::variable(x));
    const OscJet d = derivative(phi(OscJet::variable(x)));
    std::vector<double> out;
    for (int j = 0; j < count; ++j) {
        out.push_back(B.c[0]);
        B = derivative(B / d);
    }
    return out;
}

// (i/omega)^{j+1} [B^j u(a) e^{i omega phi(a)}/phi'(a) - B^j u(b) e^{i omega phi(b)}/phi'(b)], j < count.
template <class U, class P>
std::vector<cplx> endpoint_terms(const PhaseProblem<U, P>& pr, int count) {
    std::vector<cplx> terms;
    if (count <= 0) return terms;
    const auto Ba = boundary_operators(pr.u, pr.phi, pr.a, count);
    const auto Bb = boundary_operators(pr.u, pr.phi, pr.b, count);
    const double da = detail::first_derivative(pr.phi, pr.a), db = detail::first_derivative(pr.phi, pr.b);
    const cplx ea = std::polar(1.0, pr.omega * pr.phi(pr.a)), eb = std::polar(1.0, pr.omega * pr.phi(pr.b));
    cplx factor = cplx(0.0, 1.0 / pr.omega);
    for (int j = 0; j < count; ++j) {
        terms.push_back(factor * (Ba[static_cast<std::size_t>(j)] * ea / da - Bb[static_cast<std::size_t>(j)] * eb / db));
        factor *= cplx(0.0, 1.0 / pr.omega);
    }
    return terms;
}

struct NonStationaryExpansion {
    std::vector<cplx> terms;     // j = 0..k-1
    double delta = 0.0;          // min |phi'| on the probe grid
    double remainder_bound = 0.0;

    cplx sum(int count) const {
        cplx s(0.0, 0.0);
        for (int j = 0; j < count && j < static_cast<int>(terms.size()); ++j) s += terms[static_cast<std::size_t>(j)];
        return s;
    }
    cplx sum() const { return sum(static_cast<int>(terms.size())); }
};

// Terms j < k of the integration-by-parts expansion; remainder_bound is
// |I| omega^{-k} sum_{m<=k} delta^{m-2k} ||u^(m)|| with unit constant.
// delta defaults to the probe-grid minimum of |phi'|; a supplied delta must
// not exceed it.
template <class U, class P>
NonStationaryExpansion nonstationary_expansion(const PhaseProblem<U, P>& pr,
                                               std::optional<double> delta = std::nullopt) {
    detail::check_problem(pr);
    const auto [lo, hi] = detail::phase_slope_range(pr.phi, pr.a, pr.b);
    (void)hi;
    const double d = delta.value_or(lo);
    if (!(lo >= d) || !(d > 1e-8))
        throw precision_error("nonstationary_expansion: |phi'| dips below delta on the probe grid");
    NonStationaryExpansion r;
    r.delta = d;
    r.terms = endpoint_terms(pr, pr.k);
    const auto norms = detail::derivative_sup_norms(pr.u, pr.a, pr.b, pr.k);
    double s = 0.0;
    for (int m = 0; m <= pr.k; ++m) s += std::pow(d, m - 2 * pr.k) * norms[static_cast<std::size_t>(m)];
    r.remainder_bound = (pr.b - pr.a) * std::pow(pr.omega, -pr.k) * s;
    return r;
}

// Unique zero of phi' in (a, b) by bracketed Newton; throws if phi' has no
// sign change or several on the probe grid.
template <class P>
double find_stationary_point(const P& phi, double a, double b) {
    double prev = detail::first_derivative(phi, a), xprev = a;
    double lo = 0.0, hi = 0.0, scale = std::fabs(prev);
    int changes = 0;
    for (int i = 1; i < kProbePoints; ++i) {
        const double x = detail::probe_point(a, b, i);
        const double d = detail::first_derivative(phi, x);
        scale = std::max(scale, std::fabs(d));
        if ((prev < 0.0) != (d < 0.0) || d == 0.0) {
            ++changes;
            lo = xprev;
            hi = x;
        }
        prev = d;
        xprev = x;
    }
    if (changes != 1) throw convergence_error("find_stationary_point: need exactly one stationary point");
    const double flo = detail::first_derivative(phi, lo);
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const Jet<2> j = phi(Jet<2>::variable(x));
        const double f = j.c[1], f2 = 2.0 * j.c[2];
        if (std::fabs(f) <= 1e-13 * scale) return x;
        if ((f < 0.0) == (flo < 0.0)) lo = x; else hi = x;
        double next = x - f / f2;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x || hi - lo <= 4e-16 * std::max(1.0, std::fabs(x))) {
            x = next;
            break;
        }
        x = next;
    }
    if (!(std::fabs(detail::first_derivative(phi, x)) <= 1e-12 * scale))
        throw precision_error("find_stationary_point: residual above 1e-12 of the slope scale");
    return x;
}

// L_j v(x0) = i^{-j} sum_{nu-mu=j, 2nu>=3mu} (-1)^nu (g^mu v)^{(2nu)}(x0) / (2^nu nu! mu! phi''(x0)^nu),
// with g = phi - phi(x0) - phi'(x0)(x-x0) - phi''(x0)(x-x0)^2/2; both jets are taken at x0.
inline cplx stationary_operator(int j, const OscJet& phi, const OscJet& v) {
    if (j < 0 || 6 * j > kOscOrder) throw validity_error("stationary_operator: j too large");
    const double phi2 = 2.0 * phi.c[2];
    OscJet g = phi;
    g.c[0] = g.c[1] = g.c[2] = 0.0;
    double sum = 0.0;
    OscJet gm(1.0);  // g^mu
    double mu_fact = 1.0;
    for (int mu = 0; mu <= 2 * j; ++mu) {
        if (mu > 0) {
            gm = gm * g;
            mu_fact *= mu;
        }
        const int nu = j + mu;
        const OscJet w = gm * v;
        double nu_fact = 1.0;
        for (int i = 2; i <= nu; ++i) nu_fact *= i;
        const double sign = nu % 2 ? -1.0 : 1.0;
        sum += sign * w.derivative(2 * nu) / (std::pow(2.0, nu) * nu_fact * mu_fact * std::pow(phi2, nu));
    }
    // i^{-j}
    static const cplx ipow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    return ipow[j % 4] * sum;
}

struct StationaryExpansion {
    double x0 = 0.0;
    double phi2 = 0.0;                 // phi''(x0)
    std::vector<cplx> L;               // L_j u(x0), j < k
    std::vector<cplx> main_terms;      // j < k
    std::vector<cplx> boundary_terms;  // j <= k-2
    double remainder_bound = 0.0;

    cplx total() const {
        cplx s(0.0, 0.0);
        for (const auto& t : main_terms) s += t;
        for (const auto& t : boundary_terms) s += t;
        return s;
    }
};

// main_terms[j] = (2 pi)^{1/2} e^{i omega phi(x0) + i (pi/4) sgn phi''} |phi''|^{-1/2} omega^{-1/2-j} L_j u(x0),
// boundary terms as in the non-stationary expansion for j <= k-2, and
// remainder_bound = omega^{-k} sum_{j<=2k} ||u^(j)|| with unit constant.
template <class U, class P>
StationaryExpansion stationary_expansion(const PhaseProblem<U, P>& pr, std::optional<double> x0 = std::nullopt,
                                         double kappa = 1e-3) {
    detail::check_problem(pr);
    StationaryExpansion r;
    r.x0 = x0 ? *x0 : find_stationary_point(pr.phi, pr.a, pr.b);
    const double len = pr.b - pr.a;
    if (!(r.x0 - pr.a > kappa * len && pr.b - r.x0 > kappa * len))
        throw validity_error("stationary_expansion: stationary point too close to the boundary");
    const OscJet Pj = pr.phi(OscJet::variable(r.x0));
    const OscJet Vj = pr.u(OscJet::variable(r.x0));
    r.phi2 = 2.0 * Pj.c[2];
    if (!(std::fabs(r.phi2) >= 1e-8)) throw precision_error("stationary_expansion: degenerate stationary point");
    const double sgn = r.phi2 > 0.0 ? 1.0 : -1.0;
    const cplx front = std::sqrt(2.0 * std::numbers::pi / std::fabs(r.phi2)) *
                       std::polar(1.0, pr.omega * Pj.c[0] + sgn * std::numbers::pi / 4.0);
    for (int j = 0; j < pr.k; ++j) {
        r.L.push_back(stationary_operator(j, Pj, Vj));
        r.main_terms.push_back(front * std::pow(pr.omega, -0.5 - j) * r.L.back());
    }
    r.boundary_terms = endpoint_terms(pr, pr.k - 1);
    const auto norms = detail::derivative_sup_norms(pr.u, pr.a, pr.b, 2 * pr.k);
    double s = 0.0;
    for (double v : norms) s += v;
    r.remainder_bound = std::pow(pr.omega, -pr.k) * s;
    return r;
}

// The rescaled cell integral of the exponential-sum asymptotics:
//   x(y) = x_l + (x_{l+1} - x_l) y,  u_l(y) = l / gamma'(x(y)),
//   phi_{l,nu}(y) = 2 gamma(x(y)) + h(x(y)) - 2 pi nu x(y),
//   omega = max |phi'_{l,nu}| on [0, 1],  Phi = (phi - phi(0)) / omega,
// so that int_{x_l}^{x_{l+1}} e^{i(2 gamma + h - 2 pi nu x)}/gamma' dx
//   = (x_{l+1} - x_l) l^{-1} e^{i phi(0)} int_0^1 u_l e^{i omega Phi} dy.
struct CellAmplitude {
    const ReferenceSolution* rs = nullptr;
    double x_l = 0.0;
    double width = 1.0;
    double l = 1.0;

    double operator()(double y) const { return l / rs->eval(x_l + width * y).gamma1; }
    template <int N>
    Jet<N> operator()(const Jet<N>& y) const {
        return l / rs->gamma1_jet(y * width + x_l);
    }
};

struct CellPhase {
    const ReferenceSolution* rs = nullptr;
    SqrtPhase h;
    double x_l = 0.0;
    double width = 1.0;
    double nu = 0.0;
    double inv_omega = 1.0;

    // phi(y) - phi(0), unnormalized.
    double relative(double y) const {
        // The two linear-growth pieces cancel to O(1) near the stationary
        // point, so they are combined in extended precision.
        const double dx = width * y;
        const long double lin = 2.0L * rs->gamma_offset_ld(x_l, dx) -
                                2.0L * std::numbers::pi_v<long double> * nu * static_cast<long double>(dx);
        return static_cast<double>(lin) + (h(x_l + dx) - h(x_l));
    }
    template <int N>
    Jet<N> relative(const Jet<N>& y) const {
        const Jet<N> dx = y * width;
        Jet<N> r = 2.0 * rs->gamma_offset_jet(x_l, dx) - dx * (2.0 * std::numbers::pi * nu);
        r.c[0] = relative(y.c[0]) - (h(x_l + dx.c[0]) - h(x_l));
        return r + (h(dx + x_l) - h(x_l));
    }

    double operator()(double y) const { return relative(y) * inv_omega; }
    template <int N>
    Jet<N> operator()(const Jet<N>& y) const { return relative(y) * inv_omega; }
};

struct CellProblem {
    long l = 0;
    long nu = 0;
    double x_l = 0.0;
    double x_next = 0.0;
    double phase0 = 0.0;  // phi_{l,nu}(0) reduced mod 2 pi
    PhaseProblem<CellAmplitude, CellPhase> problem;

    // Prefactor (x_{l+1} - x_l) l^{-1} e^{i phi(0)} mapping the unit-interval
    // integral back to the original one.
    cplx prefactor() const {
        return (x_next - x_l) / static_cast<double>(l) * std::polar(1.0, phase0);
    }
};

inline CellProblem build_cell_problem(const ReferenceSolution& rs, long l, long nu, int k = 2) {
    if (l < 2) throw validity_error("build_cell_problem: need l >= 2");
    const ModelParams& m = rs.params();
    CellProblem c;
    c.l = l;
    c.nu = nu;
    c.x_l = sampling_point(m, l);
    c.x_next = sampling_point(m, l + 1);
    const double width = c.x_next - c.x_l;
    CellAmplitude u{&rs, c.x_l, width, static_cast<double>(l)};
    CellPhase phi{&rs, SqrtPhase{m.lambda, m.F}, c.x_l, width, static_cast<double>(nu), 1.0};
    double omega = 0.0;
    for (int i = 0; i < kProbePoints; ++i)
        omega = std::max(omega, std::fabs(phi.relative(Jet<1>::variable(detail::probe_point(0.0, 1.0, i))).c[1]));
    phi.inv_omega = 1.0 / omega;
    // 2 pi nu x_l with x_l a half-integer contributes pi nu mod 2 pi.
    const double two_pi = 2.0 * std::numbers::pi;
    c.phase0 = std::remainder(2.0 * rs.eval(c.x_l).gamma + phi.h(c.x_l) - std::numbers::pi * static_cast<double>(nu % 2),
                              two_pi);
    c.problem = PhaseProblem<CellAmplitude, CellPhase>{0.0, 1.0, omega, u, phi, k};
    return c;
}

}  // namespace starkprufer
