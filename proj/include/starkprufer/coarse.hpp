#pragma once

// Coarse-grained Prufer variables on the blocks (x_l, x_{l+1}]:
//   log R(l) = log R(x_l) + (-1)^{l+1} lambda cos(2 theta(x_l)) / (4 pi l),
//   Lambda(l) = eta~(x_l) + (-1)^l lambda sin(2 theta(x_l)) / (4 pi l),
// their one-block recursion, the q-block recursion of the rational case,
// Cauchy-type convergence diagnostics, and the eigenfunction reconstruction
//   psi(x) ~ R(l) Im(e^{i(Lambda(l) - lambda sqrt(ceil(x)/F))} zeta(x)).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "expsum.hpp"
#include "prufer.hpp"
#include "reference.hpp"
#include "stats.hpp"

namespace starkprufer {

// Gamma(l) = -pi^3 l^3/(3F) + pi l (E - lambda)/F + 3 pi/8.
inline double coarse_gamma(const ModelParams& m, long l) {
    const double pi = std::numbers::pi;
    const double L = static_cast<double>(l);
    return -pi * pi * pi * L * L * L / (3.0 * m.F) + pi * L * (m.E - m.lambda) / m.F + 3.0 * pi / 8.0;
}

struct CoarseState {
    long l = 0;
    double logRl = 0.0;        // log of the dressed radius R(l)
    double Lambda = 0.0;       // dressed slow angle
    double Theta = 0.0;        // Lambda + Gamma(l)
    double logR_raw = 0.0;     // log R(x_l)
    double tilde_eta_raw = 0.0;  // eta~(x_l)
    double theta_x = 0.0;      // theta(x_l) = eta(ceil x_l) + gamma(x_l)
};

// Prufer states at n = ceil(x_l) for every l of the grid (including l_max+1),
// collected from one run of the exact recursion starting at `start`.
template <class Coupling>
std::vector<PruferState> trajectory_at_grid(const ReferenceSolution& rs, const ResonanceGrid& grid,
                                            PruferState start, Coupling&& coupling) {
    const long last = grid.n_at(grid.l_max + 1);
    if (start.n > grid.n_at(grid.l_min))
        throw validity_error("trajectory_at_grid: start lies beyond the first sampling point");
    std::vector<PruferState> out;
    out.reserve(grid.x.size());
    std::size_t next = 0;
    run_prufer(rs, start, last, coupling, [&](const PruferState& s, double, double) {
        if (next < grid.x.size() && s.n == grid.n_at(grid.l_min + static_cast<long>(next))) {
            out.push_back(s);
            ++next;
        }
    });
    return out;
}

// Dressed samples for l = l_min..l_max+1. `states` must contain, for each l,
// a state with n = ceil(x_l); extra states are ignored.
inline std::vector<CoarseState> extract_coarse(const ReferenceSolution& rs,
                                               const ResonanceGrid& grid,
                                               std::vector<PruferState> states) {
    const ModelParams& m = rs.params();
    const double pi = std::numbers::pi;
    std::sort(states.begin(), states.end(),
              [](const PruferState& a, const PruferState& b) { return a.n < b.n; });
    std::vector<CoarseState> out;
    for (long l = grid.l_min; l <= grid.l_max + 1; ++l) {
        const long n = grid.n_at(l);
        const auto it = std::lower_bound(states.begin(), states.end(), n,
                                         [](const PruferState& s, long v) { return s.n < v; });
        if (it == states.end() || it->n != n)
            throw validity_error("extract_coarse: trajectory does not cover x_l for l = " +
                                 std::to_string(l));
        const double xl = grid.x_at(l);
        CoarseState c;
        c.l = l;
        c.theta_x = it->eta + rs.eval(xl).gamma;
        c.logR_raw = it->logR;
        c.tilde_eta_raw = it->eta + m.lambda * std::sqrt(static_cast<double>(n) / m.F);
        const double sign = l % 2 == 0 ? 1.0 : -1.0;  // (-1)^l
        const double scale = m.lambda / (4.0 * pi * static_cast<double>(l));
        c.logRl = c.logR_raw - sign * scale * std::cos(2.0 * c.theta_x);
        c.Lambda = c.tilde_eta_raw + sign * scale * std::sin(2.0 * c.theta_x);
        c.Theta = c.Lambda + coarse_gamma(m, l);
        out.push_back(c);
    }
    return out;
}

struct StepPrediction {
    double dlogR = 0.0;
    double dLambda = 0.0;
};

// Main terms of the one-block recursion:
//   dlogR = lambda/sqrt(2Fl) sin 2Theta + lambda^2/(4Fl) (1 + cos 4Theta),
//   dLambda = lambda/sqrt(2Fl) cos 2Theta + lambda^2 S(l) [- lambda^2/(4Fl) sin 4Theta].
// The bracketed O(1/l) term is kept by default; see the ledger.
inline StepPrediction predict_l_step(const ModelParams& m, const CoarseState& s, double S_l,
                                     bool quartic_angle_term = true) {
    if (s.l < 1) throw validity_error("predict_l_step: need l >= 1");
    const double L = static_cast<double>(s.l);
    const double a = m.lambda / std::sqrt(2.0 * m.F * L);
    const double b = m.lambda * m.lambda / (4.0 * m.F * L);
    StepPrediction p;
    p.dlogR = a * std::sin(2.0 * s.Theta) + b * (1.0 + std::cos(4.0 * s.Theta));
    p.dLambda = a * std::cos(2.0 * s.Theta) + m.lambda * m.lambda * S_l;
    if (quartic_angle_term) p.dLambda -= b * std::sin(4.0 * s.Theta);
    return p;
}

struct StepResidual {
    long l = 0;
    double dlogR = 0.0;
    double dLambda = 0.0;
};

// |actual - predicted| for consecutive samples; S(l) from the explicit double sum.
inline std::vector<StepResidual> l_step_residuals(const ReferenceSolution& rs,
                                                  const std::vector<CoarseState>& c,
                                                  bool quartic_angle_term = true) {
    std::vector<StepResidual> out;
    for (std::size_t k = 0; k + 1 < c.size(); ++k) {
        if (c[k + 1].l != c[k].l + 1) throw validity_error("l_step_residuals: samples not consecutive");
        const double S = double_sum(rs, c[k].l).S;
        const StepPrediction p = predict_l_step(rs.params(), c[k], S, quartic_angle_term);
        out.push_back({c[k].l, std::fabs(c[k + 1].logRl - c[k].logRl - p.dlogR),
                       std::fabs(c[k + 1].Lambda - c[k].Lambda - p.dLambda)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rational case F = pi^2 q/(3p).

inline const Rational& require_rational(const ModelParams& m) {
    if (!m.rational) throw validity_error("rational case: params carry no (p, q) encoding");
    return *m.rational;
}

// Omega(k) = 3p (E - lambda) k/pi + 3 pi/8, so that 2 Omega(k) = 2 Gamma(qk) mod 2 pi.
inline double omega_q(const ModelParams& m, long k) {
    const Rational& r = require_rational(m);
    const double pi = std::numbers::pi;
    return 3.0 * static_cast<double>(r.p) * (m.E - m.lambda) * static_cast<double>(k) / pi +
           3.0 * pi / 8.0;
}

inline cplx q_gauss_sum(const ModelParams& m) {
    const Rational& r = require_rational(m);
    return cubic_gauss_sum({r.p, r.q, m.E, m.lambda, std::nullopt});
}

struct QScaleState {
    long k = 0;
    double logRqk = 0.0;
    double Lambda_qk = 0.0;
    double Omega_k = 0.0;
    cplx w;
};

// Every q-th dressed sample, l = qk.
inline std::vector<QScaleState> extract_q_scale(const ModelParams& m,
                                                const std::vector<CoarseState>& c) {
    const Rational& r = require_rational(m);
    const cplx w = q_gauss_sum(m);
    std::vector<QScaleState> out;
    for (const auto& s : c) {
        if (s.l % r.q != 0) continue;
        const long k = s.l / r.q;
        out.push_back({k, s.logRl, s.Lambda, omega_q(m, k), w});
    }
    return out;
}

inline StepPrediction predict_q_step(const ModelParams& m, const QScaleState& s) {
    const Rational& r = require_rational(m);
    if (s.k < 1) throw validity_error("predict_q_step: need k >= 1");
    const double qk = static_cast<double>(r.q * s.k);
    const double a = m.lambda / std::sqrt(2.0 * m.F * qk);
    const double b = m.lambda * m.lambda / (4.0 * m.F * qk);
    const double ang = s.Omega_k + s.Lambda_qk;
    const cplx e2 = std::polar(1.0, 2.0 * ang) * s.w;
    const cplx e4 = std::polar(1.0, 4.0 * ang) * s.w * s.w;
    StepPrediction p;
    p.dlogR = a * e2.imag() + b * std::norm(s.w) + b * e4.real();
    p.dLambda = a * e2.real();
    return p;
}

struct EnergyClass {
    bool exceptional = false;
    std::optional<long> m;
    cplx w_at_E;
};

// Exceptional iff dist(E - lambda, (pi^2/(3p)) Z) <= 1e-9; uses the supplied
// (p, q), never a reconstruction of rationality from F.
inline EnergyClass classify_energy(const ModelParams& params) {
    const Rational& r = require_rational(params);
    const double pi = std::numbers::pi;
    const double step = pi * pi / (3.0 * static_cast<double>(r.p));
    const double t = (params.E - params.lambda) / step;
    const double nearest = std::round(t);
    EnergyClass c;
    if (std::fabs(t - nearest) * step <= 1e-9) {
        c.exceptional = true;
        c.m = static_cast<long>(nearest);
        c.w_at_E = cubic_gauss_sum({r.p, r.q, 0.0, 0.0, *c.m});
    } else {
        c.w_at_E = q_gauss_sum(params);
    }
    return c;
}

struct WindowPolicy {
    long M_min = 1;           // first dyadic window [M, 2M]
    double tolerance = 10.0;  // converged iff osc(M) <= tolerance * M^{-rate}
    double rate = 0.25;
    long fit_min_M = 16;      // windows used for the decay fit
    int min_windows = 4;
};

struct ConvergenceReport {
    bool converged = false;
    double limit_est = 0.0;
    std::vector<std::pair<long, double>> profile;  // (M, sup-oscillation over [M, 2M])
    double decay_slope = 0.0;                      // log-log slope of the fitted windows
    bool slope_available = false;
};

// Dyadic Cauchy profile of a sequence v(k), k = k0, k0+1, ...: osc(M) is
// max - min of v over [M, 2M]. Windows must lie inside the data.
inline ConvergenceReport convergence_diagnostic(const std::vector<double>& v, long k0,
                                                const WindowPolicy& policy = {}) {
    if (v.empty()) throw validity_error("convergence_diagnostic: empty sequence");
    const long k_last = k0 + static_cast<long>(v.size()) - 1;
    ConvergenceReport r;
    std::vector<double> fx, fy;
    for (long M = std::max(policy.M_min, std::max<long>(k0, 1)); 2 * M <= k_last; M *= 2) {
        double lo = v[static_cast<std::size_t>(M - k0)], hi = lo;
        for (long k = M; k <= 2 * M; ++k) {
            const double x = v[static_cast<std::size_t>(k - k0)];
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        r.profile.emplace_back(M, hi - lo);
        if (M >= policy.fit_min_M) {
            fx.push_back(static_cast<double>(M));
            fy.push_back(std::max(hi - lo, 1e-300));
        }
    }
    if (static_cast<int>(r.profile.size()) < policy.min_windows)
        throw validity_error("convergence_diagnostic: fewer than " +
                             std::to_string(policy.min_windows) + " dyadic windows");
    const auto& last = r.profile.back();
    r.converged = last.second <= policy.tolerance * std::pow(static_cast<double>(last.first), -policy.rate);
    // Mean over the last window as the limit estimate.
    double s = 0.0;
    for (long k = last.first; k <= 2 * last.first; ++k) s += v[static_cast<std::size_t>(k - k0)];
    r.limit_est = s / static_cast<double>(last.first + 1);
    if (fx.size() >= 2) {
        r.decay_slope = fit_loglog(fx, fy).slope;
        r.slope_available = true;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Eigenfunction reconstruction.

struct Reconstruction {
    double psi = 0.0;
    double relative_band = 0.0;  // C l^{-1/2}
};

// Window of block l: ((pi^2/F)(l-1/2)^2, (pi^2/F)(l+1/2)^2].
inline std::pair<double, double> coarse_window(const ModelParams& m, long l) {
    const double c = std::numbers::pi * std::numbers::pi / m.F;
    const double L = static_cast<double>(l);
    return {c * (L - 0.5) * (L - 0.5), c * (L + 0.5) * (L + 0.5)};
}

inline Reconstruction reconstruct_eigenfunction(const CoarseState& s, const ReferenceSolution& rs,
                                                double x, double C = 1.0) {
    const ModelParams& m = rs.params();
    const auto [lo, hi] = coarse_window(m, s.l);
    if (!(x > lo && x <= hi)) throw validity_error("reconstruct_eigenfunction: x outside the l-th window");
    const double shift = m.lambda * std::sqrt(std::ceil(x) / m.F);
    const cplx z = std::polar(1.0, s.Lambda - shift) * rs.eval(x).zeta;
    return {std::exp(s.logRl) * z.imag(), C / std::sqrt(static_cast<double>(s.l))};
}

// Exact psi(x) = R(n) Im(e^{i eta(n)} zeta(x)) for x in (n-1, n].
inline double prufer_psi(const PruferState& s, const ReferenceSolution& rs, double x) {
    if (!(x > static_cast<double>(s.n - 1) && x <= static_cast<double>(s.n)))
        throw validity_error("prufer_psi: x outside the state's cell");
    return (s.rho() * rs.eval(x).zeta).imag();
}

}  // namespace starkprufer
