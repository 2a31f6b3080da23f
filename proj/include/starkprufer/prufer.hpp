#pragma once

// Relative Prufer variables rho(n) = 2i alpha(n) = R(n) e^{i eta(n)} on the
// cell (n-1, n), theta(n) = eta(n) + gamma(n), and their one-step recursion
//   rho(n+1) = rho(n) (1 + U sin(theta) e^{-i theta}),   U = g_n / gamma'(n).

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "propagation.hpp"
#include "reference.hpp"

namespace starkprufer {

struct PruferState {
    long n = 1;
    double logR = 0.0;
    double eta = 0.0;

    cplx rho() const { return std::polar(std::exp(logR), eta); }
};

// Principal argument in (-pi, pi].
inline double principal_arg(cplx z) {
    double a = std::arg(z);
    if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

// Solution with psi(0) = sin(theta0), psi'(0+) = cos(theta0); rho(1) comes
// from the cell (0, 1): rho = psi'(0) conj(zeta(0)) - psi(0) conj(zeta'(0)).
inline PruferState initial_state(const ReferenceSolution& rs, double theta0) {
    const PhasePoint p = rs.eval(0.0);
    const cplx rho = std::cos(theta0) * std::conj(p.zeta) - std::sin(theta0) * std::conj(p.zeta_prime);
    return {1, std::log(std::abs(rho)), principal_arg(rho)};
}

// State built from a given coefficient alpha(1) of the cell (0, 1).
inline PruferState state_from_alpha(cplx alpha1) {
    const cplx rho = cplx(0.0, 2.0) * alpha1;
    return {1, std::log(std::abs(rho)), principal_arg(rho)};
}

inline double coupling_U(const PhasePoint& p, double g) { return g / p.gamma1; }

inline double coupling_U(const ReferenceSolution& rs, long n, double g) {
    if (n < 1) throw validity_error("coupling_U: n must be >= 1");
    return coupling_U(rs.eval(static_cast<double>(n)), g);
}

// Exact step with gamma(n) supplied.
inline PruferState step_exact(const PruferState& s, double U, double gamma_n) {
    const double theta = s.eta + gamma_n;
    const double sn = std::sin(theta), cs = std::cos(theta);
    // 1 + U sin(theta) e^{-i theta}
    const cplx f(1.0 + U * sn * cs, -U * sn * sn);
    PruferState r;
    r.n = s.n + 1;
    r.logR = s.logR + 0.5 * std::log1p(U * 2.0 * sn * cs + U * U * sn * sn);
    r.eta = s.eta + principal_arg(f);
    return r;
}

inline PruferState step_exact(const PruferState& s, double U, const ReferenceSolution& rs) {
    return step_exact(s, U, rs.eval(static_cast<double>(s.n)).gamma);
}

struct ApproxStep {
    double dlogR = 0.0;
    double deta = 0.0;
};

// Second-order expansions of the exact step; valid for |U| <= 1/2.
inline ApproxStep step_approx(double U, double theta) {
    if (std::fabs(U) > 0.5) throw validity_error("step_approx: |U| must be <= 0.5");
    const double s2 = std::sin(2 * theta), c2 = std::cos(2 * theta);
    const double s4 = std::sin(4 * theta), c4 = std::cos(4 * theta);
    ApproxStep a;
    a.dlogR = U / 2 * s2 + U * U / 8 - U * U / 8 * (2 * c2 - c4);
    a.deta = -U / 2 + U / 2 * c2 + U * U / 4 * (s2 - 0.5 * s4);
    return a;
}

struct SlowVariables {
    double tilde_eta = 0.0;
    double tilde_gamma = 0.0;
};

// eta~ = eta + lambda sqrt(ceil(x)/F), gamma~ = gamma - lambda sqrt(x/F), at an integer n.
inline SlowVariables slow_variables(const PruferState& s, double gamma_n, const ModelParams& m) {
    if (s.n < 1) throw validity_error("slow_variables: n must be >= 1");
    const double shift = m.lambda * std::sqrt(static_cast<double>(s.n) / m.F);
    return {s.eta + shift, gamma_n - shift};
}

// gamma(n), gamma'(n) for n = 0..N, shared read-only by many trajectories.
class PhaseTable {
public:
    PhaseTable(const ReferenceSolution& rs, long n_max) : params_(rs.params()) {
        if (n_max < 1) throw validity_error("PhaseTable: n_max must be >= 1");
        if (n_max > 100'000'000) throw resource_error("PhaseTable: n_max exceeds 1e8");
        gamma_.resize(static_cast<std::size_t>(n_max + 1));
        gamma1_.resize(static_cast<std::size_t>(n_max + 1));
        for (long n = 0; n <= n_max; ++n) {
            const PhasePoint p = rs.eval(static_cast<double>(n));
            gamma_[static_cast<std::size_t>(n)] = p.gamma;
            gamma1_[static_cast<std::size_t>(n)] = p.gamma1;
        }
        const PhasePoint p0 = rs.eval(0.0);
        zeta0_ = p0.zeta;
        zeta0_prime_ = p0.zeta_prime;
    }

    long n_max() const { return static_cast<long>(gamma_.size()) - 1; }
    double gamma(long n) const { return gamma_[static_cast<std::size_t>(n)]; }
    double gamma1(long n) const { return gamma1_[static_cast<std::size_t>(n)]; }
    const ModelParams& params() const { return params_; }
    cplx zeta0() const { return zeta0_; }
    cplx zeta0_prime() const { return zeta0_prime_; }

    PruferState initial_state(double theta0) const {
        const cplx rho = std::cos(theta0) * std::conj(zeta0_) - std::sin(theta0) * std::conj(zeta0_prime_);
        return {1, std::log(std::abs(rho)), principal_arg(rho)};
    }

private:
    ModelParams params_;
    std::vector<double> gamma_;
    std::vector<double> gamma1_;
    cplx zeta0_, zeta0_prime_;
};

// Runs the exact recursion from `start` up to n = N. `coupling(n)` returns
// g_n; `visit(state, gamma_n, gamma1_n)` sees every state n = start.n..N
// together with the reference phase data at n.
template <class Coupling, class Visit>
PruferState run_prufer(const ReferenceSolution& rs, PruferState start, long N, Coupling&& coupling,
                       Visit&& visit) {
    if (N > 100'000'000) throw resource_error("run_prufer: N exceeds 1e8");
    PruferState s = start;
    while (true) {
        const PhasePoint p = rs.eval(static_cast<double>(s.n));
        visit(static_cast<const PruferState&>(s), p.gamma, p.gamma1);
        if (s.n >= N) break;
        s = step_exact(s, coupling(s.n) / p.gamma1, p.gamma);
    }
    return s;
}

template <class Coupling, class Visit>
PruferState run_prufer(const PhaseTable& table, PruferState start, long N, Coupling&& coupling,
                       Visit&& visit) {
    if (N > table.n_max()) throw validity_error("run_prufer: phase table too short");
    PruferState s = start;
    while (true) {
        const double g = table.gamma(s.n), g1 = table.gamma1(s.n);
        visit(static_cast<const PruferState&>(s), g, g1);
        if (s.n >= N) break;
        s = step_exact(s, coupling(s.n) / g1, g);
    }
    return s;
}

struct ResonanceGrid {
    long l_min = 0;
    long l_max = 0;
    std::vector<double> X;  // X[l - l_min]
    std::vector<double> x;  // x[l - l_min], half-integers

    double X_at(long l) const { return X[static_cast<std::size_t>(l - l_min)]; }
    double x_at(long l) const { return x[static_cast<std::size_t>(l - l_min)]; }
    // First integer of the l-th block (x_l, x_{l+1}], i.e. ceil(x_l).
    long n_at(long l) const { return static_cast<long>(x_at(l) + 0.5); }
};

// x_l = ceil((pi^2/F)(l - 1/2)^2) - 1/2.
inline double sampling_point(const ModelParams& m, long l) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double lh = static_cast<double>(l) - 0.5;
    return std::ceil(pi2 / m.F * lh * lh) - 0.5;
}

// X solving gamma'(X) = pi l, by Newton with a bisection safeguard on the
// bracket [pi^2 (l-1)^2 / F, pi^2 (l+1)^2 / F].
inline double resonant_point(const ReferenceSolution& rs, long l) {
    const ModelParams& m = rs.params();
    const double pi = std::numbers::pi;
    const double target = pi * static_cast<double>(l);
    double lo = pi * pi * static_cast<double>((l - 1) * (l - 1)) / m.F;
    double hi = pi * pi * static_cast<double>((l + 1) * (l + 1)) / m.F;
    const double flo = rs.eval(lo).gamma1 - target, fhi = rs.eval(hi).gamma1 - target;
    if (!(flo < 0.0 && fhi > 0.0))
        throw convergence_error("resonant_point: root not bracketed (l_min too small?)");
    double X = std::clamp((pi * pi * static_cast<double>(l * l) - m.E) / m.F, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const PhasePoint p = rs.eval(X);
        const double f = p.gamma1 - target;
        if (std::fabs(f) <= 1e-12 * target) return X;
        if (f < 0.0) lo = X; else hi = X;
        double next = X - f / p.gamma2;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        X = next;
    }
    throw convergence_error("resonant_point: Newton iteration did not converge");
}

inline ResonanceGrid build_resonance_grid(const ReferenceSolution& rs, long l_min, long l_max) {
    if (l_min < 2 || l_max < l_min) throw validity_error("build_resonance_grid: bad l range");
    ResonanceGrid g;
    g.l_min = l_min;
    g.l_max = l_max;
    // x_{l_max + 1} closes the last block.
    for (long l = l_min; l <= l_max + 1; ++l) {
        g.X.push_back(resonant_point(rs, l));
        g.x.push_back(sampling_point(rs.params(), l));
    }
    for (std::size_t k = 0; k + 1 < g.X.size(); ++k) {
        if (!(g.x[k] < g.X[k] && g.X[k] < g.x[k + 1]))
            throw convergence_error("build_resonance_grid: x_l < X_l < x_{l+1} violated");
        const double d1 = rs.eval(g.x[k]).gamma2;
        if (!(d1 > 0.0)) throw convergence_error("build_resonance_grid: gamma' not increasing");
    }
    return g;
}

}  // namespace starkprufer
