#pragma once

// Exact propagation of generalized eigenfunctions of
//   -psi'' - F x psi = E psi  on (n, n+1),   psi'(n+) - psi'(n-) = g_n psi(n),
// in the basis {zeta, conj(zeta)}, plus SU(1,1) transfer-matrix products in
// the coordinates (alpha, beta) = (rho/2i, conj(alpha)).

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"
#include "reference.hpp"

namespace starkprufer {

struct CellState {
    double x = 0.0;
    double psi = 0.0;
    double psi_prime = 0.0;
};

// Coefficient alpha of psi = alpha zeta + conj(alpha) conj(zeta) from the
// Cauchy data at a point where zeta, zeta' are known. The Wronskian of the
// basis is -2i, so the 2x2 solve is explicit.
inline cplx airy_coefficient(const PhasePoint& p, double psi, double psi_prime) {
    const double scale = std::norm(p.zeta) + std::norm(p.zeta_prime);
    if (!(scale / 2.0 < 1e12)) throw precision_error("propagate: degenerate Airy basis");
    return (psi * std::conj(p.zeta_prime) - psi_prime * std::conj(p.zeta)) / cplx(0.0, -2.0);
}

inline CellState evaluate_combination(const PhasePoint& p, cplx alpha) {
    return {p.x, 2.0 * (alpha * p.zeta).real(), 2.0 * (alpha * p.zeta_prime).real()};
}

// (psi, psi') at n+ to (n+1)-, with the basis data of both endpoints supplied.
inline CellState propagate_cell(const PhasePoint& at_n, const PhasePoint& at_next,
                                const CellState& state) {
    const cplx alpha = airy_coefficient(at_n, state.psi, state.psi_prime);
    return evaluate_combination(at_next, alpha);
}

inline CellState propagate_cell(const ReferenceSolution& rs, const CellState& state) {
    const double n = state.x;
    if (n != std::floor(n)) throw validity_error("propagate_cell: state must sit at an integer");
    return propagate_cell(rs.eval(n), rs.eval(n + 1.0), state);
}

inline CellState apply_jump(CellState state, double g) {
    state.psi_prime += g * state.psi;
    return state;
}

// exp(log_scale) * [[a, b], [conj(b), conj(a)]].
struct TransferSU11 {
    cplx a{1.0, 0.0};
    cplx b{0.0, 0.0};
    double log_scale = 0.0;

    double det() const { return std::exp(2.0 * log_scale) * (std::norm(a) - std::norm(b)); }

    // Applies the matrix to (x, y).
    std::pair<cplx, cplx> apply(cplx x, cplx y) const {
        const double s = std::exp(log_scale);
        return {s * (a * x + b * y), s * (std::conj(b) * x + std::conj(a) * y)};
    }
};

// A_n = 1 + U/(2i) [[1, e^{-2i gamma}], [-e^{2i gamma}, -1]],  U = g_n / gamma'(n).
inline TransferSU11 one_step_su11(double U, double gamma_n) {
    TransferSU11 t;
    const cplx half = U / cplx(0.0, 2.0);
    t.a = 1.0 + half;
    t.b = half * std::polar(1.0, -2.0 * gamma_n);
    return t;
}

inline TransferSU11 one_step_su11(const ReferenceSolution& rs, long n, double g) {
    if (n < 1) throw validity_error("one_step_su11: n must be >= 1");
    const PhasePoint p = rs.eval(static_cast<double>(n));
    return one_step_su11(g / p.gamma1, p.gamma);
}

// left * right for matrices of the SU(1,1) shape.
inline TransferSU11 multiply(const TransferSU11& left, const TransferSU11& right) {
    TransferSU11 r;
    r.a = left.a * right.a + left.b * std::conj(right.b);
    r.b = left.a * right.b + left.b * std::conj(right.a);
    r.log_scale = left.log_scale + right.log_scale;
    return r;
}

// Running product T_n = A_n ... A_1 with periodic renormalization.
class TransferAccumulator {
public:
    static constexpr int kRenormalizeEvery = 64;

    void push(const TransferSU11& step) {
        t_ = multiply(step, t_);
        ++count_;
        if (++since_ >= kRenormalizeEvery) renormalize();
    }

    void renormalize() {
        since_ = 0;
        const double s = std::abs(t_.a);
        t_.a /= s;
        t_.b /= s;
        t_.log_scale += std::log(s);
        // With |a| = 1 the exact value of |a|^2 - |b|^2 is e^{-2L}; its
        // absolute error is the determinant defect in units of ||T||^2.
        const double defect = std::fabs(std::norm(t_.a) - std::norm(t_.b) - std::exp(-2.0 * t_.log_scale));
        if (defect > 1e-6)
            throw precision_error("transfer product: determinant drifted beyond 1e-6 ||T||^2");
    }

    const TransferSU11& matrix() const { return t_; }
    long steps() const { return count_; }

    // log ||T||: the singular values are e^{L}(|a| +- |b|).
    double log_norm() const { return t_.log_scale + std::log(std::abs(t_.a) + std::abs(t_.b)); }

    // |T (1,1)^t| / |T (1,-1)^t|.
    double rho_ratio() const { return std::abs(t_.a + t_.b) / std::abs(t_.a - t_.b); }

    // Unit vector spanning the eigenspace of |T| for the eigenvalue 1/||T||;
    // (1, 0) when T is unitary.
    std::pair<cplx, cplx> p_minus() const { return p_minus_of(t_); }

    static std::pair<cplx, cplx> p_minus_of(const TransferSU11& t) {
        const cplx ab = t.a * std::conj(t.b);
        if (std::abs(ab) == 0.0) return {cplx(1.0, 0.0), cplx(0.0, 0.0)};
        const double r = 1.0 / std::sqrt(2.0);
        return {cplx(r, 0.0), -r * ab / std::abs(ab)};
    }

private:
    TransferSU11 t_;
    int since_ = 0;
    long count_ = 0;
};

struct TransferSummary {
    TransferSU11 T;
    double log_norm = 0.0;
    double rho_ratio = 1.0;
    std::pair<cplx, cplx> p_minus;
};

inline TransferSummary accumulate_transfer(const std::vector<TransferSU11>& steps) {
    if (steps.empty()) throw validity_error("accumulate_transfer: empty sequence");
    TransferAccumulator acc;
    for (const auto& s : steps) acc.push(s);
    acc.renormalize();
    return {acc.matrix(), acc.log_norm(), acc.rho_ratio(), acc.p_minus()};
}

// Integral of |psi|^2 over (n-1, n) for psi = 2 Re(alpha zeta), by composite
// 16-point Gauss-Legendre with at least max(32, 8 ceil(gamma'/(2 pi))) nodes.
inline double l2_norm_cell(const ReferenceSolution& rs, cplx alpha, long n) {
    if (n < 1) throw validity_error("l2_norm_cell: n must be >= 1");
    if (alpha == cplx(0.0, 0.0)) return 0.0;
    const double g1 = rs.eval(static_cast<double>(n)).gamma1;
    const long nodes = std::max<long>(32, 8 * static_cast<long>(std::ceil(g1 / (2.0 * std::numbers::pi))));
    const long panels = (nodes + 15) / 16;
    const double h = 1.0 / static_cast<double>(panels);
    double total = 0.0;
    const auto f = [&](double x) {
        const double psi = 2.0 * (alpha * rs.eval(x).zeta).real();
        return psi * psi;
    };
    for (long k = 0; k < panels; ++k) {
        const double a = static_cast<double>(n - 1) + k * h;
        total += boost::math::quadrature::gauss<double, 16>::integrate(f, a, a + h);
    }
    return total;
}

// Trajectory-independent moments A = int |zeta|^2, B = int zeta^2 over (n-1, n),
// with the same quadrature as l2_norm_cell. The mass of psi = 2 Re(alpha zeta)
// is then 2 |alpha|^2 A + 2 Re(alpha^2 B), so many trajectories can share them.
struct CellMoments {
    double A = 0.0;
    cplx B;

    double mass(cplx alpha) const { return 2.0 * std::norm(alpha) * A + 2.0 * (alpha * alpha * B).real(); }
};

inline CellMoments cell_moments(const ReferenceSolution& rs, long n) {
    if (n < 1) throw validity_error("cell_moments: n must be >= 1");
    const double g1 = rs.eval(static_cast<double>(n)).gamma1;
    const long nodes = std::max<long>(32, 8 * static_cast<long>(std::ceil(g1 / (2.0 * std::numbers::pi))));
    const long panels = (nodes + 15) / 16;
    const double h = 1.0 / static_cast<double>(panels);
    const auto& rule = boost::math::quadrature::gauss<double, 16>::abscissa();
    const auto& weight = boost::math::quadrature::gauss<double, 16>::weights();
    CellMoments m;
    const auto add = [&](double x, double w) {
        const cplx z = rs.eval(x).zeta;
        m.A += w * std::norm(z);
        m.B += w * z * z;
    };
    for (long k = 0; k < panels; ++k) {
        const double mid = static_cast<double>(n - 1) + (static_cast<double>(k) + 0.5) * h;
        const double half = 0.5 * h;
        // The rule stores non-negative abscissae; a zero node has to be counted once.
        for (std::size_t i = 0; i < rule.size(); ++i) {
            add(mid + half * rule[i], half * weight[i]);
            if (rule[i] != 0.0) add(mid - half * rule[i], half * weight[i]);
        }
    }
    return m;
}

// Ratio of cumulative L^2 masses of two solutions up to cell n, from their
// per-cell masses (index k holds the mass of cell (k, k+1)).
inline double subordinacy_ratio(const std::vector<double>& cell_mass_psi,
                                const std::vector<double>& cell_mass_phi, std::size_t cells) {
    if (cells > cell_mass_psi.size() || cells > cell_mass_phi.size())
        throw validity_error("subordinacy_ratio: trajectories do not cover the range");
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < cells; ++k) {
        a += cell_mass_psi[k];
        b += cell_mass_phi[k];
    }
    if (b < 1e-300) throw validity_error("subordinacy_ratio: reference mass vanishes");
    return a / b;
}

}  // namespace starkprufer
