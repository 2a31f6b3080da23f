#pragma once

// Exponential sums with phase gamma:
//   sum_{a<n<=b} e^{i(mu gamma(n) + h(n))} / gamma'(n)^alpha,
// their bound envelopes, the stationary-phase asymptotic over (x_l, x_{l+1}],
// the double sum of the l-scale recursion, and cubic Gauss sums.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "prufer.hpp"
#include "reference.hpp"

namespace starkprufer {

// Canonical phase perturbation h(x) = -2 lambda sqrt(x/F); generic over the
// scalar type so it can be evaluated on derivative towers.
struct SqrtPhase {
    double lambda = 0.0;
    double F = 1.0;

    template <class T>
    T operator()(const T& x) const {
        using std::sqrt;
        return sqrt(x / F) * (-2.0 * lambda);
    }
};

struct ZeroPhase {
    template <class T>
    T operator()(const T&) const { return T(0.0); }
};

// Kahan-compensated complex accumulator.
class KahanComplex {
public:
    void add(cplx v) {
        const cplx y = v - c_;
        const cplx t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    cplx value() const { return s_; }

private:
    cplx s_{0.0, 0.0};
    cplx c_{0.0, 0.0};
};

struct ExpSumSpec {
    double a = 0.0;
    double b = 1.0;
    double mu = 2.0;
    double alpha = 0.0;
};

inline constexpr double kMaxSumTerms = 1e8;

inline void check_expsum_spec(const ExpSumSpec& s) {
    if (!(s.a < s.b)) throw validity_error("expsum: need a < b");
    if (!(s.alpha >= 0.0)) throw validity_error("expsum: need alpha >= 0");
    if (!(s.mu > 0.0)) throw validity_error("expsum: need mu > 0");
    if (s.b - s.a > kMaxSumTerms) throw resource_error("expsum: more than 1e8 terms");
}

inline cplx expsum_term(const PhasePoint& p, double mu, double alpha, double h) {
    const double w = alpha == 0.0 ? 1.0 : std::pow(p.gamma1, -alpha);
    return std::polar(w, mu * p.gamma + h);
}

// h is any callable double -> double evaluated at the integers n.
template <class H>
cplx raw_expsum(const ReferenceSolution& rs, const ExpSumSpec& spec, H&& h) {
    check_expsum_spec(spec);
    const long first = static_cast<long>(std::floor(spec.a)) + 1;
    const long last = static_cast<long>(std::floor(spec.b));
    KahanComplex acc;
    for (long n = first; n <= last; ++n) {
        const double x = static_cast<double>(n);
        acc.add(expsum_term(rs.eval(x), spec.mu, spec.alpha, h(x)));
    }
    return acc.value();
}

// b^{1/4} a^{-1/2} (b - a + a^{1/2}).
inline double vdc_envelope(double a, double b) {
    if (!(a > 0.0 && b > a)) throw validity_error("vdc_envelope: need 0 < a < b");
    return std::pow(b, 0.25) / std::sqrt(a) * (b - a + std::sqrt(a));
}

// 1/kappa for a phase whose derivative (in units of 2 pi) stays kappa away from Z.
inline double kuzmin_landau_envelope(double kappa) {
    if (!(kappa > 0.0)) throw validity_error("kuzmin_landau_envelope: need kappa > 0");
    return 1.0 / kappa;
}

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio() const { return lhs / rhs; }
};

// max |S(b) - S(a)| over sampled endpoints of the integer range (first-1, last],
// given the partial sums S at every integer of the range.
inline double max_window_sum(const std::vector<cplx>& partial, std::size_t samples = 256) {
    if (partial.size() < 2) return partial.empty() ? 0.0 : std::abs(partial.front());
    std::vector<std::size_t> idx;
    const std::size_t n = partial.size();
    if (n <= samples) {
        for (std::size_t k = 0; k < n; ++k) idx.push_back(k);
    } else {
        for (std::size_t k = 0; k < samples; ++k) idx.push_back(k * (n - 1) / (samples - 1));
    }
    double best = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j)
            best = std::max(best, std::abs(partial[idx[j]] - partial[idx[i]]));
    return best;
}

template <class H>
std::vector<cplx> partial_expsums(const ReferenceSolution& rs, double a, double b, double mu,
                                  double alpha, H&& h) {
    check_expsum_spec({a, b, mu, alpha});
    const long first = static_cast<long>(std::floor(a)) + 1;
    const long last = static_cast<long>(std::floor(b));
    std::vector<cplx> partial;
    partial.reserve(static_cast<std::size_t>(last - first + 2));
    KahanComplex acc;
    partial.push_back(acc.value());
    for (long n = first; n <= last; ++n) {
        const double x = static_cast<double>(n);
        acc.add(expsum_term(rs.eval(x), mu, alpha, h(x)));
        partial.push_back(acc.value());
    }
    return partial;
}

// Sums over sub-windows of [x_l, x_{l+1}] against l^{-alpha+1/2}(1 + l^{1-2 beta}).
template <class H>
BoundCheck interval_bound_check(const ReferenceSolution& rs, long l, double alpha, double beta,
                                double mu, H&& h) {
    if (l < 2) throw validity_error("interval_bound_check: need l >= 2");
    const double a = sampling_point(rs.params(), l), b = sampling_point(rs.params(), l + 1);
    const auto partial = partial_expsums(rs, a, b, mu, alpha, h);
    const double L = static_cast<double>(l);
    return {max_window_sum(partial), std::pow(L, -alpha + 0.5) * (1.0 + std::pow(L, 1.0 - 2.0 * beta))};
}

// Sums over sub-windows of [X_l + C l^sigma, X_{l+1} - C l^sigma] (mu = 2)
// against l^{-alpha-sigma+1}(1 + l^{1-2 beta}).
template <class H>
BoundCheck away_bound_check(const ReferenceSolution& rs, long l, double alpha, double beta,
                            double sigma, H&& h, double C = 1.0) {
    if (!(sigma >= 0.5 && sigma <= 1.0)) throw validity_error("away_bound_check: sigma in [1/2, 1]");
    if (l < 2) throw validity_error("away_bound_check: need l >= 2");
    const double L = static_cast<double>(l);
    const double a = resonant_point(rs, l) + C * std::pow(L, sigma);
    const double b = resonant_point(rs, l + 1) - C * std::pow(L, sigma);
    if (!(b - a >= 1.0)) throw validity_error("away_bound_check: window meets the excluded neighbourhoods");
    const auto partial = partial_expsums(rs, a, b, 2.0, alpha, h);
    return {max_window_sum(partial), std::pow(L, -alpha - sigma + 1.0) * (1.0 + std::pow(L, 1.0 - 2.0 * beta))};
}

// Gamma_h(l) = -pi^3 l^3/(3F) + pi E l/F + 3 pi/8 + h(pi^2 l^2/F)/2.
template <class H>
double effective_phase(const ModelParams& m, long l, H&& h) {
    const double pi = std::numbers::pi;
    const double L = static_cast<double>(l);
    return -pi * pi * pi * L * L * L / (3.0 * m.F) + pi * m.E * L / m.F + 3.0 * pi / 8.0 +
           0.5 * h(pi * pi * L * L / m.F);
}

struct PreciseAsymptotic {
    cplx main;
    cplx boundary_left;
    cplx boundary_right;
    cplx predicted;
};

// Stationary-phase prediction of sum_{x_l<n<=x_{l+1}} e^{i(2 gamma(n)+h(n))}/gamma'(n).
template <class H>
PreciseAsymptotic precise_asymptotic(const ReferenceSolution& rs, long l, H&& h) {
    if (l < 2) throw validity_error("precise_asymptotic: need l >= 2");
    const ModelParams& m = rs.params();
    const double pi = std::numbers::pi;
    const double L = static_cast<double>(l);
    PreciseAsymptotic r;
    r.main = std::polar(std::sqrt(2.0 / (m.F * L)), 2.0 * effective_phase(m, l, h));
    const auto boundary = [&](long k) {
        const double x = sampling_point(m, k);
        const double K = static_cast<double>(k);
        const double phase = 2.0 * rs.eval(x).gamma + h(x) - pi / 2.0 - pi * static_cast<double>(k % 2);
        return std::polar(1.0 / (2.0 * pi * K), phase);
    };
    r.boundary_left = boundary(l);
    r.boundary_right = boundary(l + 1);
    r.predicted = r.main - r.boundary_right + r.boundary_left;
    return r;
}

struct DoubleSum {
    cplx value;
    double S = 0.0;  // Im(value)/4
};

// Weights e^{2i gamma~(n)}/gamma'(n), gamma~ = gamma - lambda sqrt(n/F), over (x_l, x_{l+1}].
inline std::vector<cplx> double_sum_weights(const ReferenceSolution& rs, long l) {
    const ModelParams& m = rs.params();
    const long first = static_cast<long>(sampling_point(m, l) + 0.5);
    const long last = static_cast<long>(sampling_point(m, l + 1) - 0.5);
    std::vector<cplx> w;
    for (long n = first; n <= last; ++n) {
        const double x = static_cast<double>(n);
        const PhasePoint p = rs.eval(x);
        const double gt = p.gamma - m.lambda * std::sqrt(x / m.F);
        w.push_back(std::polar(1.0 / p.gamma1, 2.0 * gt));
    }
    return w;
}

// sum_n sum_{j>n} w(n) conj(w(j)) via suffix sums, O(L).
inline DoubleSum double_sum(const ReferenceSolution& rs, long l) {
    if (l < 2) throw validity_error("double_sum: need l >= 2");
    const auto w = double_sum_weights(rs, l);
    KahanComplex acc, tail;
    for (std::size_t k = w.size(); k-- > 0;) {
        acc.add(w[k] * std::conj(tail.value()));
        tail.add(w[k]);
    }
    return {acc.value(), acc.value().imag() / 4.0};
}

// The same double sum by the direct O(L^2) loop.
inline DoubleSum double_sum_naive(const ReferenceSolution& rs, long l) {
    if (l < 2) throw validity_error("double_sum_naive: need l >= 2");
    const auto w = double_sum_weights(rs, l);
    const double pairs = static_cast<double>(w.size()) * static_cast<double>(w.size());
    if (pairs > 1e9) throw resource_error("double_sum_naive: more than 1e9 term pairs");
    KahanComplex acc;
    for (std::size_t n = 0; n < w.size(); ++n)
        for (std::size_t j = n + 1; j < w.size(); ++j) acc.add(w[n] * std::conj(w[j]));
    return {acc.value(), acc.value().imag() / 4.0};
}

// sum_{x_l<n<=x_{l+1}} gamma'(n)^{-2}.
inline double inverse_square_sum(const ReferenceSolution& rs, long l) {
    if (l < 2) throw validity_error("inverse_square_sum: need l >= 2");
    const ModelParams& m = rs.params();
    const long first = static_cast<long>(sampling_point(m, l) + 0.5);
    const long last = static_cast<long>(sampling_point(m, l + 1) - 0.5);
    double s = 0.0;
    for (long n = first; n <= last; ++n) {
        const double g1 = rs.eval(static_cast<double>(n)).gamma1;
        s += 1.0 / (g1 * g1);
    }
    return s;
}

struct GaussSumSpec {
    long p = 1;
    long q = 1;
    double E = 0.0;
    double lambda = 0.0;
    std::optional<long> m;
};

namespace detail {

inline long mod_positive(long a, long q) {
    const long r = a % q;
    return r < 0 ? r + q : r;
}

// p j^3 mod q without overflow for q < 2^31.
inline long cubic_residue(long p, long j, long q) {
    const __int128 jq = mod_positive(j, q);
    const __int128 v = (static_cast<__int128>(mod_positive(p, q)) * ((jq * jq % q) * jq % q)) % q;
    return static_cast<long>(v);
}

}  // namespace detail

// w = sum_{j<q} e^{-2 pi i (p/q) j^3 + 6 i p (E - lambda) j/(q pi)}, or for a
// given m, w_m = sum_{j<q} e^{-2 pi i (p j^3 - j m)/q}; cubic phases reduced mod q exactly.
inline cplx cubic_gauss_sum(const GaussSumSpec& s) {
    if (s.p <= 0 || s.q <= 0) throw validity_error("cubic_gauss_sum: need p, q >= 1");
    if (std::gcd(s.p, s.q) != 1) throw validity_error("cubic_gauss_sum: need gcd(p, q) = 1");
    if (s.q > (1L << 31)) throw resource_error("cubic_gauss_sum: q too large");
    const double pi = std::numbers::pi;
    const double Q = static_cast<double>(s.q);
    KahanComplex acc;
    for (long j = 0; j < s.q; ++j) {
        if (s.m) {
            const long r = detail::mod_positive(
                detail::cubic_residue(s.p, j, s.q) - detail::mod_positive(j * detail::mod_positive(*s.m, s.q) % s.q, s.q),
                s.q);
            acc.add(std::polar(1.0, -2.0 * pi * static_cast<double>(r) / Q));
        } else {
            const double cubic = -2.0 * pi * static_cast<double>(detail::cubic_residue(s.p, j, s.q)) / Q;
            const double linear = 6.0 * static_cast<double>(s.p) * (s.E - s.lambda) * static_cast<double>(j) / (Q * pi);
            acc.add(std::polar(1.0, cubic + linear));
        }
    }
    return acc.value();
}

// w_m for m = 0..q-1.
inline std::vector<cplx> gauss_sum_table(long p, long q) {
    std::vector<cplx> w;
    for (long m = 0; m < q; ++m) w.push_back(cubic_gauss_sum({p, q, 0.0, 0.0, m}));
    return w;
}

// Lower constant c in #{m : w_m != 0} >= c q^{2/3}, fitted over all coprime
// pairs with q <= 50. The minimum 6^{-2/3} ~ 0.303 is attained at q = 6; q = 3
// gives 3^{-2/3} ~ 0.48, so c = 1/2 does not hold when 3 divides q.
inline constexpr double kGaussNonzeroConstant = 0.3;

inline bool gauss_sum_nonzero(cplx w, long q) { return std::abs(w) > static_cast<double>(q) * 1e-9; }

}  // namespace starkprufer
