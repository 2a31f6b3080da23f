#pragma once

// Monte Carlo harness for the random coupling model: counter-based coupling
// streams keyed by (seed, realization, n), radius exponents, ratios of two
// non-subordinate solutions, detection of the subordinate solution, and the
// square-integrability scan across F.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "prufer.hpp"
#include "propagation.hpp"
#include "reference.hpp"
#include "stats.hpp"

namespace starkprufer {

// Philox4x32-10 block function.
class Philox4x32 {
public:
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static counter_type block(counter_type ctr, key_type key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

    // Known-answer vectors of the reference implementation.
    static bool self_test() {
        const counter_type a = block({0, 0, 0, 0}, {0, 0});
        const counter_type b = block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                     {0xffffffffu, 0xffffffffu});
        const counter_type c = block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                     {0xa4093822u, 0x299f31d0u});
        return a == counter_type{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u} &&
               b == counter_type{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu} &&
               c == counter_type{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u};
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

enum class CouplingFamily { gaussian, rademacher, uniform };

inline std::string family_name(CouplingFamily f) {
    switch (f) {
        case CouplingFamily::gaussian: return "gaussian";
        case CouplingFamily::rademacher: return "rademacher";
        default: return "uniform";
    }
}

inline CouplingFamily parse_family(const std::string& s) {
    if (s == "gaussian") return CouplingFamily::gaussian;
    if (s == "rademacher") return CouplingFamily::rademacher;
    if (s == "uniform") return CouplingFamily::uniform;
    throw validity_error("unknown coupling family '" + s + "' (gaussian|rademacher|uniform)");
}

// g_n with mean 0 and variance lambda^2, a pure function of
// (seed, realization, n); distinct realizations are independent streams.
struct CouplingSampler {
    CouplingFamily family = CouplingFamily::gaussian;
    double lambda = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t realization = 0;

    CouplingSampler with_realization(std::uint64_t r) const {
        CouplingSampler s = *this;
        s.realization = r;
        return s;
    }

    // Two uniforms in (0, 1) with 53 random bits each.
    std::pair<double, double> uniforms(long n) const {
        const auto un = static_cast<std::uint64_t>(n);
        const auto out = Philox4x32::block(
            {static_cast<std::uint32_t>(un), static_cast<std::uint32_t>(un >> 32),
             static_cast<std::uint32_t>(realization), static_cast<std::uint32_t>(realization >> 32)},
            {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
        const std::uint64_t w0 = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
        const std::uint64_t w1 = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
        return {(static_cast<double>(w0 >> 11) + 0.5) * scale,
                (static_cast<double>(w1 >> 11) + 0.5) * scale};
    }

    double operator()(long n) const {
        const auto [u1, u2] = uniforms(n);
        switch (family) {
            case CouplingFamily::gaussian:
                return lambda * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
            case CouplingFamily::rademacher: return u1 < 0.5 ? -lambda : lambda;
            default: return lambda * std::sqrt(3.0) * (2.0 * u1 - 1.0);
        }
    }
};

inline constexpr long kMaxSamples = 100'000'000;

// g_1, ..., g_{n_max} (element n-1 holds g_n).
inline std::vector<double> sample_couplings(const CouplingSampler& s, long n_max) {
    if (n_max < 0) throw validity_error("sample_couplings: n_max must be >= 0");
    if (n_max > kMaxSamples) throw resource_error("sample_couplings: n_max exceeds 1e8");
    std::vector<double> g(static_cast<std::size_t>(n_max));
    for (long n = 1; n <= n_max; ++n) g[static_cast<std::size_t>(n - 1)] = s(n);
    return g;
}

struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;
    double fourth = 0.0;  // E g^4
};

inline SampleMoments sample_moments(const CouplingSampler& s, long n_max) {
    if (n_max < 2) throw validity_error("sample_moments: need at least 2 samples");
    if (n_max > kMaxSamples) throw resource_error("sample_moments: n_max exceeds 1e8");
    double m1 = 0.0, m2 = 0.0, m4 = 0.0;
    for (long n = 1; n <= n_max; ++n) {
        const double g = s(n);
        m1 += g;
        m2 += g * g;
        m4 += g * g * g * g;
    }
    const double N = static_cast<double>(n_max);
    SampleMoments r;
    r.mean = m1 / N;
    r.variance = (m2 - N * r.mean * r.mean) / (N - 1.0);
    r.fourth = m4 / N;
    return r;
}

// ---------------------------------------------------------------------------
// Threads.

// Explicit request, else STARKPRUFER_THREADS, else the hardware count.
inline unsigned resolve_threads(std::optional<unsigned> requested = std::nullopt) {
    if (requested && *requested > 0) return *requested;
    if (const char* env = std::getenv("STARKPRUFER_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, count) on up to `threads` workers; the first
// exception is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += threads) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Radius exponents.

struct ExponentEstimate {
    double mean_exp = 0.0;
    double stderr_ = 0.0;
    std::vector<double> per_trial;
};

// (log R(N) - log R(1)) / log N for one realization started at theta0.
inline double radius_exponent(const PhaseTable& table, const CouplingSampler& s, long N,
                              double theta0 = 0.0) {
    const PruferState start = table.initial_state(theta0);
    const PruferState end = run_prufer(table, start, N, s, [](const PruferState&, double, double) {});
    return (end.logR - start.logR) / std::log(static_cast<double>(N));
}

// Trial t uses realization t of the sampler's seed.
inline ExponentEstimate mc_radius_exponent(const ModelParams& params, const CouplingSampler& sampler,
                                           long N, int trials, unsigned threads = 1,
                                           double theta0 = 0.0) {
    if (N < 10'000) throw validity_error("mc_radius_exponent: need N >= 1e4");
    if (trials < 10) throw validity_error("mc_radius_exponent: need trials >= 10");
    const ReferenceSolution rs(params);
    const PhaseTable table(rs, N);
    ExponentEstimate r;
    r.per_trial.resize(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        r.per_trial[t] = radius_exponent(table, sampler.with_realization(t), N, theta0);
    });
    const Summary s = summarize(r.per_trial);
    r.mean_exp = s.mean;
    r.stderr_ = s.stderr_;
    return r;
}

// ---------------------------------------------------------------------------
// Ratio of two non-subordinate solutions on the same realization.

struct RatioResult {
    double rho_limit = 1.0;
    double rate_exp = 0.0;
    bool rate_available = false;
    double wronskian_defect = 0.0;  // max relative deviation of R+ R- |sin(eta+ - eta-)|
    std::vector<std::pair<long, double>> trace;  // (n, rho(n)) at the fit points
};

inline RatioResult ratio_convergence(const PhaseTable& table, const CouplingSampler& s,
                                     double theta_plus, double theta_minus, long N) {
    if (theta_plus == theta_minus) throw validity_error("ratio_convergence: identical angles");
    if (N < 1000 || N > table.n_max()) throw validity_error("ratio_convergence: bad N");
    const double wronskian = std::fabs(std::sin(theta_plus - theta_minus));
    PruferState a = table.initial_state(theta_plus), b = table.initial_state(theta_minus);
    // Geometric sample points n in [10, N/10] for the fit.
    std::vector<long> marks;
    for (double x = 10.0; x <= N / 10.0; x *= 1.1) {
        const long n = static_cast<long>(x);
        if (marks.empty() || marks.back() != n) marks.push_back(n);
    }
    RatioResult r;
    std::size_t next = 0;
    std::vector<double> log_ratio;
    while (true) {
        if (wronskian > 1e-12) {
            const double w = std::exp(a.logR + b.logR) * std::fabs(std::sin(a.eta - b.eta));
            r.wronskian_defect = std::max(r.wronskian_defect, std::fabs(w / wronskian - 1.0));
        }
        if (next < marks.size() && a.n == marks[next]) {
            r.trace.emplace_back(a.n, std::exp(a.logR - b.logR));
            ++next;
        }
        if (a.n >= N) break;
        const double U = s(a.n) / table.gamma1(a.n), g = table.gamma(a.n);
        a = step_exact(a, U, g);
        b = step_exact(b, U, g);
    }
    r.rho_limit = std::exp(a.logR - b.logR);
    std::vector<double> x, y;
    for (const auto& [n, rho] : r.trace) {
        x.push_back(static_cast<double>(n));
        y.push_back(std::fabs(rho - r.rho_limit));
    }
    const bool any = std::any_of(y.begin(), y.end(), [&](double v) { return v > 1e-14 * r.rho_limit; });
    if (any) {
        r.rate_exp = fit_loglog_binned(x, y, 8).slope;
        r.rate_available = true;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Subordinate solution.

struct SubordinateResult {
    bool applicable = true;
    bool p_minus_converged = false;
    double p_minus_drift = 0.0;  // angular oscillation of P- over the last decade
    cplx u_inf_alpha;            // alpha(1) of the subordinate solution
    double decay_exp = 0.0;      // (log R(N) - log R(1)) / log N of that solution
    double generic_exp = 0.0;    // same for the orthogonal real solution
    double theta0 = 0.0;         // psi(0) = sin(theta0), psi'(0+) = cos(theta0), in [0, pi)
};

inline double wrap_angle(double a) {
    return std::remainder(a, 2.0 * std::numbers::pi);
}

inline SubordinateResult detect_subordinate(const PhaseTable& table, const CouplingSampler& s, long N) {
    if (N < 10'000 || N > table.n_max()) throw validity_error("detect_subordinate: need 1e4 <= N <= table size");
    SubordinateResult r;
    if (s.lambda == 0.0) {
        r.applicable = false;
        return r;
    }
    // T maps (alpha(1), beta(1)) to (alpha(N), beta(N)).
    TransferAccumulator acc;
    const long decade = std::max<long>(1, N / 10);
    double ref = 0.0;
    bool have_ref = false;
    for (long n = 1; n < N; ++n) {
        acc.push(one_step_su11(s(n) / table.gamma1(n), table.gamma(n)));
        if (n + 1 >= decade && (n % 64 == 0 || n + 1 == N)) {
            const auto pm = TransferAccumulator::p_minus_of(acc.matrix());
            const double phi = std::arg(-pm.second / pm.first);
            if (!have_ref) {
                ref = phi;
                have_ref = true;
            }
            r.p_minus_drift = std::max(r.p_minus_drift, std::fabs(wrap_angle(phi - ref)));
        }
    }
    r.p_minus_converged = r.p_minus_drift < 1e-6;
    const auto pm = TransferAccumulator::p_minus_of(acc.matrix());
    const double phi = std::arg(-pm.second / pm.first);
    const double amp = std::abs(pm.first);
    // (alpha, conj(alpha)) proportional to P- and to its orthogonal complement.
    r.u_inf_alpha = cplx(0.0, amp) * std::polar(1.0, -phi / 2.0);
    const cplx generic_alpha = amp * std::polar(1.0, -phi / 2.0);

    const auto exponent = [&](cplx alpha) {
        const PruferState start = state_from_alpha(alpha);
        const PruferState end = run_prufer(table, start, N, s, [](const PruferState&, double, double) {});
        return (end.logR - start.logR) / std::log(static_cast<double>(N));
    };
    r.decay_exp = exponent(r.u_inf_alpha);
    r.generic_exp = exponent(generic_alpha);

    // Boundary angle from psi = 2 Re(alpha zeta) on (0, 1).
    const double psi0 = 2.0 * (r.u_inf_alpha * table.zeta0()).real();
    const double dpsi0 = 2.0 * (r.u_inf_alpha * table.zeta0_prime()).real();
    double th = std::atan2(psi0, dpsi0);
    if (th < 0.0) th += std::numbers::pi;
    if (th >= std::numbers::pi) th -= std::numbers::pi;
    r.theta0 = th;
    return r;
}

// ---------------------------------------------------------------------------
// Square-integrability proxy across F.

struct TransitionRow {
    double F = 0.0;
    double mean_exp = 0.0;      // generic growth exponent, theta0 = 0
    double stderr_ = 0.0;
    double decay_exp = 0.0;     // subordinate decay exponent used by the proxy: -mean_exp
    double decay_direct = 0.0;  // median of the directly detected subordinate exponent
    double proxy = 0.0;         // 2 decay_exp + 1/2
    double proxy_stderr = 0.0;
    int sign = 0;               // -1, 0 (within 2 stderr of 0), +1
};

inline int proxy_sign(double proxy, double stderr_) {
    if (std::fabs(proxy) <= 2.0 * stderr_) return 0;
    return proxy < 0.0 ? -1 : 1;
}

// The subordinate exponent entering the proxy is taken as minus the generic
// growth exponent: R_sub R_gen |sin(eta_sub - eta_gen)| is the constant
// Wronskian, so the two exponents have opposite limits, while the direct
// estimate -log||T_N|| / log N carries the O(1)/log N offset of the largest
// singular value. Both are reported.
inline std::vector<TransitionRow> transition_scan(const std::vector<double>& F_grid, double lambda,
                                                  long N, int trials, const CouplingSampler& base,
                                                  unsigned threads = 1, double E = 0.0) {
    if (lambda == 0.0) throw validity_error("transition_scan: need lambda != 0");
    if (trials < 2) throw validity_error("transition_scan: need trials >= 2");
    std::vector<TransitionRow> rows;
    for (double F : F_grid) {
        if (!(F > 0.0 && F < 4.0 * lambda * lambda))
            throw validity_error("transition_scan: F must lie in (0, 4 lambda^2)");
        ModelParams m;
        m.F = F;
        m.E = E;
        m.lambda = lambda;
        const ReferenceSolution rs(m);
        const PhaseTable table(rs, N);
        CouplingSampler s = base;
        s.lambda = lambda;
        std::vector<double> gen(static_cast<std::size_t>(trials)), dec(static_cast<std::size_t>(trials));
        parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
            gen[t] = radius_exponent(table, s.with_realization(t), N, 0.0);
            dec[t] = detect_subordinate(table, s.with_realization(t), N).decay_exp;
        });
        TransitionRow row;
        row.F = F;
        const Summary g = summarize(gen);
        row.mean_exp = g.mean;
        row.stderr_ = g.stderr_;
        row.decay_exp = -g.mean;
        row.decay_direct = summarize(dec).median;
        row.proxy = 2.0 * row.decay_exp + 0.5;
        row.proxy_stderr = 2.0 * g.stderr_;
        row.sign = proxy_sign(row.proxy, row.proxy_stderr);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace starkprufer
