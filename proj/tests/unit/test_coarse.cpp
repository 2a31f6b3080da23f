#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "starkprufer/coarse.hpp"
#include "starkprufer/stats.hpp"

using namespace starkprufer;

namespace {

constexpr double pi = std::numbers::pi;

ModelParams params(double F, double E, double lambda = 1.0) {
    ModelParams m;
    m.F = F;
    m.E = E;
    m.lambda = lambda;
    return m;
}

std::vector<CoarseState> coarse_run(const ReferenceSolution& rs, long l_min, long l_max, double theta0 = 0.0) {
    const ResonanceGrid grid = build_resonance_grid(rs, l_min, l_max);
    const double g = rs.params().lambda;
    const auto st = trajectory_at_grid(rs, grid, initial_state(rs, theta0), [g](long) { return g; });
    return extract_coarse(rs, grid, st);
}

}  // namespace

TEST(Coarse, GammaArithmetic) {
    // F = pi^2/3, E = lambda, l = 1: -pi + 3 pi/8.
    EXPECT_NEAR(coarse_gamma(ModelParams::from_rational(1, 1, 1.0, 1.0), 1), -5.0 * pi / 8.0, 1e-14);
    EXPECT_NEAR(coarse_gamma(params(1.0, 2.0, 1.0), 2), -8.0 * pi * pi * pi / 3.0 + 2.0 * pi + 3.0 * pi / 8.0, 1e-12);
}

TEST(Coarse, FreeStarkIsExact) {
    const ReferenceSolution rs(params(1.0, 0.0, 0.0));
    const auto c = coarse_run(rs, 10, 60, 0.4);
    for (const auto& s : c) {
        EXPECT_EQ(s.logRl, s.logR_raw);
        EXPECT_NEAR(s.logRl, c.front().logRl, 1e-14);
        EXPECT_NEAR(s.Lambda, c.front().Lambda, 1e-14);
    }
    for (const auto& r : l_step_residuals(rs, c)) {
        EXPECT_LE(r.dlogR, 1e-14);
        EXPECT_LE(r.dLambda, 1e-13);
    }
}

TEST(Coarse, DressingIsOrderOneOverL) {
    const ReferenceSolution rs(params(1.0, 0.0, 1.0));
    const auto c = coarse_run(rs, 30, 300);
    std::vector<double> l, d;
    for (const auto& s : c) {
        const double bound = 1.0 / (4.0 * pi * s.l);
        EXPECT_LE(std::fabs(s.logRl - s.logR_raw), bound * (1.0 + 1e-12));
        EXPECT_LE(std::fabs(s.Lambda - s.tilde_eta_raw), bound * (1.0 + 1e-12));
        l.push_back(static_cast<double>(s.l));
        d.push_back(std::fabs(s.logRl - s.logR_raw));
    }
    EXPECT_LE(fit_loglog_binned(l, d, 6).slope, -0.8);
}

TEST(Coarse, LStepResidualsDecay) {
    const ReferenceSolution rs(params(1.0, 0.0, 1.0));
    const auto c = coarse_run(rs, 30, 300);
    std::vector<double> l, a, b;
    for (const auto& r : l_step_residuals(rs, c)) {
        l.push_back(static_cast<double>(r.l));
        a.push_back(r.dlogR);
        b.push_back(r.dLambda);
    }
    EXPECT_LE(fit_loglog_binned(l, a, 6).slope, -1.1);
    EXPECT_LE(fit_loglog_binned(l, b, 6).slope, -1.1);
    // Without the sin 4 Theta term the angle residual stays at O(1/l).
    std::vector<double> b0;
    for (const auto& r : l_step_residuals(rs, c, false)) b0.push_back(r.dLambda);
    EXPECT_GT(fit_loglog_binned(l, b0, 6).slope, -1.1);
}

TEST(Coarse, RejectsGaps) {
    const ReferenceSolution rs(params(1.0, 0.0, 1.0));
    auto c = coarse_run(rs, 30, 40);
    c.erase(c.begin() + 3);
    EXPECT_THROW(l_step_residuals(rs, c), validity_error);
    const ResonanceGrid grid = build_resonance_grid(rs, 30, 40);
    EXPECT_THROW(extract_coarse(rs, grid, {}), validity_error);
}

TEST(QScale, OmegaAndFreeCase) {
    const ModelParams m = ModelParams::from_rational(1, 1, 1.0, 1.0);
    EXPECT_NEAR(omega_q(m, 7), 3.0 * pi / 8.0, 1e-15);
    // 2 Omega(k) = 2 Gamma(qk) mod 2 pi.
    const ModelParams m2 = ModelParams::from_rational(2, 3, 0.37, 1.0);
    for (long k = 1; k <= 20; ++k) {
        const double d = std::remainder(2.0 * omega_q(m2, k) - 2.0 * coarse_gamma(m2, 3 * k), 2.0 * pi);
        EXPECT_NEAR(d, 0.0, 1e-9 * k * k * k);
    }
    EXPECT_THROW(omega_q(params(1.0, 0.0), 1), validity_error);
    const ModelParams m0 = ModelParams::from_rational(1, 2, 0.3, 0.0);
    const StepPrediction p = predict_q_step(m0, {5, 0.1, 0.2, omega_q(m0, 5), q_gauss_sum(m0)});
    EXPECT_EQ(p.dlogR, 0.0);
    EXPECT_EQ(p.dLambda, 0.0);
}

TEST(QScale, ResidualsDecay) {
    const ModelParams m = ModelParams::from_rational(1, 1, 0.3, 1.0);
    const ReferenceSolution rs(m);
    const auto q = extract_q_scale(m, coarse_run(rs, 2, 200));
    std::vector<double> k, a, b;
    for (std::size_t i = 0; i + 1 < q.size(); ++i) {
        if (q[i].k < 30) continue;
        const StepPrediction p = predict_q_step(m, q[i]);
        k.push_back(static_cast<double>(q[i].k));
        a.push_back(std::fabs(q[i + 1].logRqk - q[i].logRqk - p.dlogR));
        b.push_back(std::fabs(q[i + 1].Lambda_qk - q[i].Lambda_qk - p.dLambda));
    }
    EXPECT_LE(fit_loglog_binned(k, a, 6).slope, -1.1);
    // The angle step is predicted to leading order only: residual O(1/k).
    EXPECT_LE(fit_loglog_binned(k, b, 6).slope, -0.8);
}

TEST(ClassifyEnergy, Examples) {
    const EnergyClass a = classify_energy(ModelParams::from_rational(1, 1, 1.0, 1.0));
    EXPECT_TRUE(a.exceptional);
    EXPECT_EQ(a.m, 0L);
    EXPECT_NEAR(std::abs(a.w_at_E - cplx(1.0, 0.0)), 0.0, 1e-15);
    const EnergyClass b = classify_energy(ModelParams::from_rational(1, 2, 1.0, 1.0));
    EXPECT_TRUE(b.exceptional);
    EXPECT_NEAR(std::abs(b.w_at_E), 0.0, 1e-15);
    const EnergyClass c = classify_energy(ModelParams::from_rational(1, 2, 1.0 + pi * pi / 6.0, 1.0));
    EXPECT_FALSE(c.exceptional);
    EXPECT_FALSE(c.m.has_value());
    const EnergyClass d = classify_energy(ModelParams::from_rational(2, 5, 1.0 - 3.0 * pi * pi / 6.0, 1.0));
    EXPECT_TRUE(d.exceptional);
    EXPECT_EQ(d.m, -3L);
    EXPECT_THROW(classify_energy(params(1.0, 0.0)), validity_error);
}

TEST(ConvergenceDiagnostic, FreeCaseAndValidation) {
    const std::vector<double> flat(600, 0.25);
    const ConvergenceReport r = convergence_diagnostic(flat, 2);
    EXPECT_TRUE(r.converged);
    EXPECT_DOUBLE_EQ(r.limit_est, 0.25);
    for (const auto& [M, osc] : r.profile) EXPECT_EQ(osc, 0.0);
    EXPECT_THROW(convergence_diagnostic(std::vector<double>(10, 0.0), 2), validity_error);
    EXPECT_THROW(convergence_diagnostic({}, 2), validity_error);
}

TEST(ConvergenceDiagnostic, NonExceptionalEnergyConverges) {
    // The measured profile decays like M^{-1/2}, faster than the M^{-1/4}
    // remainder of the convergence proof.
    const ModelParams m = ModelParams::from_rational(1, 1, 0.3, 1.0);
    const ReferenceSolution rs(m);
    std::vector<double> v;
    for (const auto& s : coarse_run(rs, 2, 500)) v.push_back(s.logRl);
    const ConvergenceReport r = convergence_diagnostic(v, 2);
    EXPECT_TRUE(r.converged);
    ASSERT_TRUE(r.slope_available);
    EXPECT_LE(r.decay_slope, -0.15);
    EXPECT_NEAR(r.decay_slope, -0.46, 0.1);
}

TEST(ConvergenceDiagnostic, ExceptionalEnergyIsReported) {
    // E = lambda with w = 1: the radius keeps growing; reported, not classified.
    const ModelParams m = ModelParams::from_rational(1, 1, 1.0, 1.0);
    const ReferenceSolution rs(m);
    std::vector<double> v;
    for (const auto& s : coarse_run(rs, 2, 300)) v.push_back(s.logRl);
    const ConvergenceReport r = convergence_diagnostic(v, 2);
    EXPECT_FALSE(r.converged);
    EXPECT_GT(r.decay_slope, 0.0);
}

TEST(Reconstruction, PointwiseAndWindowMass) {
    const ModelParams m = params(1.0, 0.0, 1.0);
    const ReferenceSolution rs(m);
    const std::vector<long> ls{20, 40, 80};
    const long last = static_cast<long>(std::ceil(coarse_window(m, ls.back()).second));
    std::vector<PruferState> states(static_cast<std::size_t>(last + 1));
    const PruferState s0 = initial_state(rs, 0.0);
    states[1] = s0;
    run_prufer(rs, s0, last, [](long) { return 1.0; },
               [&](const PruferState& s, double, double) { states[static_cast<std::size_t>(s.n)] = s; });
    const ResonanceGrid grid = build_resonance_grid(rs, 2, ls.back());
    const auto c = extract_coarse(rs, grid, states);
    double C = 0.0;
    for (long l : ls) {
        const CoarseState& s = c[static_cast<std::size_t>(l - 2)];
        ASSERT_EQ(s.l, l);
        const auto [lo, hi] = coarse_window(m, l);
        const double R2 = std::exp(2.0 * s.logRl);
        double worst = 0.0, mass = 0.0;
        const int pts = 20000;
        const double dx = (hi - lo) / pts;
        for (int i = 1; i <= pts; ++i) {
            const double x = lo + dx * i;
            const PruferState& t = states[static_cast<std::size_t>(std::ceil(x))];
            const double exact = prufer_psi(t, rs, x);
            const Reconstruction r = reconstruct_eigenfunction(s, rs, x);
            worst = std::max(worst, std::fabs(exact - r.psi) / (std::exp(s.logRl) * std::abs(rs.eval(x).zeta)));
            mass += exact * exact * dx;
        }
        C = std::max(C, worst * std::sqrt(static_cast<double>(l)));
        EXPECT_NEAR(mass / (pi / m.F * R2), 1.0, 10.0 / std::sqrt(static_cast<double>(l))) << l;
    }
    EXPECT_LE(C, 10.0);
    EXPECT_THROW(reconstruct_eigenfunction(c.front(), rs, 1e6), validity_error);
}
