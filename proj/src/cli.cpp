#include "starkprufer/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "starkprufer/coarse.hpp"
#include "starkprufer/expsum.hpp"
#include "starkprufer/oscillatory.hpp"
#include "starkprufer/prufer.hpp"
#include "starkprufer/random.hpp"
#include "starkprufer/reference.hpp"
#include "starkprufer/stats.hpp"

namespace starkprufer::cli {

using json = nlohmann::ordered_json;

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

const std::vector<std::string> kCommands = {"reference", "prufer",        "expsum",   "coarse",
                                            "random_mc", "wsum",          "stationary",
                                            "spectral_scan", "transition"};

// A field-level configuration problem, reported before any computation.
struct FieldError {
    std::string field;
    std::string message;
};

struct ConfigErrors : std::runtime_error {
    std::vector<FieldError> errors;
    explicit ConfigErrors(std::vector<FieldError> e)
        : std::runtime_error("invalid configuration"), errors(std::move(e)) {}
};

// A check with a stated tolerance; failing checks make the exit code nonzero.
struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

// Output table: rows of JSON scalars rendered as CSV or JSON lines.
struct Output {
    std::vector<std::string> columns;
    std::vector<json> rows;  // arrays aligned with columns
    json footer = json::object();
    std::vector<Check> checks;

    void row(json r) { rows.push_back(std::move(r)); }
    void check(std::string name, double value, double tolerance, bool passed) {
        checks.push_back({std::move(name), value, tolerance, passed});
    }
};

std::string csv_cell(const json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// JSON numbers must be finite; non-finite values become strings.
json json_cell(const json& v) {
    if (v.is_number_float() && !std::isfinite(v.get<double>())) return format_double(v.get<double>());
    return v;
}

std::string render_body(const Output& o, OutputFormat format) {
    std::ostringstream s;
    json checks = json::array();
    for (const auto& c : o.checks)
        checks.push_back({{"name", c.name}, {"value", json_cell(c.value)}, {"tolerance", c.tolerance},
                          {"passed", c.passed}});
    json footer = o.footer;
    footer["checks"] = checks;
    if (format == OutputFormat::csv) {
        for (std::size_t i = 0; i < o.columns.size(); ++i) s << (i ? "," : "") << o.columns[i];
        s << '\n';
        for (const auto& r : o.rows) {
            for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << csv_cell(r[i]);
            s << '\n';
        }
        s << "# footer " << footer.dump() << '\n';
    } else {
        for (const auto& r : o.rows) {
            json obj = json::object();
            for (std::size_t i = 0; i < r.size(); ++i) obj[o.columns[i]] = json_cell(r[i]);
            s << obj.dump() << '\n';
        }
        s << json{{"footer", footer}}.dump() << '\n';
    }
    return s.str();
}

json config_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["F"] = c.F ? json(*c.F) : json(nullptr);
    j["p"] = c.p ? json(*c.p) : json(nullptr);
    j["q"] = c.q ? json(*c.q) : json(nullptr);
    j["E"] = c.E;
    j["lambda"] = c.lambda;
    j["N"] = c.N;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["l_min"] = c.l_min;
    j["l_max"] = c.l_max;
    j["l"] = c.l;
    j["format"] = c.format == OutputFormat::csv ? "csv" : "json";
    j["threads"] = c.threads ? json(*c.threads) : json(nullptr);
    j["family"] = c.family;
    j["theta0"] = c.theta0;
    j["x_min"] = c.x_min;
    j["x_max"] = c.x_max;
    j["step"] = c.step;
    j["stride"] = c.stride;
    j["problem"] = c.problem;
    j["omega_min"] = c.omega_min;
    j["omega_max"] = c.omega_max;
    j["omega_points"] = c.omega_points;
    j["E_grid"] = c.E_grid;
    j["F_grid"] = c.F_grid;
    j["tol_identity"] = c.tol_identity;
    j["tol_gauss"] = c.tol_gauss;
    return j;
}

// ---------------------------------------------------------------------------
// Validation.

ModelParams model_params(const RunConfig& c, bool need_rational) {
    std::vector<FieldError> errs;
    if (c.p.has_value() != c.q.has_value())
        errs.push_back({c.p ? "q" : "p", "--p and --q must be given together"});
    if (c.p && c.q) {
        if (*c.p <= 0) errs.push_back({"p", "must be a positive integer"});
        if (*c.q <= 0) errs.push_back({"q", "must be a positive integer"});
        if (*c.p > 0 && *c.q > 0 && std::gcd(*c.p, *c.q) != 1)
            errs.push_back({"q", "gcd(p, q) must be 1"});
    }
    if (need_rational && !(c.p && c.q))
        errs.push_back({"p", "command '" + c.command + "' needs F as the pair --p --q"});
    if (!c.F && !(c.p && c.q) && !need_rational)
        errs.push_back({"F", "give --F or the pair --p --q"});
    if (c.F && !(std::isfinite(*c.F) && *c.F > 0.0)) errs.push_back({"F", "must be finite and > 0"});
    if (!std::isfinite(c.E)) errs.push_back({"E", "must be finite"});
    if (!std::isfinite(c.lambda)) errs.push_back({"lambda", "must be finite"});
    if (errs.empty() && c.F && c.p && c.q) {
        const double Fr = ModelParams::rational_field(*c.p, *c.q);
        if (std::fabs(*c.F - Fr) > 1e-12 * Fr)
            errs.push_back({"F", "conflicts with pi^2 q / (3 p) = " + format_double(Fr)});
    }
    if (!errs.empty()) throw ConfigErrors(errs);
    if (c.p && c.q) return ModelParams::from_rational(*c.p, *c.q, c.E, c.lambda);
    ModelParams m;
    m.F = *c.F;
    m.E = c.E;
    m.lambda = c.lambda;
    m.validate();
    return m;
}

void require(std::vector<FieldError>& errs, bool ok, const std::string& field, const std::string& msg) {
    if (!ok) errs.push_back({field, msg});
}

void validate_common(const RunConfig& c) {
    std::vector<FieldError> errs;
    const std::string& cmd = c.command;
    if (cmd == "reference") {
        require(errs, std::isfinite(c.x_min) && std::isfinite(c.x_max) && c.x_max >= c.x_min, "x_max",
                "need finite x_min <= x_max");
        require(errs, c.step > 0.0 && std::isfinite(c.step), "step", "must be > 0");
        if (c.step > 0.0 && std::isfinite(c.x_max - c.x_min))
            require(errs, (c.x_max - c.x_min) / c.step <= 1e7, "step", "more than 1e7 rows requested");
    }
    if (cmd == "prufer" || cmd == "random_mc" || cmd == "transition") {
        require(errs, c.N >= 1 && c.N <= kMaxSamples, "N", "must lie in [1, 1e8]");
        require(errs, c.stride >= 1, "stride", "must be >= 1");
    }
    if (cmd == "random_mc") {
        require(errs, c.N >= 10'000, "N", "random_mc needs N >= 1e4");
        require(errs, c.trials >= 10, "trials", "random_mc needs trials >= 10");
    }
    if (cmd == "transition") {
        require(errs, c.trials >= 2, "trials", "transition needs trials >= 2");
        require(errs, !c.F_grid.empty(), "F_grid", "needs at least one value");
        require(errs, c.lambda != 0.0, "lambda", "transition needs lambda != 0");
        for (double F : c.F_grid)
            require(errs, F > 0.0 && F < 4.0 * c.lambda * c.lambda, "F_grid",
                    "values must lie in (0, 4 lambda^2)");
    }
    if (cmd == "expsum" || cmd == "coarse" || cmd == "spectral_scan") {
        require(errs, c.l_min >= 2, "l_min", "must be >= 2");
        require(errs, c.l_max >= c.l_min, "l_max", "must be >= l_min");
        require(errs, c.l_max <= 20'000, "l_max", "must be <= 20000");
    }
    if (cmd == "spectral_scan") {
        require(errs, !c.E_grid.empty(), "E_grid", "needs at least one value");
        // Four dyadic windows [M, 2M] of k = l/q, starting at the first k.
        const long q = std::max<long>(c.q.value_or(1), 1);
        const long k0 = (c.l_min + q - 1) / q;
        require(errs, c.l_max / q >= 16 * k0, "l_max", "spectral_scan needs l_max >= 16 q ceil(l_min/q)");
    }
    if (cmd == "stationary") {
        require(errs, c.omega_min > 0.0 && c.omega_max > c.omega_min, "omega_max",
                "need 0 < omega_min < omega_max");
        require(errs, c.omega_points >= 3 && c.omega_points <= 200, "omega_points", "must lie in [3, 200]");
        require(errs, c.l >= 2, "l", "must be >= 2");
    }
    if (cmd == "prufer" || cmd == "random_mc") {
        try {
            if (c.family != "deterministic") parse_family(c.family);
        } catch (const validity_error& e) {
            errs.push_back({"family", e.what()});
        }
        if (cmd == "random_mc")
            require(errs, c.family != "deterministic", "family", "random_mc needs a random family");
    }
    require(errs, c.tol_identity > 0.0, "tol_identity", "must be > 0");
    require(errs, c.tol_gauss > 0.0, "tol_gauss", "must be > 0");
    if (!errs.empty()) throw ConfigErrors(errs);
}

CouplingSampler make_sampler(const RunConfig& c) {
    return CouplingSampler{parse_family(c.family), c.lambda, c.seed, 0};
}

std::vector<double> geometric_grid(double lo, double hi, long points) {
    std::vector<double> g;
    for (long i = 0; i < points; ++i)
        g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1)));
    return g;
}

// ---------------------------------------------------------------------------
// Commands.

void cmd_reference(const RunConfig& c, Output& o) {
    const ReferenceSolution rs(model_params(c, false));
    o.columns = {"x", "re_zeta", "im_zeta", "abs_zeta", "gamma", "gamma1", "gamma2",
                 "wronskian_residual", "phase_identity_residual"};
    const long count = static_cast<long>(std::floor((c.x_max - c.x_min) / c.step + 1e-9)) + 1;
    double max_w = 0.0, max_i = 0.0;
    bool anchor_ok = true;
    for (long i = 0; i < count; ++i) {
        const double x = c.x_min + c.step * static_cast<double>(i);
        const PhasePoint p = rs.eval(x);
        const cplx w = p.zeta * std::conj(p.zeta_prime) - p.zeta_prime * std::conj(p.zeta);
        const double wr = std::abs(w + cplx(0.0, 2.0));
        const double ir = std::fabs(p.gamma1 * std::norm(p.zeta) - 1.0);
        max_w = std::max(max_w, wr);
        max_i = std::max(max_i, ir);
        if (x == 0.0) anchor_ok = p.gamma > -std::numbers::pi && p.gamma <= std::numbers::pi;
        o.row({x, p.zeta.real(), p.zeta.imag(), std::abs(p.zeta), p.gamma, p.gamma1, p.gamma2, wr, ir});
    }
    o.footer["max_wronskian_residual"] = max_w;
    o.footer["max_phase_identity_residual"] = max_i;
    o.check("wronskian", max_w, c.tol_identity, max_w <= c.tol_identity);
    o.check("phase_identity", max_i, c.tol_identity, max_i <= c.tol_identity);
    o.check("gamma_anchor", anchor_ok ? 0.0 : 1.0, 0.0, anchor_ok);
}

void cmd_prufer(const RunConfig& c, Output& o) {
    const ModelParams m = model_params(c, false);
    const ReferenceSolution rs(m);
    const bool deterministic = c.family == "deterministic";
    std::function<double(long)> coupling;
    if (deterministic) {
        coupling = [&](long) { return m.lambda; };
    } else {
        const CouplingSampler s = make_sampler(c);
        coupling = [s](long n) { return s(n); };
    }
    o.columns = {"n", "logR", "eta", "theta", "U"};
    const PruferState start = initial_state(rs, c.theta0);
    const PruferState end = run_prufer(rs, start, c.N, coupling, [&](const PruferState& s, double g, double g1) {
        if ((s.n - 1) % c.stride == 0 || s.n == c.N)
            o.row({s.n, s.logR, s.eta, s.eta + g, coupling(s.n) / g1});
    });
    const double shift = m.lambda * std::sqrt(static_cast<double>(end.n) / m.F);
    o.footer["logR_N"] = end.logR;
    o.footer["eta_N"] = end.eta;
    o.footer["tilde_eta_N"] = end.eta + (deterministic ? shift : 0.0);
    if (end.n > 1) o.footer["radius_exponent"] = (end.logR - start.logR) / std::log(static_cast<double>(end.n));
    o.footer["target_exponent"] = m.lambda * m.lambda / (8.0 * m.F);
    if (deterministic && m.lambda == 0.0) {
        const double drift = std::fabs(end.logR - start.logR);
        o.check("constant_radius", drift, 1e-12, drift <= 1e-12);
    }
}

void cmd_expsum(const RunConfig& c, Output& o) {
    const ModelParams m = model_params(c, false);
    const ReferenceSolution rs(m);
    const SqrtPhase h{m.lambda, m.F};
    o.columns = {"l", "x_l", "raw_re", "raw_im", "predicted_re", "predicted_im", "abs_error",
                 "double_sum_re", "double_sum_im", "S", "double_sum_scaled"};
    std::vector<double> ls, err, scaled;
    for (long l = c.l_min; l <= c.l_max; ++l) {
        const double a = sampling_point(m, l), b = sampling_point(m, l + 1);
        const cplx raw = raw_expsum(rs, ExpSumSpec{a, b, 2.0, 1.0}, h);
        const PreciseAsymptotic pa = precise_asymptotic(rs, l, h);
        const DoubleSum ds = double_sum(rs, l);
        const double e = std::abs(raw - pa.predicted);
        const double sc = std::abs(ds.value) * std::pow(static_cast<double>(l), 0.75);
        ls.push_back(static_cast<double>(l));
        err.push_back(e);
        scaled.push_back(sc);
        o.row({l, a, raw.real(), raw.imag(), pa.predicted.real(), pa.predicted.imag(), e, ds.value.real(),
               ds.value.imag(), ds.S, sc});
    }
    if (ls.size() >= 3) o.footer["error_slope"] = fit_loglog(ls, err).slope;
    o.footer["max_double_sum_scaled"] = *std::max_element(scaled.begin(), scaled.end());
}

void cmd_coarse(const RunConfig& c, Output& o) {
    const ModelParams m = model_params(c, false);
    const ReferenceSolution rs(m);
    const ResonanceGrid grid = build_resonance_grid(rs, c.l_min, c.l_max);
    const auto states = trajectory_at_grid(rs, grid, initial_state(rs, c.theta0),
                                           [&](long) { return m.lambda; });
    const auto coarse = extract_coarse(rs, grid, states);
    const auto res = l_step_residuals(rs, coarse);
    o.columns = {"l", "x_l", "X_l", "logR_dressed", "Lambda", "Theta", "logR_raw", "residual_dlogR",
                 "residual_dLambda"};
    std::vector<double> ls, rR, rL;
    for (std::size_t k = 0; k < res.size(); ++k) {
        const CoarseState& s = coarse[k];
        o.row({s.l, grid.x_at(s.l), grid.X_at(s.l), s.logRl, s.Lambda, s.Theta, s.logR_raw, res[k].dlogR,
               res[k].dLambda});
        ls.push_back(static_cast<double>(s.l));
        rR.push_back(res[k].dlogR);
        rL.push_back(res[k].dLambda);
    }
    if (ls.size() >= 12) {
        o.footer["residual_slope_logR"] = fit_loglog_binned(ls, rR, 6).slope;
        o.footer["residual_slope_Lambda"] = fit_loglog_binned(ls, rL, 6).slope;
    }
    if (m.rational) {
        const EnergyClass ec = classify_energy(m);
        o.footer["exceptional"] = ec.exceptional;
        o.footer["abs_w"] = std::abs(ec.w_at_E);
    }
}

void cmd_random_mc(const RunConfig& c, Output& o) {
    const ModelParams m = model_params(c, false);
    const unsigned threads = resolve_threads(c.threads);
    const ExponentEstimate e =
        mc_radius_exponent(m, make_sampler(c), c.N, static_cast<int>(c.trials), threads, c.theta0);
    o.columns = {"trial", "exponent"};
    for (std::size_t t = 0; t < e.per_trial.size(); ++t) o.row({static_cast<long>(t), e.per_trial[t]});
    o.footer["mean_exponent"] = e.mean_exp;
    o.footer["stderr"] = e.stderr_;
    o.footer["target_exponent"] = m.lambda * m.lambda / (8.0 * m.F);
}

void cmd_wsum(const RunConfig& c, Output& o) {
    const ModelParams m = model_params(c, true);
    const long p = m.rational->p, q = m.rational->q;
    const auto w = gauss_sum_table(p, q);
    o.columns = {"m", "re_w", "im_w", "abs2_w"};
    double sum = 0.0;
    long nonzero = 0;
    for (long k = 0; k < q; ++k) {
        const cplx v = w[static_cast<std::size_t>(k)];
        sum += std::norm(v);
        nonzero += gauss_sum_nonzero(v, q) ? 1 : 0;
        o.row({k, v.real(), v.imag(), std::norm(v)});
    }
    const double q2 = static_cast<double>(q * q);
    const double bound = kGaussNonzeroConstant * std::pow(static_cast<double>(q), 2.0 / 3.0);
    o.footer["sum_abs2"] = sum;
    o.footer["q2"] = q2;
    o.footer["nonzero_count"] = nonzero;
    o.check("parseval", std::fabs(sum - q2), c.tol_gauss, std::fabs(sum - q2) <= c.tol_gauss);
    o.check("nonzero_count", static_cast<double>(nonzero), bound, static_cast<double>(nonzero) >= bound);
}

// Model problems with the amplitude e^{x/2}/(x+2).
struct ModelAmplitude {
    template <class T>
    T operator()(const T& x) const {
        using std::exp;
        return exp(x * 0.5) / (x + 2.0);
    }
};
struct ModelPhaseStationary {
    template <class T>
    T operator()(const T& x) const { return x * x * 0.5 + x * x * x * 0.1; }
};
struct ModelPhaseMonotone {
    template <class T>
    T operator()(const T& x) const { return x + x * x * 0.25; }
};

template <class U, class P>
void sweep(const RunConfig& c, PhaseProblem<U, P> base, bool stationary, Output& o) {
    o.columns = {"k", "omega", "oracle_re", "oracle_im", "oracle_error_estimate", "expansion_re",
                 "expansion_im", "abs_error"};
    json slopes = json::object();
    for (int k = 1; k <= kMaxExpansionOrder; ++k) {
        std::vector<double> om, er;
        for (double w : geometric_grid(c.omega_min, c.omega_max, c.omega_points)) {
            PhaseProblem<U, P> pr = base;
            pr.omega = w;
            pr.k = k;
            const OracleResult orc = quadrature_oracle(pr);
            // Non-stationary: the first k-1 terms leave an O(omega^{-k}) remainder.
            const cplx e = stationary ? stationary_expansion(pr).total() : nonstationary_expansion(pr).sum(k - 1);
            const double d = std::abs(orc.value - e);
            om.push_back(w);
            er.push_back(d);
            o.row({k, w, orc.value.real(), orc.value.imag(), orc.error_estimate, e.real(), e.imag(), d});
        }
        slopes[std::to_string(k)] = fit_loglog(om, er).slope;
    }
    o.footer["omega_slopes"] = slopes;
}

void cmd_stationary(const RunConfig& c, Output& o) {
    if (c.problem == "model_stationary") {
        sweep(c, PhaseProblem<ModelAmplitude, ModelPhaseStationary>{-1.0, 1.0, 1.0, {}, {}, 1}, true, o);
    } else if (c.problem == "model_nonstationary") {
        sweep(c, PhaseProblem<ModelAmplitude, ModelPhaseMonotone>{0.0, 1.0, 1.0, {}, {}, 1}, false, o);
    } else if (c.problem == "cell_stationary" || c.problem == "cell_nonstationary") {
        const ReferenceSolution rs(model_params(c, false));
        const bool st = c.problem == "cell_stationary";
        const CellProblem cp = build_cell_problem(rs, c.l, st ? c.l : c.l + 1, 1);
        o.footer["natural_omega"] = cp.problem.omega;
        sweep(c, cp.problem, st, o);
    } else {
        throw ConfigErrors({{"problem",
                             "unknown problem '" + c.problem +
                                 "' (model_stationary|model_nonstationary|cell_stationary|cell_nonstationary)"}});
    }
}

void cmd_spectral_scan(const RunConfig& c, Output& o) {
    model_params(c, true);  // field validation
    o.columns = {"E", "exceptional", "m", "abs_w", "converged", "limit_est", "decay_slope", "windows"};
    for (double E : c.E_grid) {
        RunConfig ce = c;
        ce.E = E;
        const ModelParams m = model_params(ce, true);
        const ReferenceSolution rs(m);
        const EnergyClass ec = classify_energy(m);
        const ResonanceGrid grid = build_resonance_grid(rs, c.l_min, c.l_max);
        const auto states = trajectory_at_grid(rs, grid, initial_state(rs, c.theta0),
                                               [&](long) { return m.lambda; });
        const auto q = extract_q_scale(m, extract_coarse(rs, grid, states));
        std::vector<double> v;
        for (const auto& s : q) v.push_back(s.logRqk);
        const ConvergenceReport rep = convergence_diagnostic(v, q.front().k);
        o.row({E, ec.exceptional, ec.m ? json(*ec.m) : json(nullptr), std::abs(ec.w_at_E), rep.converged,
               rep.limit_est, rep.slope_available ? json(rep.decay_slope) : json(nullptr),
               static_cast<long>(rep.profile.size())});
    }
}

void cmd_transition(const RunConfig& c, Output& o) {
    const CouplingSampler base{CouplingFamily::gaussian, c.lambda, c.seed, 0};
    const auto rows = transition_scan(c.F_grid, c.lambda, c.N, static_cast<int>(c.trials), base,
                                      resolve_threads(c.threads), c.E);
    o.columns = {"F", "mean_exp", "stderr", "decay_exp", "decay_direct", "proxy", "proxy_stderr", "sign",
                 "expected_sign"};
    int mismatches = 0;
    for (const auto& r : rows) {
        const double d = r.F - c.lambda * c.lambda / 2.0;
        const int expected = std::fabs(d) < 1e-12 ? 0 : (d > 0 ? 1 : -1);
        mismatches += r.sign != expected;
        o.row({r.F, r.mean_exp, r.stderr_, r.decay_exp, r.decay_direct, r.proxy, r.proxy_stderr, r.sign,
               expected});
    }
    o.footer["sign_mismatches"] = mismatches;
}

const std::map<std::string, void (*)(const RunConfig&, Output&)>& dispatch_table() {
    static const std::map<std::string, void (*)(const RunConfig&, Output&)> t = {
        {"reference", cmd_reference},   {"prufer", cmd_prufer},         {"expsum", cmd_expsum},
        {"coarse", cmd_coarse},         {"random_mc", cmd_random_mc},   {"wsum", cmd_wsum},
        {"stationary", cmd_stationary}, {"spectral_scan", cmd_spectral_scan},
        {"transition", cmd_transition}};
    return t;
}

void report_failures(std::ostream& err, const std::string& status, const json& failures) {
    err << json{{"status", status}, {"failures", failures}}.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Stark-ladder Prufer numerics"};
    app.set_config("--config", "", "flat key=value config file; flags override it");
    app.add_option("command", c.command, "command to run")
        ->required()
        ->check(CLI::IsMember(kCommands));
    app.add_option("--F", c.F, "field strength F > 0");
    app.add_option("--p", c.p, "rational encoding F = pi^2 q / (3 p)");
    app.add_option("--q", c.q, "rational encoding F = pi^2 q / (3 p)");
    app.add_option("--E", c.E, "energy");
    app.add_option("--lambda", c.lambda, "coupling strength");
    app.add_option("--N", c.N, "number of steps");
    app.add_option("--trials", c.trials, "Monte Carlo trials");
    app.add_option("--seed", c.seed, "64-bit seed");
    app.add_option("--l-min", c.l_min, "first resonance index");
    app.add_option("--l-max", c.l_max, "last resonance index");
    app.add_option("--l", c.l, "resonance index of the cell problem");
    app.add_option("--out", c.out, "output path (default stdout)");
    std::string format = "csv";
    app.add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", c.threads, "worker cap (fallback STARKPRUFER_THREADS)");
    app.add_option("--family", c.family, "deterministic|gaussian|rademacher|uniform");
    app.add_option("--theta0", c.theta0, "initial angle: psi(0) = sin, psi'(0) = cos");
    app.add_option("--x-min", c.x_min, "reference grid start");
    app.add_option("--x-max", c.x_max, "reference grid end");
    app.add_option("--step", c.step, "reference grid step");
    app.add_option("--stride", c.stride, "prufer row stride");
    app.add_option("--problem", c.problem, "stationary: model_stationary|model_nonstationary|cell_*");
    app.add_option("--omega-min", c.omega_min, "smallest frequency");
    app.add_option("--omega-max", c.omega_max, "largest frequency");
    app.add_option("--omega-points", c.omega_points, "geometric frequency grid size");
    app.add_option("--E-grid", c.E_grid, "spectral_scan energies")->delimiter(',');
    app.add_option("--F-grid", c.F_grid, "transition field strengths")->delimiter(',');
    app.add_option("--tol-identity", c.tol_identity, "tolerance of the reference identities");
    app.add_option("--tol-gauss", c.tol_gauss, "tolerance of the Gauss-sum Parseval identity");

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        report_failures(err, "config_error", json::array({{{"field", "arguments"}, {"message", e.what()}}}));
        return kExitConfigError;
    }
    c.format = format == "json" ? OutputFormat::json : OutputFormat::csv;

    Output o;
    try {
        validate_common(c);
        dispatch_table().at(c.command)(c, o);
    } catch (const ConfigErrors& e) {
        json f = json::array();
        for (const auto& fe : e.errors) f.push_back({{"field", fe.field}, {"message", fe.message}});
        report_failures(err, "config_error", f);
        return kExitConfigError;
    } catch (const validity_error& e) {
        report_failures(err, "config_error", json::array({{{"field", c.command}, {"message", e.what()}}}));
        return kExitConfigError;
    } catch (const std::exception& e) {
        report_failures(err, "runtime_error", json::array({{{"message", e.what()}}}));
        return kExitRuntimeError;
    }

    const std::string body = render_body(o, c.format);
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a(body));
    json header{{"schema", kSchemaVersion}, {"command", c.command}, {"seed", c.seed},
                {"config", config_json(c)}, {"body_fnv1a", hash}};
    const std::string head = (c.format == OutputFormat::csv ? "# " : "") + header.dump() + "\n";

    if (c.out.empty()) {
        out << head << body;
    } else {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) {
            report_failures(err, "io_error", json::array({{{"field", "out"}, {"message", "cannot open " + c.out}}}));
            return kExitRuntimeError;
        }
        f << head << body;
        if (!f) {
            report_failures(err, "io_error", json::array({{{"field", "out"}, {"message", "write failed"}}}));
            return kExitRuntimeError;
        }
    }

    json failed = json::array();
    for (const auto& ch : o.checks)
        if (!ch.passed)
            failed.push_back({{"check", ch.name}, {"value", json_cell(ch.value)}, {"tolerance", ch.tolerance}});
    if (!failed.empty()) {
        report_failures(err, "check_failed", failed);
        return kExitCheckFailed;
    }
    return kExitOk;
}

}  // namespace starkprufer::cli
