#pragma once

// Command-line frontend. Every command writes one header line (schema version,
// full config echo, seed, content hash of the body) followed by a CSV or
// JSON-lines body. The body is a pure function of the config, so replays are
// byte-identical regardless of the thread count.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace starkprufer::cli {

inline constexpr int kSchemaVersion = 1;

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

enum class OutputFormat { csv, json };

struct RunConfig {
    std::string command;
    std::optional<double> F;
    std::optional<long> p;
    std::optional<long> q;
    double E = 0.0;
    double lambda = 1.0;
    long N = 1000;
    long trials = 100;
    std::uint64_t seed = 1;
    long l_min = 30;
    long l_max = 300;
    long l = 50;      // cell problem index (stationary)
    std::string out;  // empty: stdout
    OutputFormat format = OutputFormat::csv;
    std::optional<unsigned> threads;
    // Command-specific knobs.
    std::string family = "gaussian";   // prufer, random_mc: deterministic|gaussian|rademacher|uniform
    double theta0 = 0.0;
    double x_min = 0.0;
    double x_max = 100.0;
    double step = 1.0;
    long stride = 1;
    std::string problem = "model_stationary";  // stationary
    double omega_min = 100.0;
    double omega_max = 3000.0;
    long omega_points = 12;
    std::vector<double> E_grid;  // spectral_scan
    std::vector<double> F_grid;  // transition
    // Tolerance overrides.
    double tol_identity = 1e-10;
    double tol_gauss = 1e-9;
};

// Parses argv-style arguments (without the program name), runs the command and
// writes the output to `out` (or to --out). Failure lists go to `err` as JSON.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 64-bit FNV-1a, used for the body hash in the header line.
std::uint64_t fnv1a(const std::string& data);

// Round-trip formatting with 17 significant digits and '.' as decimal point.
std::string format_double(double v);

}  // namespace starkprufer::cli
