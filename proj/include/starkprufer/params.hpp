#pragma once

#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>

#include "errors.hpp"

namespace starkprufer {

// F = pi^2 q / (3 p) with gcd(p, q) = 1.
struct Rational {
    long p = 1;
    long q = 1;
};

// Field strength F, energy E, coupling lambda, and optionally the exact
// rational encoding of F used by the rational-case commands.
struct ModelParams {
    double F = 1.0;
    double E = 0.0;
    double lambda = 1.0;
    std::optional<Rational> rational;

    static double rational_field(long p, long q) {
        return std::numbers::pi * std::numbers::pi * static_cast<double>(q) /
               (3.0 * static_cast<double>(p));
    }

    static ModelParams from_rational(long p, long q, double E, double lambda) {
        ModelParams m;
        m.F = rational_field(p, q);
        m.E = E;
        m.lambda = lambda;
        m.rational = Rational{p, q};
        m.validate();
        return m;
    }

    void validate() const {
        if (!(std::isfinite(F) && F > 0.0)) throw validity_error("F must be finite and > 0");
        if (!std::isfinite(E)) throw validity_error("E must be finite");
        if (!std::isfinite(lambda)) throw validity_error("lambda must be finite");
        if (rational) {
            if (rational->p <= 0 || rational->q <= 0)
                throw validity_error("rational encoding needs positive p and q");
            if (std::gcd(rational->p, rational->q) != 1)
                throw validity_error("rational encoding needs gcd(p, q) = 1");
            if (std::abs(F - rational_field(rational->p, rational->q)) > 1e-12 * F)
                throw validity_error("F does not match pi^2 q / (3 p)");
        }
    }
};

}  // namespace starkprufer
