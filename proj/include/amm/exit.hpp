#pragma once

#include "amm/profiles.hpp"

#include <string>
#include <variant>

namespace amm {

// Price follows dP/P = mu dt + sigma dW; fees accrue at rate phi (in Y units
// per year) while the position is open, discounted at r.
struct ExitParams {
    double mu = 0.0;
    double sigma = 0.0;
    double r = 0.0;
    double phi = 0.0;
    double p0 = 0.0;

    double nu() const { return mu - 0.5 * sigma * sigma; }
};

enum class Transience { Up, Down, Recurrent };

Transience classify_transience(double mu, double sigma);

// E[e^{-r·pi^eps}] where pi^eps is the LAST time the price visits p0·e^eps.
// Defined here only for upward-transient dynamics.
double mgf_last_passage(double epsilon, const ExitParams& params);

// v(eps) = phi/r − {IL(p0 e^eps | p0) + phi/r}·mgf(eps): expected discounted
// P&L of withdrawing at the last visit to level p0·e^eps.
double expected_pnl(double epsilon, const ExitParams& params, const LiquidityProfile& profile);

// Exact derivative of expected_pnl for eps >= 0, written as a positive
// prefactor times a bracket whose sign drives the search in optimal_exit.
double v_prime(double epsilon, const ExitParams& params, const LiquidityProfile& profile);

struct ExitInterior {
    double epsilon_star = 0.0;
    double v_star = 0.0;
};
struct ExitMonotone {
    double supremum = 0.0;  // phi/r, approached as eps → ∞
};
struct ExitNotApplicable {
    std::string reason;
};
using ExitResult = std::variant<ExitInterior, ExitMonotone, ExitNotApplicable>;

// Walks the sign of the v' bracket on (0, 20]; the first crossing is refined
// by bisection.  |mu − r| <= 1e-12 takes the explicit route: invert y for the
// level where the accumulated fee value covers the marginal IL.
ExitResult optimal_exit(const ExitParams& params, const LiquidityProfile& profile);

} // namespace amm
