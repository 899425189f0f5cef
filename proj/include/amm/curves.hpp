#pragma once

#include "amm/profiles.hpp"

#include <functional>
#include <utility>
#include <variant>
#include <vector>

namespace amm {

// Analytic bonding-curve families and their liquidity densities.  Prices are
// quote units throughout; `ell` refers to the intrinsic liquidity
// ell(q) = 2 q^{3/2} L(q).

struct Cpmm {                 // x*y = k^2, ell = k everywhere
    double k = 0.0;
};

struct G3m {                  // x^alpha * y^(1-alpha) = k
    double alpha = 0.0;
    double k = 0.0;
};

struct EntropyY {             // x + ln y = ln c,  L = 1/q on (0, c]
    double c = 0.0;
};

struct EntropyX {             // ln x + y = 0,  L = 1/q^2 on (0, inf)
};

struct CevNeutral {           // L = c / (nu^2 q^{2 beta}) on [eps, m]
    double c = 0.0;
    double nu = 0.0;
    double beta = 0.0;
    double eps = 0.0;
    double m = 0.0;
};

struct RangeBand {            // constant ell on [pa, pb]
    double ell = 0.0;
    double pa = 0.0;
    double pb = 0.0;
};

using BondingFamily = std::variant<Cpmm, G3m, EntropyY, EntropyX, CevNeutral, RangeBand>;

// L(q); zero outside the family support, throws NonPositivePrice for q <= 0.
double analytic_density(const BondingFamily& f, double q);

// (lo, hi) price support; hi may be +inf for unbounded families.
std::pair<double, double> family_support(const BondingFamily& f);

// Closed-form x(p) = int_p^{top} L dq.  For CevNeutral this follows the
// branch formulas (beta <= 1/2 integrates up to m, beta > 1/2 to infinity).
double closed_form_x(const BondingFamily& f, double p);

// Closed-form y(p) = int_{bottom}^p q L dq where the family defines one
// (CevNeutral uses eps as the lower cutoff for beta >= 1).
double closed_form_y(const BondingFamily& f, double p);

// Branch-wise CEV-neutral reserves at p (both sides at once).
ReservePoint cev_neutral_reserves(const CevNeutral& f, double p);

// Step profile on the given ascending breakpoints.  Each interval gets the
// exact mean of ell(q), i.e. ell_i = (x(a) - x(b)) / (1/sqrt(a) - 1/sqrt(b)),
// which preserves int L over every interval.  Breakpoints must lie inside the
// family support (OutsideSupport otherwise).
LiquidityProfile discretize(const BondingFamily& f, const std::vector<double>& breakpoints);

// Same mean-preserving rule for an arbitrary density callable; int L per cell
// is evaluated by adaptive Simpson.
LiquidityProfile profile_from_density(const std::function<double(double)>& L,
                                      const std::vector<double>& breakpoints);

// Ascending grid helper: n intervals between lo and hi, log or linear spacing.
std::vector<double> make_grid(double lo, double hi, int n, bool log_spacing);

// Replicating-market-maker construction from a target pool value function.
// All three callables take the price; v must be normalized with v(0+) = 0.
struct ValueFunctionSpec {
    std::function<double(double)> v;
    std::function<double(double)> dv;
    std::function<double(double)> d2v;
};

struct CurvePoint {
    double p = 0.0;
    double x = 0.0;
    double y = 0.0;
};

// Solves dv(p) = x by monotone bisection (dv nonincreasing; flat stretches
// are resolved to any point of the plateau) and recovers y from the exact
// integration-by-parts identity y = v(p) - p*x, which also covers kinked
// targets whose d2v carries boundary point mass.  The pair satisfies
// y + int_0^p q d2v dq = 0 whenever d2v is integrable.
CurvePoint curve_from_value(const ValueFunctionSpec& spec, double x);

} // namespace amm
