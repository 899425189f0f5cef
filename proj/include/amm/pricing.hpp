#pragma once

#include "amm/data.hpp"
#include "amm/profiles.hpp"

#include <vector>

namespace amm {

enum class PricingModel { BlackScholes, Bachelier };

// Integration cells: ascending, disjoint, covering the profile support, with
// a breakpoint at every profile step bound, every proxy knot in range, and at
// the put/call split price p0.
struct Partition {
    std::vector<double> cuts;   // cell i = [cuts[i], cuts[i+1])
    size_t size() const { return cuts.empty() ? 0 : cuts.size() - 1; }
};

Partition build_partition(const LiquidityProfile& profile, const std::vector<double>& knots,
                          double p0);
Partition build_partition(const LiquidityProfile& profile, const MarketProxy& proxy,
                          double p0);

// Exact int_a^b (a0 + a1 q) * ell / (2 q^{3/2}) dq
//   = (ell/2) [ -2 a0 / sqrt(q) + 2 a1 sqrt(q) ]_a^b.
double segment_integral_affine(double ell, double a, double b, double a0, double a1);

struct CellValue {
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;
};

struct ILPrice {
    double total = 0.0;
    double put_leg = 0.0;
    double call_leg = 0.0;
    std::vector<CellValue> per_cell;
};

// Risk-neutral IL price against observed option prices: puts below p0, calls
// above, each cell integrated exactly against the proxy's affine segment.
// Atoms contribute mass * proxy price at the atom.  Throws CoverageGap when
// the profile support leaves the proxy's covered strike range.
ILPrice market_il_price(const LiquidityProfile& profile, const MarketProxy& proxy,
                        const MarketConventions& conv);

// Same integral against flat-sigma model prices.  Cells are subdivided to
// bounded log-width and integrated with Gauss-Legendre (the sigma = 0 case
// drops to exact affine integration of the intrinsic payoff).
ILPrice model_il_price(const LiquidityProfile& profile, double sigma,
                       const MarketConventions& conv, PricingModel model,
                       int gl_points = 64);
ILPrice model_il_price_bs(const LiquidityProfile& profile, double sigma,
                          const MarketConventions& conv);
ILPrice model_il_price_bachelier(const LiquidityProfile& profile, double sigma_n,
                                 const MarketConventions& conv, int gl_points = 32);

// Auxiliary integral of the integration-by-parts evaluation
//   int_a^b O(K) / K^{3/2} dK = [-2 O(K)/sqrt(K)]_a^b + 2 int_a^b O'(K)/sqrt(K) dK,
// with the right-hand integral done by n-point Gauss-Legendre.  Exposed for
// the convergence checks of the Bachelier path.
double ibp_option_integral(double a, double b, double sigma_n, const MarketConventions& conv,
                           OptionKind kind, int gl_points);

struct RnGreeks {
    double delta = 0.0;   // d price / d forward
    double gamma = 0.0;
    double vega = 0.0;
};

// Weighted option greeks: int L(q) * greek(q) dq with puts below p0 and calls
// above; atoms add mass * greek(q0).
RnGreeks il_greeks_rn(const LiquidityProfile& profile, double sigma,
                      const MarketConventions& conv, PricingModel model,
                      int gl_points = 32);

// All-call remainder I(P0,T) = int_0^{P0} L(q) (q e^{-rT} - P0 e^{-deltaT}) dq
// evaluated in closed form per tick-aligned band.  Step bounds must be
// decimal_scale * 1.0001^i within 1e-9 relative (NotTickAligned otherwise).
double remainder_sum(const LiquidityProfile& profile, const MarketConventions& conv,
                     double decimal_scale = 1.0);

} // namespace amm
