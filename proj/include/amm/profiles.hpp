#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace amm {

// Reserve pair of a pool at some price: x is the risky-asset side, y the
// numeraire side.
struct ReservePoint {
    double x = 0.0;
    double y = 0.0;
};

// Second-order partial derivatives of a bonding function f(x, y) at a reserve
// point.  Used to evaluate the intrinsic liquidity directly from the curve.
struct CurvePartials {
    double fx = 0.0;
    double fy = 0.0;
    double fxx = 0.0;
    double fxy = 0.0;
    double fyy = 0.0;
};

// ell = -2 (fx fy)^{3/2} / (fyy fx^2 - 2 fxy fx fy + fxx fy^2), in units of
// sqrt(X*Y).  Throws DegenerateCurvature when the denominator vanishes and
// NonPositivePrice when fx/fy <= 0.
double intrinsic_liquidity(const CurvePartials& d);

// One constant-ell band: the liquidity density on [q_lo, q_hi) is
// L(q) = ell / (2 q^{3/2}).
struct LiquidityStep {
    double q_lo = 0.0;
    double q_hi = 0.0;
    double ell = 0.0;
};

// A Dirac component: `mass` units of L concentrated at price q0.
struct PointMass {
    double q0 = 0.0;
    double mass = 0.0;
};

// Raw Uniswap-v3-style tick ladder.  Liquidity figures are carried as signed
// 128-bit integers because on-chain values routinely exceed 2^53.
struct TickLadder {
    struct Entry {
        int tick = 0;
        __int128 liquidity_net = 0;
    };
    std::vector<Entry> ticks;              // sorted by tick index
    int current_tick = 0;
    __int128 current_liquidity = 0;
    double decimal_scale = 1.0;            // raw tick price -> quote units
    double pool_price = 0.0;               // optional, informational

    static constexpr int kMinTick = -887272;
    static constexpr int kMaxTick = 887272;
};

__int128 parse_int128(const std::string& s);
std::string int128_to_string(__int128 v);

// Piecewise-constant-ell liquidity profile with optional point masses.
// Steps are sorted, disjoint, finite, with ell >= 0; intervals are
// lower-closed [q_lo, q_hi).
class LiquidityProfile {
public:
    LiquidityProfile() = default;
    LiquidityProfile(std::vector<LiquidityStep> steps, std::vector<PointMass> atoms = {});

    // Anchored cumulative sum of liquidity_net, pinned so the interval
    // containing current_tick carries current_liquidity.  Residual liquidity
    // outside the initialized range is emitted as bands bounded by the
    // min/max tick prices.
    static LiquidityProfile from_ticks(const TickLadder& ladder);

    const std::vector<LiquidityStep>& steps() const { return steps_; }
    const std::vector<PointMass>& atoms() const { return atoms_; }

    bool empty() const { return steps_.empty() && atoms_.empty(); }
    double support_lo() const;
    double support_hi() const;

    // Step density at q (atoms are not part of the pointwise density).
    double density_at(double q) const;

    // ell of the step containing q, 0 in gaps.
    double ell_at(double q) const;

    // x(p) = int_p^inf L dq, y(p) = int_0^p q L dq, both with exact per-step
    // antiderivatives; atoms contribute mass (x side) or q0*mass (y side).
    ReservePoint reserves(double p) const;

    // V(p) = int min(p, q) L dq + sum min(p, q0) * mass  ( = x*p + y ).
    double pool_value(double p) const;

    // int_a^b L dq over steps and atoms, a <= b (used by greeks and exit).
    double mass_between(double a, double b) const;

    // Total int L dq over everything.
    double total_mass() const;

    // All step boundaries, ascending, deduplicated.
    std::vector<double> breakpoints() const;

    LiquidityProfile scaled(double c) const;
    // Restriction L * 1{[lo, hi)}; atoms keep the lower-closed convention.
    LiquidityProfile restricted(double lo, double hi) const;
    static LiquidityProfile combine(double a, const LiquidityProfile& p1, double b,
                                    const LiquidityProfile& p2);

private:
    void validate() const;

    std::vector<LiquidityStep> steps_;
    std::vector<PointMass> atoms_;
};

// Exact price for a raw tick index: decimal_scale * 1.0001^i.
double tick_price(int i, double decimal_scale);

} // namespace amm
