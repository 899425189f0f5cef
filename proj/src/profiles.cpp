#include "amm/profiles.hpp"

#include "amm/errors.hpp"
#include "amm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace amm {

double intrinsic_liquidity(const CurvePartials& d) {
    if (!(d.fx > 0.0) || !(d.fy > 0.0))
        throw NonPositivePrice("intrinsic_liquidity: fx and fy must be positive");
    const double denom = d.fyy * d.fx * d.fx - 2.0 * d.fxy * d.fx * d.fy + d.fxx * d.fy * d.fy;
    if (denom == 0.0 || !std::isfinite(denom))
        throw DegenerateCurvature("intrinsic_liquidity: curvature form vanishes");
    const double num = -2.0 * std::pow(d.fx * d.fy, 1.5);
    const double ell = num / denom;
    if (!(ell > 0.0) || !std::isfinite(ell))
        throw DegenerateCurvature("intrinsic_liquidity: non-positive result (convexity violated)");
    return ell;
}

__int128 parse_int128(const std::string& s) {
    if (s.empty()) throw SchemaError("parse_int128: empty string");
    size_t i = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
        neg = (s[0] == '-');
        i = 1;
    }
    if (i == s.size()) throw SchemaError("parse_int128: no digits in '" + s + "'");
    // Accumulate unsigned so overflow is detectable instead of undefined.
    const unsigned __int128 limit =
        (static_cast<unsigned __int128>(1) << 127) - (neg ? 0 : 1);
    unsigned __int128 v = 0;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (c < '0' || c > '9') throw SchemaError("parse_int128: bad digit in '" + s + "'");
        const unsigned d = static_cast<unsigned>(c - '0');
        if (v > (limit - d) / 10) throw SchemaError("parse_int128: '" + s + "' overflows");
        v = v * 10 + d;
    }
    if (!neg) return static_cast<__int128>(v);
    if (v == 0) return 0;
    return -static_cast<__int128>(v - 1) - 1;   // reaches the minimum without overflow
}

std::string int128_to_string(__int128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    std::string out;
    while (u > 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) out.push_back('-');
    std::reverse(out.begin(), out.end());
    return out;
}

double tick_price(int i, double decimal_scale) {
    // 1.0001^i = exp(i * log1p(1e-4)); keeps 1e-12 relative accuracy over the
    // whole tick range, and round-trips with the alignment check in pricing.
    return decimal_scale * std::exp(static_cast<double>(i) * std::log1p(1e-4));
}

LiquidityProfile::LiquidityProfile(std::vector<LiquidityStep> steps,
                                   std::vector<PointMass> atoms)
    : steps_(std::move(steps)), atoms_(std::move(atoms)) {
    std::sort(steps_.begin(), steps_.end(),
              [](const LiquidityStep& a, const LiquidityStep& b) { return a.q_lo < b.q_lo; });
    std::sort(atoms_.begin(), atoms_.end(),
              [](const PointMass& a, const PointMass& b) { return a.q0 < b.q0; });
    validate();
}

void LiquidityProfile::validate() const {
    for (size_t i = 0; i < steps_.size(); ++i) {
        const LiquidityStep& s = steps_[i];
        if (!(s.q_lo > 0.0)) throw NonPositivePrice("profile: step lower bound must be > 0");
        if (!std::isfinite(s.q_hi))
            throw UnboundedSupport("profile: step extends to +inf; use an analytic family instead");
        if (!(s.q_hi > s.q_lo)) throw BadInterval("profile: step bounds must satisfy q_lo < q_hi");
        if (!(s.ell >= 0.0) || !std::isfinite(s.ell))
            throw NegativeLiquidity("profile: step ell must be finite and >= 0");
        if (i > 0 && s.q_lo < steps_[i - 1].q_hi - 1e-12 * s.q_lo)
            throw BadInterval("profile: steps overlap");
    }
    for (const PointMass& a : atoms_) {
        if (!(a.q0 > 0.0)) throw NonPositivePrice("profile: atom price must be > 0");
        if (!(a.mass > 0.0) || !std::isfinite(a.mass))
            throw NegativeLiquidity("profile: atom mass must be finite and > 0");
    }
}

LiquidityProfile LiquidityProfile::from_ticks(const TickLadder& ladder) {
    if (ladder.ticks.empty()) throw EmptyLadder("from_ticks: ladder has no initialized ticks");
    if (!(ladder.decimal_scale > 0.0))
        throw NonPositivePrice("from_ticks: decimal_scale must be > 0");
    if (ladder.current_liquidity < 0)
        throw NegativeLiquidity("from_ticks: current_liquidity is negative");

    std::vector<TickLadder::Entry> ticks = ladder.ticks;
    std::sort(ticks.begin(), ticks.end(),
              [](const TickLadder::Entry& a, const TickLadder::Entry& b) { return a.tick < b.tick; });
    for (size_t i = 1; i < ticks.size(); ++i)
        if (ticks[i].tick == ticks[i - 1].tick)
            throw SchemaError("from_ticks: duplicate tick index");

    // Prefix sums of liquidity_net; prefix[k] is the unanchored liquidity on
    // the interval starting at ticks[k].
    const size_t n = ticks.size();
    std::vector<__int128> prefix(n);
    __int128 run = 0;
    for (size_t k = 0; k < n; ++k) {
        run += ticks[k].liquidity_net;
        prefix[k] = run;
    }

    // Anchor: the interval containing current_tick must carry
    // current_liquidity.  Before the first tick the unanchored value is 0.
    __int128 at_current = 0;
    for (size_t k = 0; k < n; ++k)
        if (ticks[k].tick <= ladder.current_tick) at_current = prefix[k];
    const __int128 anchor = ladder.current_liquidity - at_current;

    std::vector<LiquidityStep> steps;
    auto push = [&](int tick_lo, int tick_hi, __int128 ell) {
        if (ell < 0)
            throw NegativeLiquidity("from_ticks: anchored liquidity negative on interval [" +
                                    std::to_string(tick_lo) + ", " + std::to_string(tick_hi) + ")");
        if (ell == 0) return;
        steps.push_back({tick_price(tick_lo, ladder.decimal_scale),
                         tick_price(tick_hi, ladder.decimal_scale),
                         static_cast<double>(ell)});
    };

    if (ticks.front().tick > TickLadder::kMinTick)
        push(TickLadder::kMinTick, ticks.front().tick, anchor);
    for (size_t k = 0; k + 1 < n; ++k)
        push(ticks[k].tick, ticks[k + 1].tick, anchor + prefix[k]);
    if (ticks.back().tick < TickLadder::kMaxTick)
        push(ticks.back().tick, TickLadder::kMaxTick, anchor + prefix[n - 1]);

    return LiquidityProfile(std::move(steps));
}

double LiquidityProfile::support_lo() const {
    if (empty()) throw BadInput("profile: empty");
    double lo = std::numeric_limits<double>::infinity();
    if (!steps_.empty()) lo = steps_.front().q_lo;
    if (!atoms_.empty()) lo = std::min(lo, atoms_.front().q0);
    return lo;
}

double LiquidityProfile::support_hi() const {
    if (empty()) throw BadInput("profile: empty");
    double hi = 0.0;
    for (const LiquidityStep& s : steps_) hi = std::max(hi, s.q_hi);
    if (!atoms_.empty()) hi = std::max(hi, atoms_.back().q0);
    return hi;
}

double LiquidityProfile::density_at(double q) const {
    if (!(q > 0.0)) throw NonPositivePrice("density_at: q must be > 0");
    return ell_at(q) / (2.0 * q * std::sqrt(q));
}

double LiquidityProfile::ell_at(double q) const {
    // steps are sorted and disjoint; lower-closed convention [q_lo, q_hi)
    auto it = std::upper_bound(steps_.begin(), steps_.end(), q,
                               [](double v, const LiquidityStep& s) { return v < s.q_lo; });
    if (it == steps_.begin()) return 0.0;
    --it;
    return (q >= it->q_lo && q < it->q_hi) ? it->ell : 0.0;
}

namespace {

// int_a^b L dq for one constant-ell band: ell * (1/sqrt(a) - 1/sqrt(b)).
inline double band_x(double ell, double a, double b) {
    return ell * (1.0 / std::sqrt(a) - 1.0 / std::sqrt(b));
}

// int_a^b q L dq = ell * (sqrt(b) - sqrt(a)).
inline double band_y(double ell, double a, double b) {
    return ell * (std::sqrt(b) - std::sqrt(a));
}

} // namespace

ReservePoint LiquidityProfile::reserves(double p) const {
    if (!(p > 0.0)) throw NonPositivePrice("reserves: p must be > 0");
    std::vector<double> xs, ys;
    xs.reserve(steps_.size() + atoms_.size());
    ys.reserve(steps_.size() + atoms_.size());
    for (const LiquidityStep& s : steps_) {
        if (s.q_hi > p) xs.push_back(band_x(s.ell, std::max(s.q_lo, p), s.q_hi));
        if (s.q_lo < p) ys.push_back(band_y(s.ell, s.q_lo, std::min(s.q_hi, p)));
    }
    for (const PointMass& a : atoms_) {
        if (a.q0 > p) xs.push_back(a.mass);
        else ys.push_back(a.q0 * a.mass);   // atom exactly at p sits on the y side
    }
    return {pairwise_sum(xs), pairwise_sum(ys)};
}

double LiquidityProfile::pool_value(double p) const {
    if (!(p > 0.0)) throw NonPositivePrice("pool_value: p must be > 0");
    std::vector<double> vs;
    vs.reserve(steps_.size() + atoms_.size());
    for (const LiquidityStep& s : steps_) {
        if (s.q_hi <= p) {
            vs.push_back(band_y(s.ell, s.q_lo, s.q_hi));
        } else if (s.q_lo >= p) {
            vs.push_back(p * band_x(s.ell, s.q_lo, s.q_hi));
        } else {
            vs.push_back(band_y(s.ell, s.q_lo, p) + p * band_x(s.ell, p, s.q_hi));
        }
    }
    for (const PointMass& a : atoms_) vs.push_back(std::min(p, a.q0) * a.mass);
    return pairwise_sum(vs);
}

double LiquidityProfile::mass_between(double a, double b) const {
    if (!(a > 0.0) || !(b >= a)) throw BadInterval("mass_between: need 0 < a <= b");
    std::vector<double> xs;
    for (const LiquidityStep& s : steps_) {
        const double lo = std::max(s.q_lo, a), hi = std::min(s.q_hi, b);
        if (hi > lo) xs.push_back(band_x(s.ell, lo, hi));
    }
    for (const PointMass& m : atoms_)
        if (m.q0 > a && m.q0 <= b) xs.push_back(m.mass);
    return pairwise_sum(xs);
}

double LiquidityProfile::total_mass() const {
    std::vector<double> xs;
    for (const LiquidityStep& s : steps_) xs.push_back(band_x(s.ell, s.q_lo, s.q_hi));
    for (const PointMass& m : atoms_) xs.push_back(m.mass);
    return pairwise_sum(xs);
}

std::vector<double> LiquidityProfile::breakpoints() const {
    std::vector<double> bp;
    for (const LiquidityStep& s : steps_) {
        bp.push_back(s.q_lo);
        bp.push_back(s.q_hi);
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end(),
                         [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(a, b); }),
             bp.end());
    return bp;
}

LiquidityProfile LiquidityProfile::scaled(double c) const {
    if (!(c >= 0.0) || !std::isfinite(c)) throw BadInput("scaled: factor must be finite and >= 0");
    std::vector<LiquidityStep> s = steps_;
    std::vector<PointMass> a;
    for (LiquidityStep& st : s) st.ell *= c;
    if (c > 0.0) {
        a = atoms_;
        for (PointMass& pm : a) pm.mass *= c;
    }
    return LiquidityProfile(std::move(s), std::move(a));
}

LiquidityProfile LiquidityProfile::restricted(double lo, double hi) const {
    if (!(lo > 0.0) || !(hi > lo)) throw BadInterval("restricted: need 0 < lo < hi");
    std::vector<LiquidityStep> s;
    std::vector<PointMass> a;
    for (const LiquidityStep& st : steps_) {
        const double l = std::max(st.q_lo, lo), h = std::min(st.q_hi, hi);
        if (h > l && st.ell > 0.0) s.push_back({l, h, st.ell});
    }
    for (const PointMass& pm : atoms_)
        if (pm.q0 >= lo && pm.q0 < hi) a.push_back(pm);
    return LiquidityProfile(std::move(s), std::move(a));
}

LiquidityProfile LiquidityProfile::combine(double a, const LiquidityProfile& p1, double b,
                                           const LiquidityProfile& p2) {
    // Merge on the union of breakpoints so the result stays piecewise constant.
    std::vector<double> bp;
    for (const LiquidityProfile* p : {&p1, &p2})
        for (const LiquidityStep& s : p->steps()) {
            bp.push_back(s.q_lo);
            bp.push_back(s.q_hi);
        }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    std::vector<LiquidityStep> steps;
    for (size_t i = 0; i + 1 < bp.size(); ++i) {
        const double mid = 0.5 * (bp[i] + bp[i + 1]);
        const double ell = a * p1.ell_at(mid) + b * p2.ell_at(mid);
        if (ell < 0.0) throw NegativeLiquidity("combine: negative ell");
        if (ell > 0.0) steps.push_back({bp[i], bp[i + 1], ell});
    }
    std::vector<PointMass> atoms;
    for (const PointMass& pm : p1.atoms()) atoms.push_back({pm.q0, a * pm.mass});
    for (const PointMass& pm : p2.atoms()) atoms.push_back({pm.q0, b * pm.mass});
    return LiquidityProfile(std::move(steps), std::move(atoms));
}

} // namespace amm
