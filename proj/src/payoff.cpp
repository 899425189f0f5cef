#include "amm/payoff.hpp"

#include "amm/errors.hpp"
#include "amm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace amm {

namespace {

// Antiderivative of (pt - q) * ell / (2 q^{3/2}):  ell * (-pt/sqrt(q) - sqrt(q)).
inline double strip_anti(double ell, double pt, double q) {
    const double s = std::sqrt(q);
    return ell * (-pt / s - s);
}

// int_a^b (pt - q) L dq over one band.
inline double strip_band(double ell, double pt, double a, double b) {
    return strip_anti(ell, pt, b) - strip_anti(ell, pt, a);
}

} // namespace

ILBreakdown il(const LiquidityProfile& profile, double p0, double pt) {
    if (!(p0 > 0.0) || !(pt > 0.0)) throw NonPositivePrice("il: prices must be > 0");

    ILBreakdown out;
    std::vector<double> puts, calls, atoms;
    for (const LiquidityStep& s : profile.steps()) {
        // put side: strikes in [0, p0), payoff (q - pt)^+ -> q in (pt, p0)
        {
            const double a = std::max(s.q_lo, pt), b = std::min(s.q_hi, p0);
            if (b > a) puts.push_back(-strip_band(s.ell, pt, a, b));   // (q - pt) = -(pt - q)
        }
        // call side: strikes in [p0, inf), payoff (pt - q)^+ -> q in (p0, pt)
        {
            const double a = std::max(s.q_lo, p0), b = std::min(s.q_hi, pt);
            if (b > a) calls.push_back(strip_band(s.ell, pt, a, b));
        }
    }
    for (const PointMass& m : profile.atoms()) {
        // an atom exactly at p0 is on neither side and contributes nothing
        if (m.q0 < p0 && m.q0 > pt) atoms.push_back(m.mass * (m.q0 - pt));
        if (m.q0 > p0 && m.q0 < pt) atoms.push_back(m.mass * (pt - m.q0));
    }
    out.put_leg = pairwise_sum(puts);
    out.call_leg = pairwise_sum(calls);
    out.atom_contrib = pairwise_sum(atoms);
    out.total = out.put_leg + out.call_leg + out.atom_contrib;
    return out;
}

double il_delta_realized(const LiquidityProfile& profile, double p0, double pt) {
    if (!(p0 > 0.0) || !(pt > 0.0))
        throw NonPositivePrice("il_delta_realized: prices must be > 0");
    if (pt == p0) return 0.0;
    if (pt > p0) return profile.mass_between(p0, pt);
    return -profile.mass_between(pt, p0);
}

double il_gamma_realized(const LiquidityProfile& profile, double pt) {
    if (!(pt > 0.0)) throw NonPositivePrice("il_gamma_realized: pt must be > 0");
    for (const PointMass& m : profile.atoms())
        if (m.q0 == pt)
            throw AtomAtPrice("il_gamma_realized: point mass at the evaluation price");
    return profile.density_at(pt);
}

TripartiteIL tripartite(double p0, double pa, double pb, double pt) {
    if (!(pa > 0.0 && pa < p0 && p0 < pb))
        throw BadRange("tripartite: need 0 < pa < p0 < pb");
    if (!(pt > 0.0)) throw NonPositivePrice("tripartite: pt must be > 0");

    TripartiteIL t;
    const double sp0 = std::sqrt(p0);
    t.u0 = sp0 + pt / sp0;
    if (pt >= pa && pt <= pb) t.u_half = -2.0 * std::sqrt(pt);
    const double spa = std::sqrt(pa), spb = std::sqrt(pb);
    if (pt < pa) t.u1 += -2.0 * spa + (pa - pt) / spa;
    if (pt > pb) t.u1 += -2.0 * spb - (pt - pb) / spb;
    t.total = t.u0 + t.u_half + t.u1;
    return t;
}

} // namespace amm
