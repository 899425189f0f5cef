#pragma once

#include "amm/profiles.hpp"

namespace amm {

// Realized impermanent loss of holding the pool from price p0 to pt versus
// holding the initial reserves, decomposed into the option-replication legs:
//   put_leg  = int_0^{p0}  L(q) (q - pt)^+ dq          (short puts below p0)
//   call_leg = int_{p0}^inf L(q) (pt - q)^+ dq         (short calls above p0)
// The total also equals the one-sided strip int_{p0}^{pt} (pt - q) L(q) dq.
struct ILBreakdown {
    double total = 0.0;
    double put_leg = 0.0;       // step contribution below p0
    double call_leg = 0.0;      // step contribution above p0
    double atom_contrib = 0.0;  // all point-mass terms
};

ILBreakdown il(const LiquidityProfile& profile, double p0, double pt);

// d IL / d pt = signed int_{p0}^{pt} L dq (negative when pt < p0).
double il_delta_realized(const LiquidityProfile& profile, double p0, double pt);

// d2 IL / d pt^2 = L(pt); throws AtomAtPrice when a point mass sits at pt.
double il_gamma_realized(const LiquidityProfile& profile, double pt);

// Decomposition of the unit-ell range-band IL into the flat, square-root and
// linear pieces; total = u0 + u_half + u1 matches il() on the same band.
struct TripartiteIL {
    double u0 = 0.0;
    double u_half = 0.0;
    double u1 = 0.0;
    double total = 0.0;
};

TripartiteIL tripartite(double p0, double pa, double pb, double pt);

} // namespace amm
