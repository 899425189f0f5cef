#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace amm {

// Standard normal CDF / PDF and the inverse CDF (Wichura's AS241, full double
// precision).  Everything downstream (Black-Scholes, Bachelier, path
// generation) goes through these so results are bit-identical across stdlib
// versions.
double norm_cdf(double x);
double norm_pdf(double x);
double inv_norm_cdf(double p);

// Gauss-Legendre nodes and weights on [-1, 1].  Computed once per order by
// Newton iteration on the Legendre recurrence (converged to ~1e-15) and
// cached; no tabulated constants.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int n);

// \int_a^b f dq with an n-point Gauss-Legendre rule mapped onto [a, b].
double gl_integrate(const std::function<double(double)>& f, double a, double b, int n);

// Adaptive Simpson with interval bisection down to `tol` (absolute).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10);

// Pairwise (cascade) summation.  Used for every cross-cell total so sums do
// not depend on accumulation order or thread count.
double pairwise_sum(std::span<const double> xs);

// Monotone bisection: f is nonincreasing on [lo, hi] and we want f(p) = target.
// Plateaus are allowed; any point of the plateau solves the equation and the
// midpoint hit first is returned.  Throws NotInvertible if the target cannot
// be bracketed.
double bisect_decreasing(const std::function<double(double)>& f, double target,
                         double lo, double hi, double xtol);

// Root of g on [lo, hi] given g(lo) and g(hi) of opposite sign.
double bisect_root(const std::function<double(double)>& g, double lo, double hi,
                   double xtol);

// --- deterministic RNG -------------------------------------------------------
// Per-path generators are seeded by splitmix64(seed, index) so an ensemble is
// reproducible path-by-path regardless of how paths are scheduled on threads.
std::uint64_t splitmix64(std::uint64_t x);

class NormalRng {
public:
    NormalRng(std::uint64_t seed, std::uint64_t stream);
    double next();       // N(0,1) via inverse-CDF of a 53-bit uniform

private:
    std::uint64_t s_;    // xorshift-free: we advance a splitmix64 state
};

} // namespace amm
