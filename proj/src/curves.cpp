#include "amm/curves.hpp"

#include "amm/errors.hpp"
#include "amm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace amm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_cpmm(const Cpmm& f) {
    if (!(f.k > 0.0)) throw BadInput("cpmm: k must be > 0");
}
void check_g3m(const G3m& f) {
    if (!(f.alpha > 0.0 && f.alpha < 1.0)) throw BadInput("g3m: alpha must be in (0,1)");
    if (!(f.k > 0.0)) throw BadInput("g3m: k must be > 0");
}
void check_entropy_y(const EntropyY& f) {
    if (!(f.c > 0.0)) throw BadInput("entropy_y: c must be > 0");
}
void check_cev(const CevNeutral& f) {
    if (!(f.c > 0.0) || !(f.nu > 0.0)) throw BadInput("cev_neutral: c and nu must be > 0");
    if (!(f.eps > 0.0 && f.m > f.eps)) throw BadInput("cev_neutral: need 0 < eps < m");
}
void check_range(const RangeBand& f) {
    if (!(f.ell > 0.0)) throw BadInput("range: ell must be > 0");
    if (!(f.pa > 0.0 && f.pb > f.pa)) throw BadInput("range: need 0 < pa < pb");
}

} // namespace

double analytic_density(const BondingFamily& f, double q) {
    if (!(q > 0.0)) throw NonPositivePrice("analytic_density: q must be > 0");
    return std::visit(
        [q](const auto& fam) -> double {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Cpmm>) {
                check_cpmm(fam);
                return fam.k / (2.0 * q * std::sqrt(q));
            } else if constexpr (std::is_same_v<T, G3m>) {
                check_g3m(fam);
                const double a = fam.alpha;
                return fam.k * (1.0 - a) * std::pow(a / (1.0 - a), 1.0 - a) * std::pow(q, a - 2.0);
            } else if constexpr (std::is_same_v<T, EntropyY>) {
                check_entropy_y(fam);
                return q <= fam.c ? 1.0 / q : 0.0;
            } else if constexpr (std::is_same_v<T, EntropyX>) {
                return 1.0 / (q * q);
            } else if constexpr (std::is_same_v<T, CevNeutral>) {
                check_cev(fam);
                if (q < fam.eps || q > fam.m) return 0.0;
                return fam.c / (fam.nu * fam.nu * std::pow(q, 2.0 * fam.beta));
            } else {
                check_range(fam);
                if (q < fam.pa || q > fam.pb) return 0.0;
                return fam.ell / (2.0 * q * std::sqrt(q));
            }
        },
        f);
}

std::pair<double, double> family_support(const BondingFamily& f) {
    return std::visit(
        [](const auto& fam) -> std::pair<double, double> {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Cpmm>) {
                check_cpmm(fam);
                return {0.0, kInf};
            } else if constexpr (std::is_same_v<T, G3m>) {
                check_g3m(fam);
                return {0.0, kInf};
            } else if constexpr (std::is_same_v<T, EntropyY>) {
                check_entropy_y(fam);
                return {0.0, fam.c};
            } else if constexpr (std::is_same_v<T, EntropyX>) {
                return {0.0, kInf};
            } else if constexpr (std::is_same_v<T, CevNeutral>) {
                check_cev(fam);
                return {fam.eps, fam.m};
            } else {
                check_range(fam);
                return {fam.pa, fam.pb};
            }
        },
        f);
}

double closed_form_x(const BondingFamily& f, double p) {
    if (!(p > 0.0)) throw NonPositivePrice("closed_form_x: p must be > 0");
    return std::visit(
        [p](const auto& fam) -> double {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Cpmm>) {
                check_cpmm(fam);
                return fam.k / std::sqrt(p);
            } else if constexpr (std::is_same_v<T, G3m>) {
                check_g3m(fam);
                const double a = fam.alpha;
                return fam.k * std::pow(a / ((1.0 - a) * p), 1.0 - a);
            } else if constexpr (std::is_same_v<T, EntropyY>) {
                check_entropy_y(fam);
                if (p > fam.c) return 0.0;
                return std::log(fam.c / p);
            } else if constexpr (std::is_same_v<T, EntropyX>) {
                return 1.0 / p;
            } else if constexpr (std::is_same_v<T, CevNeutral>) {
                return cev_neutral_reserves(fam, p).x;
            } else {
                check_range(fam);
                if (p >= fam.pb) return 0.0;
                const double lo = std::max(p, fam.pa);
                return fam.ell * (1.0 / std::sqrt(lo) - 1.0 / std::sqrt(fam.pb));
            }
        },
        f);
}

double closed_form_y(const BondingFamily& f, double p) {
    if (!(p > 0.0)) throw NonPositivePrice("closed_form_y: p must be > 0");
    return std::visit(
        [p](const auto& fam) -> double {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Cpmm>) {
                check_cpmm(fam);
                return fam.k * std::sqrt(p);
            } else if constexpr (std::is_same_v<T, G3m>) {
                check_g3m(fam);
                const double a = fam.alpha;
                return fam.k * std::pow((1.0 - a) * p / a, a);
            } else if constexpr (std::is_same_v<T, EntropyY>) {
                check_entropy_y(fam);
                return std::min(p, fam.c);
            } else if constexpr (std::is_same_v<T, EntropyX>) {
                // y is fixed only up to the bonding constant; normalized so
                // that ln x + y = 0, i.e. y = ln p.
                return std::log(p);
            } else if constexpr (std::is_same_v<T, CevNeutral>) {
                return cev_neutral_reserves(fam, p).y;
            } else {
                check_range(fam);
                if (p <= fam.pa) return 0.0;
                const double hi = std::min(p, fam.pb);
                return fam.ell * (std::sqrt(hi) - std::sqrt(fam.pa));
            }
        },
        f);
}

ReservePoint cev_neutral_reserves(const CevNeutral& f, double p) {
    check_cev(f);
    if (!(p >= f.eps && p <= f.m))
        throw OutsideSupport("cev_neutral_reserves: p outside [eps, m]");
    const double scale = f.c / (f.nu * f.nu);
    const double b = f.beta;
    ReservePoint r;
    if (b > 0.5) {
        r.x = scale * std::pow(p, 1.0 - 2.0 * b) / (2.0 * b - 1.0);
    } else if (b == 0.5) {
        r.x = scale * (std::log(f.m) - std::log(p));
    } else {
        r.x = scale * (std::pow(f.m, 1.0 - 2.0 * b) - std::pow(p, 1.0 - 2.0 * b)) /
              (1.0 - 2.0 * b);
    }
    if (b < 1.0) {
        r.y = scale * std::pow(p, 2.0 * (1.0 - b)) / (2.0 * (1.0 - b));
    } else if (b == 1.0) {
        r.y = scale * (std::log(p) - std::log(f.eps));
    } else {
        r.y = scale * (std::pow(f.eps, 2.0 - 2.0 * b) - std::pow(p, 2.0 - 2.0 * b)) /
              (2.0 * (b - 1.0));
    }
    return r;
}

namespace {

void check_breakpoints(const std::vector<double>& bp, double lo, double hi) {
    if (bp.size() < 2) throw BadInput("discretize: need at least two breakpoints");
    for (size_t i = 0; i < bp.size(); ++i) {
        if (!(bp[i] > 0.0)) throw NonPositivePrice("discretize: breakpoints must be > 0");
        if (i > 0 && !(bp[i] > bp[i - 1]))
            throw BadInterval("discretize: breakpoints must be strictly ascending");
        if (bp[i] < lo - 1e-12 * bp[i] || bp[i] > hi * (1.0 + 1e-12))
            throw OutsideSupport("discretize: breakpoint outside family support");
    }
}

} // namespace

LiquidityProfile discretize(const BondingFamily& f, const std::vector<double>& breakpoints) {
    auto [lo, hi] = family_support(f);
    check_breakpoints(breakpoints, lo, hi);
    std::vector<LiquidityStep> steps;
    steps.reserve(breakpoints.size() - 1);
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i], b = breakpoints[i + 1];
        const double dx = closed_form_x(f, a) - closed_form_x(f, b);
        const double w = 1.0 / std::sqrt(a) - 1.0 / std::sqrt(b);
        const double ell = dx / w;
        if (ell > 0.0) steps.push_back({a, b, ell});
    }
    return LiquidityProfile(std::move(steps));
}

LiquidityProfile profile_from_density(const std::function<double(double)>& L,
                                      const std::vector<double>& breakpoints) {
    check_breakpoints(breakpoints, 0.0, kInf);
    std::vector<LiquidityStep> steps;
    steps.reserve(breakpoints.size() - 1);
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i], b = breakpoints[i + 1];
        const double dx = adaptive_simpson(L, a, b, 1e-13 * (b - a));
        const double w = 1.0 / std::sqrt(a) - 1.0 / std::sqrt(b);
        const double ell = dx / w;
        if (ell < 0.0) throw NegativeLiquidity("profile_from_density: negative density mass");
        if (ell > 0.0) steps.push_back({a, b, ell});
    }
    return LiquidityProfile(std::move(steps));
}

std::vector<double> make_grid(double lo, double hi, int n, bool log_spacing) {
    if (!(lo > 0.0 && hi > lo)) throw BadInterval("make_grid: need 0 < lo < hi");
    if (n < 1) throw BadInput("make_grid: need at least one interval");
    std::vector<double> g(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        g[i] = log_spacing ? lo * std::exp(t * std::log(hi / lo)) : lo + t * (hi - lo);
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

CurvePoint curve_from_value(const ValueFunctionSpec& spec, double x) {
    if (!spec.v || !spec.dv) throw BadInput("curve_from_value: v and dv are required");
    if (!(x >= 0.0) || !std::isfinite(x)) throw BadInput("curve_from_value: x must be finite, >= 0");

    // Expand a bracket [lo, hi] with dv(lo) >= x >= dv(hi); dv is nonincreasing.
    double lo = 1.0, hi = 1.0;
    int guard = 0;
    while (spec.dv(lo) < x) {
        lo *= 0.5;
        if (++guard > 2000 || lo < 1e-300)
            throw NotInvertible("curve_from_value: x above the range of dv");
    }
    guard = 0;
    while (spec.dv(hi) > x) {
        hi *= 2.0;
        if (++guard > 2000 || hi > 1e300)
            throw NotInvertible("curve_from_value: x below the range of dv");
    }
    const double p = (hi <= lo)
                         ? lo   // dv(1) == x exactly; any plateau point solves it
                         : bisect_decreasing(spec.dv, x, lo, hi, 1e-12 * std::max(1.0, hi));

    // y from integration by parts of -int_0^p q d2v dq; exact even when d2v
    // has a point mass at a kink (the expiry covered call), where quadrature
    // of the callable would miss the boundary term.
    const double y = spec.v(p) - p * x;
    return {p, x, y};
}

} // namespace amm
