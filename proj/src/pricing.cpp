#include "amm/pricing.hpp"

#include "amm/errors.hpp"
#include "amm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace amm {

namespace {

constexpr double kDedupTol = 1e-12;

void dedup_sorted(std::vector<double>& v) {
    v.erase(std::unique(v.begin(), v.end(),
                        [](double a, double b) {
                            return std::fabs(a - b) <= kDedupTol * std::max(std::fabs(a), std::fabs(b));
                        }),
            v.end());
}

} // namespace

Partition build_partition(const LiquidityProfile& profile, const std::vector<double>& knots,
                          double p0) {
    if (profile.empty()) throw BadInput("build_partition: empty profile");
    if (!(p0 > 0.0)) throw NonPositivePrice("build_partition: p0 must be > 0");
    const double lo = profile.support_lo(), hi = profile.support_hi();

    std::vector<double> cuts = profile.breakpoints();
    for (double k : knots)
        if (k > lo && k < hi) cuts.push_back(k);
    if (p0 > lo && p0 < hi) cuts.push_back(p0);
    std::sort(cuts.begin(), cuts.end());
    dedup_sorted(cuts);
    return {std::move(cuts)};
}

Partition build_partition(const LiquidityProfile& profile, const MarketProxy& proxy,
                          double p0) {
    const auto [klo, khi] = proxy.coverage();
    const double lo = profile.support_lo(), hi = profile.support_hi();
    if (lo < klo - kDedupTol * klo || hi > khi * (1.0 + kDedupTol)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "build_partition: profile support [%.6g, %.6g] exceeds quote coverage "
                      "[%.6g, %.6g]",
                      lo, hi, klo, khi);
        throw CoverageGap(buf);
    }
    return build_partition(profile, proxy.knot_strikes(), p0);
}

double segment_integral_affine(double ell, double a, double b, double a0, double a1) {
    if (!(a > 0.0) || !(b > a)) throw BadInterval("segment_integral_affine: need 0 < a < b");
    if (!(ell >= 0.0)) throw NegativeLiquidity("segment_integral_affine: ell must be >= 0");
    const double sa = std::sqrt(a), sb = std::sqrt(b);
    return 0.5 * ell * (-2.0 * a0 * (1.0 / sb - 1.0 / sa) + 2.0 * a1 * (sb - sa));
}

ILPrice market_il_price(const LiquidityProfile& profile, const MarketProxy& proxy,
                        const MarketConventions& conv) {
    const Partition part = build_partition(profile, proxy, conv.p0);
    ILPrice out;
    out.per_cell.reserve(part.size());
    std::vector<double> put_vals, call_vals;
    for (size_t i = 0; i + 1 < part.cuts.size(); ++i) {
        const double a = part.cuts[i], b = part.cuts[i + 1];
        const double ell = profile.ell_at(0.5 * (a + b));
        const OptionKind kind = (b <= conv.p0 * (1.0 + kDedupTol)) ? OptionKind::Put
                                                                   : OptionKind::Call;
        double v = 0.0;
        if (ell > 0.0) {
            const auto [a0, a1] = proxy.affine_on(kind, a, b);
            v = segment_integral_affine(ell, a, b, a0, a1);
        }
        out.per_cell.push_back({a, b, v});
        (kind == OptionKind::Put ? put_vals : call_vals).push_back(v);
    }
    for (const PointMass& m : profile.atoms()) {
        const OptionKind kind = (m.q0 <= conv.p0) ? OptionKind::Put : OptionKind::Call;
        const double v = m.mass * proxy.eval(kind, m.q0);
        (kind == OptionKind::Put ? put_vals : call_vals).push_back(v);
    }
    out.put_leg = pairwise_sum(put_vals);
    out.call_leg = pairwise_sum(call_vals);
    out.total = out.put_leg + out.call_leg;
    return out;
}

namespace {

double model_price(PricingModel model, double f, double k, double t, double sigma, double r,
                   OptionKind kind) {
    return model == PricingModel::BlackScholes ? bs_price(f, k, t, sigma, r, kind)
                                               : bachelier_price(f, k, t, sigma, r, kind);
}

// Subdivide [a, b] so that each piece spans at most a factor-4 price range;
// keeps the q^{-3/2} weight polynomial-friendly for fixed-order quadrature.
void bounded_log_split(double a, double b, std::vector<double>& cuts) {
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::log(b / a) / std::log(4.0))));
    for (int j = 0; j <= pieces; ++j)
        cuts.push_back(a * std::pow(b / a, static_cast<double>(j) / pieces));
}

// Exact integral of L * intrinsic over a cell (sigma = 0 path): the payoff is
// affine with a kink at the forward, so split there and reuse the affine rule.
double intrinsic_cell(double ell, double a, double b, double f, double r, double t,
                      OptionKind kind) {
    const double df = std::exp(-r * t);
    // discounted intrinsic of a call is df*(F - K)^+; affine coefficients in K
    const double sgn = (kind == OptionKind::Call) ? 1.0 : -1.0;
    auto leg = [&](double lo, double hi) {
        if (hi <= lo) return 0.0;
        return segment_integral_affine(ell, lo, hi, sgn * df * f, -sgn * df);
    };
    if (kind == OptionKind::Call) return leg(a, std::min(b, f));
    return leg(std::max(a, f), b);
}

} // namespace

ILPrice model_il_price(const LiquidityProfile& profile, double sigma,
                       const MarketConventions& conv, PricingModel model, int gl_points) {
    if (!(sigma >= 0.0)) throw BadInput("model_il_price: sigma must be >= 0");
    if (!(conv.forward > 0.0) || !(conv.p0 > 0.0))
        throw BadInput("model_il_price: forward and p0 must be > 0");
    const Partition part = build_partition(profile, std::vector<double>{}, conv.p0);

    ILPrice out;
    std::vector<double> put_vals, call_vals;
    for (size_t i = 0; i + 1 < part.cuts.size(); ++i) {
        const double a = part.cuts[i], b = part.cuts[i + 1];
        const double ell = profile.ell_at(0.5 * (a + b));
        const OptionKind kind = (b <= conv.p0 * (1.0 + kDedupTol)) ? OptionKind::Put
                                                                   : OptionKind::Call;
        double v = 0.0;
        if (ell > 0.0) {
            if (sigma == 0.0 || conv.t == 0.0) {
                v = intrinsic_cell(ell, a, b, conv.forward, conv.r, conv.t, kind);
            } else {
                std::vector<double> sub;
                bounded_log_split(a, b, sub);
                std::vector<double> pieces;
                for (size_t j = 0; j + 1 < sub.size(); ++j) {
                    auto f = [&](double q) {
                        return ell / (2.0 * q * std::sqrt(q)) *
                               model_price(model, conv.forward, q, conv.t, sigma, conv.r, kind);
                    };
                    pieces.push_back(gl_integrate(f, sub[j], sub[j + 1], gl_points));
                }
                v = pairwise_sum(pieces);
            }
        }
        out.per_cell.push_back({a, b, v});
        (kind == OptionKind::Put ? put_vals : call_vals).push_back(v);
    }
    for (const PointMass& m : profile.atoms()) {
        const OptionKind kind = (m.q0 <= conv.p0) ? OptionKind::Put : OptionKind::Call;
        const double v =
            m.mass * model_price(model, conv.forward, m.q0, conv.t, sigma, conv.r, kind);
        (kind == OptionKind::Put ? put_vals : call_vals).push_back(v);
    }
    out.put_leg = pairwise_sum(put_vals);
    out.call_leg = pairwise_sum(call_vals);
    out.total = out.put_leg + out.call_leg;
    return out;
}

ILPrice model_il_price_bs(const LiquidityProfile& profile, double sigma,
                          const MarketConventions& conv) {
    return model_il_price(profile, sigma, conv, PricingModel::BlackScholes, 64);
}

double ibp_option_integral(double a, double b, double sigma_n, const MarketConventions& conv,
                           OptionKind kind, int gl_points) {
    if (!(a > 0.0) || !(b > a)) throw BadInterval("ibp_option_integral: need 0 < a < b");
    const double df = std::exp(-conv.r * conv.t);
    const double w = sigma_n * std::sqrt(conv.t);
    auto price = [&](double k) { return bachelier_price(conv.forward, k, conv.t, sigma_n, conv.r, kind); };
    // dO/dK: -df*Phi(d) for calls, df*Phi(-d) for puts, d = (F-K)/w.
    auto dprice = [&](double k) {
        const double d = (conv.forward - k) / w;
        return kind == OptionKind::Call ? -df * norm_cdf(d) : df * norm_cdf(-d);
    };
    const double boundary = -2.0 * price(b) / std::sqrt(b) + 2.0 * price(a) / std::sqrt(a);
    const double aux =
        2.0 * gl_integrate([&](double k) { return dprice(k) / std::sqrt(k); }, a, b, gl_points);
    return boundary + aux;
}

ILPrice model_il_price_bachelier(const LiquidityProfile& profile, double sigma_n,
                                 const MarketConventions& conv, int gl_points) {
    if (!(sigma_n >= 0.0)) throw BadInput("model_il_price_bachelier: sigma must be >= 0");
    if (sigma_n == 0.0 || conv.t == 0.0)
        return model_il_price(profile, 0.0, conv, PricingModel::Bachelier, gl_points);
    const Partition part = build_partition(profile, std::vector<double>{}, conv.p0);

    ILPrice out;
    std::vector<double> put_vals, call_vals;
    for (size_t i = 0; i + 1 < part.cuts.size(); ++i) {
        const double a = part.cuts[i], b = part.cuts[i + 1];
        const double ell = profile.ell_at(0.5 * (a + b));
        const OptionKind kind = (b <= conv.p0 * (1.0 + kDedupTol)) ? OptionKind::Put
                                                                   : OptionKind::Call;
        double v = 0.0;
        if (ell > 0.0) v = 0.5 * ell * ibp_option_integral(a, b, sigma_n, conv, kind, gl_points);
        out.per_cell.push_back({a, b, v});
        (kind == OptionKind::Put ? put_vals : call_vals).push_back(v);
    }
    for (const PointMass& m : profile.atoms()) {
        const OptionKind kind = (m.q0 <= conv.p0) ? OptionKind::Put : OptionKind::Call;
        const double v =
            m.mass * bachelier_price(conv.forward, m.q0, conv.t, sigma_n, conv.r, kind);
        (kind == OptionKind::Put ? put_vals : call_vals).push_back(v);
    }
    out.put_leg = pairwise_sum(put_vals);
    out.call_leg = pairwise_sum(call_vals);
    out.total = out.put_leg + out.call_leg;
    return out;
}

RnGreeks il_greeks_rn(const LiquidityProfile& profile, double sigma,
                      const MarketConventions& conv, PricingModel model, int gl_points) {
    if (!(sigma >= 0.0)) throw BadInput("il_greeks_rn: sigma must be >= 0");
    const Partition part = build_partition(profile, std::vector<double>{}, conv.p0);

    auto greek = [&](int which, double k, OptionKind kind) -> double {
        if (model == PricingModel::BlackScholes) {
            switch (which) {
                case 0: return bs_delta(conv.forward, k, conv.t, sigma, conv.r, kind);
                case 1: return bs_gamma(conv.forward, k, conv.t, sigma, conv.r);
                default: return bs_vega(conv.forward, k, conv.t, sigma, conv.r);
            }
        }
        switch (which) {
            case 0: return bachelier_delta(conv.forward, k, conv.t, sigma, conv.r, kind);
            case 1: return bachelier_gamma(conv.forward, k, conv.t, sigma, conv.r);
            default: return bachelier_vega(conv.forward, k, conv.t, sigma, conv.r);
        }
    };

    RnGreeks g;
    for (int which = 0; which < 3; ++which) {
        std::vector<double> vals;
        for (size_t i = 0; i + 1 < part.cuts.size(); ++i) {
            const double a = part.cuts[i], b = part.cuts[i + 1];
            const double ell = profile.ell_at(0.5 * (a + b));
            if (ell <= 0.0) continue;
            const OptionKind kind = (b <= conv.p0 * (1.0 + kDedupTol)) ? OptionKind::Put
                                                                       : OptionKind::Call;
            std::vector<double> sub;
            bounded_log_split(a, b, sub);
            for (size_t j = 0; j + 1 < sub.size(); ++j) {
                auto f = [&](double q) {
                    return ell / (2.0 * q * std::sqrt(q)) * greek(which, q, kind);
                };
                vals.push_back(gl_integrate(f, sub[j], sub[j + 1], gl_points));
            }
        }
        for (const PointMass& m : profile.atoms()) {
            const OptionKind kind = (m.q0 <= conv.p0) ? OptionKind::Put : OptionKind::Call;
            vals.push_back(m.mass * greek(which, m.q0, kind));
        }
        const double total = pairwise_sum(vals);
        if (which == 0) g.delta = total;
        else if (which == 1) g.gamma = total;
        else g.vega = total;
    }
    return g;
}

double remainder_sum(const LiquidityProfile& profile, const MarketConventions& conv,
                     double decimal_scale) {
    if (!(decimal_scale > 0.0)) throw NonPositivePrice("remainder_sum: decimal_scale must be > 0");
    if (!(conv.p0 > 0.0)) throw NonPositivePrice("remainder_sum: p0 must be > 0");
    const double log_tick = std::log1p(1e-4);

    auto check_aligned = [&](double q) {
        const double idx = std::log(q / decimal_scale) / log_tick;
        const double snapped = tick_price(static_cast<int>(std::lround(idx)), decimal_scale);
        if (std::fabs(q - snapped) > 1e-9 * q) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "remainder_sum: breakpoint %.12g is not a 1.0001 power times scale", q);
            throw NotTickAligned(buf);
        }
    };

    const double er = std::exp(-conv.r * conv.t);
    const double ed = std::exp(-conv.delta * conv.t);
    std::vector<double> terms;
    for (const LiquidityStep& s : profile.steps()) {
        check_aligned(s.q_lo);
        check_aligned(s.q_hi);
        const double a = s.q_lo, b = std::min(s.q_hi, conv.p0);
        if (b <= a) continue;
        // int_a^b L (q e^{-rT} - P0 e^{-dT}) dq with L = ell/(2 q^{3/2})
        terms.push_back(s.ell * (er * (std::sqrt(b) - std::sqrt(a)) +
                                 conv.p0 * ed * (1.0 / std::sqrt(b) - 1.0 / std::sqrt(a))));
    }
    for (const PointMass& m : profile.atoms())
        if (m.q0 <= conv.p0) terms.push_back(m.mass * (m.q0 * er - conv.p0 * ed));
    return pairwise_sum(terms);
}

} // namespace amm
