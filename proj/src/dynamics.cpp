#include "amm/dynamics.hpp"

#include "amm/errors.hpp"
#include "amm/numerics.hpp"
#include "amm/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace amm {

namespace {

void check_config(double horizon, int steps, double p0) {
    if (!(horizon > 0.0)) throw BadInput("simulate: horizon must be > 0");
    if (steps < 1) throw BadInput("simulate: need at least one step");
    if (!(p0 > 0.0)) throw NonPositivePrice("simulate: p0 must be > 0");
}

void check_model(const PathModel& model) {
    std::visit([](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GbmModel>) {
            if (!(m.sigma > 0.0)) throw BadInput("GBM: sigma must be > 0");
        } else {
            if (!(m.nu > 0.0)) throw BadInput("CEV: nu must be > 0");
            if (!(m.beta >= 0.0)) throw BadInput("CEV: beta must be >= 0");
        }
    }, model);
}

} // namespace

PricePath simulate_path(const PathModel& model, double horizon, int steps, double p0,
                        std::uint64_t seed, std::uint64_t path_index) {
    check_config(horizon, steps, p0);
    check_model(model);
    const double dt = horizon / steps;
    const double sqrt_dt = std::sqrt(dt);
    NormalRng rng(seed, path_index);

    PricePath out;
    out.p.resize(static_cast<size_t>(steps) + 1);
    out.p[0] = p0;
    if (const auto* gbm = std::get_if<GbmModel>(&model)) {
        const double drift = (gbm->mu - 0.5 * gbm->sigma * gbm->sigma) * dt;
        const double vol = gbm->sigma * sqrt_dt;
        for (int k = 0; k < steps; ++k)
            out.p[k + 1] = out.p[k] * std::exp(drift + vol * rng.next());
    } else {
        const auto& cev = std::get<CevModel>(model);
        for (int k = 0; k < steps; ++k) {
            if (out.absorbed) {
                out.p[k + 1] = 0.0;
                continue;
            }
            const double prev = out.p[k];
            const double next = prev + cev.nu * std::pow(prev, cev.beta) * sqrt_dt * rng.next();
            if (next <= 0.0) {
                out.p[k + 1] = 0.0;
                out.absorbed = true;
            } else {
                out.p[k + 1] = next;
            }
        }
    }
    return out;
}

std::vector<PricePath> simulate_paths(const PathModel& model, const PathConfig& config,
                                      double p0) {
    if (config.paths < 1) throw BadInput("simulate: need at least one path");
    std::vector<PricePath> out;
    out.reserve(static_cast<size_t>(config.paths));
    for (int i = 0; i < config.paths; ++i)
        out.push_back(simulate_path(model, config.horizon, config.steps, p0, config.seed,
                                    static_cast<std::uint64_t>(i)));
    return out;
}

std::vector<double> lvr_along_path(const std::function<double(double)>& density,
                                   const std::vector<double>& path) {
    if (path.size() < 2) throw BadInput("lvr_along_path: path needs at least two samples");
    std::vector<double> out(path.size(), 0.0);
    for (size_t k = 0; k + 1 < path.size(); ++k) {
        const double dp = path[k + 1] - path[k];
        out[k + 1] = out[k] + 0.5 * density(path[k]) * dp * dp;
    }
    return out;
}

std::vector<double> lvr_along_path(const LiquidityProfile& profile,
                                   const std::vector<double>& path) {
    return lvr_along_path([&profile](double q) { return profile.density_at(q); }, path);
}

ILDecomposition decompose_il_path(const LiquidityProfile& profile, const std::vector<double>& path,
                                  double p0) {
    if (path.size() < 2) throw BadInput("decompose_il_path: path needs at least two samples");
    if (std::fabs(path.front() - p0) > 1e-12 * p0)
        throw BadInput("decompose_il_path: path does not start at p0");
    const double x0 = profile.reserves(p0).x;

    ILDecomposition out;
    std::vector<double> hedge_terms, lvr_terms;
    hedge_terms.reserve(path.size());
    lvr_terms.reserve(path.size());
    for (size_t k = 0; k + 1 < path.size(); ++k) {
        const double dp = path[k + 1] - path[k];
        hedge_terms.push_back((x0 - profile.reserves(path[k]).x) * dp);
        lvr_terms.push_back(0.5 * profile.density_at(path[k]) * dp * dp);
    }
    out.hedging_cost = pairwise_sum(hedge_terms);
    out.lvr = pairwise_sum(lvr_terms);
    out.il_direct = il(profile, p0, path.back()).total;
    return out;
}

LvrNeutralResult lvr_neutral_check(const CevNeutral& family, const PathConfig& config, double p0) {
    if (!(p0 >= family.eps && p0 <= family.m))
        throw OutsideSupport("lvr_neutral_check: p0 outside [eps, m]");
    if (config.paths < 2) throw BadInput("lvr_neutral_check: need at least two paths");
    check_config(config.horizon, config.steps, p0);

    const CevModel model{family.nu, family.beta};
    const double dt = config.horizon / config.steps;
    const double sqrt_dt = std::sqrt(dt);
    const size_t n = static_cast<size_t>(config.steps);
    auto density = [&family](double q) {
        return family.c / (family.nu * family.nu * std::pow(q, 2.0 * family.beta));
    };

    std::vector<double> sum(n + 1, 0.0), sumsq(n + 1, 0.0);
    long kept = 0, excluded = 0;
    std::vector<double> lvr(n + 1);
    for (int i = 0; i < config.paths; ++i) {
        NormalRng rng(config.seed, static_cast<std::uint64_t>(i));
        double p = p0;
        double acc = 0.0;
        bool ok = true;
        lvr[0] = 0.0;
        for (size_t k = 0; k < n; ++k) {
            const double next = p + model.nu * std::pow(p, model.beta) * sqrt_dt * rng.next();
            if (next <= 0.0 || next < family.eps || next > family.m) {
                ok = false;
                break;
            }
            const double dp = next - p;
            acc += 0.5 * density(p) * dp * dp;
            lvr[k + 1] = acc;
            p = next;
        }
        if (!ok) {
            ++excluded;
            continue;
        }
        ++kept;
        for (size_t k = 0; k <= n; ++k) {
            sum[k] += lvr[k];
            sumsq[k] += lvr[k] * lvr[k];
        }
    }
    if (kept < 2) throw BadInput("lvr_neutral_check: fewer than two paths stayed in support");

    LvrNeutralResult out;
    out.target = 0.5 * family.c;
    out.excluded_fraction = static_cast<double>(excluded) / config.paths;
    out.t.resize(n + 1);
    out.mean_lvr.resize(n + 1);
    out.stderr_lvr.resize(n + 1);
    double st_num = 0.0, st_den = 0.0;
    for (size_t k = 0; k <= n; ++k) {
        out.t[k] = dt * static_cast<double>(k);
        out.mean_lvr[k] = sum[k] / kept;
        const double var = std::max(0.0, sumsq[k] / kept - out.mean_lvr[k] * out.mean_lvr[k]);
        out.stderr_lvr[k] = std::sqrt(var / (kept - 1));
        st_num += out.t[k] * out.mean_lvr[k];
        st_den += out.t[k] * out.t[k];
    }
    out.slope = st_num / st_den;
    return out;
}

namespace {

// E[P_T^g · 1{a < P_T ≤ b}] for lognormal ln P_T ~ N(m, s²).
double lognormal_partial_moment(double g, double a, double b, double m, double s) {
    auto z = [&](double q) {
        if (q <= 0.0) return -1e300;
        return (std::log(q) - m - g * s * s) / s;
    };
    const double zb = std::isinf(b) ? 1e300 : z(b);
    const double za = z(a);
    return std::exp(g * m + 0.5 * g * g * s * s) * (norm_cdf(zb) - norm_cdf(za));
}

} // namespace

double lvr_price(const LiquidityProfile& profile, double sigma, double p0, double horizon) {
    if (!(p0 > 0.0)) throw NonPositivePrice("lvr_price: p0 must be > 0");
    if (!(sigma >= 0.0) || !(horizon >= 0.0)) throw BadInput("lvr_price: sigma, horizon >= 0");
    if (!profile.atoms().empty())
        throw BadInput("lvr_price: point masses carry local-time LVR, not supported");
    if (profile.steps().empty() || sigma == 0.0 || horizon == 0.0) return 0.0;

    // Piecewise second antiderivative of the density: on a step, Psi(q) =
    // −2·ell·√q + c1·q + c0; on a gap, the affine continuation.  Glued C¹,
    // with Psi ≡ 0 below the support.  The additive affine freedom drops out
    // of E[Psi(P_T)] − Psi(p0) under the zero-drift (martingale) measure.
    struct Region {
        double lo, hi, ell, c1, c0;
        double value(double q) const { return -2.0 * ell * std::sqrt(q) + c1 * q + c0; }
    };
    std::vector<Region> regions;
    double at = profile.support_lo();
    double val = 0.0, slope = 0.0;
    regions.push_back({0.0, at, 0.0, 0.0, 0.0});
    auto extend = [&](double hi, double ell) {
        const double lo = at;
        const double c1 = slope + ell / std::sqrt(lo);
        const double c0 = val + 2.0 * ell * std::sqrt(lo) - c1 * lo;
        regions.push_back({lo, hi, ell, c1, c0});
        if (!std::isinf(hi)) {
            val = regions.back().value(hi);
            slope = -ell / std::sqrt(hi) + c1;
            at = hi;
        }
    };
    for (const LiquidityStep& s : profile.steps()) {
        if (s.q_lo > at) extend(s.q_lo, 0.0);  // gap between steps
        extend(s.q_hi, s.ell);
    }
    extend(std::numeric_limits<double>::infinity(), 0.0);

    const double s = sigma * std::sqrt(horizon);
    const double m = std::log(p0) - 0.5 * s * s;
    std::vector<double> terms;
    double psi_p0 = 0.0;
    for (const Region& reg : regions) {
        terms.push_back(-2.0 * reg.ell * lognormal_partial_moment(0.5, reg.lo, reg.hi, m, s) +
                        reg.c1 * lognormal_partial_moment(1.0, reg.lo, reg.hi, m, s) +
                        reg.c0 * lognormal_partial_moment(0.0, reg.lo, reg.hi, m, s));
        if (p0 > reg.lo && p0 <= reg.hi) psi_p0 = reg.value(p0);
    }
    return pairwise_sum(terms) - psi_p0;
}

} // namespace amm
