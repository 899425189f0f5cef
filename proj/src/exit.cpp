#include "amm/exit.hpp"

#include "amm/errors.hpp"
#include "amm/numerics.hpp"
#include "amm/payoff.hpp"

#include <cmath>
#include <cstdio>

namespace amm {

namespace {

void check_params(const ExitParams& params) {
    if (!(params.sigma > 0.0)) throw BadInput("exit: sigma must be > 0");
    if (!(params.r > 0.0))
        throw BadInput("exit: r must be > 0 (r = 0 makes the fee value phi/r unbounded)");
    if (!(params.phi >= 0.0)) throw BadInput("exit: phi must be >= 0");
    if (!(params.p0 > 0.0)) throw NonPositivePrice("exit: p0 must be > 0");
}

void require_up(const ExitParams& params, const char* who) {
    if (classify_transience(params.mu, params.sigma) != Transience::Up) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "%s: needs upward-transient dynamics (mu - sigma^2/2 = %.6g <= 0)", who,
                      params.nu());
        throw NotUpwardTransient(buf);
    }
}

double decay_rate(const ExitParams& params) {
    const double nu = params.nu();
    return std::sqrt(nu * nu + 2.0 * params.r * params.sigma * params.sigma);
}

// Bracket of v'(eps) whose root locates the optimum; v' = positive prefactor
// times this.
double v_prime_bracket(double epsilon, const ExitParams& params,
                       const LiquidityProfile& profile) {
    const double nu = params.nu();
    const double s = decay_rate(params);
    const double sig2 = params.sigma * params.sigma;
    const double p_eps = params.p0 * std::exp(epsilon);
    const double mass = profile.mass_between(params.p0, p_eps);   // ∫ L dq
    const double y_gain =
        profile.reserves(p_eps).y - profile.reserves(params.p0).y; // ∫ qL dq
    return (s - nu - sig2) / (s - nu) * p_eps * mass - y_gain + params.phi / params.r;
}

} // namespace

Transience classify_transience(double mu, double sigma) {
    if (!(sigma > 0.0)) throw BadInput("classify_transience: sigma must be > 0");
    const double nu = mu - 0.5 * sigma * sigma;
    if (std::fabs(nu) <= 1e-14) return Transience::Recurrent;
    return nu > 0.0 ? Transience::Up : Transience::Down;
}

double mgf_last_passage(double epsilon, const ExitParams& params) {
    check_params(params);
    require_up(params, "mgf_last_passage");
    const double nu = params.nu();
    const double s = decay_rate(params);
    const double sig2 = params.sigma * params.sigma;
    if (epsilon >= 0.0) return nu / s * std::exp(epsilon / sig2 * (nu - s));
    return 1.0 - std::exp(2.0 * nu * epsilon / sig2) +
           nu / s * std::exp(epsilon / sig2 * (nu + s));
}

double expected_pnl(double epsilon, const ExitParams& params, const LiquidityProfile& profile) {
    check_params(params);
    require_up(params, "expected_pnl");
    const double fee_value = params.phi / params.r;
    const double loss = il(profile, params.p0, params.p0 * std::exp(epsilon)).total;
    return fee_value - (loss + fee_value) * mgf_last_passage(epsilon, params);
}

double v_prime(double epsilon, const ExitParams& params, const LiquidityProfile& profile) {
    check_params(params);
    require_up(params, "v_prime");
    if (epsilon < 0.0) throw BadInput("v_prime: defined for epsilon >= 0 only");
    const double nu = params.nu();
    const double s = decay_rate(params);
    const double prefactor =
        mgf_last_passage(epsilon, params) * (s - nu) / (params.sigma * params.sigma);
    return prefactor * v_prime_bracket(epsilon, params, profile);
}

ExitResult optimal_exit(const ExitParams& params, const LiquidityProfile& profile) {
    check_params(params);
    const Transience regime = classify_transience(params.mu, params.sigma);
    if (regime != Transience::Up) {
        const char* what = regime == Transience::Down
                               ? "price is transient toward zero (mu < sigma^2/2)"
                               : "price is recurrent (mu = sigma^2/2)";
        return ExitNotApplicable{what};
    }
    if (profile.empty()) throw BadInput("optimal_exit: empty profile");
    if (params.phi == 0.0) return ExitInterior{0.0, 0.0}; // no fees: leave immediately

    if (std::fabs(params.mu - params.r) <= 1e-12) {
        // The bracket collapses to phi/r − ∫qL: solve y(p) = y(p0) + phi/r.
        const double target = profile.reserves(params.p0).y + params.phi / params.r;
        const double top = profile.support_hi();
        const double y_max = profile.reserves(top).y;
        if (target > y_max) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "optimal_exit: fee value phi/r needs y to reach %.6g but the profile "
                          "tops out at %.6g",
                          target, y_max);
            throw YInversionOutOfRange(buf);
        }
        double lo = params.p0, hi = top;
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (profile.reserves(mid).y < target ? lo : hi) = mid;
        }
        const double p_star = 0.5 * (lo + hi);
        const double eps_star = std::log(p_star / params.p0);
        return ExitInterior{eps_star, expected_pnl(eps_star, params, profile)};
    }

    // The bracket opens at phi/r > 0; walk until it first turns nonpositive.
    const double step = 0.01, cap = 20.0;
    double prev_eps = 0.0;
    for (double eps = step; eps <= cap + 1e-12; eps += step) {
        if (v_prime_bracket(eps, params, profile) <= 0.0) {
            const double root = bisect_root(
                [&](double e) { return v_prime_bracket(e, params, profile); }, prev_eps, eps,
                1e-10);
            return ExitInterior{root, expected_pnl(root, params, profile)};
        }
        prev_eps = eps;
    }
    return ExitMonotone{params.phi / params.r};
}

} // namespace amm
