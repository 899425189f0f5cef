#include "amm/models.hpp"

#include "amm/errors.hpp"
#include "amm/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace amm {

namespace {

void check_common(double f, double k, double t, double sigma) {
    if (!(f > 0.0) || !(k > 0.0)) throw BadInput("option model: F and K must be > 0");
    if (!(t >= 0.0)) throw BadInput("option model: T must be >= 0");
    if (!(sigma >= 0.0)) throw BadInput("option model: sigma must be >= 0");
}

inline double intrinsic(double f, double k, double df, OptionKind kind) {
    return kind == OptionKind::Call ? df * std::max(f - k, 0.0) : df * std::max(k - f, 0.0);
}

} // namespace

double bs_price(double f, double k, double t, double sigma, double r, OptionKind kind) {
    check_common(f, k, t, sigma);
    const double df = std::exp(-r * t);
    const double w = sigma * std::sqrt(t);
    if (w == 0.0) return intrinsic(f, k, df, kind);
    const double d1 = std::log(f / k) / w + 0.5 * w;
    const double d2 = d1 - w;
    if (kind == OptionKind::Call) return df * (f * norm_cdf(d1) - k * norm_cdf(d2));
    return df * (k * norm_cdf(-d2) - f * norm_cdf(-d1));
}

double bs_delta(double f, double k, double t, double sigma, double r, OptionKind kind) {
    check_common(f, k, t, sigma);
    const double df = std::exp(-r * t);
    const double w = sigma * std::sqrt(t);
    if (w == 0.0) {
        const double step = (f > k) ? 1.0 : (f < k ? 0.0 : 0.5);
        return kind == OptionKind::Call ? df * step : df * (step - 1.0);
    }
    const double d1 = std::log(f / k) / w + 0.5 * w;
    return kind == OptionKind::Call ? df * norm_cdf(d1) : -df * norm_cdf(-d1);
}

double bs_gamma(double f, double k, double t, double sigma, double r) {
    check_common(f, k, t, sigma);
    const double w = sigma * std::sqrt(t);
    if (w == 0.0) return 0.0;
    const double d1 = std::log(f / k) / w + 0.5 * w;
    return std::exp(-r * t) * norm_pdf(d1) / (f * w);
}

double bs_vega(double f, double k, double t, double sigma, double r) {
    check_common(f, k, t, sigma);
    const double w = sigma * std::sqrt(t);
    if (w == 0.0) return 0.0;
    const double d1 = std::log(f / k) / w + 0.5 * w;
    return std::exp(-r * t) * f * norm_pdf(d1) * std::sqrt(t);
}

double bachelier_price(double f, double k, double t, double sigma_n, double r, OptionKind kind) {
    if (!(t >= 0.0)) throw BadInput("bachelier: T must be >= 0");
    if (!(sigma_n >= 0.0)) throw BadInput("bachelier: sigma must be >= 0");
    const double df = std::exp(-r * t);
    const double w = sigma_n * std::sqrt(t);
    if (w == 0.0) return intrinsic(f, k, df, kind);
    const double d = (f - k) / w;
    if (kind == OptionKind::Call) return df * ((f - k) * norm_cdf(d) + w * norm_pdf(d));
    return df * ((k - f) * norm_cdf(-d) + w * norm_pdf(d));
}

double bachelier_delta(double f, double k, double t, double sigma_n, double r, OptionKind kind) {
    if (!(t >= 0.0) || !(sigma_n >= 0.0)) throw BadInput("bachelier: bad T or sigma");
    const double df = std::exp(-r * t);
    const double w = sigma_n * std::sqrt(t);
    if (w == 0.0) {
        const double step = (f > k) ? 1.0 : (f < k ? 0.0 : 0.5);
        return kind == OptionKind::Call ? df * step : df * (step - 1.0);
    }
    const double d = (f - k) / w;
    return kind == OptionKind::Call ? df * norm_cdf(d) : -df * norm_cdf(-d);
}

double bachelier_gamma(double f, double k, double t, double sigma_n, double r) {
    if (!(t >= 0.0) || !(sigma_n >= 0.0)) throw BadInput("bachelier: bad T or sigma");
    const double w = sigma_n * std::sqrt(t);
    if (w == 0.0) return 0.0;
    return std::exp(-r * t) * norm_pdf((f - k) / w) / w;
}

double bachelier_vega(double f, double k, double t, double sigma_n, double r) {
    if (!(t >= 0.0) || !(sigma_n >= 0.0)) throw BadInput("bachelier: bad T or sigma");
    const double w = sigma_n * std::sqrt(t);
    if (w == 0.0) return 0.0;
    return std::exp(-r * t) * norm_pdf((f - k) / w) * std::sqrt(t);
}

double parity_synthesize(double known_price, OptionKind known_kind, double f, double k,
                         double r, double t) {
    if (!(known_price >= 0.0)) throw BadInput("parity_synthesize: price must be >= 0");
    const double fwd_leg = std::exp(-r * t) * (f - k);
    const double other = known_kind == OptionKind::Put ? known_price + fwd_leg
                                                       : known_price - fwd_leg;
    if (other < 0.0)
        throw NegativeSynthetic("parity_synthesize: synthetic price is negative");
    return other;
}

} // namespace amm
