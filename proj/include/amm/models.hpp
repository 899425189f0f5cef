#pragma once

namespace amm {

enum class OptionKind { Call, Put };

// Market conventions shared across the pricing stack.  F is the forward for
// the snapshot expiry, P0 the pool (spot) price used for the replication
// split; with r = delta = 0 the two coincide in theory but are kept separate
// because live snapshots disagree slightly.
struct MarketConventions {
    double p0 = 0.0;
    double forward = 0.0;
    double t = 0.0;       // year fraction to expiry
    double r = 0.0;       // continuously-compounded funding rate
    double delta = 0.0;   // dividend / staking yield
};

// Black (forward) model.  sigma = 0 or t = 0 degrade to discounted intrinsic.
double bs_price(double f, double k, double t, double sigma, double r, OptionKind kind);
// Greeks are taken with respect to the forward.
double bs_delta(double f, double k, double t, double sigma, double r, OptionKind kind);
double bs_gamma(double f, double k, double t, double sigma, double r);
double bs_vega(double f, double k, double t, double sigma, double r);

// Bachelier (normal) model; sigma_n is the absolute normal vol.
double bachelier_price(double f, double k, double t, double sigma_n, double r, OptionKind kind);
double bachelier_delta(double f, double k, double t, double sigma_n, double r, OptionKind kind);
double bachelier_gamma(double f, double k, double t, double sigma_n, double r);
double bachelier_vega(double f, double k, double t, double sigma_n, double r);

// Price of the opposite kind via put-call parity
// C - P = e^{-rT} (F - K).  Throws NegativeSynthetic when the result < 0.
double parity_synthesize(double known_price, OptionKind known_kind, double f, double k,
                         double r, double t);

} // namespace amm
