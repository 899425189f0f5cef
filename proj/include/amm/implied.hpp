#pragma once

#include "amm/data.hpp"
#include "amm/pricing.hpp"
#include "amm/profiles.hpp"

#include <string>
#include <vector>

namespace amm {

enum class BinStatus { Ok, EmptyBin, BelowIntrinsic, NoCoverage };

const char* to_string(BinStatus status);

struct BinResult {
    double lo = 0.0, hi = 0.0;        // price bounds of the bin
    double x_lo = 0.0, x_hi = 0.0;    // log-moneyness log(K/F) of the bounds
    double market_price = 0.0;
    double sigma_bs = 0.0;            // valid iff status == Ok
    double sigma_b_norm = 0.0;        // Bachelier sigma / P0, valid iff Ok
    BinStatus status = BinStatus::Ok;
};

struct ResolutionResult {
    std::string label;                // "1", "3", ..., or "finest"
    std::vector<BinResult> bins;
};

// Finds the flat volatility whose model IL price matches `target`.  Bisects
// on sigma in [1e-6, upper] (normalized by P0 for the Bachelier model so the
// same bracket covers both), doubling upper from 5 until the model price
// exceeds the target, cap 512.  Returns the model's native sigma.
double invert_to_target(const LiquidityProfile& profile, double target,
                        const MarketConventions& conv, PricingModel model);

// Flat volatility matching the market-side IL price of the whole profile.
double invert_global(const LiquidityProfile& profile, const MarketProxy& proxy,
                     const MarketConventions& conv, PricingModel model);

// Per-bin inversion at the requested resolutions.  The finest buckets are the
// profile's steps; resolution n groups adjacent buckets into n bins with
// counts differing by at most one.  Failures are per-bin statuses.  `threads`
// > 1 farms bins out to a pool; results are positioned by bin index, so the
// output is identical for any thread count.
std::vector<ResolutionResult> fine_structure(const LiquidityProfile& profile,
                                             const MarketProxy& proxy,
                                             const MarketConventions& conv,
                                             const std::vector<std::string>& resolutions,
                                             int threads = 1);

} // namespace amm
