#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "amm/data.hpp"
#include "amm/errors.hpp"
#include "amm/implied.hpp"
#include "amm/models.hpp"
#include "amm/pricing.hpp"
#include "amm/profiles.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

using namespace amm;

namespace {

// Piecewise-linear proxy sampled from flat-sigma forward-model prices on a
// regular strike grid, both sides.
MarketProxy flat_smile_proxy(double sigma, const MarketConventions& conv, double k_lo,
                             double k_hi, double dk) {
    std::vector<std::pair<double, double>> calls, puts;
    for (double k = k_lo; k <= k_hi + 0.25 * dk; k += dk) {
        calls.emplace_back(k, bs_price(conv.forward, k, conv.t, sigma, conv.r, OptionKind::Call));
        puts.emplace_back(k, bs_price(conv.forward, k, conv.t, sigma, conv.r, OptionKind::Put));
    }
    return MarketProxy(std::move(calls), std::move(puts), conv);
}

// Twenty 50-wide buckets on [2500, 3500] with mildly varying depth.
LiquidityProfile bucket_profile() {
    std::vector<LiquidityStep> steps;
    for (int i = 0; i < 20; ++i) {
        const double lo = 2500.0 + 50.0 * i;
        steps.push_back({lo, lo + 50.0, 1.5 + 0.5 * std::sin(0.7 * i)});
    }
    return LiquidityProfile(std::move(steps));
}

const MarketConventions kConv{3000.0, 3000.0, 0.5, 0.0, 0.0};

bool bins_identical(const std::vector<ResolutionResult>& a,
                    const std::vector<ResolutionResult>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].label != b[i].label || a[i].bins.size() != b[i].bins.size()) return false;
        for (size_t j = 0; j < a[i].bins.size(); ++j) {
            const BinResult& x = a[i].bins[j];
            const BinResult& y = b[i].bins[j];
            if (x.lo != y.lo || x.hi != y.hi || x.x_lo != y.x_lo || x.x_hi != y.x_hi ||
                x.market_price != y.market_price || x.sigma_bs != y.sigma_bs ||
                x.sigma_b_norm != y.sigma_b_norm || x.status != y.status)
                return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("flat-volatility roundtrip through the model price") {
    const auto prof = bucket_profile();
    for (double sigma : {0.3, 0.5, 0.9}) {
        const double target = model_il_price(prof, sigma, kConv, PricingModel::BlackScholes).total;
        const double got = invert_to_target(prof, target, kConv, PricingModel::BlackScholes);
        CHECK(std::fabs(got - sigma) < 1e-8);

        const double sigma_n = sigma * kConv.p0;
        const double target_b = model_il_price_bachelier(prof, sigma_n, kConv).total;
        const double got_b = invert_to_target(prof, target_b, kConv, PricingModel::Bachelier);
        CHECK(std::fabs(got_b / sigma_n - 1.0) < 1e-7);
    }
}

TEST_CASE("inversion failures are typed") {
    const auto prof = bucket_profile();
    // Push the forward below the put-side strikes: those cells keep a positive
    // intrinsic at zero vol, so half of that floor is unattainable.
    MarketConventions shifted = kConv;
    shifted.forward = 2400.0;
    const double intrinsic =
        model_il_price(prof, 0.0, shifted, PricingModel::BlackScholes).total;
    CHECK(intrinsic > 0.0);
    CHECK_THROWS_AS(invert_to_target(prof, 0.5 * intrinsic, shifted, PricingModel::BlackScholes),
                    BelowIntrinsic);
    // Nothing above the sigma cap can be matched either.
    const double at_cap = model_il_price(prof, 512.0, kConv, PricingModel::BlackScholes).total;
    CHECK_THROWS_AS(invert_to_target(prof, 1.01 * at_cap, kConv, PricingModel::BlackScholes),
                    NoBracket);
    CHECK_THROWS_AS(invert_to_target(LiquidityProfile{}, 1.0, kConv, PricingModel::BlackScholes),
                    BadInput);
}

TEST_CASE("fine structure recovers a flat smile at every resolution") {
    const auto prof = bucket_profile();
    const auto proxy = flat_smile_proxy(0.5, kConv, 2000.0, 4500.0, 25.0);
    const std::vector<std::string> labels{"1", "3", "6", "12", "finest"};
    const auto res = fine_structure(prof, proxy, kConv, labels);

    REQUIRE(res.size() == 5);
    const size_t expected[] = {1, 3, 6, 12, 20};
    for (size_t i = 0; i < res.size(); ++i) {
        CHECK(res[i].label == labels[i]);
        REQUIRE(res[i].bins.size() == expected[i]);
        // Bins tile the support without gaps, and log-moneyness matches.
        CHECK(res[i].bins.front().lo == 2500.0);
        CHECK(res[i].bins.back().hi == 3500.0);
        for (size_t j = 0; j + 1 < res[i].bins.size(); ++j)
            CHECK(res[i].bins[j].hi == res[i].bins[j + 1].lo);
        for (const BinResult& bin : res[i].bins) {
            CHECK(bin.status == BinStatus::Ok);
            CHECK(bin.x_lo == doctest::Approx(std::log(bin.lo / 3000.0)).epsilon(1e-12));
            // The 25-wide chords sit a hair above the curve; that bias stays
            // inside 1e-3 of volatility.
            CHECK(std::fabs(bin.sigma_bs - 0.5) < 1e-3);
            CHECK(bin.sigma_b_norm > 0.4);
            CHECK(bin.sigma_b_norm < 0.6);
        }
    }
    // Resolution 3 over 20 buckets splits 7/7/6.
    CHECK(res[1].bins[0].hi == doctest::Approx(2500.0 + 7 * 50.0));
    CHECK(res[1].bins[1].hi == doctest::Approx(2500.0 + 14 * 50.0));

    // Bin prices add up to the undivided market price at every resolution.
    const double whole = market_il_price(prof, proxy, kConv).total;
    for (const auto& r : res) {
        double acc = 0.0;
        for (const BinResult& bin : r.bins) acc += bin.market_price;
        CHECK(acc == doctest::Approx(whole).epsilon(1e-12));
    }

    CHECK(std::fabs(invert_global(prof, proxy, kConv, PricingModel::BlackScholes) - 0.5) < 1e-3);

    // Oversized or degenerate resolution labels.
    const auto capped = fine_structure(prof, proxy, kConv, {"999"});
    CHECK(capped[0].bins.size() == 20);
    CHECK_THROWS_AS(fine_structure(prof, proxy, kConv, {"0"}), BadInput);
    CHECK_THROWS_AS(fine_structure(prof, proxy, kConv, {"abc"}), BadInput);
    CHECK_THROWS_AS(fine_structure(prof, proxy, kConv, {}), BadInput);
    CHECK_THROWS_AS(fine_structure(prof, proxy, kConv, {"3"}, 0), BadInput);
}

TEST_CASE("implied volatility is invariant under liquidity scale") {
    const auto prof = bucket_profile();
    const auto proxy = flat_smile_proxy(0.5, kConv, 2000.0, 4500.0, 25.0);
    const double base = invert_global(prof, proxy, kConv, PricingModel::BlackScholes);
    for (double c : {0.1, 10.0}) {
        CHECK(std::fabs(invert_global(prof.scaled(c), proxy, kConv, PricingModel::BlackScholes) -
                        base) < 1e-7);
    }
    const auto fine = fine_structure(prof, proxy, kConv, {"6"});
    const auto fine_scaled = fine_structure(prof.scaled(10.0), proxy, kConv, {"6"});
    for (size_t j = 0; j < 6; ++j)
        CHECK(std::fabs(fine[0].bins[j].sigma_bs - fine_scaled[0].bins[j].sigma_bs) < 1e-7);
}

TEST_CASE("bin statuses classify the failure modes") {
    SUBCASE("zero-depth buckets report empty bins") {
        LiquidityProfile prof({{2500.0, 2700.0, 2.0}, {2700.0, 2900.0, 0.0},
                               {2900.0, 3100.0, 1.0}});
        const auto proxy = flat_smile_proxy(0.5, kConv, 2000.0, 4500.0, 25.0);
        const auto res = fine_structure(prof, proxy, kConv, {"finest"});
        REQUIRE(res[0].bins.size() == 3);
        CHECK(res[0].bins[0].status == BinStatus::Ok);
        CHECK(res[0].bins[1].status == BinStatus::EmptyBin);
        CHECK(res[0].bins[2].status == BinStatus::Ok);
        CHECK(res[0].bins[1].market_price == 0.0);
        CHECK(res[0].bins[1].sigma_bs == 0.0);
    }
    SUBCASE("quotes that stop short of the support report missing coverage") {
        const auto prof = bucket_profile();   // spans [2500, 3500]
        const auto proxy = flat_smile_proxy(0.5, kConv, 2650.0, 3350.0, 25.0);
        const auto res = fine_structure(prof, proxy, kConv, {"finest"});
        CHECK(res[0].bins.front().status == BinStatus::NoCoverage);
        CHECK(res[0].bins.back().status == BinStatus::NoCoverage);
        bool some_ok = false;
        for (const BinResult& bin : res[0].bins)
            if (bin.lo >= 2700.0 && bin.hi <= 3300.0) {
                CHECK(bin.status == BinStatus::Ok);
                some_ok = true;
            }
        CHECK(some_ok);
    }
    SUBCASE("quotes below the zero-vol bound are flagged, not inverted") {
        // Quotes priced off a 3000 forward but valued against a 2000 forward:
        // every put-side bin falls below its intrinsic.
        const auto prof = bucket_profile();
        const auto proxy = flat_smile_proxy(0.5, kConv, 2000.0, 4500.0, 25.0);
        MarketConventions low = kConv;
        low.forward = 2000.0;
        const auto res = fine_structure(prof, proxy, low, {"finest"});
        for (const BinResult& bin : res[0].bins) {
            if (bin.hi <= 3000.0) {
                CHECK(bin.status == BinStatus::BelowIntrinsic);
                CHECK(bin.sigma_bs == 0.0);
                CHECK(bin.sigma_b_norm == 0.0);
                CHECK(bin.market_price > 0.0);
            } else {
                CHECK(bin.status == BinStatus::Ok);
            }
        }
    }
    SUBCASE("status labels") {
        CHECK(std::string(to_string(BinStatus::Ok)) == "ok");
        CHECK(std::string(to_string(BinStatus::EmptyBin)) == "empty_bin");
        CHECK(std::string(to_string(BinStatus::BelowIntrinsic)) == "below_intrinsic");
        CHECK(std::string(to_string(BinStatus::NoCoverage)) == "no_coverage");
    }
}

TEST_CASE("results are identical for any thread count") {
    const auto prof = bucket_profile();
    const auto proxy = flat_smile_proxy(0.5, kConv, 2000.0, 4500.0, 25.0);
    const std::vector<std::string> labels{"1", "3", "6", "12", "finest"};
    const auto serial = fine_structure(prof, proxy, kConv, labels, 1);
    CHECK(bins_identical(serial, fine_structure(prof, proxy, kConv, labels, 2)));
    CHECK(bins_identical(serial, fine_structure(prof, proxy, kConv, labels, 8)));
    // Repeat runs are bit-identical too.
    CHECK(bins_identical(serial, fine_structure(prof, proxy, kConv, labels, 1)));
    // Single-job shortcut with a large pool request.
    const auto one = fine_structure(prof, proxy, kConv, {"1"}, 8);
    CHECK(bins_identical(one, fine_structure(prof, proxy, kConv, {"1"}, 1)));
}
