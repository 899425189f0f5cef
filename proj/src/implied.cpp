#include "amm/implied.hpp"

#include "amm/errors.hpp"
#include "amm/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace amm {

const char* to_string(BinStatus status) {
    switch (status) {
        case BinStatus::Ok: return "ok";
        case BinStatus::EmptyBin: return "empty_bin";
        case BinStatus::BelowIntrinsic: return "below_intrinsic";
        case BinStatus::NoCoverage: return "no_coverage";
    }
    return "?";
}

double invert_to_target(const LiquidityProfile& profile, double target,
                        const MarketConventions& conv, PricingModel model) {
    if (profile.empty()) throw BadInput("invert_to_target: empty profile");
    // Bisect on a dimensionless volatility; for Bachelier the native sigma is
    // price-scaled, so normalize by P0 to keep one bracket for both models.
    const double unit = model == PricingModel::Bachelier ? conv.p0 : 1.0;
    auto price = [&](double s) {
        return model == PricingModel::Bachelier
                   ? model_il_price_bachelier(profile, s * unit, conv).total
                   : model_il_price(profile, s * unit, conv, model).total;
    };

    const double intrinsic = price(0.0);
    if (target < intrinsic) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "invert: market price %.12g is below the zero-vol bound %.12g", target,
                      intrinsic);
        throw BelowIntrinsic(buf);
    }

    double lo = 1e-6, hi = 5.0;
    while (price(hi) < target) {
        hi *= 2.0;
        if (hi > 512.0) throw NoBracket("invert: no volatility below the cap matches the price");
    }
    double mid = lo;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double v = price(mid);
        if (std::fabs(v - target) <= 1e-10 * std::fabs(target)) break;
        (v < target ? lo : hi) = mid;
        if (hi - lo <= 1e-14 * std::max(1.0, mid)) break;
    }
    return mid * unit;
}

double invert_global(const LiquidityProfile& profile, const MarketProxy& proxy,
                     const MarketConventions& conv, PricingModel model) {
    return invert_to_target(profile, market_il_price(profile, proxy, conv).total, conv, model);
}

namespace {

BinResult solve_bin(const LiquidityProfile& profile, const MarketProxy& proxy,
                    const MarketConventions& conv, double lo, double hi) {
    BinResult bin;
    bin.lo = lo;
    bin.hi = hi;
    bin.x_lo = std::log(lo / conv.forward);
    bin.x_hi = std::log(hi / conv.forward);

    const LiquidityProfile sub = profile.restricted(lo, hi);
    if (sub.empty() || sub.total_mass() == 0.0) {
        bin.status = BinStatus::EmptyBin;
        return bin;
    }
    try {
        bin.market_price = market_il_price(sub, proxy, conv).total;
    } catch (const CoverageGap&) {
        bin.status = BinStatus::NoCoverage;
        return bin;
    }
    try {
        bin.sigma_bs = invert_to_target(sub, bin.market_price, conv, PricingModel::BlackScholes);
        bin.sigma_b_norm =
            invert_to_target(sub, bin.market_price, conv, PricingModel::Bachelier) / conv.p0;
    } catch (const BelowIntrinsic&) {
        bin.sigma_bs = bin.sigma_b_norm = 0.0;
        bin.status = BinStatus::BelowIntrinsic;
        return bin;
    }
    bin.status = BinStatus::Ok;
    return bin;
}

} // namespace

std::vector<ResolutionResult> fine_structure(const LiquidityProfile& profile,
                                             const MarketProxy& proxy,
                                             const MarketConventions& conv,
                                             const std::vector<std::string>& resolutions,
                                             int threads) {
    if (resolutions.empty()) throw BadInput("fine_structure: no resolutions requested");
    if (threads < 1) throw BadInput("fine_structure: thread count must be >= 1");
    const auto& steps = profile.steps();
    if (steps.empty()) throw BadInput("fine_structure: profile has no steps to bucket");
    const size_t n_buckets = steps.size();

    // Each requested resolution becomes a list of (lo, hi) bins built from
    // contiguous runs of buckets, sizes differing by at most one.
    struct Job {
        size_t resolution_index;
        size_t bin_index;
        double lo, hi;
    };
    std::vector<ResolutionResult> out;
    std::vector<Job> jobs;
    for (const std::string& label : resolutions) {
        size_t n = 0;
        if (label == "finest") {
            n = n_buckets;
        } else {
            try {
                const long parsed = std::stol(label);
                if (parsed < 1) throw std::invalid_argument(label);
                n = static_cast<size_t>(parsed);
            } catch (const std::exception&) {
                throw BadInput("fine_structure: resolution must be a positive count or 'finest'");
            }
            n = std::min(n, n_buckets);
        }
        ResolutionResult res;
        res.label = label;
        res.bins.resize(n);
        const size_t base = n_buckets / n, extra = n_buckets % n;
        size_t at = 0;
        for (size_t b = 0; b < n; ++b) {
            const size_t count = base + (b < extra ? 1 : 0);
            jobs.push_back({out.size(), b, steps[at].q_lo, steps[at + count - 1].q_hi});
            at += count;
        }
        out.push_back(std::move(res));
    }

    auto run_job = [&](const Job& job) {
        out[job.resolution_index].bins[job.bin_index] =
            solve_bin(profile, proxy, conv, job.lo, job.hi);
    };

    if (threads == 1 || jobs.size() <= 1) {
        for (const Job& job : jobs) run_job(job);
        return out;
    }

    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                run_job(jobs[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const size_t n_workers = std::min(static_cast<size_t>(threads), jobs.size());
    pool.reserve(n_workers);
    for (size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

} // namespace amm
