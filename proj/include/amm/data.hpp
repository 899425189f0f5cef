#pragma once

#include "amm/models.hpp"

#include <string>
#include <utility>
#include <vector>

namespace amm {

struct OptionQuote {
    double strike = 0.0;
    OptionKind kind = OptionKind::Call;
    double bid = -1.0;        // < 0 means absent
    double ask = -1.0;
    double mid = -1.0;        // (bid+ask)/2 when both sides are present
    bool synthetic = false;
};

struct OptionSnapshot {
    std::string expiry;       // label, e.g. "2026-03-27"
    std::string timestamp;    // capture time (ms since epoch as text); may be empty
    double t = 0.0;
    double forward = 0.0;
    double p0 = 0.0;
    double r = 0.0;
    double delta = 0.0;
    std::vector<OptionQuote> quotes;

    MarketConventions conventions() const { return {p0, forward, t, r, delta}; }
};

enum class DropReason { NonPositive, Monotonicity, Convexity };

struct CleaningReport {
    struct Dropped {
        OptionQuote quote;
        DropReason reason;
    };
    std::vector<Dropped> dropped;
    std::vector<std::pair<OptionKind, double>> synthesized;
    std::vector<std::pair<OptionKind, double>> skipped_negative;
    size_t kept = 0;
};

// Static no-arbitrage cleaning, in order: drop non-positive mids; enforce
// monotonicity per side (calls nonincreasing, puts nondecreasing in strike;
// the later-in-strike quote of a violating pair is dropped); enforce
// convexity in strike by divided differences (the middle quote of a violating
// triple is dropped, re-scanning until clean).  Deterministic and idempotent.
// Throws TooFewQuotes when a side ends with fewer than two quotes.
std::pair<OptionSnapshot, CleaningReport> clean_quotes(const OptionSnapshot& snap);

// Fills strike gaps on one side from the other side via put-call parity.
// Interior gaps qualify when at least `gap_threshold` wide; the regions
// beyond a side's first/last strike are treated as one-sided gaps and always
// filled where the other side has quotes.  Negative synthetics are skipped
// and reported.  Input must already be cleaned.
std::pair<OptionSnapshot, CleaningReport> synthesize_missing(const OptionSnapshot& snap,
                                                             double gap_threshold = 500.0);

// Piecewise-linear strike interpolants per side.  Affine-in-strike between
// knots makes the curve the pointwise-maximal arbitrage-free interpolant
// consistent with the (cleaned) quotes.
class MarketProxy {
public:
    MarketProxy(std::vector<std::pair<double, double>> call_knots,
                std::vector<std::pair<double, double>> put_knots, MarketConventions conv);

    // Price at strike k; throws CoverageGap outside the side's knot range.
    double eval(OptionKind kind, double k) const;

    // Coefficients (a0, a1) with price = a0 + a1*k on [cell_lo, cell_hi];
    // the cell must not straddle a knot.
    std::pair<double, double> affine_on(OptionKind kind, double cell_lo, double cell_hi) const;

    // Strike range covered by both sides.
    std::pair<double, double> coverage() const;
    std::pair<double, double> coverage(OptionKind kind) const;

    std::vector<double> knot_strikes() const;   // union of both sides
    const MarketConventions& conventions() const { return conv_; }

private:
    const std::vector<std::pair<double, double>>& side(OptionKind kind) const {
        return kind == OptionKind::Call ? calls_ : puts_;
    }
    void verify_side(OptionKind kind) const;

    std::vector<std::pair<double, double>> calls_;
    std::vector<std::pair<double, double>> puts_;
    MarketConventions conv_;
};

// Proxy from a cleaned + synthesized snapshot; re-verifies monotonicity,
// convexity and (at synthetic knots) parity, throwing InvariantViolation on
// failure since cleaning should have removed every violation.
MarketProxy build_proxy(const OptionSnapshot& snap);

// Deribit book-summary plumbing.  parse_book_summary converts one recorded
// (or fetched) JSON document into snapshots, one per requested expiry label;
// fetch_deribit performs the GET and delegates to the parser.  Quoted prices
// arrive coin-denominated and are converted using underlying_price.
std::vector<OptionSnapshot> parse_book_summary(const std::string& json_text,
                                               const std::vector<std::string>& expiries,
                                               double now_unix_ms);
std::vector<OptionSnapshot> fetch_deribit(const std::string& currency,
                                          const std::vector<std::string>& expiries,
                                          const std::string& endpoint);

} // namespace amm
