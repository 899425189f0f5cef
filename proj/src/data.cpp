#include "amm/data.hpp"

#include "amm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace amm {

namespace {

// Cleaning drops anything that violates shape beyond this slack; the proxy
// re-verifies with a looser 1e-9 so cleaned data always passes construction.
constexpr double kCleanSlack = 1e-12;

bool is_call(const OptionQuote& q) { return q.kind == OptionKind::Call; }

std::vector<OptionQuote> side_sorted(const std::vector<OptionQuote>& quotes, OptionKind kind) {
    std::vector<OptionQuote> out;
    for (const OptionQuote& q : quotes)
        if (q.kind == kind) out.push_back(q);
    std::stable_sort(out.begin(), out.end(),
                     [](const OptionQuote& a, const OptionQuote& b) { return a.strike < b.strike; });
    return out;
}

void sort_snapshot(OptionSnapshot& snap) {
    std::stable_sort(snap.quotes.begin(), snap.quotes.end(),
                     [](const OptionQuote& a, const OptionQuote& b) {
                         if (is_call(a) != is_call(b)) return is_call(a);
                         return a.strike < b.strike;
                     });
}

// One monotonicity sweep: calls nonincreasing / puts nondecreasing in strike,
// dropping the later-in-strike quote of each violating pair.
bool sweep_monotonic(std::vector<OptionQuote>& side, OptionKind kind, CleaningReport& report) {
    bool changed = false;
    std::vector<OptionQuote> kept;
    for (const OptionQuote& q : side) {
        if (!kept.empty()) {
            const double prev = kept.back().mid;
            const double slack = kCleanSlack * std::max(1.0, std::fabs(prev));
            const bool bad = kind == OptionKind::Call ? (q.mid > prev + slack)
                                                      : (q.mid < prev - slack);
            if (bad) {
                report.dropped.push_back({q, DropReason::Monotonicity});
                changed = true;
                continue;
            }
        }
        kept.push_back(q);
    }
    side.swap(kept);
    return changed;
}

// One convexity sweep over consecutive triples using strike-divided slopes
// (equivalent to nonnegative second differences on uniform grids, and the
// right condition on uneven ones).  Drops the middle quote and re-scans.
bool sweep_convex(std::vector<OptionQuote>& side, CleaningReport& report) {
    bool changed = false;
    bool again = true;
    while (again && side.size() >= 3) {
        again = false;
        for (size_t i = 0; i + 2 < side.size(); ++i) {
            const OptionQuote &a = side[i], &b = side[i + 1], &c = side[i + 2];
            const double s1 = (b.mid - a.mid) / (b.strike - a.strike);
            const double s2 = (c.mid - b.mid) / (c.strike - b.strike);
            const double slack = kCleanSlack * std::max(1.0, std::fabs(s1));
            if (s2 < s1 - slack) {
                report.dropped.push_back({b, DropReason::Convexity});
                side.erase(side.begin() + static_cast<std::ptrdiff_t>(i) + 1);
                changed = again = true;
                break;
            }
        }
    }
    return changed;
}

} // namespace

std::pair<OptionSnapshot, CleaningReport> clean_quotes(const OptionSnapshot& snap) {
    CleaningReport report;
    std::vector<OptionQuote> calls, puts;
    for (const OptionQuote& q : snap.quotes) {
        if (!(q.mid > 0.0)) {
            report.dropped.push_back({q, DropReason::NonPositive});
            continue;
        }
        (is_call(q) ? calls : puts).push_back(q);
    }
    auto by_strike = [](const OptionQuote& a, const OptionQuote& b) { return a.strike < b.strike; };
    std::stable_sort(calls.begin(), calls.end(), by_strike);
    std::stable_sort(puts.begin(), puts.end(), by_strike);

    // Duplicate strikes on one side cannot feed an interpolant; keep the first.
    auto drop_dups = [&](std::vector<OptionQuote>& side) {
        std::vector<OptionQuote> kept;
        for (const OptionQuote& q : side) {
            if (!kept.empty() && q.strike == kept.back().strike) {
                report.dropped.push_back({q, DropReason::Monotonicity});
                continue;
            }
            kept.push_back(q);
        }
        side.swap(kept);
    };
    drop_dups(calls);
    drop_dups(puts);

    bool changed = true;
    while (changed) {
        changed = false;
        changed |= sweep_monotonic(calls, OptionKind::Call, report);
        changed |= sweep_monotonic(puts, OptionKind::Put, report);
        changed |= sweep_convex(calls, report);
        changed |= sweep_convex(puts, report);
    }

    if (calls.size() < 2 || puts.size() < 2) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "clean_quotes: %zu calls / %zu puts survive; need 2 per side",
                      calls.size(), puts.size());
        throw TooFewQuotes(buf);
    }

    OptionSnapshot out = snap;
    out.quotes = std::move(calls);
    out.quotes.insert(out.quotes.end(), puts.begin(), puts.end());
    sort_snapshot(out);
    report.kept = out.quotes.size();
    return {std::move(out), std::move(report)};
}

std::pair<OptionSnapshot, CleaningReport> synthesize_missing(const OptionSnapshot& snap,
                                                             double gap_threshold) {
    if (!(gap_threshold > 0.0)) throw BadInput("synthesize_missing: gap threshold must be > 0");
    CleaningReport report;
    OptionSnapshot out = snap;

    const std::vector<OptionQuote> calls = side_sorted(snap.quotes, OptionKind::Call);
    const std::vector<OptionQuote> puts = side_sorted(snap.quotes, OptionKind::Put);
    if (calls.size() < 2 || puts.size() < 2)
        throw TooFewQuotes("synthesize_missing: input must be a cleaned snapshot");

    auto fill_side = [&](OptionKind target, const std::vector<OptionQuote>& have,
                         const std::vector<OptionQuote>& other) {
        // A strike qualifies when it falls in an interior gap at least
        // gap_threshold wide, or beyond the target side's outermost strikes
        // (an end region is an unbounded gap).
        auto in_gap = [&](double k) {
            if (k < have.front().strike || k > have.back().strike) return true;
            auto it = std::lower_bound(have.begin(), have.end(), k,
                                       [](const OptionQuote& q, double v) { return q.strike < v; });
            if (it != have.end() && it->strike == k) return false;
            const double hi = it->strike;
            const double lo = std::prev(it)->strike;
            return hi - lo >= gap_threshold && k > lo && k < hi;
        };
        for (const OptionQuote& src : other) {
            if (!in_gap(src.strike)) continue;
            double value;
            try {
                value = parity_synthesize(src.mid, src.kind, snap.forward, src.strike, snap.r,
                                          snap.t);
            } catch (const NegativeSynthetic&) {
                report.skipped_negative.emplace_back(target, src.strike);
                continue;
            }
            if (!(value > 0.0)) { // a zero price would fail positivity downstream
                report.skipped_negative.emplace_back(target, src.strike);
                continue;
            }
            OptionQuote q;
            q.strike = src.strike;
            q.kind = target;
            q.mid = value;
            q.synthetic = true;
            out.quotes.push_back(q);
            report.synthesized.emplace_back(target, src.strike);
        }
    };
    fill_side(OptionKind::Call, calls, puts);
    fill_side(OptionKind::Put, puts, calls);

    sort_snapshot(out);
    report.kept = out.quotes.size();
    return {std::move(out), std::move(report)};
}

MarketProxy::MarketProxy(std::vector<std::pair<double, double>> call_knots,
                         std::vector<std::pair<double, double>> put_knots,
                         MarketConventions conv)
    : calls_(std::move(call_knots)), puts_(std::move(put_knots)), conv_(conv) {
    for (auto* side : {&calls_, &puts_}) {
        std::sort(side->begin(), side->end());
        if (side->size() < 2) throw TooFewQuotes("MarketProxy: need at least 2 knots per side");
        for (size_t i = 0; i + 1 < side->size(); ++i)
            if ((*side)[i].first == (*side)[i + 1].first)
                throw BadInput("MarketProxy: duplicate knot strike");
    }
    verify_side(OptionKind::Call);
    verify_side(OptionKind::Put);
}

void MarketProxy::verify_side(OptionKind kind) const {
    const auto& knots = side(kind);
    const char* name = kind == OptionKind::Call ? "call" : "put";
    const double scale = std::max(1.0, std::fabs(knots.front().second));
    for (size_t i = 0; i + 1 < knots.size(); ++i) {
        const double diff = knots[i + 1].second - knots[i].second;
        const bool bad = kind == OptionKind::Call ? (diff > 1e-9 * scale) : (diff < -1e-9 * scale);
        if (bad) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "MarketProxy: %s curve not monotone at strikes %.6g, %.6g",
                          name, knots[i].first, knots[i + 1].first);
            throw InvariantViolation(buf);
        }
    }
    for (size_t i = 0; i + 2 < knots.size(); ++i) {
        const double s1 =
            (knots[i + 1].second - knots[i].second) / (knots[i + 1].first - knots[i].first);
        const double s2 =
            (knots[i + 2].second - knots[i + 1].second) / (knots[i + 2].first - knots[i + 1].first);
        if (s2 < s1 - 1e-9 * std::max(1.0, std::fabs(s1))) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "MarketProxy: %s curve not convex on strikes (%.6g, %.6g, %.6g)", name,
                          knots[i].first, knots[i + 1].first, knots[i + 2].first);
            throw InvariantViolation(buf);
        }
    }
}

double MarketProxy::eval(OptionKind kind, double k) const {
    const auto& knots = side(kind);
    if (k < knots.front().first || k > knots.back().first) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "MarketProxy: strike %.6g outside %s coverage [%.6g, %.6g]",
                      k, kind == OptionKind::Call ? "call" : "put", knots.front().first,
                      knots.back().first);
        throw CoverageGap(buf);
    }
    auto it = std::upper_bound(knots.begin(), knots.end(), std::make_pair(k, 1e300));
    if (it == knots.end()) --it;       // k at the last knot exactly
    const auto& [k1, v1] = *it;
    const auto& [k0, v0] = *std::prev(it);
    return v0 + (v1 - v0) / (k1 - k0) * (k - k0);
}

std::pair<double, double> MarketProxy::affine_on(OptionKind kind, double cell_lo,
                                                 double cell_hi) const {
    if (!(cell_lo < cell_hi)) throw BadInterval("MarketProxy::affine_on: empty cell");
    const auto& knots = side(kind);
    const double tol = 1e-9 * std::max(1.0, cell_hi);
    if (cell_lo < knots.front().first - tol || cell_hi > knots.back().first + tol) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "MarketProxy: cell [%.6g, %.6g] outside %s coverage",
                      cell_lo, cell_hi, kind == OptionKind::Call ? "call" : "put");
        throw CoverageGap(buf);
    }
    // The pricing partition includes every knot, so a cell never straddles one.
    auto it = std::upper_bound(knots.begin(), knots.end(), std::make_pair(cell_lo + tol, 0.0));
    if (it == knots.begin()) ++it;
    if (it == knots.end()) --it;
    const auto& [k1, v1] = *it;
    const auto& [k0, v0] = *std::prev(it);
    if (cell_hi > k1 + tol)
        throw BadInterval("MarketProxy::affine_on: cell straddles a knot");
    const double a1 = (v1 - v0) / (k1 - k0);
    return {v0 - a1 * k0, a1};
}

std::pair<double, double> MarketProxy::coverage() const {
    return {std::max(calls_.front().first, puts_.front().first),
            std::min(calls_.back().first, puts_.back().first)};
}

std::pair<double, double> MarketProxy::coverage(OptionKind kind) const {
    const auto& knots = side(kind);
    return {knots.front().first, knots.back().first};
}

std::vector<double> MarketProxy::knot_strikes() const {
    std::vector<double> out;
    out.reserve(calls_.size() + puts_.size());
    for (const auto& [k, v] : calls_) out.push_back(k);
    for (const auto& [k, v] : puts_) out.push_back(k);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

MarketProxy build_proxy(const OptionSnapshot& snap) {
    std::vector<std::pair<double, double>> calls, puts;
    for (const OptionQuote& q : snap.quotes)
        (is_call(q) ? calls : puts).emplace_back(q.strike, q.mid);
    MarketProxy proxy(std::move(calls), std::move(puts), snap.conventions());

    // Synthetic knots were produced by exact parity; a residual there means
    // the curves were corrupted between synthesis and construction.
    const double df = std::exp(-snap.r * snap.t);
    for (const OptionQuote& q : snap.quotes) {
        if (!q.synthetic) continue;
        const OptionKind other = is_call(q) ? OptionKind::Put : OptionKind::Call;
        const double counterpart = proxy.eval(other, q.strike);
        const double c = is_call(q) ? q.mid : counterpart;
        const double p = is_call(q) ? counterpart : q.mid;
        const double residual = c - p - df * (snap.forward - q.strike);
        if (std::fabs(residual) > 1e-9 * std::max(1.0, snap.forward)) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "build_proxy: parity residual %.3g at synthetic strike %.6g", residual,
                          q.strike);
            throw InvariantViolation(buf);
        }
    }
    return proxy;
}

} // namespace amm
