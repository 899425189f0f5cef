#include "amm/data.hpp"
#include "amm/errors.hpp"

#include "json.hpp"
#ifdef AMM_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

namespace amm {

namespace {

using nlohmann::json;

// Deribit instrument names look like ETH-27MAR26-3000-C.
struct InstrumentName {
    std::string expiry;
    double strike = 0.0;
    OptionKind kind = OptionKind::Call;
};

InstrumentName parse_instrument(const std::string& name) {
    std::vector<std::string> parts;
    size_t pos = 0;
    while (pos <= name.size()) {
        const size_t dash = name.find('-', pos);
        if (dash == std::string::npos) {
            parts.push_back(name.substr(pos));
            break;
        }
        parts.push_back(name.substr(pos, dash - pos));
        pos = dash + 1;
    }
    if (parts.size() != 4) throw SchemaError("instrument name not CCY-EXPIRY-STRIKE-K: " + name);
    InstrumentName out;
    out.expiry = parts[1];
    // Low strikes are written with 'd' as the decimal point (e.g. 0d625).
    std::string strike = parts[2];
    for (char& c : strike)
        if (c == 'd') c = '.';
    try {
        size_t used = 0;
        out.strike = std::stod(strike, &used);
        if (used != strike.size()) throw std::invalid_argument(strike);
    } catch (const std::exception&) {
        throw SchemaError("unparsable strike in instrument name: " + name);
    }
    if (parts[3] == "C") out.kind = OptionKind::Call;
    else if (parts[3] == "P") out.kind = OptionKind::Put;
    else throw SchemaError("instrument name ends in neither C nor P: " + name);
    return out;
}

// Expiry labels are DDMMMYY; Deribit options expire at 08:00 UTC that day.
double expiry_unix_ms(const std::string& label) {
    static const std::map<std::string, unsigned> kMonths = {
        {"JAN", 1}, {"FEB", 2}, {"MAR", 3}, {"APR", 4},  {"MAY", 5},  {"JUN", 6},
        {"JUL", 7}, {"AUG", 8}, {"SEP", 9}, {"OCT", 10}, {"NOV", 11}, {"DEC", 12}};
    if (label.size() != 7 && label.size() != 6)
        throw SchemaError("expiry label not DDMMMYY: " + label);
    const size_t mon_at = label.size() - 5;
    int day = 0;
    try {
        day = std::stoi(label.substr(0, mon_at));
    } catch (const std::exception&) {
        throw SchemaError("expiry label not DDMMMYY: " + label);
    }
    const auto mon = kMonths.find(label.substr(mon_at, 3));
    int year = 0;
    try {
        year = 2000 + std::stoi(label.substr(mon_at + 3, 2));
    } catch (const std::exception&) {
        throw SchemaError("expiry label not DDMMMYY: " + label);
    }
    if (mon == kMonths.end()) throw SchemaError("unknown month in expiry label: " + label);
    const std::chrono::year_month_day ymd{std::chrono::year{year},
                                          std::chrono::month{mon->second},
                                          std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) throw SchemaError("impossible calendar date in expiry label: " + label);
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch();
    return static_cast<double>(days.count()) * 86400.0 * 1000.0 + 8.0 * 3600.0 * 1000.0;
}

double field_or(const json& node, const char* key, double fallback) {
    const auto it = node.find(key);
    if (it == node.end() || it->is_null()) return fallback;
    return it->get<double>();
}

} // namespace

std::vector<OptionSnapshot> parse_book_summary(const std::string& json_text,
                                               const std::vector<std::string>& expiries,
                                               double now_unix_ms) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("book summary is not valid JSON: ") + e.what());
    }
    const json& rows = doc.is_array() ? doc : doc.value("result", json::array());
    if (!rows.is_array() || rows.empty())
        throw SchemaError("book summary contains no instruments");

    std::map<std::string, OptionSnapshot> snaps;
    for (const std::string& label : expiries) {
        OptionSnapshot s;
        s.expiry = label;
        char stamp[32];
        std::snprintf(stamp, sizeof stamp, "%.0f", now_unix_ms);
        s.timestamp = stamp;
        s.t = (expiry_unix_ms(label) - now_unix_ms) / (365.0 * 86400.0 * 1000.0);
        if (!(s.t > 0.0)) throw SchemaError("expiry " + label + " is not in the future");
        snaps.emplace(label, std::move(s));
    }

    for (const json& row : rows) {
        if (!row.contains("instrument_name")) throw SchemaError("row without instrument_name");
        const InstrumentName id = parse_instrument(row["instrument_name"].get<std::string>());
        const auto snap_it = snaps.find(id.expiry);
        if (snap_it == snaps.end()) continue;
        OptionSnapshot& snap = snap_it->second;

        if (!row.contains("underlying_price") || row["underlying_price"].is_null())
            throw SchemaError("row without underlying_price: " +
                              row["instrument_name"].get<std::string>());
        const double under = row["underlying_price"].get<double>();
        if (!(under > 0.0)) throw SchemaError("nonpositive underlying_price");
        snap.forward = under;
        snap.p0 = field_or(row, "estimated_delivery_price", under);

        // Prices arrive in coin; convert to quote currency.
        OptionQuote q;
        q.strike = id.strike;
        q.kind = id.kind;
        const double bid = field_or(row, "bid_price", -1.0);
        const double ask = field_or(row, "ask_price", -1.0);
        const double mark_mid = field_or(row, "mid_price", -1.0);
        if (bid >= 0.0) q.bid = bid * under;
        if (ask >= 0.0) q.ask = ask * under;
        if (bid >= 0.0 && ask >= 0.0) q.mid = 0.5 * (q.bid + q.ask);
        else if (mark_mid >= 0.0) q.mid = mark_mid * under;
        if (q.mid < 0.0) continue; // nothing quoted on either side
        snap.quotes.push_back(q);
    }

    std::vector<OptionSnapshot> out;
    for (auto& [label, snap] : snaps) {
        if (snap.quotes.empty())
            throw SchemaError("no instruments found for expiry " + label);
        std::stable_sort(snap.quotes.begin(), snap.quotes.end(),
                         [](const OptionQuote& a, const OptionQuote& b) {
                             if ((a.kind == OptionKind::Call) != (b.kind == OptionKind::Call))
                                 return a.kind == OptionKind::Call;
                             return a.strike < b.strike;
                         });
        out.push_back(std::move(snap));
    }
    return out;
}

std::vector<OptionSnapshot> fetch_deribit(const std::string& currency,
                                          const std::vector<std::string>& expiries,
                                          const std::string& endpoint) {
#ifndef AMM_WITH_TLS
    if (endpoint.rfind("https://", 0) == 0)
        throw NetworkError("built without TLS support; use an http:// endpoint or a fixture");
#endif
    httplib::Client client(endpoint);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    const std::string path =
        "/api/v2/public/get_book_summary_by_currency?currency=" + currency + "&kind=option";
    auto res = client.Get(path);
    if (!res) throw NetworkError("request to " + endpoint + " failed: " + to_string(res.error()));
    if (res->status != 200) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "endpoint returned HTTP %d", res->status);
        throw NetworkError(buf);
    }
    const double now_ms =
        static_cast<double>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::system_clock::now().time_since_epoch())
                                .count());
    return parse_book_summary(res->body, expiries, now_ms);
}

} // namespace amm
