#include "amm/io.hpp"

#include "amm/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace amm {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(path + " is not valid JSON: " + e.what());
    }
}

double number_field(const json& node, const char* key, const std::string& where) {
    const auto it = node.find(key);
    if (it == node.end() || !it->is_number())
        throw SchemaError(where + ": missing numeric field \"" + key + "\"");
    return it->get<double>();
}

} // namespace

TickLadder load_tick_ladder(const std::string& path) {
    const json doc = parse_file(path);
    TickLadder ladder;
    if (!doc.contains("ticks") || !doc["ticks"].is_array())
        throw SchemaError(path + ": missing \"ticks\" array");
    for (const json& row : doc["ticks"]) {
        TickLadder::Entry e;
        e.tick = static_cast<int>(number_field(row, "tick", path));
        if (!row.contains("liquidityNet") || !row["liquidityNet"].is_string())
            throw SchemaError(path + ": tick rows carry \"liquidityNet\" as a decimal string");
        e.liquidity_net = parse_int128(row["liquidityNet"].get<std::string>());
        ladder.ticks.push_back(e);
    }
    ladder.current_tick = static_cast<int>(number_field(doc, "currentTick", path));
    if (!doc.contains("currentLiquidity") || !doc["currentLiquidity"].is_string())
        throw SchemaError(path + ": \"currentLiquidity\" must be a decimal string");
    ladder.current_liquidity = parse_int128(doc["currentLiquidity"].get<std::string>());
    ladder.decimal_scale = number_field(doc, "decimalScale", path);
    ladder.pool_price = doc.contains("poolPrice") ? number_field(doc, "poolPrice", path) : 0.0;
    if (!(ladder.decimal_scale > 0.0)) throw SchemaError(path + ": decimalScale must be > 0");
    return ladder;
}

OptionSnapshot load_snapshot(const std::string& path) {
    const json doc = parse_file(path);
    OptionSnapshot snap;
    if (!doc.contains("expiry") || !doc["expiry"].is_string())
        throw SchemaError(path + ": missing \"expiry\" label");
    snap.expiry = doc["expiry"].get<std::string>();
    if (doc.contains("timestamp") && doc["timestamp"].is_string())
        snap.timestamp = doc["timestamp"].get<std::string>();
    snap.t = number_field(doc, "T", path);
    snap.forward = number_field(doc, "F", path);
    snap.p0 = number_field(doc, "P0", path);
    snap.r = doc.contains("r") ? number_field(doc, "r", path) : 0.0;
    snap.delta = doc.contains("delta") ? number_field(doc, "delta", path) : 0.0;
    if (!(snap.t > 0.0) || !(snap.forward > 0.0) || !(snap.p0 > 0.0))
        throw SchemaError(path + ": T, F and P0 must be positive");
    if (!doc.contains("quotes") || !doc["quotes"].is_array())
        throw SchemaError(path + ": missing \"quotes\" array");
    for (const json& row : doc["quotes"]) {
        OptionQuote q;
        q.strike = number_field(row, "strike", path);
        if (!row.contains("kind") || !row["kind"].is_string())
            throw SchemaError(path + ": quote without \"kind\"");
        const std::string kind = row["kind"].get<std::string>();
        if (kind == "call") q.kind = OptionKind::Call;
        else if (kind == "put") q.kind = OptionKind::Put;
        else throw SchemaError(path + ": quote kind must be \"call\" or \"put\"");
        if (row.contains("bid") && row["bid"].is_number()) q.bid = row["bid"].get<double>();
        if (row.contains("ask") && row["ask"].is_number()) q.ask = row["ask"].get<double>();
        if (row.contains("mid") && row["mid"].is_number()) q.mid = row["mid"].get<double>();
        else if (q.bid >= 0.0 && q.ask >= 0.0) q.mid = 0.5 * (q.bid + q.ask);
        if (row.contains("synthetic") && row["synthetic"].is_boolean())
            q.synthetic = row["synthetic"].get<bool>();
        if (!(q.strike > 0.0)) throw SchemaError(path + ": quote strikes must be positive");
        snap.quotes.push_back(q);
    }
    return snap;
}

void save_snapshot(const OptionSnapshot& snap, const std::string& path) {
    json doc;
    doc["expiry"] = snap.expiry;
    if (!snap.timestamp.empty()) doc["timestamp"] = snap.timestamp;
    doc["T"] = snap.t;
    doc["F"] = snap.forward;
    doc["P0"] = snap.p0;
    doc["r"] = snap.r;
    doc["delta"] = snap.delta;
    doc["quotes"] = json::array();
    for (const OptionQuote& q : snap.quotes) {
        json row;
        row["strike"] = q.strike;
        row["kind"] = q.kind == OptionKind::Call ? "call" : "put";
        if (q.bid >= 0.0) row["bid"] = q.bid;
        if (q.ask >= 0.0) row["ask"] = q.ask;
        if (q.mid >= 0.0) row["mid"] = q.mid;
        if (q.synthetic) row["synthetic"] = true;
        doc["quotes"].push_back(std::move(row));
    }
    atomic_write_text(path, doc.dump(2) + "\n");
}

namespace {

BondingFamily parse_family_json(const json& doc) {
    if (!doc.contains("family") || !doc["family"].is_string())
        throw SchemaError("family descriptor needs a \"family\" tag");
    const std::string tag = doc["family"].get<std::string>();
    if (tag == "cpmm") return Cpmm{number_field(doc, "k", "cpmm")};
    if (tag == "g3m")
        return G3m{number_field(doc, "alpha", "g3m"), number_field(doc, "k", "g3m")};
    if (tag == "entropy_y") return EntropyY{number_field(doc, "c", "entropy_y")};
    if (tag == "entropy_x") return EntropyX{};
    if (tag == "cev_neutral")
        return CevNeutral{number_field(doc, "c", "cev_neutral"),
                          number_field(doc, "nu", "cev_neutral"),
                          number_field(doc, "beta", "cev_neutral"),
                          number_field(doc, "eps", "cev_neutral"),
                          number_field(doc, "m", "cev_neutral")};
    if (tag == "range")
        return RangeBand{number_field(doc, "ell", "range"), number_field(doc, "pa", "range"),
                         number_field(doc, "pb", "range")};
    throw SchemaError("unknown bonding family \"" + tag + "\"");
}

std::vector<double> parse_grid(const json& node, const std::string& where) {
    const double lo = number_field(node, "lo", where);
    const double hi = number_field(node, "hi", where);
    const int n = static_cast<int>(number_field(node, "n", where));
    const std::string spacing = node.value("spacing", std::string("log"));
    if (spacing != "log" && spacing != "linear")
        throw SchemaError(where + ": spacing must be \"log\" or \"linear\"");
    return make_grid(lo, hi, n, spacing == "log");
}

} // namespace

BondingFamily parse_family(const std::string& json_text) {
    try {
        return parse_family_json(json::parse(json_text));
    } catch (const json::exception& e) {
        throw SchemaError(std::string("family descriptor is not valid JSON: ") + e.what());
    }
}

LiquidityProfile load_profile(const std::string& path) {
    const json doc = parse_file(path);
    if (doc.contains("steps") || doc.contains("atoms")) {
        std::vector<LiquidityStep> steps;
        std::vector<PointMass> atoms;
        for (const json& row : doc.value("steps", json::array()))
            steps.push_back({number_field(row, "q_lo", path), number_field(row, "q_hi", path),
                             number_field(row, "ell", path)});
        for (const json& row : doc.value("atoms", json::array()))
            atoms.push_back({number_field(row, "q0", path), number_field(row, "mass", path)});
        return LiquidityProfile(std::move(steps), std::move(atoms));
    }
    if (doc.contains("family")) {
        const BondingFamily family = parse_family_json(doc["family"]);
        if (doc.contains("discretize"))
            return discretize(family, parse_grid(doc["discretize"], path));
        if (const auto* range = std::get_if<RangeBand>(&family))
            return LiquidityProfile({{range->pa, range->pb, range->ell}}, {});
        throw SchemaError(path + ": this family needs a \"discretize\" block");
    }
    if (doc.contains("density")) {
        const json& d = doc["density"];
        if (d.value("kind", std::string()) != "exp_abs")
            throw SchemaError(path + ": only the \"exp_abs\" density kind is supported");
        const double center = number_field(d, "center", path);
        const double width = number_field(d, "width", path);
        if (!doc.contains("grid")) throw SchemaError(path + ": density form needs a \"grid\"");
        auto density = [center, width](double q) { return std::exp(-std::fabs(q - center) / width); };
        return profile_from_density(density, parse_grid(doc["grid"], path));
    }
    throw SchemaError(path + ": profile file needs \"steps\", \"family\" or \"density\"");
}

std::string cleaning_report_json(const CleaningReport& report) {
    json doc;
    doc["kept"] = report.kept;
    doc["dropped"] = json::array();
    for (const auto& d : report.dropped) {
        json row;
        row["strike"] = d.quote.strike;
        row["kind"] = d.quote.kind == OptionKind::Call ? "call" : "put";
        row["mid"] = d.quote.mid;
        switch (d.reason) {
            case DropReason::NonPositive: row["reason"] = "nonpositive"; break;
            case DropReason::Monotonicity: row["reason"] = "monotonicity"; break;
            case DropReason::Convexity: row["reason"] = "convexity"; break;
        }
        doc["dropped"].push_back(std::move(row));
    }
    doc["synthesized"] = json::array();
    for (const auto& [kind, strike] : report.synthesized) {
        json row;
        row["kind"] = kind == OptionKind::Call ? "call" : "put";
        row["strike"] = strike;
        doc["synthesized"].push_back(std::move(row));
    }
    doc["skipped_negative"] = json::array();
    for (const auto& [kind, strike] : report.skipped_negative) {
        json row;
        row["kind"] = kind == OptionKind::Call ? "call" : "put";
        row["strike"] = strike;
        doc["skipped_negative"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

void save_manifest(const RunManifest& manifest, const std::string& path) {
    json doc;
    doc["command"] = manifest.command;
    doc["input_files"] = manifest.input_files;
    doc["parameters"] = manifest.parameters;
    doc["tool_version"] = manifest.tool_version;
    atomic_write_text(path, doc.dump(2) + "\n");
}

void atomic_write_text(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw InputError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw InputError("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    emit(header);
    for (const auto& row : rows) emit(row);
    return out.str();
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace amm
