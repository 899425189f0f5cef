#include "amm/curves.hpp"
#include "amm/data.hpp"
#include "amm/dynamics.hpp"
#include "amm/errors.hpp"
#include "amm/exit.hpp"
#include "amm/implied.hpp"
#include "amm/io.hpp"
#include "amm/payoff.hpp"
#include "amm/pricing.hpp"
#include "amm/profiles.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace {

constexpr const char* kVersion = "ammq 0.1.0";

using nlohmann::json;
namespace fs = std::filesystem;

struct ProfileArgs {
    std::string profile_file;
    std::string ticks_file;
    std::string family_json;
    std::vector<double> discretize; // lo, hi, n
    std::string spacing = "log";

    void attach(CLI::App* cmd) {
        cmd->add_option("--profile", profile_file, "liquidity profile JSON file");
        cmd->add_option("--ticks", ticks_file, "tick ladder JSON file");
        cmd->add_option("--family", family_json, "bonding family descriptor JSON");
        cmd->add_option("--discretize", discretize,
                        "lo hi n grid for discretizing an analytic family")
            ->expected(3);
        cmd->add_option("--spacing", spacing, "grid spacing: log or linear")
            ->check(CLI::IsMember({"log", "linear"}));
    }

    amm::LiquidityProfile resolve(std::vector<std::string>& inputs) const {
        const int sources = !profile_file.empty() + !ticks_file.empty() + !family_json.empty();
        if (sources != 1)
            throw amm::BadInput("give exactly one of --profile, --ticks, --family");
        if (!profile_file.empty()) {
            inputs.push_back(profile_file);
            return amm::load_profile(profile_file);
        }
        if (!ticks_file.empty()) {
            inputs.push_back(ticks_file);
            return amm::LiquidityProfile::from_ticks(amm::load_tick_ladder(ticks_file));
        }
        const amm::BondingFamily family = amm::parse_family(family_json);
        if (!discretize.empty()) {
            const auto grid = amm::make_grid(discretize[0], discretize[1],
                                             static_cast<int>(discretize[2]), spacing == "log");
            return amm::discretize(family, grid);
        }
        if (const auto* range = std::get_if<amm::RangeBand>(&family))
            return amm::LiquidityProfile({{range->pa, range->pb, range->ell}}, {});
        throw amm::BadInput("this family needs --discretize lo hi n");
    }
};

std::string out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir.empty() ? "." : dir);
    return (fs::path(dir.empty() ? "." : dir) / name).string();
}

void write_manifest(const std::string& dir, const std::string& command,
                    const std::vector<std::string>& inputs,
                    const std::map<std::string, std::string>& params) {
    amm::RunManifest manifest;
    manifest.command = command;
    manifest.input_files = inputs;
    manifest.parameters = params;
    manifest.tool_version = kVersion;
    amm::save_manifest(manifest, out_path(dir, "manifest.json"));
}

std::string fmt(double v) { return amm::format_double(v); }

// ---------------------------------------------------------------- reserves

struct ReservesCmd {
    ProfileArgs profile;
    double price = 0.0;
    std::string format = "plain";

    void run() const {
        double x = 0.0, y = 0.0;
        std::vector<std::string> inputs;
        const int sources = !profile.profile_file.empty() + !profile.ticks_file.empty() +
                            !profile.family_json.empty();
        if (sources != 1)
            throw amm::BadInput("give exactly one of --profile, --ticks, --family");
        if (!profile.family_json.empty() && profile.discretize.empty()) {
            // Analytic families evaluate by closed form; unbounded supports
            // (CPMM and friends) only work on this path.
            const amm::BondingFamily family = amm::parse_family(profile.family_json);
            x = amm::closed_form_x(family, price);
            y = amm::closed_form_y(family, price);
        } else {
            const amm::LiquidityProfile p = profile.resolve(inputs);
            const amm::ReservePoint rp = p.reserves(price);
            x = rp.x;
            y = rp.y;
        }
        if (format == "json") {
            json doc{{"p", price}, {"x", x}, {"y", y}};
            std::printf("%s\n", doc.dump().c_str());
        } else {
            std::printf("x=%s y=%s\n", fmt(x).c_str(), fmt(y).c_str());
        }
    }
};

// ---------------------------------------------------------------------- il

struct IlCmd {
    ProfileArgs profile;
    double p0 = 0.0, pt = 0.0;
    std::string format = "plain";

    void run() const {
        std::vector<std::string> inputs;
        const amm::LiquidityProfile p = profile.resolve(inputs);
        const amm::ILBreakdown b = amm::il(p, p0, pt);
        if (format == "json") {
            json doc{{"total", b.total},
                     {"put_leg", b.put_leg},
                     {"call_leg", b.call_leg},
                     {"atom_contrib", b.atom_contrib}};
            std::printf("%s\n", doc.dump().c_str());
        } else {
            std::printf("total=%s put_leg=%s call_leg=%s atom_contrib=%s\n", fmt(b.total).c_str(),
                        fmt(b.put_leg).c_str(), fmt(b.call_leg).c_str(),
                        fmt(b.atom_contrib).c_str());
        }
    }
};

// ------------------------------------------------------------ clean-options

struct CleanCmd {
    std::string snapshot_file;
    double gap_threshold = 500.0;
    std::string output_dir;

    void run() const {
        const amm::OptionSnapshot raw = amm::load_snapshot(snapshot_file);
        auto [cleaned, clean_report] = amm::clean_quotes(raw);
        auto [augmented, synth_report] = amm::synthesize_missing(cleaned, gap_threshold);

        amm::CleaningReport report = clean_report;
        report.synthesized = synth_report.synthesized;
        report.skipped_negative = synth_report.skipped_negative;
        report.kept = synth_report.kept;

        amm::save_snapshot(augmented, out_path(output_dir, "cleaned_" + raw.expiry + ".json"));
        amm::atomic_write_text(out_path(output_dir, "cleaning_report_" + raw.expiry + ".json"),
                               amm::cleaning_report_json(report));
        write_manifest(output_dir, "clean-options", {snapshot_file},
                       {{"gap_threshold", fmt(gap_threshold)}});
        std::printf("kept=%zu dropped=%zu synthesized=%zu skipped_negative=%zu\n", report.kept,
                    report.dropped.size(), report.synthesized.size(),
                    report.skipped_negative.size());
    }
};

// ----------------------------------------------------------------- price-il

struct PriceIlCmd {
    ProfileArgs profile;
    std::string snapshot_file;
    double gap_threshold = 500.0;
    double sigma = -1.0;  // optional flat model vol for comparison
    std::string model = "bs";
    std::string output_dir;
    std::string format = "plain";

    void run() const {
        std::vector<std::string> inputs{snapshot_file};
        const amm::LiquidityProfile prof = profile.resolve(inputs);
        const amm::OptionSnapshot raw = amm::load_snapshot(snapshot_file);
        auto [cleaned, r1] = amm::clean_quotes(raw);
        auto [augmented, r2] = amm::synthesize_missing(cleaned, gap_threshold);
        const amm::MarketProxy proxy = amm::build_proxy(augmented);
        const amm::MarketConventions conv = augmented.conventions();

        const amm::ILPrice market = amm::market_il_price(prof, proxy, conv);
        json doc{{"market", {{"total", market.total},
                             {"put_leg", market.put_leg},
                             {"call_leg", market.call_leg}}}};
        if (sigma >= 0.0) {
            const amm::ILPrice modeled =
                model == "bachelier"
                    ? amm::model_il_price_bachelier(prof, sigma, conv)
                    : amm::model_il_price(prof, sigma, conv, amm::PricingModel::BlackScholes);
            doc["model"] = {{"total", modeled.total},
                            {"put_leg", modeled.put_leg},
                            {"call_leg", modeled.call_leg},
                            {"sigma", sigma},
                            {"kind", model}};
        }
        if (!output_dir.empty()) {
            std::vector<std::vector<std::string>> rows;
            for (const amm::CellValue& c : market.per_cell)
                rows.push_back({fmt(c.lo), fmt(c.hi), fmt(c.value)});
            amm::atomic_write_text(out_path(output_dir, "market_il_cells.csv"),
                                   amm::to_csv({"cell_lo", "cell_hi", "value"}, rows));
            write_manifest(output_dir, "price-il", inputs,
                           {{"gap_threshold", fmt(gap_threshold)},
                            {"sigma", fmt(sigma)},
                            {"model", model}});
        }
        if (format == "json") std::printf("%s\n", doc.dump().c_str());
        else
            std::printf("market_total=%s put_leg=%s call_leg=%s\n", fmt(market.total).c_str(),
                        fmt(market.put_leg).c_str(), fmt(market.call_leg).c_str());
    }
};

// --------------------------------------------------------------- implied-vol

struct ImpliedVolCmd {
    ProfileArgs profile;
    std::vector<std::string> snapshot_files;
    std::string resolutions = "1,3,6,12,finest";
    std::string model = "both";
    double gap_threshold = 500.0;
    int threads = 1;
    std::string output_dir;

    void run() const {
        std::vector<std::string> inputs;
        const amm::LiquidityProfile prof = profile.resolve(inputs);
        std::vector<std::string> res_list;
        for (size_t at = 0; at <= resolutions.size();) {
            const size_t comma = std::min(resolutions.find(',', at), resolutions.size());
            if (comma > at) res_list.push_back(resolutions.substr(at, comma - at));
            at = comma + 1;
        }
        if (snapshot_files.empty()) throw amm::BadInput("implied-vol needs --snapshot");

        for (const std::string& file : snapshot_files) {
            inputs.push_back(file);
            const amm::OptionSnapshot raw = amm::load_snapshot(file);
            auto [cleaned, r1] = amm::clean_quotes(raw);
            auto [augmented, r2] = amm::synthesize_missing(cleaned, gap_threshold);
            const amm::MarketProxy proxy = amm::build_proxy(augmented);
            const auto table =
                amm::fine_structure(prof, proxy, augmented.conventions(), res_list, threads);

            std::vector<std::vector<std::string>> rows;
            for (const amm::ResolutionResult& res : table) {
                for (const amm::BinResult& bin : res.bins) {
                    const bool ok = bin.status == amm::BinStatus::Ok;
                    rows.push_back({res.label, fmt(bin.lo), fmt(bin.hi), fmt(bin.x_lo),
                                    fmt(bin.x_hi), fmt(bin.market_price),
                                    ok && model != "bachelier" ? fmt(bin.sigma_bs) : "",
                                    ok && model != "bs" ? fmt(bin.sigma_b_norm) : "",
                                    amm::to_string(bin.status)});
                }
            }
            const std::string name = "implied_vol_" + raw.expiry + ".csv";
            amm::atomic_write_text(
                out_path(output_dir, name),
                amm::to_csv({"resolution", "bin_lo", "bin_hi", "x_lo", "x_hi", "market_price",
                             "sigma_bs", "sigma_b_norm", "status"},
                            rows));
            std::printf("%s\n", out_path(output_dir, name).c_str());
        }
        write_manifest(output_dir, "implied-vol", inputs,
                       {{"resolutions", resolutions},
                        {"model", model},
                        {"gap_threshold", fmt(gap_threshold)},
                        {"threads", std::to_string(threads)}});
    }
};

// -------------------------------------------------------------- optimal-exit

struct OptimalExitCmd {
    ProfileArgs profile;
    double mu = 0.0, sigma = 0.0, r = 0.0, phi = 0.0, p0 = 0.0;
    double curve_max = 2.0;
    int curve_points = 400;
    std::string output_dir;

    void run() const {
        std::vector<std::string> inputs;
        const amm::LiquidityProfile prof = profile.resolve(inputs);
        const amm::ExitParams params{mu, sigma, r, phi, p0};
        const amm::ExitResult result = amm::optimal_exit(params, prof);

        json doc;
        if (const auto* interior = std::get_if<amm::ExitInterior>(&result)) {
            doc["kind"] = "interior";
            doc["epsilon_star"] = interior->epsilon_star;
            doc["v_star"] = interior->v_star;
        } else if (const auto* monotone = std::get_if<amm::ExitMonotone>(&result)) {
            doc["kind"] = "monotone";
            doc["supremum"] = monotone->supremum;
        } else {
            doc["kind"] = "not_applicable";
            doc["reason"] = std::get<amm::ExitNotApplicable>(result).reason;
        }
        std::printf("%s\n", doc.dump().c_str());

        if (!output_dir.empty()) {
            amm::atomic_write_text(out_path(output_dir, "exit_result.json"), doc.dump(2) + "\n");
            if (!std::holds_alternative<amm::ExitNotApplicable>(result)) {
                std::vector<std::vector<std::string>> rows;
                for (int i = 1; i <= curve_points; ++i) {
                    const double eps = curve_max * i / curve_points;
                    rows.push_back({fmt(eps), fmt(amm::expected_pnl(eps, params, prof))});
                }
                amm::atomic_write_text(out_path(output_dir, "exit_curve.csv"),
                                       amm::to_csv({"epsilon", "v"}, rows));
            }
            write_manifest(output_dir, "optimal-exit", inputs,
                           {{"mu", fmt(mu)},
                            {"sigma", fmt(sigma)},
                            {"r", fmt(r)},
                            {"phi", fmt(phi)},
                            {"p0", fmt(p0)}});
        }
    }
};

// ------------------------------------------------------------------ lvr-sim

struct LvrSimCmd {
    std::string family_json;
    double p0 = 0.0;
    double horizon = 1.0;
    int steps = 1000;
    int paths = 10000;
    std::uint64_t seed = 1;
    int csv_rows = 200;
    std::string output_dir;

    void run() const {
        const amm::BondingFamily family = amm::parse_family(family_json);
        const auto* cev = std::get_if<amm::CevNeutral>(&family);
        if (!cev) throw amm::BadInput("lvr-sim expects a cev_neutral family descriptor");
        const amm::PathConfig config{horizon, steps, paths, seed};
        const amm::LvrNeutralResult result = amm::lvr_neutral_check(*cev, config, p0);

        std::printf("slope=%s target=%s excluded_fraction=%s\n", fmt(result.slope).c_str(),
                    fmt(result.target).c_str(), fmt(result.excluded_fraction).c_str());
        if (!output_dir.empty()) {
            std::vector<std::vector<std::string>> rows;
            const size_t n = result.t.size();
            const size_t stride = std::max<size_t>(1, n / static_cast<size_t>(csv_rows));
            for (size_t k = 0; k < n; k += stride)
                rows.push_back({fmt(result.t[k]), fmt(result.mean_lvr[k]),
                                fmt(result.stderr_lvr[k]), fmt(result.slope)});
            amm::atomic_write_text(out_path(output_dir, "lvr_sim.csv"),
                                   amm::to_csv({"t", "mean_lvr", "stderr", "slope"}, rows));
            write_manifest(output_dir, "lvr-sim", {},
                           {{"family", family_json},
                            {"p0", fmt(p0)},
                            {"horizon", fmt(horizon)},
                            {"steps", std::to_string(steps)},
                            {"paths", std::to_string(paths)},
                            {"seed", std::to_string(seed)}});
        }
    }
};

// ------------------------------------------------------------- fetch-deribit

struct FetchCmd {
    std::string currency = "ETH";
    std::vector<std::string> expiries;
    std::string endpoint = "https://www.deribit.com";
    std::string output_dir;

    void run() const {
        const auto snaps = amm::fetch_deribit(currency, expiries, endpoint);
        for (const amm::OptionSnapshot& snap : snaps) {
            const std::string name = "snapshot_" + snap.expiry + ".json";
            amm::save_snapshot(snap, out_path(output_dir, name));
            std::printf("%s\n", out_path(output_dir, name).c_str());
        }
        write_manifest(output_dir, "fetch-deribit", {},
                       {{"currency", currency}, {"endpoint", endpoint}});
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantitative analytics for constant-function market makers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string output_dir;
    std::string format = "plain";
    app.add_option("--output-dir", output_dir, "directory for emitted files")->capture_default_str();
    app.add_option("--format", format, "stdout format: plain|json|csv")
        ->check(CLI::IsMember({"plain", "json", "csv"}));

    ReservesCmd reserves;
    auto* reserves_cmd = app.add_subcommand("reserves", "reserves (x, y) at a price");
    reserves_cmd->fallthrough();
    reserves.profile.attach(reserves_cmd);
    reserves_cmd->add_option("--price", reserves.price, "evaluation price")->required();

    IlCmd il_cmd;
    auto* il_sub = app.add_subcommand("il", "realized impermanent loss between two prices");
    il_sub->fallthrough();
    il_cmd.profile.attach(il_sub);
    il_sub->add_option("--p0", il_cmd.p0, "entry price")->required();
    il_sub->add_option("--pt", il_cmd.pt, "exit price")->required();

    CleanCmd clean;
    auto* clean_cmd = app.add_subcommand("clean-options", "arbitrage-clean a snapshot");
    clean_cmd->fallthrough();
    clean_cmd->add_option("--snapshot", clean.snapshot_file, "snapshot JSON")->required();
    clean_cmd->add_option("--gap-threshold", clean.gap_threshold,
                          "strike gap (USD) that triggers parity synthesis")
        ->capture_default_str();

    PriceIlCmd price;
    auto* price_cmd = app.add_subcommand("price-il", "market (and optional model) IL price");
    price_cmd->fallthrough();
    price.profile.attach(price_cmd);
    price_cmd->add_option("--snapshot", price.snapshot_file, "snapshot JSON")->required();
    price_cmd->add_option("--gap-threshold", price.gap_threshold)->capture_default_str();
    price_cmd->add_option("--sigma", price.sigma, "flat model volatility to price alongside");
    price_cmd->add_option("--model", price.model, "bs|bachelier for the --sigma comparison")
        ->check(CLI::IsMember({"bs", "bachelier"}));

    ImpliedVolCmd implied;
    auto* implied_cmd = app.add_subcommand("implied-vol", "multi-resolution IV from IL prices");
    implied_cmd->fallthrough();
    implied.profile.attach(implied_cmd);
    implied_cmd->add_option("--snapshot", implied.snapshot_files, "snapshot JSON (repeatable)")
        ->required();
    implied_cmd->add_option("--resolutions", implied.resolutions,
                            "comma list from {1,3,6,12,...,finest}")
        ->capture_default_str();
    implied_cmd->add_option("--model", implied.model, "bs|bachelier|both")
        ->check(CLI::IsMember({"bs", "bachelier", "both"}))
        ->capture_default_str();
    implied_cmd->add_option("--gap-threshold", implied.gap_threshold)->capture_default_str();
    implied_cmd->add_option("--threads", implied.threads, "worker threads for per-bin inversion")
        ->capture_default_str();

    OptimalExitCmd exit_cmd_data;
    auto* exit_cmd = app.add_subcommand("optimal-exit", "last-passage optimal withdrawal level");
    exit_cmd->fallthrough();
    exit_cmd_data.profile.attach(exit_cmd);
    exit_cmd->add_option("--mu", exit_cmd_data.mu, "price drift (1/year)")->required();
    exit_cmd->add_option("--sigma", exit_cmd_data.sigma, "price volatility (1/sqrt-year)")
        ->required();
    exit_cmd->add_option("--r", exit_cmd_data.r, "discount rate (1/year)")->required();
    exit_cmd->add_option("--phi", exit_cmd_data.phi, "fee accrual rate (Y units/year)")->required();
    exit_cmd->add_option("--p0", exit_cmd_data.p0, "current price")->required();
    exit_cmd->add_option("--curve-max", exit_cmd_data.curve_max)->capture_default_str();
    exit_cmd->add_option("--curve-points", exit_cmd_data.curve_points)->capture_default_str();

    LvrSimCmd lvr;
    auto* lvr_cmd = app.add_subcommand("lvr-sim", "LVR-neutral CEV simulation");
    lvr_cmd->fallthrough();
    lvr_cmd->add_option("--family", lvr.family_json, "cev_neutral family JSON")->required();
    lvr_cmd->add_option("--p0", lvr.p0, "starting price")->required();
    lvr_cmd->add_option("--horizon", lvr.horizon)->capture_default_str();
    lvr_cmd->add_option("--steps", lvr.steps)->capture_default_str();
    lvr_cmd->add_option("--paths", lvr.paths)->capture_default_str();
    lvr_cmd->add_option("--seed", lvr.seed)->capture_default_str();
    lvr_cmd->add_option("--csv-rows", lvr.csv_rows)->capture_default_str();

    FetchCmd fetch;
    auto* fetch_cmd = app.add_subcommand("fetch-deribit", "download an option book snapshot");
    fetch_cmd->fallthrough();
    fetch_cmd->add_option("--currency", fetch.currency)->capture_default_str();
    fetch_cmd->add_option("--expiries", fetch.expiries, "expiry labels, e.g. 27MAR26")->required();
    fetch_cmd->add_option("--endpoint", fetch.endpoint)->capture_default_str();

    try {
        app.parse(argc, argv);
        reserves.format = il_cmd.format = price.format = format;
        clean.output_dir = price.output_dir = implied.output_dir = exit_cmd_data.output_dir =
            lvr.output_dir = fetch.output_dir = output_dir;
        if (reserves_cmd->parsed()) reserves.run();
        else if (il_sub->parsed()) il_cmd.run();
        else if (clean_cmd->parsed()) clean.run();
        else if (price_cmd->parsed()) price.run();
        else if (implied_cmd->parsed()) implied.run();
        else if (exit_cmd->parsed()) exit_cmd_data.run();
        else if (lvr_cmd->parsed()) lvr.run();
        else if (fetch_cmd->parsed()) fetch.run();
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const amm::InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const amm::NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    } catch (const amm::NetworkError& e) {
        std::fprintf(stderr, "network error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
