#pragma once

#include "amm/curves.hpp"
#include "amm/data.hpp"
#include "amm/profiles.hpp"

#include <map>
#include <string>
#include <vector>

namespace amm {

// Tick-ladder file: {"ticks":[{"tick":int,"liquidityNet":"decimal-string"}],
// "currentTick":int,"currentLiquidity":"decimal-string","decimalScale":num,
// "poolPrice":num}.  Large integers travel as strings end to end.
TickLadder load_tick_ladder(const std::string& path);

// Snapshot file: {"expiry","T","F","P0","r","delta","quotes":[{"strike",
// "kind","bid","ask","mid","synthetic"}]} with bid/ask/synthetic optional.
OptionSnapshot load_snapshot(const std::string& path);
void save_snapshot(const OptionSnapshot& snap, const std::string& path);

// Bonding-family descriptors as tagged unions, e.g.
// {"family":"range","ell":1.0,"pa":1500,"pb":4000}.
BondingFamily parse_family(const std::string& json_text);

// Profile file, one of:
//   {"steps":[{"q_lo","q_hi","ell"}...],"atoms":[{"q0","mass"}...]}
//   {"family":{...}, "discretize":{"lo","hi","n","spacing":"log"|"linear"}}
//   {"density":{"kind":"exp_abs","center":c,"width":w},
//    "grid":{"lo","hi","n","spacing"}}
// A range family needs no discretize block (its step form is exact).
LiquidityProfile load_profile(const std::string& path);

std::string cleaning_report_json(const CleaningReport& report);

struct RunManifest {
    std::string command;
    std::vector<std::string> input_files;
    std::map<std::string, std::string> parameters;
    std::string tool_version;
};

void save_manifest(const RunManifest& manifest, const std::string& path);

// Writes via a temp file in the same directory plus rename, so readers never
// observe partial output.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

// Minimal CSV assembly; every cell is written verbatim (callers format
// numbers with "%.17g" so round-trips are exact).
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);

std::string format_double(double v);

} // namespace amm
