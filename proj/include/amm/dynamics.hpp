#pragma once

#include "amm/curves.hpp"
#include "amm/profiles.hpp"

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

namespace amm {

struct GbmModel {
    double mu = 0.0;     // dP/P = mu dt + sigma dW
    double sigma = 0.0;
};

struct CevModel {
    double nu = 0.0;     // dP = nu P^beta dW (martingale form)
    double beta = 1.0;
};

using PathModel = std::variant<GbmModel, CevModel>;

struct PathConfig {
    double horizon = 1.0;   // years
    int steps = 1;
    int paths = 1;
    std::uint64_t seed = 0;
};

struct PricePath {
    std::vector<double> p;  // steps+1 samples, p.front() = p0
    bool absorbed = false;  // hit zero under CEV Euler and was frozen there
};

// One path, reproducible from (seed, path_index) alone so parallel callers
// can farm paths out in any order.  GBM uses the exact log scheme; CEV uses
// Euler-Maruyama with absorption at zero.
PricePath simulate_path(const PathModel& model, double horizon, int steps, double p0,
                        std::uint64_t seed, std::uint64_t path_index);
std::vector<PricePath> simulate_paths(const PathModel& model, const PathConfig& config, double p0);

// Cumulative LVR along a discrete path: ½ Σ_{k<t} L(P_k)·(P_{k+1}−P_k)²,
// using realized squared increments for d⟨P⟩ so the swap-leg identities hold
// pathwise under any price model.  Returns steps+1 values starting at 0.
std::vector<double> lvr_along_path(const LiquidityProfile& profile,
                                   const std::vector<double>& path);
std::vector<double> lvr_along_path(const std::function<double(double)>& density,
                                   const std::vector<double>& path);

struct ILDecomposition {
    double hedging_cost = 0.0;  // Σ (x(p0) − x(P_k))·(P_{k+1}−P_k)
    double lvr = 0.0;
    double il_direct = 0.0;     // payoff-module IL at the terminal price
};

ILDecomposition decompose_il_path(const LiquidityProfile& profile, const std::vector<double>& path,
                                  double p0);

struct LvrNeutralResult {
    double slope = 0.0;              // through-origin fit of mean LVR_t on t
    double target = 0.0;             // c/2
    double excluded_fraction = 0.0;  // absorbed at 0 or left [eps, m]
    std::vector<double> t;
    std::vector<double> mean_lvr;    // across retained paths
    std::vector<double> stderr_lvr;
};

// Simulates the matching CEV diffusion against the LVR-neutral density
// c/(nu² q^{2beta}); for retained paths the mean LVR should grow linearly at
// rate c/2.
LvrNeutralResult lvr_neutral_check(const CevNeutral& family, const PathConfig& config, double p0);

// E[LVR_T] under zero-drift GBM: builds the second antiderivative of the
// density per step (C¹-glued across breakpoints) and takes the lognormal
// expectation of each power term in closed form.
double lvr_price(const LiquidityProfile& profile, double sigma, double p0, double horizon);

} // namespace amm
