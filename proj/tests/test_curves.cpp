#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "amm/curves.hpp"
#include "amm/errors.hpp"
#include "amm/models.hpp"
#include "amm/numerics.hpp"

#include <cmath>

using namespace amm;

TEST_CASE("analytic densities match their closed forms") {
    CHECK(analytic_density(Cpmm{3.0}, 4.0) == doctest::Approx(3.0 / 16.0).epsilon(1e-14));
    // G3M: L(q) = k (1-a) (a/(1-a))^{1-a} q^{a-2}.
    const G3m g{0.25, 2.0};
    const double lg = 2.0 * 0.75 * std::pow(1.0 / 3.0, 0.75) * std::pow(5.0, 0.25 - 2.0);
    CHECK(analytic_density(g, 5.0) == doctest::Approx(lg).epsilon(1e-14));
    CHECK(analytic_density(EntropyY{2.0}, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(analytic_density(EntropyY{2.0}, 3.0) == 0.0);   // above the cap
    CHECK(analytic_density(EntropyX{}, 4.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
    const CevNeutral cev{0.5, 0.4, 0.75, 0.2, 50.0};
    CHECK(analytic_density(cev, 2.0) ==
          doctest::Approx(0.5 / (0.16 * std::pow(2.0, 1.5))).epsilon(1e-14));
    CHECK(analytic_density(cev, 0.1) == 0.0);
    CHECK(analytic_density(cev, 60.0) == 0.0);
    CHECK(analytic_density(RangeBand{4.0, 1.0, 9.0}, 4.0) ==
          doctest::Approx(4.0 / 16.0).epsilon(1e-14));
    CHECK(analytic_density(RangeBand{4.0, 1.0, 9.0}, 0.5) == 0.0);
    CHECK_THROWS_AS(analytic_density(Cpmm{1.0}, 0.0), NonPositivePrice);
    CHECK_THROWS_AS(analytic_density(Cpmm{-1.0}, 1.0), BadInput);
}

TEST_CASE("family supports") {
    CHECK(std::isinf(family_support(Cpmm{1.0}).second));
    CHECK(family_support(EntropyY{2.5}).second == 2.5);
    const auto [lo, hi] = family_support(CevNeutral{1.0, 1.0, 0.75, 0.2, 50.0});
    CHECK(lo == 0.2);
    CHECK(hi == 50.0);
    CHECK(family_support(RangeBand{1.0, 2.0, 3.0}).first == 2.0);
}

TEST_CASE("closed-form reserves for the product families") {
    // CPMM: x = k/sqrt(p), y = k sqrt(p).
    CHECK(closed_form_x(Cpmm{2.0}, 4.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(closed_form_y(Cpmm{2.0}, 4.0) == doctest::Approx(4.0).epsilon(1e-14));
    // G3M: x = k (a/((1-a) p))^{1-a}, y = k ((1-a) p / a)^a.
    const G3m g{0.25, 2.0};
    const double p = 3.0;
    CHECK(closed_form_x(g, p) ==
          doctest::Approx(2.0 * std::pow(0.25 / (0.75 * p), 0.75)).epsilon(1e-14));
    CHECK(closed_form_y(g, p) ==
          doctest::Approx(2.0 * std::pow(0.75 * p / 0.25, 0.25)).epsilon(1e-14));
    // Spot-price identity p = y-marginal: x(p) * p^(1-a) relation via the curve:
    // x^a y^(1-a) = k must hold along the curve.
    CHECK(std::pow(closed_form_x(g, p), 0.25) * std::pow(closed_form_y(g, p), 0.75) ==
          doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("closed-form reserves for the entropic families") {
    // x + ln y = ln c: x = ln(c/p), y = p on (0, c].
    const EntropyY ey{2.0};
    CHECK(closed_form_x(ey, 0.5) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
    CHECK(closed_form_y(ey, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(closed_form_x(ey, 2.0) == doctest::Approx(0.0).epsilon(1e-14));
    // The bonding identity x + ln y = ln c holds pointwise.
    for (double q : {0.1, 0.7, 1.9})
        CHECK(closed_form_x(ey, q) + std::log(closed_form_y(ey, q)) ==
              doctest::Approx(std::log(2.0)).epsilon(1e-13));

    // ln x + y = 0: x = 1/p, y = ln p.
    const EntropyX ex{};
    CHECK(closed_form_x(ex, 4.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(closed_form_y(ex, 4.0) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
    for (double q : {0.3, 1.0, 7.0})
        CHECK(std::log(closed_form_x(ex, q)) + closed_form_y(ex, q) ==
              doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("cev-neutral closed forms are antiderivatives of the power density") {
    // x' = -C/(nu^2 q^{2b}) and y' = C/(nu^2 q^{2b-1}) on every branch; the
    // integration constant is pinned by the branch anchor: x vanishes at the
    // upper cutoff (b <= 1/2) or at infinity (b > 1/2), y at the lower cutoff
    // (b >= 1) or at zero (b < 1).
    const double c = 0.8, nu = 0.5, eps = 0.25, m = 20.0;
    auto power = [&](double b, double q) { return c / (nu * nu * std::pow(q, 2.0 * b)); };
    for (double beta : {0.25, 0.5, 0.75, 1.0, 1.5}) {
        const CevNeutral f{c, nu, beta, eps, m};
        for (double p : {0.3, 1.0, 5.0, 19.0}) {
            const double h = p * 1e-6;
            const double dx = (closed_form_x(f, p + h) - closed_form_x(f, p - h)) / (2.0 * h);
            const double dy = (closed_form_y(f, p + h) - closed_form_y(f, p - h)) / (2.0 * h);
            CHECK(dx == doctest::Approx(-power(beta, p)).epsilon(1e-7));
            CHECK(dy == doctest::Approx(p * power(beta, p)).epsilon(1e-7));
            const auto rp = cev_neutral_reserves(f, p);
            CHECK(rp.x == doctest::Approx(closed_form_x(f, p)).epsilon(1e-13));
            CHECK(rp.y == doctest::Approx(closed_form_y(f, p)).epsilon(1e-13));
        }
        // Anchor points.
        if (beta <= 0.5) CHECK(closed_form_x(f, m) == doctest::Approx(0.0).epsilon(1e-12));
        if (beta >= 1.0) CHECK(closed_form_y(f, eps) == doctest::Approx(0.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(cev_neutral_reserves(CevNeutral{1.0, 1.0, 0.75, 0.5, 2.0}, 3.0),
                    OutsideSupport);
}

TEST_CASE("cev-neutral density with beta in (1/2,1) is a weighted-power density") {
    // Exponents match under alpha = 2 - 2 beta; coefficients match when
    // k (1-a) (a/(1-a))^{1-a} = c / nu^2.
    const double beta = 0.75, alpha = 2.0 - 2.0 * beta;   // alpha = 1/2
    const double c = 0.3, nu = 0.6;
    const double k = (c / (nu * nu)) / ((1.0 - alpha) * std::pow(alpha / (1.0 - alpha), 1.0 - alpha));
    const CevNeutral f{c, nu, beta, 0.1, 40.0};
    const G3m g{alpha, k};
    for (double q : {0.2, 1.0, 3.0, 25.0})
        CHECK(analytic_density(f, q) == doctest::Approx(analytic_density(g, q)).epsilon(1e-13));
}

TEST_CASE("discretize preserves per-cell mass and hits x exactly at breakpoints") {
    const Cpmm f{2.0};
    const auto grid = make_grid(0.25, 16.0, 64, true);
    const auto prof = discretize(f, grid);
    REQUIRE(prof.steps().size() == 64);

    // Telescoping: x at any breakpoint is exact up to rounding.
    for (size_t i = 0; i < grid.size(); ++i) {
        const double expect = closed_form_x(f, grid[i]) - closed_form_x(f, grid.back());
        CHECK(prof.reserves(grid[i]).x == doctest::Approx(expect).epsilon(1e-12));
    }
    // Per-cell mass is the exact integral of L.
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
        const double expect = closed_form_x(f, grid[i]) - closed_form_x(f, grid[i + 1]);
        CHECK(prof.mass_between(grid[i], grid[i + 1]) == doctest::Approx(expect).epsilon(1e-12));
    }
    // y converges but is not exact on a finite grid; 64 log cells get ~1e-4.
    CHECK(prof.reserves(1.0).y ==
          doctest::Approx(closed_form_y(f, 1.0) - closed_form_y(f, 0.25)).epsilon(1e-3));

    CHECK_THROWS_AS(discretize(EntropyY{2.0}, make_grid(1.0, 4.0, 8, true)), OutsideSupport);
    CHECK_THROWS_AS(discretize(f, {1.0}), BadInput);
    CHECK_THROWS_AS(discretize(f, {2.0, 1.0}), BadInterval);
}

TEST_CASE("profile_from_density matches discretize for an analytic family") {
    const G3m g{0.4, 1.5};
    const auto grid = make_grid(0.5, 8.0, 32, true);
    const auto a = discretize(g, grid);
    const auto b = profile_from_density([&](double q) { return analytic_density(g, q); }, grid);
    REQUIRE(a.steps().size() == b.steps().size());
    for (size_t i = 0; i < a.steps().size(); ++i)
        CHECK(a.steps()[i].ell == doctest::Approx(b.steps()[i].ell).epsilon(1e-9));
}

TEST_CASE("make_grid spacing") {
    const auto lin = make_grid(1.0, 2.0, 4, false);
    REQUIRE(lin.size() == 5);
    CHECK(lin[0] == 1.0);
    CHECK(lin[2] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(lin[4] == 2.0);
    const auto lg = make_grid(1.0, 4.0, 2, true);
    REQUIRE(lg.size() == 3);
    CHECK(lg[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(make_grid(2.0, 1.0, 4, true), BadInterval);
    CHECK_THROWS_AS(make_grid(1.0, 2.0, 0, true), BadInput);
}

TEST_CASE("curve_from_value recovers the kinked covered-call curve") {
    // v(p) = min(p, K): selling one unit of upside at K.  dv jumps 1 -> 0 at K,
    // so d2v is a point mass; the integration-by-parts recovery must still
    // satisfy K x + y = K for every x in [0, 1].
    const double K = 50.0;
    ValueFunctionSpec spec;
    spec.v = [K](double p) { return std::min(p, K); };
    spec.dv = [K](double p) { return p < K ? 1.0 : 0.0; };
    spec.d2v = [](double) { return 0.0; };
    for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto pt = curve_from_value(spec, x);
        CHECK(K * x + pt.y == doctest::Approx(K).epsilon(1e-9));
    }
    // x = 1 resolves somewhere on the lower plateau, x = 0 above the kink.
    CHECK(curve_from_value(spec, 1.0).p < K);
    CHECK(curve_from_value(spec, 0.0).y == doctest::Approx(K).epsilon(1e-9));
}

TEST_CASE("curve_from_value reproduces the lognormal covered-call relation") {
    // v(p) = p - C_BS(p; K, sigma, T) with r = 0.  The recovered reserves obey
    // invPhi(1 - x) - invPhi(y / K) = sigma sqrt(T) at every point.
    const double K = 100.0, sigma = 0.3, t = 1.0;
    ValueFunctionSpec spec;
    spec.v = [&](double p) { return p - bs_price(p, K, t, sigma, 0.0, OptionKind::Call); };
    spec.dv = [&](double p) { return 1.0 - bs_delta(p, K, t, sigma, 0.0, OptionKind::Call); };
    spec.d2v = [&](double p) { return -bs_gamma(p, K, t, sigma, 0.0); };
    const double w = sigma * std::sqrt(t);
    for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const auto pt = curve_from_value(spec, x);
        CHECK(inv_norm_cdf(1.0 - x) - inv_norm_cdf(pt.y / K) ==
              doctest::Approx(w).epsilon(1e-6));
        // And the recovered y really is v - p x.
        CHECK(pt.y == doctest::Approx(pt.p - bs_price(pt.p, K, t, sigma, 0.0, OptionKind::Call) -
                                      pt.p * x).epsilon(1e-9));
    }
    CHECK_THROWS_AS(curve_from_value(spec, 2.0), NotInvertible);
}
