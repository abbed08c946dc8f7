#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cohbudget/split.hpp"
#include "cohbudget/units.hpp"

using namespace cohbudget;
using namespace cohbudget::split;

namespace {

budget::LinkConfig q16_28g_sd()
{
    budget::LinkConfig link;
    link.format = ModulationFormat::qam16();
    link.baud_hz = 28e9;
    link.modulator_loss_db = 18.2;
    link.ber_target = budget::kSdFecBer;
    return link;
}

} // namespace

TEST_CASE("split config validation")
{
    SplitConfig c;
    c.rho = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.rho = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.rho = 0.5;
    c.excess_loss_db = -0.1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("opb_with_split at the published operating point")
{
    SplitConfig cfg;
    cfg.p_laser_dbm = 16.0;
    cfg.rho = 0.75;
    const auto opb = opb_with_split(cfg, q16_28g_sd(), NoiseParams::reference());
    REQUIRE(opb.has_value());
    CHECK(*opb == doctest::Approx(26.7437).epsilon(1e-4));
}

TEST_CASE("opb collapses toward both rho boundaries")
{
    SplitConfig cfg;
    cfg.p_laser_dbm = 16.0;
    const auto params = NoiseParams::reference();
    const auto link = q16_28g_sd();

    cfg.rho = 0.5;
    const auto mid = opb_with_split(cfg, link, params);
    REQUIRE(mid.has_value());
    cfg.rho = 1e-6;
    const auto low = opb_with_split(cfg, link, params);
    cfg.rho = 1.0 - 1e-9;
    const auto high = opb_with_split(cfg, link, params);
    REQUIRE(low.has_value());
    REQUIRE(high.has_value());
    CHECK(*low < *mid - 30.0);  // tx power starves
    CHECK(*high < *mid - 30.0); // thermal noise blows up as LO -> 0
}

TEST_CASE("excess loss shifts both paths")
{
    SplitConfig a;
    a.p_laser_dbm = 16.0;
    a.rho = 0.75;
    SplitConfig b = a;
    b.excess_loss_db = 1.0;
    const auto params = NoiseParams::reference();
    const auto link = q16_28g_sd();
    const auto oa = opb_with_split(a, link, params);
    const auto ob = opb_with_split(b, link, params);
    REQUIRE(oa.has_value());
    REQUIRE(ob.has_value());
    CHECK(*ob < *oa);          // both TX and LO lose power
    CHECK(*oa - *ob <= 2.0 + 1e-9);
}

TEST_CASE("optimize_split: reference point, grid consistency, determinism")
{
    SplitConfig cfg;
    cfg.p_laser_dbm = 16.0;
    const auto params = NoiseParams::reference();
    const auto link = q16_28g_sd();

    const auto opt = optimize_split(cfg, link, params, 1e-4);
    REQUIRE(opt.has_value());
    CHECK(opt->rho_opt == doctest::Approx(0.74646).epsilon(2e-3));
    CHECK(opt->opb_opt_db == doctest::Approx(26.744).epsilon(1e-4));
    CHECK_FALSE(opt->at_boundary);
    CHECK(opt->iterations > 0);

    // optimizer result dominates any grid sampled from the same config
    for (int i = 1; i < 200; ++i) {
        SplitConfig probe = cfg;
        probe.rho = i / 200.0;
        const auto v = opb_with_split(probe, link, params);
        if (v) CHECK(opt->opb_opt_db >= *v - 1e-9);
    }

    const auto again = optimize_split(cfg, link, params, 1e-4);
    REQUIRE(again.has_value());
    CHECK(again->rho_opt == opt->rho_opt);
    CHECK(again->opb_opt_db == opt->opb_opt_db);
}

TEST_CASE("optimize_split trends follow the noise balance")
{
    const auto params = NoiseParams::reference();
    const auto link = q16_28g_sd();

    SUBCASE("argmax rho non-decreasing in laser power")
    {
        double prev = 0.0;
        for (double p = 8.0; p <= 18.0; p += 1.0) {
            SplitConfig cfg;
            cfg.p_laser_dbm = p;
            const auto opt = optimize_split(cfg, link, params, 1e-4);
            REQUIRE(opt.has_value());
            CHECK(opt->rho_opt >= prev - 2e-3);
            prev = opt->rho_opt;
        }
    }

    SUBCASE("low laser power favors the LO, high favors the signal")
    {
        SplitConfig low;
        low.p_laser_dbm = 10.0;
        SplitConfig high;
        high.p_laser_dbm = 18.0;
        const auto r_low = optimize_split(low, link, params, 1e-4);
        const auto r_high = optimize_split(high, link, params, 1e-4);
        REQUIRE(r_low.has_value());
        REQUIRE(r_high.has_value());
        CHECK(r_low->rho_opt == doctest::Approx(0.61).epsilon(0.08));
        CHECK(r_high->rho_opt == doctest::Approx(0.80).epsilon(0.05));
    }

    SUBCASE("dominant thermal noise pulls the optimum toward 0.6")
    {
        NoiseParams noisy = params;
        noisy.irnd_a_per_sqrthz = 60e-12;
        SplitConfig cfg;
        cfg.p_laser_dbm = 16.0;
        const auto opt = optimize_split(cfg, link, noisy, 1e-4);
        REQUIRE(opt.has_value());
        CHECK(opt->rho_opt < 0.65);
        CHECK(opt->rho_opt > 0.45);
    }
}

TEST_CASE("shot-only model pushes the optimum to the upper boundary")
{
    NoiseParams shot_only = NoiseParams::reference();
    shot_only.irnd_a_per_sqrthz = 0.0;
    shot_only.rin_db_per_hz = -std::numeric_limits<double>::infinity();

    SplitConfig cfg;
    cfg.p_laser_dbm = 16.0;
    const auto opt = optimize_split(cfg, q16_28g_sd(), shot_only, 1e-4);
    REQUIRE(opt.has_value());
    CHECK(opt->at_boundary);
    CHECK(opt->rho_opt > 0.98);
}

TEST_CASE("all-infeasible configuration reports Infeasible")
{
    budget::LinkConfig link = q16_28g_sd();
    link.format = ModulationFormat::qam64();
    link.ber_target = budget::kHdFecBer; // above the 18.4 dB floor everywhere
    SplitConfig cfg;
    cfg.p_laser_dbm = 16.0;
    CHECK_FALSE(optimize_split(cfg, link, NoiseParams::reference(), 1e-4).has_value());
}

TEST_CASE("opb_grid: consistency, NaN cells, ridge trends")
{
    const auto params = NoiseParams::reference();
    const auto link = q16_28g_sd();
    SplitConfig cfg;
    cfg.p_laser_dbm = 16.0;

    SUBCASE("1x1 grid reduces to opb_with_split")
    {
        const auto grid = opb_grid({0.75}, GridYAxis::p_laser_dbm, {16.0}, cfg, link, params);
        REQUIRE(grid.cells.size() == 1);
        SplitConfig probe = cfg;
        probe.rho = 0.75;
        const auto direct = opb_with_split(probe, link, params);
        REQUIRE(grid.at(0, 0).has_value());
        REQUIRE(direct.has_value());
        CHECK(*grid.at(0, 0) == doctest::Approx(*direct).epsilon(1e-12));
    }

    SUBCASE("argmax rho ridge is non-decreasing in laser power and in RIN")
    {
        std::vector<double> rho_grid;
        for (int i = 1; i <= 95; ++i) rho_grid.push_back(i / 96.0);

        const auto ridge = [&](const OpbGrid& grid) {
            std::vector<double> r;
            for (size_t iy = 0; iy < grid.y.size(); ++iy) {
                double best = -1e300;
                size_t arg = 0;
                for (size_t ix = 0; ix < grid.rho.size(); ++ix) {
                    const auto& v = grid.at(iy, ix);
                    if (v && *v > best) {
                        best = *v;
                        arg = ix;
                    }
                }
                r.push_back(grid.rho[arg]);
            }
            return r;
        };

        const auto by_power = opb_grid(rho_grid, GridYAxis::p_laser_dbm,
                                       {8, 10, 12, 14, 16, 18}, cfg, link, params);
        auto r1 = ridge(by_power);
        for (size_t i = 1; i < r1.size(); ++i) CHECK(r1[i] >= r1[i - 1] - 1e-12);

        const auto by_rin = opb_grid(rho_grid, GridYAxis::rin_db_per_hz,
                                     {-160, -150, -145, -140, -135, -130}, cfg, link, params);
        auto r2 = ridge(by_rin);
        for (size_t i = 1; i < r2.size(); ++i) CHECK(r2[i] >= r2[i - 1] - 1e-12);
    }

    SUBCASE("infeasible cells are empty optionals")
    {
        budget::LinkConfig hard = link;
        hard.format = ModulationFormat::qam64();
        hard.ber_target = budget::kHdFecBer;
        const auto grid =
            opb_grid({0.2, 0.8}, GridYAxis::p_laser_dbm, {10.0, 16.0}, cfg, hard, params);
        for (const auto& c : grid.cells) CHECK_FALSE(c.has_value());
    }

    SUBCASE("empty grids are rejected")
    {
        CHECK_THROWS_AS(opb_grid({}, GridYAxis::p_laser_dbm, {16.0}, cfg, link, params),
                        std::invalid_argument);
        CHECK_THROWS_AS(opb_grid({0.5, 0.5}, GridYAxis::p_laser_dbm, {16.0}, cfg, link, params),
                        std::invalid_argument);
    }
}
