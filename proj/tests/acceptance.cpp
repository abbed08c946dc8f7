// Acceptance suite: end-to-end checks of the budget model against its
// reference anchors and statistical gates. Each criterion prints one
// [PASS]/[FAIL] line; the process exit code is the number of failures.
//
//   acceptance            run everything
//   acceptance -c N       run criterion N only
//   acceptance --list     list criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cohbudget/budget.hpp"
#include "cohbudget/calibration.hpp"
#include "cohbudget/mc.hpp"
#include "cohbudget/model.hpp"
#include "cohbudget/split.hpp"
#include "cohbudget/units.hpp"

#include "test_util.hpp"

using namespace cohbudget;
using namespace cohbudget::budget;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

LinkConfig link_for(const ModulationFormat& fmt, double baud_hz, double laser_dbm,
                    double loss_db, double target, SnrqPolicy::Kind snrq_kind)
{
    LinkConfig link;
    link.format = fmt;
    link.n_pol = 2;
    link.baud_hz = baud_hz;
    link.laser_power_dbm = laser_dbm;
    link.modulator_loss_db = loss_db;
    link.ber_target = target;
    link.snrq.kind = snrq_kind;
    return link;
}

std::string fmt_db(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

Outcome anchor_check(const LinkConfig& link, double expected_db, double tol_db)
{
    const auto opb = compute_opb(link, NoiseParams::reference());
    Outcome o;
    if (!opb) {
        o.detail = "infeasible, expected " + fmt_db(expected_db) + " +/- " + fmt_db(tol_db);
        return o;
    }
    o.pass = std::fabs(*opb - expected_db) <= tol_db;
    o.detail = "opb=" + fmt_db(*opb) + " dB, anchor " + fmt_db(expected_db) + " +/- " +
               fmt_db(tol_db) + " dB";
    return o;
}

// --- criteria -------------------------------------------------------------

Outcome criterion1()
{
    return anchor_check(link_for(ModulationFormat::qpsk(), 28e9, 14.0, 14.0, kHdFecBer,
                                 SnrqPolicy::Kind::fixed),
                        37.13, 2.5);
}

Outcome criterion2()
{
    return anchor_check(link_for(ModulationFormat::qam16(), 28e9, 14.0, 18.2, kHdFecBer,
                                 SnrqPolicy::Kind::fixed),
                        24.81, 2.5);
}

Outcome criterion3()
{
    return anchor_check(link_for(ModulationFormat::qam16(), 56e9, 16.0, 18.2, kSdFecBer,
                                 SnrqPolicy::Kind::scaled_with_baud),
                        27.0, 2.5);
}

std::optional<double> bitrate_crossing_gbps(double laser_dbm, double threshold_db)
{
    const LinkConfig base = link_for(ModulationFormat::qam16(), 28e9, laser_dbm, 18.2,
                                     kSdFecBer, SnrqPolicy::Kind::scaled_with_baud);
    SweepSpec spec;
    spec.axis = SweepAxis::raw_bit_rate_bps;
    spec.grid = uniform_grid(100e9, 600e9, 1e9);
    const auto result = sweep(spec, base, NoiseParams::reference());
    const auto cross = max_axis_at_opb(result, "16QAM", kSdFecBer, threshold_db);
    if (!cross) return std::nullopt;
    return *cross / 1e9;
}

Outcome criterion4()
{
    Outcome o;
    o.pass = true;
    const struct {
        double laser_dbm;
        double expect_gbps;
    } cases[] = {{14.0, 190.0}, {16.0, 260.0}};
    for (const auto& c : cases) {
        const auto cross = bitrate_crossing_gbps(c.laser_dbm, 29.0);
        const double lo = 0.8 * c.expect_gbps;
        const double hi = 1.2 * c.expect_gbps;
        if (!cross) {
            o.pass = false;
            o.detail += fmt_db(c.laser_dbm) + " dBm: no 29 dB crossing (expected " +
                        fmt_db(c.expect_gbps) + " Gbps +/- 20%); ";
        } else {
            const bool ok = *cross >= lo && *cross <= hi;
            o.pass = o.pass && ok;
            o.detail += fmt_db(c.laser_dbm) + " dBm: crossing " + fmt_db(*cross) +
                        " Gbps (expected " + fmt_db(c.expect_gbps) + " +/- 20%); ";
        }
    }
    return o;
}

Outcome criterion5()
{
    Outcome o;
    o.pass = true;

    // PM-QPSK HD: every rate on [100, 800] Gbps holds 29 - 2.5 dB
    {
        const LinkConfig base = link_for(ModulationFormat::qpsk(), 28e9, 14.0, 14.0,
                                         kHdFecBer, SnrqPolicy::Kind::scaled_with_baud);
        SweepSpec spec;
        spec.axis = SweepAxis::raw_bit_rate_bps;
        spec.grid = uniform_grid(100e9, 800e9, 1e9);
        const auto result = sweep(spec, base, NoiseParams::reference());
        double min_opb = 1e9;
        for (const auto& row : result.rows) {
            if (!row.opb_db) {
                min_opb = -1e9;
                break;
            }
            min_opb = std::min(min_opb, *row.opb_db);
        }
        const bool ok = min_opb >= 29.0 - 2.5;
        o.pass = o.pass && ok;
        o.detail += "QPSK/HD min OPB over 100-800 Gbps = " + fmt_db(min_opb) +
                    " dB (floor 26.5); ";
    }

    // PM-64QAM SD: the 400 Gbps endpoint still delivers 14 - 2.5 dB
    {
        LinkConfig link = link_for(ModulationFormat::qam64(), 400e9 / 12.0, 14.0, 18.2,
                                   kSdFecBer, SnrqPolicy::Kind::scaled_with_baud);
        const auto opb = compute_opb(link, NoiseParams::reference());
        const bool ok = opb && *opb >= 14.0 - 2.5;
        o.pass = o.pass && ok;
        o.detail += "64QAM/SD OPB at 400 Gbps = " + (opb ? fmt_db(*opb) : "infeasible") +
                    " dB (floor 11.5)";
    }
    return o;
}

Outcome criterion6()
{
    Outcome o;
    o.pass = true;
    const auto params = NoiseParams::reference();
    const LinkConfig link = link_for(ModulationFormat::qam16(), 28e9, 16.0, 18.2,
                                     kSdFecBer, SnrqPolicy::Kind::fixed);

    split::SplitConfig cfg;
    cfg.p_laser_dbm = 16.0;
    const auto opt = split::optimize_split(cfg, link, params, 1e-4);
    if (!opt) return {false, "optimizer returned infeasible"};
    const bool rho_ok = opt->rho_opt >= 0.65 && opt->rho_opt <= 0.85;
    const bool opb_ok = std::fabs(opt->opb_opt_db - 28.0) <= 2.5;
    o.pass = rho_ok && opb_ok;
    char buf[128];
    std::snprintf(buf, sizeof buf, "rho_opt=%.4f (window 0.65-0.85), opb_opt=%.3f dB (28 +/- 2.5); ",
                  opt->rho_opt, opt->opb_opt_db);
    o.detail = buf;

    // ridge monotonicity: argmax-rho non-decreasing in laser power and RIN
    std::vector<double> rho_grid;
    for (int i = 5; i <= 95; ++i) rho_grid.push_back(i / 100.0);

    const auto ridge_monotone = [&](split::GridYAxis axis, std::vector<double> y_grid) {
        const auto grid = split::opb_grid(rho_grid, axis, y_grid, cfg, link, params);
        double prev = -1.0;
        for (size_t iy = 0; iy < grid.y.size(); ++iy) {
            double best = -1e300;
            double arg = 0.0;
            for (size_t ix = 0; ix < grid.rho.size(); ++ix) {
                const auto& v = grid.at(iy, ix);
                if (v && *v > best) {
                    best = *v;
                    arg = grid.rho[ix];
                }
            }
            if (arg < prev) return false;
            prev = arg;
        }
        return true;
    };

    const bool laser_trend =
        ridge_monotone(split::GridYAxis::p_laser_dbm, {8, 10, 12, 14, 16, 18});
    const bool rin_trend = ridge_monotone(split::GridYAxis::rin_db_per_hz,
                                          {-160, -155, -150, -145, -140, -135, -130});
    o.pass = o.pass && laser_trend && rin_trend;
    o.detail += std::string("laser-power ridge ") + (laser_trend ? "monotone" : "NOT monotone") +
                ", RIN ridge " + (rin_trend ? "monotone" : "NOT monotone");
    return o;
}

Outcome criterion7()
{
    testutil::Rng rng(77);
    const ModulationFormat formats[] = {ModulationFormat::qpsk(), ModulationFormat::qam16(),
                                        ModulationFormat::qam64()};
    double worst = 0.0;
    int done = 0;
    while (done < 1000) {
        NoiseParams p;
        p.responsivity_a_per_w = rng.uniform(0.01, 0.4);
        p.cmrr_db = rng.uniform(-35.0, -5.0);
        p.irnd_a_per_sqrthz = rng.uniform(2e-12, 60e-12);
        p.snr_q_db = rng.uniform(12.0, 35.0);
        p.rin_db_per_hz = rng.uniform(-160.0, -130.0);
        const auto& f = formats[static_cast<size_t>(rng.next() % 3)];
        const double target =
            std::pow(10.0, rng.uniform(-4.0, std::log10(0.9 * f.ber_coeff_a)));
        const auto terms = noise_terms(p, dbm_to_watt(rng.uniform(5.0, 18.0)),
                                       beq_from_baud(rng.uniform(5e9, 120e9)));
        const auto closed = sensitivity(f, target, terms, p.snr_q_linear());
        if (!closed) continue;

        const double log_ps = testutil::bisect_decreasing(
            [&](double lp) {
                return std::log10(ber(f, snr_rx(std::pow(10.0, lp), terms,
                                                p.snr_q_linear()))) -
                       std::log10(target);
            },
            -14.0, 1.0);
        const double delta_db =
            std::fabs(watt_to_dbm(*closed) - watt_to_dbm(std::pow(10.0, log_ps)));
        worst = std::max(worst, delta_db);
        ++done;
    }
    Outcome o;
    o.pass = worst <= 1e-6;
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "1000 draws, worst |closed-form - bisection| = %.2e dB (limit 1e-6)",
                  worst);
    o.detail = buf;
    return o;
}

Outcome criterion8()
{
    const auto truth = NoiseParams::reference();
    Outcome o;
    o.pass = true;

    // noise-free round trip: 1% linear / 0.1 dB
    {
        const auto curves = calib::make_synthetic_curves(truth, {});
        const auto fit = calib::fit_receiver_params(curves, truth.rin_db_per_hz);
        const double r_rel =
            std::fabs(fit.params.responsivity_a_per_w / truth.responsivity_a_per_w - 1.0);
        const double i_rel =
            std::fabs(fit.params.irnd_a_per_sqrthz / truth.irnd_a_per_sqrthz - 1.0);
        const double cmrr_err = std::fabs(fit.params.cmrr_db - truth.cmrr_db);
        const double snrq_err = std::fabs(fit.params.snr_q_db - truth.snr_q_db);
        const bool ok = fit.converged && r_rel <= 0.01 && i_rel <= 0.01 &&
                        cmrr_err <= 0.1 && snrq_err <= 0.1;
        o.pass = o.pass && ok;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "noise-free: dR=%.2e dI=%.2e dCMRR=%.3f dB dSNRQ=%.3f dB; ", r_rel,
                      i_rel, cmrr_err, snrq_err);
        o.detail += buf;
    }

    // noisy (5% multiplicative): 95th percentile over 50 seeds within 5% / 0.5 dB
    {
        std::vector<double> r_rel, i_rel, cmrr_err, snrq_err;
        for (uint64_t seed = 1; seed <= 50; ++seed) {
            calib::SyntheticSpec spec;
            spec.noise_sigma = 0.05;
            spec.seed = seed;
            const auto curves = calib::make_synthetic_curves(truth, spec);
            const auto fit = calib::fit_receiver_params(curves, truth.rin_db_per_hz);
            r_rel.push_back(
                std::fabs(fit.params.responsivity_a_per_w / truth.responsivity_a_per_w - 1.0));
            i_rel.push_back(
                std::fabs(fit.params.irnd_a_per_sqrthz / truth.irnd_a_per_sqrthz - 1.0));
            cmrr_err.push_back(std::fabs(fit.params.cmrr_db - truth.cmrr_db));
            snrq_err.push_back(std::fabs(fit.params.snr_q_db - truth.snr_q_db));
        }
        const auto pct95 = [](std::vector<double> v) {
            std::sort(v.begin(), v.end());
            return v[static_cast<size_t>(std::ceil(0.95 * v.size())) - 1];
        };
        const double p_r = pct95(r_rel), p_i = pct95(i_rel);
        const double p_c = pct95(cmrr_err), p_q = pct95(snrq_err);
        const bool ok = p_r <= 0.05 && p_i <= 0.05 && p_c <= 0.5 && p_q <= 0.5;
        o.pass = o.pass && ok;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "noisy p95 over 50 seeds: dR=%.3f dI=%.3f dCMRR=%.3f dB dSNRQ=%.3f dB",
                      p_r, p_i, p_c, p_q);
        o.detail += buf;
    }
    return o;
}

Outcome criterion9()
{
    Outcome o;
    o.pass = true;
    for (const auto& fmt : {ModulationFormat::qpsk(), ModulationFormat::qam16(),
                            ModulationFormat::qam64()}) {
        std::vector<double> snr_db;
        for (double target : {1e-2, 4e-3, 1e-3})
            snr_db.push_back(linear_to_db(required_snr(fmt, target)));
        const auto report = mc::validate_formulas(fmt, snr_db, 10000000, 424242);
        o.pass = o.pass && report.pass();
        double worst = 0.0;
        for (const auto& row : report.rows) worst = std::max(worst, std::fabs(row.rel_error));
        o.detail += fmt.name + (report.pass() ? " ok" : " FAILED") + " (worst rel err " +
                    fmt_db(worst * 100.0) + "%); ";
    }
    return o;
}

Outcome criterion10()
{
    const auto params = NoiseParams::reference();
    const auto terms = noise_terms(params, dbm_to_watt(14.0), beq_from_baud(28e9));
    const auto sens =
        sensitivity(ModulationFormat::qam64(), kHdFecBer, terms, params.snr_q_linear());
    const double required_db = linear_to_db(required_snr(ModulationFormat::qam64(), kHdFecBer));
    Outcome o;
    o.pass = !sens.has_value() && required_db > params.snr_q_db;
    o.detail = std::string("sensitivity ") + (sens ? "feasible (wrong)" : "Infeasible") +
               ", required snr " + fmt_db(required_db) + " dB vs floor 18.4 dB";
    return o;
}

Outcome criterion11()
{
    const auto params = NoiseParams::reference();
    double worst = 0.0;
    for (double rate = 112e9; rate <= 448e9; rate += 1e9) {
        LinkConfig fixed = link_for(ModulationFormat::qpsk(), rate / 4.0, 16.0, 14.0,
                                    kHdFecBer, SnrqPolicy::Kind::scaled_with_baud);
        LinkConfig power_law = fixed;
        power_law.tia.kind = TiaPolicy::Kind::power_law;
        power_law.tia.exponent = 0.5;
        const auto a = compute_opb(fixed, params);
        const auto b = compute_opb(power_law, params);
        if (!a || !b) return {false, "unexpected infeasible point"};
        worst = std::max(worst, std::fabs(*a - *b));
    }
    Outcome o;
    o.pass = worst <= 1.0;
    o.detail = "max |OPB(x=0.5) - OPB(fixed)| over 112-448 Gbps = " + fmt_db(worst) +
               " dB (limit 1.0)";
    return o;
}

struct Criterion {
    int id;
    const char* title;
    double budget_seconds;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> all = {
        {1, "PM-QPSK 28 GBaud, 14 dBm, HD-FEC anchor 37.13 dB", 1.0, criterion1},
        {2, "PM-16QAM 28 GBaud, 14 dBm, HD-FEC anchor 24.81 dB", 1.0, criterion2},
        {3, "PM-16QAM 56 GBaud, 16 dBm, SD-FEC anchor 27 dB", 1.0, criterion3},
        {4, "16QAM SD 29 dB bit-rate crossings (190 / 260 Gbps +/- 20%)", 1.0, criterion4},
        {5, "QPSK HD holds 29-2.5 dB to 800 Gbps; 64QAM SD 14-2.5 dB at 400 Gbps", 1.0,
         criterion5},
        {6, "split optimum window and ridge monotonicity", 1.0, criterion6},
        {7, "closed-form sensitivity vs bisection, 1000 draws, 1e-6 dB", 10.0, criterion7},
        {8, "calibration round trip, noise-free and 50-seed noisy", 60.0, criterion8},
        {9, "Monte-Carlo vs formulas at BER {1e-2, 4e-3, 1e-3}, n=1e7", 120.0, criterion9},
        {10, "64QAM HD infeasible at the 18.4 dB floor", 1.0, criterion10},
        {11, "TIA power-law invariance <= 1 dB at 16 dBm", 1.0, criterion11},
    };
    return all;
}

} // namespace

int main(int argc, char** argv)
{
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--list")) {
            for (const auto& c : criteria())
                std::printf("%2d  %s\n", c.id, c.title);
            return 0;
        }
        if ((!std::strcmp(argv[i], "-c") || !std::strcmp(argv[i], "--criterion")) &&
            i + 1 < argc) {
            only = std::atoi(argv[++i]);
        }
    }

    int failures = 0;
    for (const auto& c : criteria()) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        const Outcome o = c.run();
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = dt <= c.budget_seconds;
        const bool pass = o.pass && in_budget;
        std::printf("[%s] criterion %2d: %s: %s (%.2fs, budget %.0fs)\n",
                    pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), dt,
                    c.budget_seconds);
        if (!pass) ++failures;
    }
    return failures;
}
