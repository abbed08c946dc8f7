// cohbudget: config-driven CLI for unamplified coherent receiver power
// budgets: single-point OPB/sensitivity, scaling-law sweeps, split-ratio
// optimization, parameter calibration and Monte-Carlo formula validation.
//
// Every subcommand takes one JSON config file; --out/--seed/--format
// override the io/seed blocks. Data goes to the output file, a one-line
// summary to stdout, diagnostics to stderr. Exit codes: 0 success,
// 1 validation error, 2 infeasible-only result, 3 fit non-convergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cohbudget/budget.hpp"
#include "cohbudget/calibration.hpp"
#include "cohbudget/io.hpp"
#include "cohbudget/mc.hpp"
#include "cohbudget/model.hpp"
#include "cohbudget/split.hpp"
#include "cohbudget/units.hpp"

using nlohmann::json;
using namespace cohbudget;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNoConvergence = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_keys(const json& obj, const std::string& where,
                  const std::vector<std::string>& allowed)
{
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double number_or_inf(const json& v, const std::string& where)
{
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw ConfigError(where + " must be a number or \"inf\"/\"-inf\"");
}

double get_number(const json& obj, const std::string& key, const std::string& where)
{
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    if (!obj.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
    return obj.at(key).get<double>();
}

double get_number_or(const json& obj, const std::string& key, double fallback)
{
    return obj.contains(key) ? obj.at(key).get<double>() : fallback;
}

NoiseParams parse_noise(const json& cfg)
{
    NoiseParams p = NoiseParams::reference();
    if (!cfg.contains("noise")) return p;
    const json& n = cfg.at("noise");
    require_keys(n, "noise",
                 {"r_a_per_w", "cmrr_db", "itia_pa_sqrthz", "snrq_db", "rin_db_hz"});
    if (n.contains("r_a_per_w")) p.responsivity_a_per_w = get_number(n, "r_a_per_w", "noise");
    if (n.contains("cmrr_db")) p.cmrr_db = number_or_inf(n.at("cmrr_db"), "noise.cmrr_db");
    if (n.contains("itia_pa_sqrthz"))
        p.irnd_a_per_sqrthz = get_number(n, "itia_pa_sqrthz", "noise") * 1e-12;
    if (n.contains("snrq_db")) p.snr_q_db = number_or_inf(n.at("snrq_db"), "noise.snrq_db");
    if (n.contains("rin_db_hz"))
        p.rin_db_per_hz = number_or_inf(n.at("rin_db_hz"), "noise.rin_db_hz");
    p.validate();
    return p;
}

double parse_ber_target(const json& obj, const std::string& where, double fallback)
{
    if (obj.contains("fec")) {
        const auto fec = obj.at("fec").get<std::string>();
        if (fec == "hd") return budget::kHdFecBer;
        if (fec == "sd") return budget::kSdFecBer;
        throw ConfigError(where + ".fec must be \"hd\" or \"sd\"");
    }
    if (obj.contains("ber_target")) return get_number(obj, "ber_target", where);
    return fallback;
}

budget::LinkConfig parse_link(const json& cfg)
{
    budget::LinkConfig link;
    if (!cfg.contains("link")) throw ConfigError("missing 'link' block");
    const json& l = cfg.at("link");
    require_keys(l, "link",
                 {"format", "n_pol", "baud_hz", "laser_power_dbm", "modulator_loss_db",
                  "m_index", "fec", "ber_target", "snrq_policy", "snrq_ref_baud_hz",
                  "tia_policy", "tia_exponent", "tia_ref_bandwidth_hz"});
    if (l.contains("fec") && l.contains("ber_target"))
        throw ConfigError("link: give either fec or ber_target, not both");
    if (l.contains("modulator_loss_db") && l.contains("m_index"))
        throw ConfigError("link: give either modulator_loss_db or m_index, not both");

    if (l.contains("format"))
        link.format = ModulationFormat::from_name(l.at("format").get<std::string>());
    if (l.contains("n_pol")) link.n_pol = l.at("n_pol").get<int>();
    if (l.contains("baud_hz")) link.baud_hz = get_number(l, "baud_hz", "link");
    if (l.contains("laser_power_dbm"))
        link.laser_power_dbm = get_number(l, "laser_power_dbm", "link");

    if (l.contains("modulator_loss_db")) {
        link.modulator_loss_db = get_number(l, "modulator_loss_db", "link");
    } else if (l.contains("m_index")) {
        link.modulator_loss_db = budget::modulator_loss(
            link.format, get_number(l, "m_index", "link"),
            budget::ModulatorLossModel::default_tables());
    } else {
        link.modulator_loss_db =
            budget::LinkConfig::default_modulator_loss_db(link.format, link.n_pol);
    }

    link.ber_target = parse_ber_target(l, "link", budget::kHdFecBer);

    if (l.contains("snrq_policy")) {
        const auto s = l.at("snrq_policy").get<std::string>();
        if (s == "fixed")
            link.snrq.kind = budget::SnrqPolicy::Kind::fixed;
        else if (s == "scaled_with_baud")
            link.snrq.kind = budget::SnrqPolicy::Kind::scaled_with_baud;
        else
            throw ConfigError("link.snrq_policy must be fixed|scaled_with_baud");
    }
    link.snrq.ref_baud_hz = get_number_or(l, "snrq_ref_baud_hz", link.snrq.ref_baud_hz);

    if (l.contains("tia_policy")) {
        const auto s = l.at("tia_policy").get<std::string>();
        if (s == "fixed")
            link.tia.kind = budget::TiaPolicy::Kind::fixed;
        else if (s == "power_law")
            link.tia.kind = budget::TiaPolicy::Kind::power_law;
        else
            throw ConfigError("link.tia_policy must be fixed|power_law");
    }
    link.tia.exponent = get_number_or(l, "tia_exponent", link.tia.exponent);
    link.tia.ref_bandwidth_hz =
        get_number_or(l, "tia_ref_bandwidth_hz", link.tia.ref_bandwidth_hz);

    link.validate();
    return link;
}

struct IoOptions {
    std::string out_path;
    std::string format = "csv";
};

IoOptions parse_io(const json& cfg, const std::string& out_flag,
                   const std::string& format_flag)
{
    IoOptions io;
    if (cfg.contains("io")) {
        const json& i = cfg.at("io");
        require_keys(i, "io", {"out", "format"});
        if (i.contains("out")) io.out_path = i.at("out").get<std::string>();
        if (i.contains("format")) io.format = i.at("format").get<std::string>();
    }
    if (!out_flag.empty()) io.out_path = out_flag;
    if (!format_flag.empty()) io.format = format_flag;
    if (io.format != "csv" && io.format != "json")
        throw ConfigError("io.format must be csv|json");
    return io;
}

std::ofstream open_output(const IoOptions& io)
{
    if (io.out_path.empty())
        throw ConfigError("this subcommand writes a data file: set io.out or --out");
    std::ofstream os(io.out_path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file: " + io.out_path);
    return os;
}

json sweep_rows_json(const budget::SweepResult& result)
{
    json rows = json::array();
    for (const auto& r : result.rows) {
        json row{{"axis", budget::to_string(result.axis)},
                 {"axis_value", r.axis_value},
                 {"format", r.format},
                 {"n_pol", r.n_pol},
                 {"baud_hz", r.baud_hz},
                 {"raw_bit_rate_bps", r.raw_bit_rate_bps},
                 {"tx_power_dbm", r.tx_power_dbm},
                 {"feasible", r.feasible()}};
        row["sensitivity_dbm"] =
            r.sensitivity_dbm ? json(*r.sensitivity_dbm) : json(nullptr);
        row["opb_db"] = r.opb_db ? json(*r.opb_db) : json(nullptr);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

int run_point(const json& cfg, const IoOptions& io, bool opb_mode)
{
    const NoiseParams params = parse_noise(cfg);
    const budget::LinkConfig link = parse_link(cfg);

    const auto sens = budget::sensitivity_dbm(link, params, link.laser_power_dbm);
    const double txp = budget::tx_power(link.laser_power_dbm, link.modulator_loss_db);

    json out{{"tx_power_dbm", txp}, {"feasible", sens.has_value()}};
    out["sensitivity_dbm"] = sens ? json(*sens) : json(nullptr);
    out["opb_db"] = sens ? json(txp - *sens) : json(nullptr);
    if (!io.out_path.empty()) {
        auto os = open_output(io);
        os << out.dump(2) << '\n';
    }

    if (!sens) {
        std::cout << (opb_mode ? "opb_db=infeasible" : "sensitivity_dbm=infeasible")
                  << " (BER floor above target)\n";
        return kExitInfeasible;
    }
    if (opb_mode)
        std::cout << "opb_db=" << cohbudget::io::format_number(txp - *sens) << '\n';
    else
        std::cout << "sensitivity_dbm=" << cohbudget::io::format_number(*sens) << '\n';
    return kExitOk;
}

budget::SweepSpec parse_sweep(const json& cfg, budget::SweepAxis axis)
{
    if (!cfg.contains("sweep")) throw ConfigError("missing 'sweep' block");
    const json& s = cfg.at("sweep");
    require_keys(s, "sweep", {"axis", "start", "stop", "step", "cases"});
    if (s.contains("axis")) {
        const auto declared = budget::sweep_axis_from_string(s.at("axis").get<std::string>());
        if (declared != axis &&
            !(axis == budget::SweepAxis::raw_bit_rate_bps &&
              declared == budget::SweepAxis::baud_hz))
            throw ConfigError("sweep.axis does not match the subcommand");
        axis = declared;
    }

    budget::SweepSpec spec;
    spec.axis = axis;
    spec.grid = budget::uniform_grid(get_number(s, "start", "sweep"),
                                     get_number(s, "stop", "sweep"),
                                     get_number(s, "step", "sweep"));
    if (s.contains("cases")) {
        if (!s.at("cases").is_array()) throw ConfigError("sweep.cases must be an array");
        for (const auto& c : s.at("cases")) {
            require_keys(c, "sweep.cases[]",
                         {"format", "n_pol", "baud_hz", "modulator_loss_db", "fec",
                          "ber_target"});
            budget::SweepCase sc;
            if (c.contains("format")) sc.format_name = c.at("format").get<std::string>();
            if (c.contains("n_pol")) sc.n_pol = c.at("n_pol").get<int>();
            if (c.contains("baud_hz")) sc.baud_hz = get_number(c, "baud_hz", "sweep.cases[]");
            if (c.contains("modulator_loss_db"))
                sc.modulator_loss_db = get_number(c, "modulator_loss_db", "sweep.cases[]");
            sc.ber_target = parse_ber_target(c, "sweep.cases[]", 0.0);
            spec.cases.push_back(std::move(sc));
        }
    }
    return spec;
}

int run_sweep(const json& cfg, const IoOptions& io, budget::SweepAxis axis)
{
    const NoiseParams params = parse_noise(cfg);
    const budget::LinkConfig base = parse_link(cfg);
    const budget::SweepSpec spec = parse_sweep(cfg, axis);

    const auto result = budget::sweep(spec, base, params);
    auto os = open_output(io);
    if (io.format == "csv")
        cohbudget::io::write_sweep_csv(os, result);
    else
        os << sweep_rows_json(result).dump(2) << '\n';

    size_t feasible = 0;
    for (const auto& r : result.rows)
        if (r.feasible()) ++feasible;
    std::cout << "rows=" << result.rows.size() << " feasible=" << feasible << " out="
              << io.out_path << '\n';
    return feasible == 0 ? kExitInfeasible : kExitOk;
}

split::SplitConfig parse_split(const json& cfg, bool need_rho)
{
    if (!cfg.contains("split")) throw ConfigError("missing 'split' block");
    const json& s = cfg.at("split");
    require_keys(s, "split", {"p_laser_dbm", "rho", "excess_loss_db", "rho_tol"});
    split::SplitConfig c;
    c.p_laser_dbm = get_number(s, "p_laser_dbm", "split");
    if (need_rho) c.rho = get_number(s, "rho", "split");
    else if (s.contains("rho")) c.rho = get_number(s, "rho", "split");
    c.excess_loss_db = get_number_or(s, "excess_loss_db", 0.0);
    return c;
}

int run_split_opt(const json& cfg, const IoOptions& io)
{
    const NoiseParams params = parse_noise(cfg);
    const budget::LinkConfig link = parse_link(cfg);
    const split::SplitConfig sc = parse_split(cfg, false);
    const double tol = cfg.contains("split")
                           ? get_number_or(cfg.at("split"), "rho_tol", 1e-4)
                           : 1e-4;

    const auto opt = split::optimize_split(sc, link, params, tol);
    if (!opt) {
        std::cout << "split-opt=infeasible\n";
        return kExitInfeasible;
    }
    json out{{"rho_opt", opt->rho_opt},
             {"opb_opt_db", opt->opb_opt_db},
             {"iterations", opt->iterations}};
    if (!io.out_path.empty()) {
        auto os = open_output(io);
        os << out.dump(2) << '\n';
    }
    std::cout << "rho_opt=" << cohbudget::io::format_number(opt->rho_opt)
              << " opb_opt_db=" << cohbudget::io::format_number(opt->opb_opt_db)
              << (opt->at_boundary ? " (boundary)" : "") << '\n';
    return kExitOk;
}

int run_split_grid(const json& cfg, const IoOptions& io)
{
    const NoiseParams params = parse_noise(cfg);
    const budget::LinkConfig link = parse_link(cfg);
    const split::SplitConfig sc = parse_split(cfg, false);

    if (!cfg.contains("grid")) throw ConfigError("missing 'grid' block");
    const json& g = cfg.at("grid");
    require_keys(g, "grid", {"rho", "y_axis", "y"});
    const auto linspace = [](const json& spec, const std::string& where) {
        require_keys(spec, where, {"start", "stop", "n"});
        const double start = get_number(spec, "start", where);
        const double stop = get_number(spec, "stop", where);
        const int n = spec.at("n").get<int>();
        if (n < 1 || (n == 1 && stop != start) || stop < start)
            throw ConfigError(where + ": need stop >= start and n >= 1");
        std::vector<double> v(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            v[static_cast<size_t>(i)] =
                n == 1 ? start : start + (stop - start) * i / (n - 1);
        return v;
    };
    const auto rho_grid = linspace(g.at("rho"), "grid.rho");
    auto y_grid = linspace(g.at("y"), "grid.y");

    split::GridYAxis axis;
    const auto axis_name = g.at("y_axis").get<std::string>();
    if (axis_name == "p_laser_dbm") {
        axis = split::GridYAxis::p_laser_dbm;
    } else if (axis_name == "itia_pa_sqrthz") {
        axis = split::GridYAxis::irnd_a_per_sqrthz;
        for (auto& v : y_grid) v *= 1e-12;
    } else if (axis_name == "rin_db_hz") {
        axis = split::GridYAxis::rin_db_per_hz;
    } else {
        throw ConfigError("grid.y_axis must be p_laser_dbm|itia_pa_sqrthz|rin_db_hz");
    }

    auto grid = split::opb_grid(rho_grid, axis, y_grid, sc, link, params);
    if (axis == split::GridYAxis::irnd_a_per_sqrthz)
        for (auto& v : grid.y) v *= 1e12; // report in pA/sqrt(Hz) as configured

    auto os = open_output(io);
    if (io.format == "csv") {
        cohbudget::io::write_grid_csv(os, grid);
    } else {
        json rows = json::array();
        for (size_t iy = 0; iy < grid.y.size(); ++iy)
            for (size_t ix = 0; ix < grid.rho.size(); ++ix) {
                const auto& cell = grid.at(iy, ix);
                rows.push_back(json{{"rho", grid.rho[ix]},
                                    {"y_value", grid.y[iy]},
                                    {"opb_db", cell ? json(*cell) : json(nullptr)},
                                    {"feasible", cell.has_value()}});
            }
        os << rows.dump(2) << '\n';
    }

    size_t feasible = 0;
    for (const auto& c : grid.cells)
        if (c) ++feasible;
    std::cout << "cells=" << grid.cells.size() << " feasible=" << feasible << " out="
              << io.out_path << '\n';
    return feasible == 0 ? kExitInfeasible : kExitOk;
}

int run_fit_rx(const json& cfg, const IoOptions& io)
{
    if (!cfg.contains("fit")) throw ConfigError("missing 'fit' block");
    const json& f = cfg.at("fit");
    require_keys(f, "fit",
                 {"curves_csv", "rin_db_hz", "init", "lower", "upper", "max_iterations"});
    if (!f.contains("curves_csv")) throw ConfigError("fit.curves_csv is required");

    const auto path = f.at("curves_csv").get<std::string>();
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    const auto curves = cohbudget::io::read_ber_curves_csv(is);

    calib::FitSetup setup;
    const auto apply = [&](const char* key, std::array<double, 4>& dst) {
        if (!f.contains(key)) return;
        const json& o = f.at(key);
        require_keys(o, std::string("fit.") + key,
                     {"r_a_per_w", "cmrr_db", "itia_pa_sqrthz", "snrq_db"});
        if (o.contains("r_a_per_w")) dst[0] = o.at("r_a_per_w").get<double>();
        if (o.contains("cmrr_db")) dst[1] = o.at("cmrr_db").get<double>();
        if (o.contains("itia_pa_sqrthz")) dst[2] = o.at("itia_pa_sqrthz").get<double>() * 1e-12;
        if (o.contains("snrq_db")) dst[3] = o.at("snrq_db").get<double>();
    };
    apply("init", setup.init);
    apply("lower", setup.lower);
    apply("upper", setup.upper);
    if (f.contains("max_iterations"))
        setup.max_iterations = f.at("max_iterations").get<int>();
    const double rin = f.contains("rin_db_hz")
                           ? number_or_inf(f.at("rin_db_hz"), "fit.rin_db_hz")
                           : -145.0;

    const auto fit = calib::fit_receiver_params(curves, rin, setup);
    json out{{"r_a_per_w", fit.params.responsivity_a_per_w},
             {"cmrr_db", fit.params.cmrr_db},
             {"itia_pa_sqrthz", fit.params.irnd_a_per_sqrthz * 1e12},
             {"snrq_db", fit.params.snr_q_db},
             {"residual_rms", fit.residual_rms},
             {"bounds_hit",
              json{{"r_a_per_w", fit.bounds_hit[0]},
                   {"cmrr_db", fit.bounds_hit[1]},
                   {"itia_pa_sqrthz", fit.bounds_hit[2]},
                   {"snrq_db", fit.bounds_hit[3]}}}};
    if (!io.out_path.empty()) {
        auto os = open_output(io);
        os << out.dump(2) << '\n';
    }
    std::cout << "r_a_per_w=" << cohbudget::io::format_number(fit.params.responsivity_a_per_w)
              << " cmrr_db=" << cohbudget::io::format_number(fit.params.cmrr_db)
              << " itia_pa_sqrthz="
              << cohbudget::io::format_number(fit.params.irnd_a_per_sqrthz * 1e12)
              << " snrq_db=" << cohbudget::io::format_number(fit.params.snr_q_db)
              << " residual_rms=" << cohbudget::io::format_number(fit.residual_rms) << '\n';
    if (!fit.converged) {
        std::cerr << "fit did not converge within the iteration cap\n";
        return kExitNoConvergence;
    }
    return kExitOk;
}

int run_fit_tia(const json& cfg, const IoOptions& io)
{
    if (!cfg.contains("fit")) throw ConfigError("missing 'fit' block");
    const json& f = cfg.at("fit");
    require_keys(f, "fit", {"tia_csv", "b0_hz"});
    if (!f.contains("tia_csv")) throw ConfigError("fit.tia_csv is required");

    const auto path = f.at("tia_csv").get<std::string>();
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    const auto data = cohbudget::io::read_tia_csv(is);

    const auto fit = calib::fit_tia_power_law(data, get_number_or(f, "b0_hz", 22e9));
    json out{{"itia0_pa_sqrthz", fit.i0_a_per_sqrthz * 1e12},
             {"exponent", fit.exponent},
             {"ref_bandwidth_hz", fit.ref_bandwidth_hz}};
    if (!io.out_path.empty()) {
        auto os = open_output(io);
        os << out.dump(2) << '\n';
    }
    std::cout << "itia0_pa_sqrthz=" << cohbudget::io::format_number(fit.i0_a_per_sqrthz * 1e12)
              << " exponent=" << cohbudget::io::format_number(fit.exponent) << '\n';
    return kExitOk;
}

int run_mc_validate(const json& cfg, const IoOptions& io, uint64_t seed)
{
    if (!cfg.contains("mc")) throw ConfigError("missing 'mc' block");
    const json& m = cfg.at("mc");
    require_keys(m, "mc", {"formats", "snr_db", "ber_points", "n_symbols"});
    if (m.contains("snr_db") == m.contains("ber_points"))
        throw ConfigError("mc: give exactly one of snr_db or ber_points");

    std::vector<ModulationFormat> formats;
    if (m.contains("formats")) {
        for (const auto& name : m.at("formats"))
            formats.push_back(ModulationFormat::from_name(name.get<std::string>()));
    } else {
        formats = {ModulationFormat::qpsk(), ModulationFormat::qam16(),
                   ModulationFormat::qam64()};
    }
    const auto n_symbols =
        static_cast<uint64_t>(get_number_or(m, "n_symbols", 1e6));

    auto os = open_output(io);
    bool all_pass = true;
    bool wrote_header = false;
    json rows = json::array();
    for (const auto& format : formats) {
        std::vector<double> snr_db;
        if (m.contains("snr_db")) {
            for (const auto& v : m.at("snr_db")) snr_db.push_back(v.get<double>());
        } else {
            // place points where the closed form predicts the requested BERs
            for (const auto& v : m.at("ber_points"))
                snr_db.push_back(linear_to_db(required_snr(format, v.get<double>())));
        }
        const auto report = mc::validate_formulas(format, snr_db, n_symbols, seed);
        all_pass = all_pass && report.pass();
        if (io.format == "csv") {
            if (!wrote_header) {
                cohbudget::io::write_mc_csv(os, report);
                wrote_header = true;
            } else {
                std::ostringstream tmp;
                cohbudget::io::write_mc_csv(tmp, report);
                const auto text = tmp.str();
                os << text.substr(text.find('\n') + 1); // skip repeated header
            }
        } else {
            for (const auto& r : report.rows)
                rows.push_back(json{{"format", report.format},
                                    {"snr_db", r.snr_db},
                                    {"ber_formula", r.ber_formula},
                                    {"ber_mc", r.ber_mc},
                                    {"n_bits", r.n_bits},
                                    {"rel_error", r.rel_error},
                                    {"within_tol", r.within_tol}});
        }
    }
    if (io.format == "json") os << rows.dump(2) << '\n';
    std::cout << "pass=" << (all_pass ? "true" : "false") << " out=" << io.out_path
              << '\n';
    return kExitOk;
}

const char* const kTopLevelKeysHelp =
    "Config blocks: noise{r_a_per_w,cmrr_db,itia_pa_sqrthz,snrq_db,rin_db_hz} "
    "link{format,n_pol,baud_hz,laser_power_dbm,modulator_loss_db|m_index,"
    "fec|ber_target,snrq_policy,snrq_ref_baud_hz,tia_policy,tia_exponent,"
    "tia_ref_bandwidth_hz} io{out,format} seed";

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"coherent receiver optical power budget toolkit"};
    app.require_subcommand(1);
    app.footer(std::string(kTopLevelKeysHelp) +
               "\nEnvironment: COHBUDGET_THREADS caps worker threads (0 = auto).");

    std::string config_path, out_flag, format_flag;
    uint64_t seed_flag = 0;
    bool seed_given = false;

    const auto add_common = [&](CLI::App* cmd, const char* extra_keys) {
        cmd->add_option("config", config_path, "JSON config file")->required();
        cmd->add_option("--out", out_flag, "output file (overrides io.out)");
        cmd->add_option("--format", format_flag, "csv|json (overrides io.format)");
        cmd->add_option("--seed", seed_flag, "RNG seed (overrides config seed)")
            ->each([&](const std::string&) { seed_given = true; });
        cmd->footer(std::string("Accepted config keys: ") + extra_keys);
    };

    auto* opb = app.add_subcommand("opb", "single-point optical power budget");
    add_common(opb, "noise, link, io, seed");
    auto* sens = app.add_subcommand("sensitivity", "single-point receiver sensitivity");
    add_common(sens, "noise, link, io, seed");
    auto* sweep_laser =
        app.add_subcommand("sweep-laser", "OPB vs laser power sweep (CSV/JSON)");
    add_common(sweep_laser,
               "noise, link, sweep{axis,start,stop,step,cases[{format,n_pol,baud_hz,"
               "modulator_loss_db,fec|ber_target}]}, io, seed");
    auto* sweep_bitrate =
        app.add_subcommand("sweep-bitrate", "OPB vs raw bit rate sweep (CSV/JSON)");
    add_common(sweep_bitrate,
               "noise, link, sweep{axis,start,stop,step,cases[{format,n_pol,baud_hz,"
               "modulator_loss_db,fec|ber_target}]}, io, seed");
    auto* split_grid =
        app.add_subcommand("split-grid", "OPB over split ratio x parameter grid");
    add_common(split_grid,
               "noise, link, split{p_laser_dbm,excess_loss_db}, "
               "grid{rho{start,stop,n},y_axis,y{start,stop,n}}, io, seed");
    auto* split_opt = app.add_subcommand("split-opt", "optimal split ratio search");
    add_common(split_opt,
               "noise, link, split{p_laser_dbm,excess_loss_db,rho_tol}, io, seed");
    auto* fit_rx =
        app.add_subcommand("fit-rx", "fit receiver parameters to measured BER curves");
    add_common(fit_rx,
               "fit{curves_csv,rin_db_hz,init{...},lower{...},upper{...},"
               "max_iterations}, io, seed");
    auto* fit_tia = app.add_subcommand("fit-tia", "fit TIA noise-density power law");
    add_common(fit_tia, "fit{tia_csv,b0_hz}, io, seed");
    auto* mc_validate =
        app.add_subcommand("mc-validate", "Monte-Carlo check of the BER formulas");
    add_common(mc_validate,
               "mc{formats,snr_db|ber_points,n_symbols}, io, seed");

    CLI11_PARSE(app, argc, argv);

    try {
        std::ifstream is(config_path);
        if (!is) throw ConfigError("cannot open config file: " + config_path);
        json cfg;
        try {
            cfg = json::parse(is);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        require_keys(cfg, "config",
                     {"noise", "link", "sweep", "split", "grid", "fit", "mc", "io",
                      "seed"});
        uint64_t seed = 1;
        if (cfg.contains("seed")) seed = cfg.at("seed").get<uint64_t>();
        if (seed_given) seed = seed_flag;
        const IoOptions io = parse_io(cfg, out_flag, format_flag);

        if (opb->parsed()) return run_point(cfg, io, true);
        if (sens->parsed()) return run_point(cfg, io, false);
        if (sweep_laser->parsed())
            return run_sweep(cfg, io, budget::SweepAxis::laser_power_dbm);
        if (sweep_bitrate->parsed())
            return run_sweep(cfg, io, budget::SweepAxis::raw_bit_rate_bps);
        if (split_grid->parsed()) return run_split_grid(cfg, io);
        if (split_opt->parsed()) return run_split_opt(cfg, io);
        if (fit_rx->parsed()) return run_fit_rx(cfg, io);
        if (fit_tia->parsed()) return run_fit_tia(cfg, io);
        if (mc_validate->parsed()) return run_mc_validate(cfg, io, seed);
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}
