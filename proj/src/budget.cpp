#include "cohbudget/budget.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cohbudget/parallel.hpp"
#include "cohbudget/units.hpp"

namespace cohbudget::budget {

void LinkConfig::validate() const
{
    if (!(baud_hz > 0.0) || !std::isfinite(baud_hz))
        throw std::invalid_argument("LinkConfig: baud rate must be positive");
    if (n_pol != 1 && n_pol != 2)
        throw std::invalid_argument("LinkConfig: n_pol must be 1 or 2");
    if (!(modulator_loss_db >= 0.0))
        throw std::invalid_argument("LinkConfig: modulator loss must be >= 0 dB");
    if (!(ber_target > 0.0) || !(ber_target < format.ber_coeff_a))
        throw std::invalid_argument("LinkConfig: BER target must lie in (0, a) for " +
                                    format.name);
    if (!std::isfinite(laser_power_dbm))
        throw std::invalid_argument("LinkConfig: laser power must be finite");
}

double LinkConfig::default_modulator_loss_db(const ModulationFormat& format, int n_pol)
{
    if (format.name == "QPSK")
        return n_pol == 1 ? 10.0 : 14.0;
    return 18.2; // measured 16QAM loss, reused for 64QAM
}

namespace {

// Ideal dual-parallel MZM: per-quadrature field sin(pi*v / (2*Vpi)) around the
// null bias, drive clipped at full swing. Returns average power transmission
// excluding the intrinsic insertion loss.
double analytic_modulation_transmission(const ModulationFormat& format, double m_index)
{
    // electrical level fractions of Vpp/2 per quadrature (PAM-L, L = 2^(k/2))
    static const std::map<std::string, std::vector<double>> kLevels = {
        {"QPSK", {1.0}},
        {"16QAM", {1.0 / 3.0, 1.0}},
        {"64QAM", {1.0 / 7.0, 3.0 / 7.0, 5.0 / 7.0, 1.0}},
    };
    const auto& levels = kLevels.at(format.name);
    double mean_sq = 0.0;
    for (double f : levels) {
        const double field = std::sin(M_PI * std::min(f * m_index, 2.0) / 4.0);
        mean_sq += field * field;
    }
    mean_sq /= static_cast<double>(levels.size());
    return mean_sq / 2.0; // IQ combiner
}

} // namespace

ModulatorLossModel ModulatorLossModel::default_tables()
{
    // Measured anchors (14.0 dB at m=2.7 for QPSK, 18.2 dB at m=1.5 for
    // 16QAM) extended with ideal-MZM shape points. Editable data, not a law.
    ModulatorLossModel m;
    m.mode = Mode::table;
    m.tables["QPSK"] = {
        {0.5, 22.343207}, {0.9, 17.749112}, {1.5, 14.687693},
        {2.0, 14.0},      {2.7, 14.0},      {3.0, 14.0},
    };
    m.tables["16QAM"] = {
        {0.5, 26.065256}, {0.9, 21.421381}, {1.5, 18.2},
        {2.0, 17.230900}, {2.7, 16.671668}, {3.0, 16.439087},
    };
    m.tables["64QAM"] = m.tables["16QAM"];
    return m;
}

ModulatorLossModel ModulatorLossModel::analytic(double intrinsic_db)
{
    ModulatorLossModel m;
    m.mode = Mode::analytic;
    m.analytic_intrinsic_db = intrinsic_db;
    return m;
}

double modulator_loss(const ModulationFormat& format, double m_index,
                      const ModulatorLossModel& model)
{
    if (!(m_index > 0.0))
        throw std::invalid_argument("modulator_loss: modulation index must be positive");

    if (model.mode == ModulatorLossModel::Mode::analytic) {
        return model.analytic_intrinsic_db -
               linear_to_db(analytic_modulation_transmission(format, m_index));
    }

    const auto it = model.tables.find(format.name);
    if (it == model.tables.end() || it->second.empty())
        throw std::invalid_argument("modulator_loss: no table for format " + format.name);
    const auto& tab = it->second;
    for (size_t i = 1; i < tab.size(); ++i)
        if (!(tab[i].m_index > tab[i - 1].m_index))
            throw std::invalid_argument(
                "modulator_loss: table m_index values must be strictly increasing");
    if (m_index < tab.front().m_index || m_index > tab.back().m_index)
        throw std::out_of_range("modulator_loss: m_index outside table range");

    auto hi = std::lower_bound(tab.begin(), tab.end(), m_index,
                               [](const ModulatorLossModel::Point& p, double v) {
                                   return p.m_index < v;
                               });
    if (hi == tab.begin()) return hi->loss_db;
    const auto lo = hi - 1;
    if (hi == tab.end()) return lo->loss_db;
    const double t = (m_index - lo->m_index) / (hi->m_index - lo->m_index);
    return lo->loss_db + t * (hi->loss_db - lo->loss_db);
}

double tia_irnd_at(double b_eq_hz, double i0_a_per_sqrthz, double b0_hz, double exponent)
{
    if (!(b_eq_hz > 0.0) || !(b0_hz > 0.0))
        throw std::invalid_argument("tia_irnd_at: bandwidths must be positive");
    return i0_a_per_sqrthz * std::pow(b_eq_hz / b0_hz, exponent);
}

double snrq_at(double baud_hz, double snrq0_db, double d0_hz, SnrqPolicy::Kind policy)
{
    if (!(baud_hz > 0.0) || !(d0_hz > 0.0))
        throw std::invalid_argument("snrq_at: baud rates must be positive");
    if (policy == SnrqPolicy::Kind::fixed)
        return snrq0_db;
    return snrq0_db + linear_to_db(baud_hz / d0_hz);
}

namespace {

// Policy-adjusted parameters and noise terms at the link's operating point.
NoiseTerms terms_for_link(const LinkConfig& link, const NoiseParams& params,
                          double lo_power_dbm, double* snr_q_linear_out)
{
    const double b_eq = beq_from_baud(link.baud_hz);

    NoiseParams effective = params;
    if (link.tia.kind == TiaPolicy::Kind::power_law) {
        effective.irnd_a_per_sqrthz = tia_irnd_at(b_eq, params.irnd_a_per_sqrthz,
                                                  link.tia.ref_bandwidth_hz,
                                                  link.tia.exponent);
    }
    const double snrq_db =
        snrq_at(link.baud_hz, params.snr_q_db, link.snrq.ref_baud_hz, link.snrq.kind);
    if (snr_q_linear_out) *snr_q_linear_out = db_to_linear(snrq_db);

    return noise_terms(effective, dbm_to_watt(lo_power_dbm), b_eq);
}

} // namespace

std::optional<double> sensitivity_dbm(const LinkConfig& link, const NoiseParams& params,
                                      double lo_power_dbm)
{
    link.validate();
    params.validate();
    double snr_q_linear = 0.0;
    const NoiseTerms terms = terms_for_link(link, params, lo_power_dbm, &snr_q_linear);
    const auto sens_w = sensitivity(link.format, link.ber_target, terms, snr_q_linear);
    if (!sens_w) return std::nullopt;
    return watt_to_dbm(*sens_w);
}

std::optional<double> compute_opb_for_powers(const LinkConfig& link,
                                             const NoiseParams& params,
                                             double modulator_input_dbm,
                                             double lo_power_dbm)
{
    const auto sens = sensitivity_dbm(link, params, lo_power_dbm);
    if (!sens) return std::nullopt;
    return tx_power(modulator_input_dbm, link.modulator_loss_db) - *sens;
}

std::optional<double> compute_opb(const LinkConfig& link, const NoiseParams& params)
{
    return compute_opb_for_powers(link, params, link.laser_power_dbm,
                                  link.laser_power_dbm);
}

std::string to_string(SweepAxis axis)
{
    switch (axis) {
        case SweepAxis::laser_power_dbm: return "laser_power_dbm";
        case SweepAxis::raw_bit_rate_bps: return "raw_bit_rate_bps";
        case SweepAxis::baud_hz: return "baud_hz";
    }
    return "?";
}

SweepAxis sweep_axis_from_string(const std::string& name)
{
    if (name == "laser_power_dbm") return SweepAxis::laser_power_dbm;
    if (name == "raw_bit_rate_bps") return SweepAxis::raw_bit_rate_bps;
    if (name == "baud_hz") return SweepAxis::baud_hz;
    throw std::invalid_argument("unknown sweep axis: " + name);
}

std::vector<double> uniform_grid(double start, double stop, double step)
{
    if (!(step > 0.0) || !(stop >= start))
        throw std::invalid_argument("uniform_grid: need stop >= start and step > 0");
    std::vector<double> g;
    const auto n = static_cast<size_t>(std::floor((stop - start) / step + 0.5)) + 1;
    g.reserve(n);
    for (size_t i = 0; i < n; ++i) g.push_back(start + static_cast<double>(i) * step);
    return g;
}

SweepResult sweep(const SweepSpec& spec, const LinkConfig& base, const NoiseParams& params)
{
    if (spec.grid.empty())
        throw std::invalid_argument("sweep: empty grid");
    for (size_t i = 1; i < spec.grid.size(); ++i)
        if (!(spec.grid[i] > spec.grid[i - 1]))
            throw std::invalid_argument("sweep: grid must be strictly increasing");

    std::vector<LinkConfig> cases;
    if (spec.cases.empty()) {
        cases.push_back(base);
    } else {
        for (const auto& c : spec.cases) {
            LinkConfig link = base;
            if (!c.format_name.empty()) link.format = ModulationFormat::from_name(c.format_name);
            if (c.n_pol != 0) link.n_pol = c.n_pol;
            if (c.baud_hz > 0.0) link.baud_hz = c.baud_hz;
            if (!std::isnan(c.modulator_loss_db)) link.modulator_loss_db = c.modulator_loss_db;
            else if (!c.format_name.empty())
                link.modulator_loss_db =
                    LinkConfig::default_modulator_loss_db(link.format, link.n_pol);
            if (c.ber_target > 0.0) link.ber_target = c.ber_target;
            cases.push_back(link);
        }
    }

    SweepResult result;
    result.axis = spec.axis;
    result.rows.resize(spec.grid.size() * cases.size());
    // grid points are independent; rows are written by index so the outcome
    // does not depend on the thread count
    parallel_for(result.rows.size(), [&](size_t idx) {
        const double v = spec.grid[idx / cases.size()];
        LinkConfig link = cases[idx % cases.size()];
        switch (spec.axis) {
            case SweepAxis::laser_power_dbm:
                link.laser_power_dbm = v;
                break;
            case SweepAxis::raw_bit_rate_bps:
                link.baud_hz = v / (link.format.bits_per_symbol_per_pol * link.n_pol);
                break;
            case SweepAxis::baud_hz:
                link.baud_hz = v;
                break;
        }
        link.validate();

        SweepRow row;
        row.axis_value = v;
        row.format = link.format.name;
        row.n_pol = link.n_pol;
        row.baud_hz = link.baud_hz;
        row.raw_bit_rate_bps = link.raw_bit_rate_bps();
        row.tx_power_dbm = tx_power(link.laser_power_dbm, link.modulator_loss_db);
        row.sensitivity_dbm = sensitivity_dbm(link, params, link.laser_power_dbm);
        if (row.sensitivity_dbm)
            row.opb_db = row.tx_power_dbm - *row.sensitivity_dbm;
        row.ber_target = link.ber_target;
        result.rows[idx] = std::move(row);
    });
    return result;
}

std::optional<double> max_axis_at_opb(const SweepResult& result, const std::string& format,
                                      double ber_target, double threshold_db)
{
    std::vector<const SweepRow*> rows;
    for (const auto& r : result.rows)
        if (r.format == format && r.ber_target == ber_target) rows.push_back(&r);

    std::optional<double> crossing;
    for (size_t i = 0; i + 1 < rows.size(); ++i) {
        const auto& a = *rows[i];
        const auto& b = *rows[i + 1];
        if (!a.opb_db || !b.opb_db) continue;
        const double fa = *a.opb_db - threshold_db;
        const double fb = *b.opb_db - threshold_db;
        if (fa >= 0.0 && fb < 0.0) {
            crossing = a.axis_value +
                       fa / (fa - fb) * (b.axis_value - a.axis_value);
        }
    }
    // A curve that stays above the threshold through the end of the grid has
    // its "maximum" at (or beyond) the last feasible row.
    if (!rows.empty() && rows.back()->opb_db && *rows.back()->opb_db >= threshold_db)
        return rows.back()->axis_value;
    return crossing;
}

} // namespace cohbudget::budget
