#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cohbudget/model.hpp"

namespace cohbudget::budget {

// Pre-FEC BER thresholds.
inline constexpr double kHdFecBer = 4e-3;
inline constexpr double kSdFecBer = 2e-2;

/// How the implementation-penalty floor moves with baud rate. scaled_with_baud
/// adds 10*log10(D / ref_baud) to the fitted floor, modelling fixed-rate
/// converters whose quantization noise shrinks after downsampling; fixed keeps
/// the fitted value (converters matched to the baud rate).
struct SnrqPolicy {
    enum class Kind { fixed, scaled_with_baud };
    Kind kind = Kind::fixed;
    double ref_baud_hz = 28e9;
};

/// How TIA input-referred noise density moves with receiver bandwidth:
/// i(B) = i0 * (B / ref_bandwidth)^exponent, or fixed at i0.
struct TiaPolicy {
    enum class Kind { fixed, power_law };
    Kind kind = Kind::fixed;
    double exponent = 0.5;
    double ref_bandwidth_hz = 22e9;
};

/// One link evaluation scenario. laser_power_dbm drives both the modulator
/// input and the LO in the shared-laser default architecture.
struct LinkConfig {
    ModulationFormat format = ModulationFormat::qpsk();
    int n_pol = 2;
    double baud_hz = 28e9;
    double laser_power_dbm = 14.0;
    double modulator_loss_db = 14.0;
    double ber_target = kHdFecBer;
    SnrqPolicy snrq;
    TiaPolicy tia;

    double raw_bit_rate_bps() const
    {
        return baud_hz * format.bits_per_symbol_per_pol * n_pol;
    }

    void validate() const;

    /// Measured default loss for a format / polarization-count combination:
    /// 14 dB dual-pol QPSK, 18.2 dB 16QAM (reused for 64QAM), 10 dB
    /// single-pol QPSK.
    static double default_modulator_loss_db(const ModulationFormat& format, int n_pol);
};

/// Modulator attenuation (intrinsic insertion loss plus modulation loss) as a
/// function of the modulation index m = Vpp / Vpi. Table mode interpolates
/// measured anchor points; analytic mode evaluates an ideal dual-parallel MZM
/// average-power model with drive clipped at full swing.
struct ModulatorLossModel {
    enum class Mode { table, analytic };

    struct Point {
        double m_index;
        double loss_db;
    };

    Mode mode = Mode::table;
    std::map<std::string, std::vector<Point>> tables; // keyed by format name
    double analytic_intrinsic_db = 11.0;

    /// Measured-anchor default tables (QPSK hits 14.0 dB at m = 2.7,
    /// 16QAM hits 18.2 dB at m = 1.5; 64QAM reuses the 16QAM table).
    static ModulatorLossModel default_tables();
    static ModulatorLossModel analytic(double intrinsic_db);
};

/// Total modulator loss in dB at modulation index m_index. Table mode uses
/// piecewise-linear interpolation and refuses extrapolation.
double modulator_loss(const ModulationFormat& format, double m_index,
                      const ModulatorLossModel& model);

/// Average power at the modulator output.
inline double tx_power(double laser_power_dbm, double modulator_loss_db)
{
    return laser_power_dbm - modulator_loss_db;
}

/// TIA IRND extrapolated to bandwidth b_eq_hz via the power law anchored at
/// (b0_hz, i0).
double tia_irnd_at(double b_eq_hz, double i0_a_per_sqrthz, double b0_hz, double exponent);

/// Policy-adjusted SNR floor at the given baud rate, dB.
double snrq_at(double baud_hz, double snrq0_db, double d0_hz, SnrqPolicy::Kind policy);

/// Optical power budget with independently specified modulator input and LO
/// powers (split-laser architectures decouple the two).
std::optional<double> compute_opb_for_powers(const LinkConfig& link,
                                             const NoiseParams& params,
                                             double modulator_input_dbm,
                                             double lo_power_dbm);

/// Optical power budget for the shared-laser architecture: modulator input
/// and LO power both equal laser_power_dbm. nullopt when the BER target is
/// unreachable (implementation floor).
std::optional<double> compute_opb(const LinkConfig& link, const NoiseParams& params);

/// Receiver sensitivity in dBm under the link's bandwidth/policy settings.
std::optional<double> sensitivity_dbm(const LinkConfig& link, const NoiseParams& params,
                                      double lo_power_dbm);

enum class SweepAxis { laser_power_dbm, raw_bit_rate_bps, baud_hz };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

/// One format/FEC combination evaluated over the sweep grid. Fields left at
/// NaN (or n_pol 0) inherit the base LinkConfig.
struct SweepCase {
    std::string format_name;
    int n_pol = 0;
    double baud_hz = 0.0;
    double modulator_loss_db = std::numeric_limits<double>::quiet_NaN();
    double ber_target = 0.0;
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::laser_power_dbm;
    std::vector<double> grid; // strictly increasing
    std::vector<SweepCase> cases; // empty = just the base config
};

struct SweepRow {
    double axis_value = 0.0;
    std::string format;
    int n_pol = 0;
    double baud_hz = 0.0;
    double raw_bit_rate_bps = 0.0;
    double tx_power_dbm = 0.0;
    std::optional<double> sensitivity_dbm;
    std::optional<double> opb_db;
    double ber_target = 0.0; // case selector; not serialized

    bool feasible() const { return opb_db.has_value(); }
};

struct SweepResult {
    SweepAxis axis = SweepAxis::laser_power_dbm;
    std::vector<SweepRow> rows; // ascending axis order, cases interleaved per point
};

/// Evaluates every case at every grid point. Deterministic; rows appear in
/// ascending axis order with cases in declaration order. Throws on an empty
/// or non-increasing grid.
SweepResult sweep(const SweepSpec& spec, const LinkConfig& base, const NoiseParams& params);

/// Uniform grid helper: start, stop inclusive (within half a step), step > 0.
std::vector<double> uniform_grid(double start, double stop, double step);

/// Largest axis value at which opb crosses threshold_db from above, linearly
/// interpolated between adjacent rows of one case. nullopt when the curve
/// never reaches the threshold.
std::optional<double> max_axis_at_opb(const SweepResult& result, const std::string& format,
                                      double ber_target, double threshold_db);

} // namespace cohbudget::budget
