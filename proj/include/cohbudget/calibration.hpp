#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "cohbudget/model.hpp"

namespace cohbudget::calib {

/// One measured BER-vs-signal-power curve at a fixed LO power.
struct BerCurve {
    ModulationFormat format = ModulationFormat::qpsk();
    double baud_hz = 28e9;
    double lo_power_dbm = 14.0;
    std::vector<std::pair<double, double>> points; // (signal_power_dbm, ber), ascending

    void validate() const;
};

/// Search box and start point for the receiver fit. Defaults follow the
/// documented fit contract.
struct FitSetup {
    // order: R [A/W], CMRR [dB], i_TIA [A/sqrt(Hz)], SNR_Q [dB]
    std::array<double, 4> init{0.05, -15.0, 15e-12, 20.0};
    std::array<double, 4> lower{0.005, -40.0, 1e-12, 10.0};
    std::array<double, 4> upper{0.5, 0.0, 100e-12, 40.0};
    int max_iterations = 300;
};

struct FitResult {
    NoiseParams params;       // fitted values, RIN copied from the fixed input
    double residual_rms = 0.0; // RMS of log10(BER) residuals (unweighted)
    std::array<bool, 4> bounds_hit{};
    bool converged = false;
    int iterations = 0;
};

/// Least-squares fit of (R, CMRR, i_TIA, SNR_Q) to measured BER curves in
/// log10(BER) space, RIN held fixed. Requires curves spanning at least two
/// distinct LO powers, otherwise the thermal/shot/RIN terms are not
/// separately identifiable. Deterministic given identical inputs.
FitResult fit_receiver_params(const std::vector<BerCurve>& curves, double fixed_rin_db_per_hz,
                              const FitSetup& setup = {});

/// Model BER for one curve point under trial parameters; shared by the fit
/// and the synthetic generator.
double model_ber(const NoiseParams& params, const ModulationFormat& format,
                 double baud_hz, double lo_power_dbm, double signal_power_dbm);

struct SyntheticSpec {
    std::vector<ModulationFormat> formats{ModulationFormat::qpsk(),
                                          ModulationFormat::qam16()};
    double baud_hz = 28e9;
    std::vector<double> lo_powers_dbm{8.0, 10.0, 12.0, 14.0, 16.0};
    int points_per_curve = 8;
    double ber_max = 5e-2;
    double ber_min = 1e-5;          // clipped to 2x the format floor
    double noise_sigma = 0.0;       // multiplicative BER noise, 0 = exact
    uint64_t seed = 1;
};

/// Generates BER curves from known parameters; the round-trip against
/// fit_receiver_params is the primary calibration regression gate.
std::vector<BerCurve> make_synthetic_curves(const NoiseParams& truth,
                                            const SyntheticSpec& spec);

/// Published TIA bandwidth / noise-density samples.
struct TiaDataset {
    std::vector<std::pair<double, double>> points; // (bandwidth_hz, irnd A/sqrt(Hz))

    void validate() const;
};

struct TiaFit {
    double i0_a_per_sqrthz = 0.0; // fitted density at ref_bandwidth_hz
    double exponent = 0.0;
    double ref_bandwidth_hz = 22e9;
};

/// Ordinary least squares on (log10 B, log10 i). Outlier removal is the
/// caller's job. Throws on fewer than 3 points or all-equal bandwidths.
TiaFit fit_tia_power_law(const TiaDataset& data, double ref_bandwidth_hz = 22e9);

} // namespace cohbudget::calib
