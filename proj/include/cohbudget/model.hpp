#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace cohbudget {

/// Receiver and laser noise constants of the coherent sensitivity model.
/// All in engineering units: responsivity A/W, IRND A/sqrt(Hz), CMRR and
/// SNR floor in dB, RIN in dB/Hz. cmrr_db and rin_db_per_hz may be -inf
/// (term disabled); snr_q_db may be +inf (no implementation floor).
struct NoiseParams {
    double responsivity_a_per_w = 0.0;
    double cmrr_db = 0.0;
    double irnd_a_per_sqrthz = 0.0;
    double snr_q_db = 0.0;
    double rin_db_per_hz = 0.0;

    double cmrr_linear() const;
    double rin_linear_per_hz() const;
    double snr_q_linear() const;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;

    /// Fitted 28-GBaud receiver characterization shipped as the default
    /// parameter set (R = 0.07 A/W, CMRR = -20 dB, 19 pA/sqrt(Hz),
    /// SNR_Q = 18.4 dB, RIN = -145 dB/Hz).
    static NoiseParams reference();
};

/// Modulation format descriptor. BER(snr) = a * erfc(sqrt(snr / b)) per
/// quadrature stream; bits_per_symbol_per_pol counts both quadratures of
/// one polarization.
struct ModulationFormat {
    std::string name;
    int bits_per_symbol_per_pol = 0;
    double ber_coeff_a = 0.0;
    double ber_coeff_b = 0.0;

    static ModulationFormat qpsk();
    static ModulationFormat qam16();
    static ModulationFormat qam64();
    /// Accepts "QPSK", "16QAM", "64QAM"; throws std::invalid_argument otherwise.
    static ModulationFormat from_name(std::string_view name);
};

/// Evaluated noise contributions for one (params, LO power, bandwidth) point.
/// n0_equiv_w is the SNR denominator without the signal-dependent floor term:
/// var_thermal/P_LO + P_LO * var_rin * CMRR + var_shot.
struct NoiseTerms {
    double var_thermal_w2 = 0.0; // W^2
    double var_shot_w = 0.0;     // W
    double var_rin = 0.0;        // dimensionless
    double n0_equiv_w = 0.0;     // W
};

/// Effective receiver noise bandwidth, 0.6 x baud rate.
double beq_from_baud(double baud_hz);

/// Noise variances at LO power p_lo_w (W) and bandwidth b_eq_hz.
NoiseTerms noise_terms(const NoiseParams& params, double p_lo_w, double b_eq_hz);

/// Electrical SNR at received signal power p_s_w. Strictly increasing in
/// p_s, saturates at snr_q_linear.
double snr_rx(double p_s_w, const NoiseTerms& terms, double snr_q_linear);

/// Pre-FEC bit error ratio at the given SNR.
double ber(const ModulationFormat& format, double snr);

/// SNR achieving ber_target; requires 0 < ber_target < format.ber_coeff_a.
double required_snr(const ModulationFormat& format, double ber_target);

/// Lowest BER the link can reach given the implementation floor.
double ber_floor(const ModulationFormat& format, double snr_q_linear);

/// Minimum received power (W) meeting ber_target, or nullopt when the
/// required SNR sits at or above the snr_q_linear floor (infeasible).
std::optional<double> sensitivity(const ModulationFormat& format, double ber_target,
                                  const NoiseTerms& terms, double snr_q_linear);

} // namespace cohbudget
