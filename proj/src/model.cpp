#include "cohbudget/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cohbudget/special.hpp"
#include "cohbudget/units.hpp"

namespace cohbudget {

double NoiseParams::cmrr_linear() const { return db_to_linear(cmrr_db); }
double NoiseParams::rin_linear_per_hz() const { return db_to_linear(rin_db_per_hz); }
double NoiseParams::snr_q_linear() const { return db_to_linear(snr_q_db); }

void NoiseParams::validate() const
{
    if (!(responsivity_a_per_w > 0.0) || !std::isfinite(responsivity_a_per_w))
        throw std::invalid_argument("NoiseParams: responsivity must be positive");
    if (!(irnd_a_per_sqrthz >= 0.0) || !std::isfinite(irnd_a_per_sqrthz))
        throw std::invalid_argument("NoiseParams: IRND must be non-negative");
    // -inf disables the corresponding term; +inf / NaN are invalid.
    if (std::isnan(cmrr_db) || cmrr_db == std::numeric_limits<double>::infinity())
        throw std::invalid_argument("NoiseParams: CMRR must be finite or -inf");
    if (std::isnan(rin_db_per_hz) || rin_db_per_hz == std::numeric_limits<double>::infinity())
        throw std::invalid_argument("NoiseParams: RIN must be finite or -inf");
    if (std::isnan(snr_q_db) || snr_q_db == -std::numeric_limits<double>::infinity())
        throw std::invalid_argument("NoiseParams: SNR_Q must be finite or +inf");
}

NoiseParams NoiseParams::reference()
{
    return NoiseParams{0.07, -20.0, 19e-12, 18.4, -145.0};
}

ModulationFormat ModulationFormat::qpsk() { return {"QPSK", 2, 0.5, 2.0}; }
ModulationFormat ModulationFormat::qam16() { return {"16QAM", 4, 3.0 / 8.0, 10.0}; }
ModulationFormat ModulationFormat::qam64() { return {"64QAM", 6, 7.0 / 24.0, 42.0}; }

ModulationFormat ModulationFormat::from_name(std::string_view name)
{
    if (name == "QPSK") return qpsk();
    if (name == "16QAM") return qam16();
    if (name == "64QAM") return qam64();
    throw std::invalid_argument("unknown modulation format: " + std::string(name));
}

double beq_from_baud(double baud_hz)
{
    if (!(baud_hz > 0.0))
        throw std::invalid_argument("beq_from_baud: baud rate must be positive");
    return 0.6 * baud_hz;
}

NoiseTerms noise_terms(const NoiseParams& params, double p_lo_w, double b_eq_hz)
{
    if (!(p_lo_w > 0.0))
        throw std::invalid_argument("noise_terms: LO power must be positive");
    if (!(b_eq_hz > 0.0))
        throw std::invalid_argument("noise_terms: bandwidth must be positive");

    const double r = params.responsivity_a_per_w;
    const double i2 = params.irnd_a_per_sqrthz * params.irnd_a_per_sqrthz;

    NoiseTerms t;
    t.var_thermal_w2 = i2 * b_eq_hz / (8.0 * r * r);
    t.var_shot_w = kElectronCharge * b_eq_hz / (2.0 * r);
    t.var_rin = params.rin_linear_per_hz() * b_eq_hz / 2.0;
    t.n0_equiv_w = t.var_thermal_w2 / p_lo_w + p_lo_w * t.var_rin * params.cmrr_linear() +
                   t.var_shot_w;
    return t;
}

double snr_rx(double p_s_w, const NoiseTerms& terms, double snr_q_linear)
{
    return p_s_w / (terms.n0_equiv_w + p_s_w / snr_q_linear);
}

double ber(const ModulationFormat& format, double snr)
{
    return format.ber_coeff_a * erfc(std::sqrt(snr / format.ber_coeff_b));
}

double required_snr(const ModulationFormat& format, double ber_target)
{
    if (!(ber_target > 0.0) || !(ber_target < format.ber_coeff_a))
        throw std::invalid_argument("required_snr: target must lie in (0, " +
                                    format.name + " coefficient a)");
    const double x = erfc_inv(ber_target / format.ber_coeff_a);
    return format.ber_coeff_b * x * x;
}

double ber_floor(const ModulationFormat& format, double snr_q_linear)
{
    if (!(snr_q_linear > 0.0))
        throw std::invalid_argument("ber_floor: snr_q must be positive");
    return ber(format, snr_q_linear);
}

std::optional<double> sensitivity(const ModulationFormat& format, double ber_target,
                                  const NoiseTerms& terms, double snr_q_linear)
{
    const double s = required_snr(format, ber_target);
    if (s >= snr_q_linear)
        return std::nullopt; // BER floor sits above the target
    return s * terms.n0_equiv_w / (1.0 - s / snr_q_linear);
}

} // namespace cohbudget
