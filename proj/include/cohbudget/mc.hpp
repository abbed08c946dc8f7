#pragma once

#include <cstdint>
#include <vector>

#include "cohbudget/model.hpp"

namespace cohbudget::mc {

/// Counter-mixed 64-bit generator. Streams derived from (seed, stream index)
/// are independent, so chunked parallel runs reproduce the serial result
/// bit for bit.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    /// Stream s of a logical seed: mixes both words before use.
    static SplitMix64 stream(uint64_t seed, uint64_t stream_index);

    uint64_t next();
    /// Uniform double in (0, 1).
    double next_unit();
    /// Standard normal pair via Box-Muller.
    void next_normal_pair(double& z0, double& z1);

private:
    uint64_t state_;
};

struct McResult {
    double ber_estimate = 0.0;
    uint64_t n_bits = 0;
    uint64_t n_errors = 0;
    double ci95_halfwidth = 0.0;
};

/// Symbol-level AWGN simulation of Gray-coded square QAM. snr is Es/N0: mean
/// symbol energy over total complex noise variance. Deterministic for a fixed
/// (format, snr, n_symbols, seed) regardless of thread count.
McResult simulate_ber(const ModulationFormat& format, double snr, uint64_t n_symbols,
                      uint64_t seed);

struct ValidationRow {
    double snr_db = 0.0;
    double ber_formula = 0.0;
    double ber_mc = 0.0;
    uint64_t n_bits = 0;
    double rel_error = 0.0;
    bool within_tol = false;
    bool in_regime = true; // formula BER inside the measurable window [1e-4, 5e-2]
};

struct ValidationReport {
    std::string format;
    std::vector<ValidationRow> rows;

    /// True when every in-regime row is within tolerance.
    bool pass() const;
};

/// Compares the closed-form BER against simulation at each SNR point.
/// Per-point seeds derive as base_seed XOR point index. within_tol holds when
/// |ber_mc - ber_formula| <= 0.10 * ber_formula + 3 * ci95_halfwidth.
ValidationReport validate_formulas(const ModulationFormat& format,
                                   const std::vector<double>& snr_list_db,
                                   uint64_t n_symbols, uint64_t base_seed);

} // namespace cohbudget::mc
