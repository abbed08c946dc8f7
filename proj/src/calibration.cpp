#include "cohbudget/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "cohbudget/mc.hpp"
#include "cohbudget/optim.hpp"
#include "cohbudget/units.hpp"

namespace cohbudget::calib {

void BerCurve::validate() const
{
    if (points.size() < 4)
        throw std::invalid_argument("BerCurve: need at least 4 points per curve");
    for (size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].second > 0.0) || !(points[i].second < 1.0))
            throw std::invalid_argument("BerCurve: BER values must lie in (0, 1)");
        if (i > 0 && !(points[i].first > points[i - 1].first))
            throw std::invalid_argument("BerCurve: signal powers must be strictly increasing");
    }
    if (!(baud_hz > 0.0))
        throw std::invalid_argument("BerCurve: baud rate must be positive");
}

double model_ber(const NoiseParams& params, const ModulationFormat& format,
                 double baud_hz, double lo_power_dbm, double signal_power_dbm)
{
    const NoiseTerms terms =
        noise_terms(params, dbm_to_watt(lo_power_dbm), beq_from_baud(baud_hz));
    const double snr = snr_rx(dbm_to_watt(signal_power_dbm), terms, params.snr_q_linear());
    return ber(format, snr);
}

FitResult fit_receiver_params(const std::vector<BerCurve>& curves,
                              double fixed_rin_db_per_hz, const FitSetup& setup)
{
    if (curves.size() < 2)
        throw std::invalid_argument("fit_receiver_params: need at least two curves");
    std::set<double> lo_powers;
    for (const auto& c : curves) {
        c.validate();
        lo_powers.insert(c.lo_power_dbm);
    }
    if (lo_powers.size() < 2)
        throw std::invalid_argument(
            "fit_receiver_params: curves must span at least two distinct LO powers "
            "(parameters not separately identifiable otherwise)");

    const auto params_of = [&](const std::vector<double>& p) {
        NoiseParams np;
        np.responsivity_a_per_w = p[0];
        np.cmrr_db = p[1];
        np.irnd_a_per_sqrthz = p[2] * 1e-12; // optimizer works in pA/sqrt(Hz)
        np.snr_q_db = p[3];
        np.rin_db_per_hz = fixed_rin_db_per_hz;
        return np;
    };

    const auto residuals = [&](const std::vector<double>& p) {
        const NoiseParams np = params_of(p);
        std::vector<double> r;
        for (const auto& c : curves) {
            // Floor-region points carry little slope information; weight 0.25
            // (residual x 0.5) below 10x the current model floor.
            const double floor = ber_floor(c.format, np.snr_q_linear());
            for (const auto& [ps_dbm, ber_meas] : c.points) {
                const double m = std::max(
                    model_ber(np, c.format, c.baud_hz, c.lo_power_dbm, ps_dbm), 1e-300);
                const double w = ber_meas < 10.0 * floor ? 0.5 : 1.0;
                r.push_back(w * (std::log10(m) - std::log10(ber_meas)));
            }
        }
        return r;
    };

    opt::LeastSquaresOptions options;
    options.max_iterations = setup.max_iterations;
    const std::vector<double> p0{setup.init[0], setup.init[1], setup.init[2] * 1e12,
                                 setup.init[3]};
    const std::vector<double> lo{setup.lower[0], setup.lower[1], setup.lower[2] * 1e12,
                                 setup.lower[3]};
    const std::vector<double> hi{setup.upper[0], setup.upper[1], setup.upper[2] * 1e12,
                                 setup.upper[3]};
    const auto solution = opt::levenberg_marquardt(residuals, p0, lo, hi, options);

    FitResult out;
    out.params = params_of(solution.params);
    out.converged = solution.converged;
    out.iterations = solution.iterations;
    for (int j = 0; j < 4; ++j)
        out.bounds_hit[static_cast<size_t>(j)] = solution.at_lower[j] || solution.at_upper[j];

    double ss = 0.0;
    size_t n = 0;
    for (const auto& c : curves) {
        for (const auto& [ps_dbm, ber_meas] : c.points) {
            const double m = std::max(
                model_ber(out.params, c.format, c.baud_hz, c.lo_power_dbm, ps_dbm), 1e-300);
            const double d = std::log10(m) - std::log10(ber_meas);
            ss += d * d;
            ++n;
        }
    }
    out.residual_rms = std::sqrt(ss / static_cast<double>(n));
    return out;
}

std::vector<BerCurve> make_synthetic_curves(const NoiseParams& truth,
                                            const SyntheticSpec& spec)
{
    truth.validate();
    std::vector<BerCurve> curves;
    mc::SplitMix64 rng = mc::SplitMix64::stream(spec.seed, 0);

    for (const auto& format : spec.formats) {
        const double floor = ber_floor(format, truth.snr_q_linear());
        const double lo_ber = std::max(spec.ber_min, 2.0 * floor);
        const double hi_ber = spec.ber_max;
        for (double lo_dbm : spec.lo_powers_dbm) {
            const NoiseTerms terms =
                noise_terms(truth, dbm_to_watt(lo_dbm), beq_from_baud(spec.baud_hz));

            BerCurve curve;
            curve.format = format;
            curve.baud_hz = spec.baud_hz;
            curve.lo_power_dbm = lo_dbm;
            // signal powers placed so the exact curve spans [lo_ber, hi_ber]
            for (int k = 0; k < spec.points_per_curve; ++k) {
                const double t =
                    static_cast<double>(k) / (spec.points_per_curve - 1);
                const double target =
                    std::pow(10.0, std::log10(hi_ber) +
                                       t * (std::log10(lo_ber) - std::log10(hi_ber)));
                const auto ps =
                    sensitivity(format, target, terms, truth.snr_q_linear());
                if (!ps) continue;
                double value =
                    model_ber(truth, format, spec.baud_hz, lo_dbm, watt_to_dbm(*ps));
                if (spec.noise_sigma > 0.0) {
                    double z0, z1;
                    rng.next_normal_pair(z0, z1);
                    value = std::max(value * (1.0 + spec.noise_sigma * z0), 1e-18);
                }
                curve.points.emplace_back(watt_to_dbm(*ps), value);
            }
            std::sort(curve.points.begin(), curve.points.end());
            curves.push_back(std::move(curve));
        }
    }
    return curves;
}

void TiaDataset::validate() const
{
    if (points.size() < 3)
        throw std::invalid_argument("TiaDataset: need at least 3 points");
    for (const auto& [b, i] : points)
        if (!(b > 0.0) || !(i > 0.0))
            throw std::invalid_argument("TiaDataset: bandwidths and densities must be positive");
}

TiaFit fit_tia_power_law(const TiaDataset& data, double ref_bandwidth_hz)
{
    data.validate();
    const auto n = static_cast<double>(data.points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [b, i] : data.points) {
        const double x = std::log10(b);
        const double y = std::log10(i);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (std::fabs(denom) < 1e-12 * n * sxx || denom == 0.0)
        throw std::invalid_argument("fit_tia_power_law: bandwidths are degenerate");

    TiaFit fit;
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    fit.ref_bandwidth_hz = ref_bandwidth_hz;
    fit.i0_a_per_sqrthz =
        std::pow(10.0, intercept + fit.exponent * std::log10(ref_bandwidth_hz));
    return fit;
}

} // namespace cohbudget::calib
