#pragma once

#include <optional>
#include <vector>

#include "cohbudget/budget.hpp"

namespace cohbudget::split {

/// Shared-laser transceiver front end: one laser, a splitter routing the
/// fraction rho of the power to the signal modulator and 1-rho to the LO.
struct SplitConfig {
    double p_laser_dbm = 16.0;
    double rho = 0.75;          // P_sig / P_laser, in (0, 1)
    double excess_loss_db = 0.0;

    void validate() const;
};

/// OPB with the laser power divided by the splitter. nullopt when the BER
/// target is unreachable.
std::optional<double> opb_with_split(const SplitConfig& cfg,
                                     const budget::LinkConfig& link,
                                     const NoiseParams& params);

struct SplitOptimum {
    double rho_opt = 0.0;
    double opb_opt_db = 0.0;
    int iterations = 0;
    bool at_boundary = false; // seed-grid argmax on the first/last point
};

/// Maximizes OPB over rho on (0, 1): 101-point seed grid, then golden-section
/// refinement of the bracketing interval down to rho_tol. nullopt when every
/// seed point is infeasible.
std::optional<SplitOptimum> optimize_split(const SplitConfig& cfg,
                                           const budget::LinkConfig& link,
                                           const NoiseParams& params,
                                           double rho_tol = 1e-4);

enum class GridYAxis { p_laser_dbm, irnd_a_per_sqrthz, rin_db_per_hz };

/// OPB matrix over rho (columns) and a second parameter (rows). Infeasible
/// cells carry nullopt. Deterministic regardless of parallelism.
struct OpbGrid {
    std::vector<double> rho;
    std::vector<double> y;
    GridYAxis y_axis = GridYAxis::p_laser_dbm;
    std::vector<std::optional<double>> cells; // row-major, y outer

    const std::optional<double>& at(size_t iy, size_t ix) const
    {
        return cells[iy * rho.size() + ix];
    }
};

OpbGrid opb_grid(const std::vector<double>& rho_grid, GridYAxis y_axis,
                 const std::vector<double>& y_grid, const SplitConfig& cfg,
                 const budget::LinkConfig& link, const NoiseParams& params);

} // namespace cohbudget::split
