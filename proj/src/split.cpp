#include "cohbudget/split.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cohbudget/optim.hpp"
#include "cohbudget/parallel.hpp"
#include "cohbudget/units.hpp"

namespace cohbudget::split {

void SplitConfig::validate() const
{
    if (!(rho > 0.0) || !(rho < 1.0))
        throw std::invalid_argument("SplitConfig: rho must lie in (0, 1)");
    if (!(excess_loss_db >= 0.0))
        throw std::invalid_argument("SplitConfig: excess loss must be >= 0 dB");
    if (!std::isfinite(p_laser_dbm))
        throw std::invalid_argument("SplitConfig: laser power must be finite");
}

namespace {

std::optional<double> opb_at_rho(double rho, const SplitConfig& cfg,
                                 const budget::LinkConfig& link,
                                 const NoiseParams& params)
{
    const double mod_in_dbm = cfg.p_laser_dbm + linear_to_db(rho) - cfg.excess_loss_db;
    const double lo_dbm = cfg.p_laser_dbm + linear_to_db(1.0 - rho) - cfg.excess_loss_db;
    return budget::compute_opb_for_powers(link, params, mod_in_dbm, lo_dbm);
}

} // namespace

std::optional<double> opb_with_split(const SplitConfig& cfg,
                                     const budget::LinkConfig& link,
                                     const NoiseParams& params)
{
    cfg.validate();
    return opb_at_rho(cfg.rho, cfg, link, params);
}

std::optional<SplitOptimum> optimize_split(const SplitConfig& cfg,
                                           const budget::LinkConfig& link,
                                           const NoiseParams& params, double rho_tol)
{
    constexpr int kSeedPoints = 101;
    constexpr double kRhoMin = 1e-6;
    constexpr double kRhoMax = 1.0 - 1e-6;

    const auto score = [&](double rho) {
        const auto opb = opb_at_rho(rho, cfg, link, params);
        return opb ? *opb : -std::numeric_limits<double>::infinity();
    };

    std::vector<double> seed(kSeedPoints), val(kSeedPoints);
    for (int i = 0; i < kSeedPoints; ++i)
        seed[i] = static_cast<double>(i + 1) / (kSeedPoints + 1);
    parallel_for(kSeedPoints, [&](size_t i) { val[i] = score(seed[i]); });

    int best = 0;
    for (int i = 1; i < kSeedPoints; ++i)
        if (val[i] > val[best]) best = i;
    if (std::isinf(val[best]))
        return std::nullopt; // infeasible across the whole interior

    // OPB(rho) is unimodal for this model family; refine the bracket around
    // the seed argmax, falling back to the grid value if refinement loses.
    const double lo = best > 0 ? seed[best - 1] : kRhoMin;
    const double hi = best < kSeedPoints - 1 ? seed[best + 1] : kRhoMax;
    const auto golden = opt::golden_section_maximize(score, lo, hi, rho_tol);

    SplitOptimum out;
    out.iterations = golden.iterations;
    out.at_boundary = best == 0 || best == kSeedPoints - 1;
    if (golden.fx >= val[best]) {
        out.rho_opt = golden.x;
        out.opb_opt_db = golden.fx;
    } else {
        out.rho_opt = seed[best];
        out.opb_opt_db = val[best];
    }
    return out;
}

OpbGrid opb_grid(const std::vector<double>& rho_grid, GridYAxis y_axis,
                 const std::vector<double>& y_grid, const SplitConfig& cfg,
                 const budget::LinkConfig& link, const NoiseParams& params)
{
    if (rho_grid.empty() || y_grid.empty())
        throw std::invalid_argument("opb_grid: empty grid");
    for (size_t i = 1; i < rho_grid.size(); ++i)
        if (!(rho_grid[i] > rho_grid[i - 1]))
            throw std::invalid_argument("opb_grid: rho grid must be increasing");
    for (size_t i = 1; i < y_grid.size(); ++i)
        if (!(y_grid[i] > y_grid[i - 1]))
            throw std::invalid_argument("opb_grid: y grid must be increasing");

    OpbGrid grid;
    grid.rho = rho_grid;
    grid.y = y_grid;
    grid.y_axis = y_axis;
    grid.cells.resize(rho_grid.size() * y_grid.size());

    parallel_for(grid.cells.size(), [&](size_t idx) {
        const size_t iy = idx / rho_grid.size();
        const size_t ix = idx % rho_grid.size();

        SplitConfig c = cfg;
        c.rho = rho_grid[ix];
        NoiseParams p = params;
        switch (y_axis) {
            case GridYAxis::p_laser_dbm: c.p_laser_dbm = y_grid[iy]; break;
            case GridYAxis::irnd_a_per_sqrthz: p.irnd_a_per_sqrthz = y_grid[iy]; break;
            case GridYAxis::rin_db_per_hz: p.rin_db_per_hz = y_grid[iy]; break;
        }
        grid.cells[idx] = opb_at_rho(c.rho, c, link, p);
    });
    return grid;
}

} // namespace cohbudget::split
