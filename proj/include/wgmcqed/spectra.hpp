#ifndef WGMCQED_SPECTRA_HPP
#define WGMCQED_SPECTRA_HPP

#include "wgmcqed/model.hpp"
#include "wgmcqed/solver.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace wgmcqed {

// Frequency/wavelength-equivalent conversion at fixed lambda0 (first-order
// dispersion, sign-preserving): dnu = c * dlambda / lambda0^2.
double pm_to_ghz(double delta_pm, double lambda0);
double ghz_to_pm(double delta_ghz, double lambda0);
double angular_to_pm(double delta_rad_s, double lambda0);
double pm_to_angular(double delta_pm, double lambda0);

struct SpectrumPoint {
    double laser_detuning = 0.0;           // Delta_cl, rad/s
    double exciton_detuning = 0.0;         // Delta_al, rad/s
    double cavity_exciton_detuning = 0.0;  // Delta_ca, rad/s
    double power_w = 0.0;
    double flux = 0.0;
    double transmission = 0.0;
    double reflection = 0.0;
    double n_cav_actual = 0.0;      // <n_cw + n_ccw> of the solved state
    double exciton_population = 0.0;
    double trunc_cw = 0.0;
    double trunc_ccw = 0.0;
    bool trunc_flag = false;
    double power_balance_defect = 0.0;
};

struct Peak {
    double position = 0.0;    // interpolated, same units as the grid
    double height = 0.0;      // interpolated
    double prominence = 0.0;  // topographic prominence on the sampled line
};

struct PeakExtraction {
    std::vector<Peak> peaks;  // ascending position
    // Distance between the two most prominent peaks; empty when < 2 peaks.
    std::optional<double> splitting;
    std::optional<std::pair<double, double>> dominant_positions;
};

// Local maxima through three-point quadratic interpolation. Grid must be
// monotone with >= 5 points. For dips, pass the negated series.
PeakExtraction extract_peaks(const std::vector<double>& grid, const std::vector<double>& values);

// Full width at half depth of the dominant dip of `values` against its sampled
// baseline (max value), via linear interpolation of the half-crossings.
std::optional<double> dip_fwhm(const std::vector<double>& grid, const std::vector<double>& values);

struct SweepSettings {
    int n_fock = 6;
    Basis basis = Basis::traveling;
    int threads = 0;             // 0 -> hardware concurrency
    double trunc_gate = 1e-3;    // per-mode commutator-residual flag threshold
    SteadyStateOptions steady;
};

struct ScanLine {
    DriveSpec drive;                    // drive at the line's nominal detuning
    std::vector<double> laser_grid;     // Delta_cl values, rad/s
    std::vector<SpectrumPoint> points;
};

// T and R of a solved state: t = E - sqrt(2 ke) <a_cw>, r = -sqrt(2 ke) <a_ccw>.
std::pair<double, double> transmission_reflection(const DensityMatrix& rho,
                                                  const SystemParams& params,
                                                  const DriveSpec& drive, Basis basis);

// One steady-state solve per grid point; Delta_ca held fixed at the drive's value.
ScanLine scan_laser(const SystemParams& params, const DriveSpec& drive,
                    const std::vector<double>& laser_grid, const SweepSettings& settings);

struct MapRow {
    double cavity_detuning = 0.0;  // Delta_ca, rad/s
    std::vector<SpectrumPoint> points;
    PeakExtraction reflection_peaks;      // on the laser-QD axis
    double peak_reflection = 0.0;
    // Gap between the nearest sufficiently prominent reflection peaks on
    // either side of the exciton line; the avoided-crossing diagnostic.
    std::optional<double> exciton_straddle_gap;
};

struct CavityMap {
    std::vector<double> laser_grid;   // Delta_al values (laser-QD axis), rad/s
    std::vector<double> cavity_grid;  // Delta_ca values, rad/s
    std::vector<MapRow> rows;
};

CavityMap map_cavity_tuning(const SystemParams& params, const DriveSpec& drive,
                            const std::vector<double>& cavity_grid,
                            const std::vector<double>& laser_grid,
                            const SweepSettings& settings);

struct SaturationRow {
    double power_w = 0.0;
    double flux = 0.0;
    double n_cav_bare = 0.0;    // bare-cavity photon number at the nominal detuning
    double p_dropped_w = 0.0;
    std::optional<double> splitting;  // rad/s, between the two most prominent R peaks
    double peak_delta_r = 0.0;
    bool trunc_flag = false;
    std::vector<SpectrumPoint> points;
    std::vector<double> reflection_normalized;  // line normalized to unit maximum
};

struct SaturationSweep {
    std::vector<double> laser_grid;  // Delta_cl values, rad/s
    std::vector<SaturationRow> rows;
};

// Ascending powers (W); one laser scan per power at the drive's Delta_ca.
SaturationSweep power_sweep(const SystemParams& params, const DriveSpec& drive,
                            const std::vector<double>& powers_w,
                            const std::vector<double>& laser_grid,
                            const SweepSettings& settings);

// Deterministic work partition used by the sweep engines: fixed consecutive
// blocks handed to a worker pool. Exposed for the acceptance suite.
void parallel_blocks(int n_items, int block_size, int threads,
                     const std::function<void(int, int)>& run_block);
int resolve_thread_count(int requested);

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace wgmcqed

#endif
