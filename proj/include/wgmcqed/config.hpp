#ifndef WGMCQED_CONFIG_HPP
#define WGMCQED_CONFIG_HPP

#include "wgmcqed/model.hpp"
#include "wgmcqed/spectra.hpp"

#include <string>
#include <vector>

namespace wgmcqed {

// Flat-section key-value configuration. Canonical units at the file boundary:
// rates in GHz meaning rate/2pi, wavelength in nm, lifetime in ns, detunings
// in pm or GHz, powers in W. Unknown keys and duplicate keys are errors.
// Defaults reproduce the Table-1 parameter set of the modeled device.
struct RunConfig {
    // [system]
    double kappa_e_ghz = 0.171;
    double kappa_i_ghz = 0.91;
    double gamma_beta_ghz = 1.99;
    double xi_rad = 0.78539816339744831;  // pi/4
    // Direct coupling value consistent with the tabulated standing-wave pair
    // (|g_sw1| = 2.93 GHz, |g_sw2| = 1.21 GHz); set g_from_geometry to derive
    // it from (eta, lambda0, n_refr, tau_sp, v_tw) instead.
    double g_tw_ghz = 2.2425279379280561;
    bool g_from_geometry = false;
    double gamma_perp_ghz = 1.17;
    double gamma_par_ghz = 0.55;
    double lambda0_nm = 1300.0;
    double n_refr = 3.4;
    double tau_sp_ns = 1.0;
    double v_tw = 6.4;
    double eta = 0.21;

    // [drive]
    double power_w = 470e-12;
    double delta_ca_pm = 0.0;         // cavity-exciton detuning
    double laser_detuning_ghz = 0.0;  // nominal laser detuning from the bare cavity

    // [sweep]
    double laser_min_ghz = -12.0;
    double laser_max_ghz = 12.0;
    int laser_points = 241;
    double cavity_min_pm = -120.0;
    double cavity_max_pm = 120.0;
    int cavity_points = 21;
    std::vector<double> powers_w_list;    // explicit powers for cmd_saturation
    std::vector<double> ncav_targets;     // or bare-cavity photon-number targets

    // [solver]
    int n_fock = 6;
    std::string basis = "traveling";
    int threads = 0;
    double trunc_gate = 1e-3;
    double residual_factor = 1e-10;
    bool allow_truncation_ceiling = false;

    // [output]
    std::string out_dir = "out";
    int csv_precision = 10;

    SystemParams system_params() const;
    DriveSpec drive_spec() const;          // flux/detunings in internal units
    SweepSettings sweep_settings() const;
    Basis basis_enum() const;
    std::vector<double> laser_grid_rad() const;
    std::vector<double> cavity_grid_rad() const;
    // Power list in watts; ncav targets are converted at the nominal detuning.
    std::vector<double> resolved_powers_w() const;

    // Canonical text form; re-parsing it reproduces the same parameters.
    std::string echo() const;
};

RunConfig parse_config_text(const std::string& text, const std::string& origin);
RunConfig parse_config_file(const std::string& path);

}  // namespace wgmcqed

#endif
