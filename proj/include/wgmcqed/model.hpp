#ifndef WGMCQED_MODEL_HPP
#define WGMCQED_MODEL_HPP

#include "wgmcqed/hilbert.hpp"

#include <utility>
#include <vector>

namespace wgmcqed {

namespace constants {
inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kPlanck = 6.62607015e-34;           // J s
inline constexpr double kHBar = kPlanck / kTwoPi;           // J s
}  // namespace constants

// All rates and detunings are angular frequencies in rad/s. Config-facing
// code converts from the GHz-as-rate/2pi convention at the boundary.
struct SystemParams {
    double kappa_e = 0.0;      // fiber-cavity field coupling rate
    double kappa_i = 0.0;      // intrinsic cavity field decay rate
    double gamma_beta = 0.0;   // CW/CCW backscattering rate (real, gauge-fixed)
    double xi = 0.0;           // backscattering/exciton relative phase, rad
    double g_tw = 0.0;         // traveling-wave coherent coupling rate
    double gamma_perp = 0.0;   // total transverse exciton dephasing rate
    double gamma_par = 0.0;    // exciton energy decay rate
    double lambda0 = 1300e-9;  // free-space wavelength, m
    double n_refr = 3.4;       // material refractive index
    double tau_sp = 1e-9;      // spontaneous emission lifetime, s
    double v_tw = 6.4;         // traveling-wave mode volume, (lambda/n)^3 units
    double eta = 0.21;         // dipole position/orientation factor

    double kappa_total() const { return kappa_e + kappa_i; }
    double gamma_pure() const { return gamma_perp - gamma_par / 2.0; }
    double omega0() const { return kTwoPi * constants::kSpeedOfLight / lambda0; }

    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

// Laser drive and the two detuning axes. laser_detuning is the laser relative
// to the bare traveling-wave cavity frequency; exciton_detuning is the laser
// relative to the exciton. Both enter the rotating-frame Hamiltonian directly.
struct DriveSpec {
    double flux = 0.0;             // input photon flux, 1/s
    double laser_detuning = 0.0;   // Delta_cl, rad/s
    double exciton_detuning = 0.0; // Delta_al, rad/s

    double cavity_exciton_detuning() const { return exciton_detuning - laser_detuning; }
    double amplitude() const;      // E = sqrt(flux), real non-negative

    // Same drive moved to another laser detuning at fixed cavity-exciton detuning.
    DriveSpec at_laser_detuning(double delta_cl) const {
        DriveSpec d = *this;
        double delta_ca = cavity_exciton_detuning();
        d.laser_detuning = delta_cl;
        d.exciton_detuning = delta_cl + delta_ca;
        return d;
    }
};

enum class Basis { traveling, standing };

double g_tw_from_geometry(double eta, double lambda0, double n_refr, double tau_sp,
                          double v_tw_units);

// g_sw1 = g_tw (1 + e^{i xi})/sqrt(2), g_sw2 = g_tw (1 - e^{i xi})/sqrt(2)
std::pair<Complex, Complex> standing_couplings(double g_tw, double xi);

struct CriticalNumbers {
    double n0 = 0.0;  // critical atom number, 2 kappa_T gamma_perp / g^2
    double m0 = 0.0;  // saturation photon number, gamma_par gamma_perp / (4 g^2)
};
CriticalNumbers critical_numbers(const SystemParams& params);

double photon_flux_from_power(double power_watts, double lambda0);
double power_from_photon_flux(double flux, double lambda0);

// Rotating frame at the laser frequency; gauge with real backscattering and
// the physical phase xi split symmetrically over the two QD coupling terms.
OperatorMatrix build_hamiltonian(const SystemParams& params, const DriveSpec& drive,
                                 const SpaceLayout& layout, Basis basis);

// sqrt(2 kappa_T) a_cw, sqrt(2 kappa_T) a_ccw, sqrt(gamma_par) sigma_minus,
// sqrt(2 gamma_p) sigma_plus sigma_minus. Form is identical in both bases.
std::vector<OperatorMatrix> build_collapse_ops(const SystemParams& params,
                                               const SpaceLayout& layout);

// Annihilation operators of the waveguide-facing CW/CCW amplitudes, expressed
// in whichever basis the Hamiltonian was built in.
std::pair<OperatorMatrix, OperatorMatrix> waveguide_mode_ops(const SpaceLayout& layout,
                                                             Basis basis);

struct BareCavityResult {
    double n_cav = 0.0;       // <n_cw + n_ccw> of the empty cavity
    double p_dropped = 0.0;   // hbar omega 2 kappa_i n_cav, W
    Complex alpha_cw;
    Complex alpha_ccw;
};
// Analytic 2x2 steady state of the driven empty cavity at drive.laser_detuning.
BareCavityResult bare_cavity_photon_number(const SystemParams& params, const DriveSpec& drive);

// Input flux whose bare-cavity photon number at delta_cl equals n_target.
double flux_for_bare_photon_number(const SystemParams& params, double delta_cl,
                                   double n_target);

}  // namespace wgmcqed

#endif
