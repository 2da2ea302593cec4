#include "wgmcqed/model.hpp"

#include <cmath>

namespace wgmcqed {

namespace {
const Complex kImag(0.0, 1.0);
}

void SystemParams::validate() const {
    if (kappa_e < 0 || kappa_i < 0 || gamma_beta < 0 || gamma_perp < 0 || gamma_par < 0) {
        throw std::invalid_argument("SystemParams: rates must be non-negative");
    }
    if (kappa_total() <= 0) {
        throw std::invalid_argument("SystemParams: kappa_e + kappa_i must be positive");
    }
    if (gamma_pure() < -1e-12 * gamma_perp) {
        throw std::invalid_argument(
            "SystemParams: gamma_perp must be >= gamma_par/2 (pure dephasing >= 0)");
    }
    if (eta < 0 || eta > 1) {
        throw std::invalid_argument("SystemParams: eta must lie in [0, 1]");
    }
    if (v_tw <= 0 || lambda0 <= 0 || n_refr <= 0 || tau_sp <= 0) {
        throw std::invalid_argument("SystemParams: geometry parameters must be positive");
    }
    if (!std::isfinite(g_tw) || g_tw < 0) {
        throw std::invalid_argument("SystemParams: g_tw must be finite and non-negative");
    }
}

double DriveSpec::amplitude() const {
    if (flux < 0) {
        throw std::invalid_argument("DriveSpec: flux must be non-negative");
    }
    return std::sqrt(flux);
}

double g_tw_from_geometry(double eta, double lambda0, double n_refr, double tau_sp,
                          double v_tw_units) {
    if (eta < 0 || eta > 1) {
        throw std::domain_error("g_tw_from_geometry: eta must lie in [0, 1]");
    }
    if (lambda0 <= 0 || n_refr <= 0 || tau_sp <= 0 || v_tw_units <= 0) {
        throw std::domain_error("g_tw_from_geometry: arguments must be positive");
    }
    const double v_abs = v_tw_units * std::pow(lambda0 / n_refr, 3);
    const double num = 3.0 * constants::kSpeedOfLight * lambda0 * lambda0;
    const double den = 8.0 * M_PI * std::pow(n_refr, 3) * tau_sp * v_abs;
    return eta * std::sqrt(num / den);
}

std::pair<Complex, Complex> standing_couplings(double g_tw, double xi) {
    const Complex phase = std::exp(kImag * xi);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return {g_tw * (1.0 + phase) * inv_sqrt2, g_tw * (1.0 - phase) * inv_sqrt2};
}

CriticalNumbers critical_numbers(const SystemParams& params) {
    const auto [g_sw1, g_sw2] = standing_couplings(params.g_tw, params.xi);
    const double g = std::abs(g_sw1);
    if (g <= 0) {
        throw std::domain_error("critical_numbers: degenerate coupling (|g_sw1| = 0)");
    }
    CriticalNumbers out;
    out.n0 = 2.0 * params.kappa_total() * params.gamma_perp / (g * g);
    out.m0 = params.gamma_par * params.gamma_perp / (4.0 * g * g);
    return out;
}

double photon_flux_from_power(double power_watts, double lambda0) {
    if (power_watts < 0) {
        throw std::domain_error("photon_flux_from_power: power must be non-negative");
    }
    return power_watts * lambda0 / (constants::kPlanck * constants::kSpeedOfLight);
}

double power_from_photon_flux(double flux, double lambda0) {
    return flux * constants::kPlanck * constants::kSpeedOfLight / lambda0;
}

OperatorMatrix build_hamiltonian(const SystemParams& params, const DriveSpec& drive,
                                 const SpaceLayout& layout, Basis basis) {
    params.validate();
    if (!std::isfinite(drive.flux) || !std::isfinite(drive.laser_detuning) ||
        !std::isfinite(drive.exciton_detuning)) {
        throw std::invalid_argument("build_hamiltonian: drive values must be finite");
    }

    const int nf = layout.n_fock;
    const OperatorMatrix a0 = embed(annihilation(nf), SpaceLayout::kSlotCw, layout);
    const OperatorMatrix a1 = embed(annihilation(nf), SpaceLayout::kSlotCcw, layout);
    const OperatorMatrix sm = embed(lower_sigma(), SpaceLayout::kSlotEmitter, layout);
    const OperatorMatrix sp = sm.adjoint();
    const OperatorMatrix a0d = a0.adjoint();
    const OperatorMatrix a1d = a1.adjoint();

    const double dcl = drive.laser_detuning;
    const double dal = drive.exciton_detuning;
    const double e_amp = drive.amplitude();
    const Complex drive_coeff = kImag * std::sqrt(2.0 * params.kappa_e);

    const SpMat n0 = SpMat(a0d.matrix() * a0.matrix());
    const SpMat n1 = SpMat(a1d.matrix() * a1.matrix());
    const SpMat proj_e = SpMat(sp.matrix() * sm.matrix());

    SpMat h(layout.dim(), layout.dim());
    if (basis == Basis::traveling) {
        const Complex cpl_cw = params.g_tw * std::exp(-kImag * (params.xi / 2.0));
        const Complex cpl_ccw = params.g_tw * std::exp(kImag * (params.xi / 2.0));
        h = dcl * (n0 + n1) + dal * proj_e;
        h += params.gamma_beta * SpMat(a0d.matrix() * a1.matrix() + a1d.matrix() * a0.matrix());
        SpMat coupling = SpMat(cpl_cw * SpMat(sp.matrix() * a0.matrix()) +
                               cpl_ccw * SpMat(sp.matrix() * a1.matrix()));
        h += coupling + SpMat(SpMat(coupling.adjoint()));
        h += (drive_coeff * e_amp) * SpMat(a0d.matrix() - a0.matrix());
    } else {
        // c_pm = (a_cw +/- a_ccw)/sqrt(2); slots 0/1 hold c_+/c_-. Coupling
        // coefficients follow from conjugating the traveling construction by
        // that unitary, so the two bases are entrywise equivalent.
        const Complex cpl_plus = std::sqrt(2.0) * params.g_tw * std::cos(params.xi / 2.0);
        const Complex cpl_minus = -kImag * std::sqrt(2.0) * params.g_tw * std::sin(params.xi / 2.0);
        h = (dcl + params.gamma_beta) * n0 + (dcl - params.gamma_beta) * n1 + dal * proj_e;
        SpMat coupling = SpMat(cpl_plus * SpMat(sp.matrix() * a0.matrix()) +
                               cpl_minus * SpMat(sp.matrix() * a1.matrix()));
        h += coupling + SpMat(SpMat(coupling.adjoint()));
        h += (drive_coeff * e_amp / std::sqrt(2.0)) *
             SpMat(a0d.matrix() + a1d.matrix() - a0.matrix() - a1.matrix());
    }
    return OperatorMatrix(layout, std::move(h));
}

std::vector<OperatorMatrix> build_collapse_ops(const SystemParams& params,
                                               const SpaceLayout& layout) {
    params.validate();
    const int nf = layout.n_fock;
    const double kappa_t = params.kappa_total();
    const double gamma_p = std::max(params.gamma_pure(), 0.0);

    const OperatorMatrix a0 = embed(annihilation(nf), SpaceLayout::kSlotCw, layout);
    const OperatorMatrix a1 = embed(annihilation(nf), SpaceLayout::kSlotCcw, layout);
    const OperatorMatrix sm = embed(lower_sigma(), SpaceLayout::kSlotEmitter, layout);
    const OperatorMatrix proj_e = sm.adjoint() * sm;

    std::vector<OperatorMatrix> ops;
    ops.reserve(4);
    ops.push_back(Complex(std::sqrt(2.0 * kappa_t), 0.0) * a0);
    ops.push_back(Complex(std::sqrt(2.0 * kappa_t), 0.0) * a1);
    ops.push_back(Complex(std::sqrt(params.gamma_par), 0.0) * sm);
    if (gamma_p > 0) {
        ops.push_back(Complex(std::sqrt(2.0 * gamma_p), 0.0) * proj_e);
    }
    return ops;
}

std::pair<OperatorMatrix, OperatorMatrix> waveguide_mode_ops(const SpaceLayout& layout,
                                                             Basis basis) {
    const OperatorMatrix a0 = embed(annihilation(layout.n_fock), SpaceLayout::kSlotCw, layout);
    const OperatorMatrix a1 = embed(annihilation(layout.n_fock), SpaceLayout::kSlotCcw, layout);
    if (basis == Basis::traveling) {
        return {a0, a1};
    }
    const Complex inv_sqrt2(1.0 / std::sqrt(2.0), 0.0);
    return {inv_sqrt2 * (a0 + a1), inv_sqrt2 * (a0 - a1)};
}

BareCavityResult bare_cavity_photon_number(const SystemParams& params, const DriveSpec& drive) {
    const double kappa_t = params.kappa_total();
    const double e_amp = drive.amplitude();
    Eigen::Matrix2cd m;
    m << kImag * drive.laser_detuning + kappa_t, kImag * params.gamma_beta,
         kImag * params.gamma_beta, kImag * drive.laser_detuning + kappa_t;
    Eigen::Vector2cd rhs;
    rhs << std::sqrt(2.0 * params.kappa_e) * e_amp, 0.0;
    Eigen::Vector2cd alpha = m.fullPivLu().solve(rhs);

    BareCavityResult out;
    out.alpha_cw = alpha(0);
    out.alpha_ccw = alpha(1);
    out.n_cav = std::norm(alpha(0)) + std::norm(alpha(1));
    out.p_dropped = constants::kHBar * params.omega0() * 2.0 * params.kappa_i * out.n_cav;
    return out;
}

double flux_for_bare_photon_number(const SystemParams& params, double delta_cl,
                                   double n_target) {
    if (n_target < 0) {
        throw std::domain_error("flux_for_bare_photon_number: target must be non-negative");
    }
    DriveSpec unit;
    unit.flux = 1.0;
    unit.laser_detuning = delta_cl;
    unit.exciton_detuning = delta_cl;
    const double n_unit = bare_cavity_photon_number(params, unit).n_cav;
    if (n_unit <= 0) {
        throw std::domain_error("flux_for_bare_photon_number: cavity is not driveable");
    }
    return n_target / n_unit;
}

}  // namespace wgmcqed
