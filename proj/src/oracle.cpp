#include "wgmcqed/oracle.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace wgmcqed {

LinearResponse weak_drive_response(const SystemParams& params, const DriveSpec& drive) {
    params.validate();
    const Complex i(0.0, 1.0);
    const double kappa_t = params.kappa_total();
    const Complex phase_p = std::exp(i * (params.xi / 2.0));
    const Complex phase_m = std::exp(-i * (params.xi / 2.0));
    const double g = params.g_tw;

    Eigen::Matrix3cd m;
    m << i * drive.laser_detuning + kappa_t, i * params.gamma_beta, i * g * phase_p,
         i * params.gamma_beta, i * drive.laser_detuning + kappa_t, i * g * phase_m,
         i * g * phase_m, i * g * phase_p, i * drive.exciton_detuning + params.gamma_perp;

    // E drops out of T and R; solve at unit amplitude.
    Eigen::Vector3cd rhs;
    rhs << std::sqrt(2.0 * params.kappa_e), 0.0, 0.0;

    Eigen::FullPivLU<Eigen::Matrix3cd> lu(m);
    if (!lu.isInvertible()) {
        throw std::runtime_error("weak_drive_response: singular coupled-mode system "
                                 "(all damping rates zero?)");
    }
    const Eigen::Vector3cd x = lu.solve(rhs);

    LinearResponse out;
    const double e_scale = drive.flux > 0 ? drive.amplitude() : 1.0;
    out.alpha_cw = x(0) * e_scale;
    out.alpha_ccw = x(1) * e_scale;
    out.exciton_coherence = x(2) * e_scale;
    out.residual = (m * x - rhs).cwiseAbs().maxCoeff();
    const Complex t_amp = Complex(1.0, 0.0) - std::sqrt(2.0 * params.kappa_e) * x(0);
    const Complex r_amp = -std::sqrt(2.0 * params.kappa_e) * x(1);
    out.transmission = std::norm(t_amp);
    out.reflection = std::norm(r_amp);

    if (drive.flux > 0 && params.g_tw > 0) {
        const double n_pred = std::norm(out.alpha_cw) + std::norm(out.alpha_ccw);
        const double m0 = critical_numbers(params).m0;
        out.validity_advisory = n_pred > 0.1 * m0;
    }
    return out;
}

}  // namespace wgmcqed
