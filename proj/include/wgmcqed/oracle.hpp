#ifndef WGMCQED_ORACLE_HPP
#define WGMCQED_ORACLE_HPP

#include "wgmcqed/model.hpp"

namespace wgmcqed {

// Weak-excitation (sigma_z ~ -1) closure of the coupled-mode equations for
// the two traveling amplitudes and the exciton coherence. A deliberately
// separate solution path from the quantum master equation: the two must agree
// at low photon number, and that agreement is evidence rather than tautology.
struct LinearResponse {
    Complex alpha_cw;
    Complex alpha_ccw;
    Complex exciton_coherence;
    double transmission = 0.0;
    double reflection = 0.0;
    double residual = 0.0;        // l_inf residual of the 3x3 solve
    bool validity_advisory = false;  // set when predicted n_cav > 0.1 * m0
};

// Solves, at the drive's detunings,
//   (i D_cl + kappa_T) a_cw  + i gb a_ccw + i g e^{+i xi/2} s = sqrt(2 ke) E
//   (i D_cl + kappa_T) a_ccw + i gb a_cw  + i g e^{-i xi/2} s = 0
//   (i D_al + gamma_perp) s + i g (e^{-i xi/2} a_cw + e^{+i xi/2} a_ccw) = 0
// then T = |1 - sqrt(2 ke) a_cw / E|^2, R = |sqrt(2 ke) a_ccw / E|^2.
LinearResponse weak_drive_response(const SystemParams& params, const DriveSpec& drive);

}  // namespace wgmcqed

#endif
