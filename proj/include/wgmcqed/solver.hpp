#ifndef WGMCQED_SOLVER_HPP
#define WGMCQED_SOLVER_HPP

#include "wgmcqed/hilbert.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <memory>
#include <vector>

namespace wgmcqed {

// Hermitian, unit-trace, positive-semidefinite state of the composite system.
struct DensityMatrix {
    SpaceLayout layout;
    DenseMat rho;

    DensityMatrix(SpaceLayout l, DenseMat r) : layout(l), rho(std::move(r)) {}

    double hermiticity_defect() const;   // max |rho - rho^dagger|
    double trace_defect() const;         // |tr(rho) - 1|
    double min_eigenvalue() const;       // smallest eigenvalue of (rho+rho^dag)/2

    // Throws std::runtime_error when the state fails its invariants.
    void validate(double herm_tol = 1e-10, double trace_tol = 1e-10,
                  double positivity_floor = -1e-8) const;
};

// Lindblad superoperator acting on column-stacked density matrices,
// vec(rho)[i + D*j] = rho(i, j):
//   L = -i[(I x H) - (H^T x I)]
//       + sum_k [ conj(C_k) x C_k - 1/2 I x (C_k^dag C_k) - 1/2 (C_k^dag C_k)^T x I ]
struct Liouvillian {
    SpaceLayout layout;
    SpMat sup;  // D^2 x D^2

    int state_dim() const { return layout.dim(); }
    double entry_scale() const;  // max |entry|, used for residual scales

    // L applied to a density matrix, returned as a matrix (drho/dt).
    DenseMat apply(const DenseMat& rho) const;
};

Liouvillian assemble_liouvillian(const OperatorMatrix& hamiltonian,
                                 const std::vector<OperatorMatrix>& collapse_ops);

struct SteadyStateOptions {
    // Accept when ||L vec(rho)||_inf < residual_factor * max|L entry|.
    double residual_factor = 1e-10;
    double herm_tol = 1e-10;
    double trace_tol = 1e-10;
    double positivity_floor = -1e-8;
    bool check_positivity = true;
};

// Direct path: trace row replaces row 0 of the (rate-rescaled) Liouvillian,
// then one sparse LU factorization. Deterministic.
DensityMatrix steady_state(const Liouvillian& liou, const SteadyStateOptions& opts = {});

// Iterative path for sweeps: ILUT-preconditioned BiCGSTAB that reuses the
// preconditioner and warm start across the consecutive points of one grid
// block, falling back to a fresh preconditioner and then to direct LU.
// Results depend only on the sequence of solves issued to one instance, never
// on thread scheduling, so sweep engines assign fixed grid blocks per instance.
class SweepSolver {
  public:
    explicit SweepSolver(SteadyStateOptions opts = {});
    ~SweepSolver();
    SweepSolver(SweepSolver&&) noexcept;
    SweepSolver& operator=(SweepSolver&&) noexcept;

    DensityMatrix solve(const Liouvillian& liou);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct EvolveOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double initial_dt = 0.0;   // 0 -> auto from the Liouvillian scale
    double max_trace_drift = 1e-8;
};

// Adaptive Dormand-Prince RK45 integration of dvec(rho)/dt = L vec(rho).
// Independent verification path for steady_state.
DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& liou, double t_final,
                     const EvolveOptions& opts = {});

Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op);

// |<[a, a^dag]>| - 1 per bosonic mode; equals n_fock * (top Fock level
// population), the truncation-leakage diagnostic.
struct TruncationResidual {
    double mode_cw = 0.0;
    double mode_ccw = 0.0;
    double max() const { return mode_cw > mode_ccw ? mode_cw : mode_ccw; }
};
TruncationResidual truncation_residual(const DensityMatrix& rho);

}  // namespace wgmcqed

#endif
