#include "wgmcqed/solver.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wgmcqed {

namespace {

const Complex kImag(0.0, 1.0);

// Row 0 of the rate-rescaled Liouvillian replaced by the trace functional.
// Rescaling by the largest entry keeps the constrained system O(1) so that
// Krylov residual targets are meaningful in double precision.
SpMat constrained_system(const Liouvillian& liou, double scale) {
    const int d = liou.state_dim();
    const int dim2 = d * d;
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(liou.sup.nonZeros() + d);
    const double inv_scale = 1.0 / scale;
    for (int k = 0; k < liou.sup.outerSize(); ++k) {
        for (SpMat::InnerIterator it(liou.sup, k); it; ++it) {
            if (it.row() == 0) continue;
            trips.emplace_back(it.row(), it.col(), it.value() * inv_scale);
        }
    }
    for (int j = 0; j < d; ++j) {
        trips.emplace_back(0, j * (d + 1), Complex(1.0, 0.0));
    }
    SpMat m(dim2, dim2);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

DenseVec unit_rhs(int dim2) {
    DenseVec b = DenseVec::Zero(dim2);
    b(0) = Complex(1.0, 0.0);
    return b;
}

// Right-preconditioned BiCGSTAB; returns true when ||b - A x||_2 <= tol.
bool bicgstab(const SpMat& a, const DenseVec& b, const Eigen::IncompleteLUT<Complex>& precond,
              DenseVec& x, double tol, int max_iters) {
    DenseVec r = b - a * x;
    const double target = tol;
    if (r.norm() <= target) return true;
    DenseVec r0 = r;
    Complex rho(1, 0), alpha(1, 0), omega(1, 0);
    DenseVec v = DenseVec::Zero(b.size());
    DenseVec p = DenseVec::Zero(b.size());
    const double breakdown = 1e-300;
    for (int it = 0; it < max_iters; ++it) {
        Complex rho1 = r0.dot(r);
        if (std::abs(rho1) < breakdown) return false;
        if (it == 0) {
            p = r;
        } else {
            Complex beta = (rho1 / rho) * (alpha / omega);
            p = r + beta * (p - omega * v);
        }
        rho = rho1;
        DenseVec y = precond.solve(p);
        v = a * y;
        Complex r0v = r0.dot(v);
        if (std::abs(r0v) < breakdown) return false;
        alpha = rho1 / r0v;
        DenseVec s = r - alpha * v;
        if (s.norm() <= target) {
            x += alpha * y;
            return true;
        }
        DenseVec z = precond.solve(s);
        DenseVec t = a * z;
        double tt = t.squaredNorm();
        if (tt < breakdown) return false;
        omega = t.dot(s) / tt;
        x += alpha * y + omega * z;
        r = s - omega * t;
        if (r.norm() <= target) return true;
        if (std::abs(omega) < breakdown) return false;
    }
    return false;
}

DensityMatrix finish_state(const Liouvillian& liou, const DenseVec& v, double scale,
                           const SteadyStateOptions& opts) {
    const int d = liou.state_dim();
    const DenseVec resid = liou.sup * v;
    const double res_inf = resid.lpNorm<Eigen::Infinity>();
    if (!(res_inf < opts.residual_factor * scale)) {
        throw std::runtime_error("steady_state: residual " + std::to_string(res_inf) +
                                 " exceeds tolerance " +
                                 std::to_string(opts.residual_factor * scale) +
                                 " (non-unique steady state or solver failure)");
    }
    DenseMat rho = Eigen::Map<const DenseMat>(v.data(), d, d);
    rho = DenseMat(0.5 * (rho + rho.adjoint()));
    const double tr = rho.trace().real();
    if (!std::isfinite(tr) || std::abs(tr) < 1e-14) {
        throw std::runtime_error("steady_state: degenerate trace");
    }
    rho /= tr;
    DensityMatrix out(liou.layout, std::move(rho));
    out.validate(opts.herm_tol, opts.trace_tol,
                 opts.check_positivity ? opts.positivity_floor : -1.0);
    return out;
}

DenseVec direct_solve(const SpMat& m, const DenseVec& b) {
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(m);
    lu.factorize(m);
    if (lu.info() != Eigen::Success) {
        throw std::runtime_error("steady_state: sparse LU factorization failed "
                                 "(non-unique steady state?)");
    }
    DenseVec x = lu.solve(b);
    if (lu.info() != Eigen::Success) {
        throw std::runtime_error("steady_state: sparse LU solve failed");
    }
    return x;
}

}  // namespace

double DensityMatrix::hermiticity_defect() const {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::trace_defect() const { return std::abs(rho.trace() - Complex(1, 0)); }

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<DenseMat> es(DenseMat(0.5 * (rho + rho.adjoint())),
                                               Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double herm_tol, double trace_tol, double positivity_floor) const {
    if (hermiticity_defect() > herm_tol) {
        throw std::runtime_error("DensityMatrix: hermiticity defect " +
                                 std::to_string(hermiticity_defect()));
    }
    if (trace_defect() > trace_tol) {
        throw std::runtime_error("DensityMatrix: trace defect " +
                                 std::to_string(trace_defect()));
    }
    if (positivity_floor <= 0.0) {
        const double min_ev = min_eigenvalue();
        if (min_ev < positivity_floor) {
            throw std::runtime_error("DensityMatrix: negative eigenvalue " +
                                     std::to_string(min_ev));
        }
    }
}

double Liouvillian::entry_scale() const {
    double scale = 0.0;
    for (int k = 0; k < sup.outerSize(); ++k) {
        for (SpMat::InnerIterator it(sup, k); it; ++it) {
            scale = std::max(scale, std::abs(it.value()));
        }
    }
    return scale > 0 ? scale : 1.0;
}

DenseMat Liouvillian::apply(const DenseMat& rho) const {
    const int d = state_dim();
    if (rho.rows() != d || rho.cols() != d) {
        throw std::invalid_argument("Liouvillian::apply: dimension mismatch");
    }
    const DenseVec v = Eigen::Map<const DenseVec>(rho.data(), d * d);
    const DenseVec w = sup * v;
    return Eigen::Map<const DenseMat>(w.data(), d, d);
}

Liouvillian assemble_liouvillian(const OperatorMatrix& hamiltonian,
                                 const std::vector<OperatorMatrix>& collapse_ops) {
    const SpaceLayout& layout = hamiltonian.layout();
    const int d = layout.dim();
    const SpMat id = identity_op(d);
    const SpMat& h = hamiltonian.matrix();

    SpMat sup = SpMat(-kImag * (Eigen::kroneckerProduct(id, h).eval() -
                                Eigen::kroneckerProduct(SpMat(h.transpose()), id).eval()));
    for (const OperatorMatrix& c : collapse_ops) {
        require_same_layout(layout, c.layout(), "assemble_liouvillian");
        const SpMat& cm = c.matrix();
        const SpMat cdc = SpMat(cm.adjoint() * cm);
        sup += Eigen::kroneckerProduct(SpMat(cm.conjugate()), cm).eval();
        sup -= SpMat(0.5 * Eigen::kroneckerProduct(id, cdc).eval());
        sup -= SpMat(0.5 * Eigen::kroneckerProduct(SpMat(cdc.transpose()), id).eval());
    }
    sup.prune(Complex(0, 0));
    sup.makeCompressed();
    return Liouvillian{layout, std::move(sup)};
}

DensityMatrix steady_state(const Liouvillian& liou, const SteadyStateOptions& opts) {
    const double scale = liou.entry_scale();
    const SpMat m = constrained_system(liou, scale);
    const DenseVec b = unit_rhs(liou.state_dim() * liou.state_dim());
    const DenseVec x = direct_solve(m, b);
    return finish_state(liou, x, scale, opts);
}

struct SweepSolver::Impl {
    SteadyStateOptions opts;
    Eigen::IncompleteLUT<Complex> precond;
    bool has_precond = false;
    DenseVec warm;
    // Converged Krylov solves are much cheaper than a preconditioner rebuild,
    // so the preconditioner is kept until the iteration count degrades.
    static constexpr int kReuseMaxIters = 80;
    static constexpr int kFreshMaxIters = 400;
    static constexpr double kDropTol = 1e-5;
    static constexpr int kFillFactor = 30;
};

SweepSolver::SweepSolver(SteadyStateOptions opts) : impl_(std::make_unique<Impl>()) {
    impl_->opts = opts;
}
SweepSolver::~SweepSolver() = default;
SweepSolver::SweepSolver(SweepSolver&&) noexcept = default;
SweepSolver& SweepSolver::operator=(SweepSolver&&) noexcept = default;

DensityMatrix SweepSolver::solve(const Liouvillian& liou) {
    const double scale = liou.entry_scale();
    const SpMat m = constrained_system(liou, scale);
    const int dim2 = liou.state_dim() * liou.state_dim();
    const DenseVec b = unit_rhs(dim2);
    // The constrained rows are O(1), so an absolute l2 target of 1e-12 leaves
    // an order of magnitude below the 1e-10 * scale acceptance residual.
    const double tol = 1e-12;

    DenseVec x;
    bool ok = false;
    if (impl_->has_precond) {
        x = (impl_->warm.size() == dim2) ? impl_->warm : DenseVec(b);
        ok = bicgstab(m, b, impl_->precond, x, tol, Impl::kReuseMaxIters);
    }
    if (!ok) {
        impl_->precond.setDroptol(Impl::kDropTol);
        impl_->precond.setFillfactor(Impl::kFillFactor);
        impl_->precond.compute(m);
        impl_->has_precond = (impl_->precond.info() == Eigen::Success);
        if (impl_->has_precond) {
            x = (impl_->warm.size() == dim2) ? impl_->warm : DenseVec(b);
            ok = bicgstab(m, b, impl_->precond, x, tol, Impl::kFreshMaxIters);
        }
    }
    if (!ok) {
        x = direct_solve(m, b);
    }
    impl_->warm = x;
    return finish_state(liou, x, scale, impl_->opts);
}

DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& liou, double t_final,
                     const EvolveOptions& opts) {
    require_same_layout(rho0.layout, liou.layout, "evolve");
    if (t_final < 0) {
        throw std::invalid_argument("evolve: t_final must be non-negative");
    }
    const int d = liou.state_dim();
    DenseVec y = Eigen::Map<const DenseVec>(rho0.rho.data(), d * d);
    if (t_final == 0) {
        return DensityMatrix(liou.layout, rho0.rho);
    }
    const double trace_start = rho0.rho.trace().real();

    // Dormand-Prince 5(4) coefficients.
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const double scale = liou.entry_scale();
    double dt = opts.initial_dt > 0 ? opts.initial_dt : 0.01 / scale;
    const double dt_min = t_final * 1e-15;
    double t = 0.0;
    DenseVec k1 = liou.sup * y;
    while (t < t_final) {
        if (dt < dt_min) {
            throw std::runtime_error("evolve: step size underflow at t = " + std::to_string(t));
        }
        if (t + dt > t_final) dt = t_final - t;
        const DenseVec k2 = liou.sup * DenseVec(y + dt * a21 * k1);
        const DenseVec k3 = liou.sup * DenseVec(y + dt * (a31 * k1 + a32 * k2));
        const DenseVec k4 = liou.sup * DenseVec(y + dt * (a41 * k1 + a42 * k2 + a43 * k3));
        const DenseVec k5 =
            liou.sup * DenseVec(y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const DenseVec k6 = liou.sup * DenseVec(y + dt * (a61 * k1 + a62 * k2 + a63 * k3 +
                                                          a64 * k4 + a65 * k5));
        const DenseVec ynew =
            y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const DenseVec k7 = liou.sup * ynew;
        const DenseVec err_vec =
            dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (int i = 0; i < err_vec.size(); ++i) {
            const double sc =
                opts.abs_tol + opts.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
            err = std::max(err, std::abs(err_vec(i)) / sc);
        }
        if (err <= 1.0) {
            t += dt;
            y = ynew;
            k1 = k7;  // FSAL
        }
        const double factor = (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        dt *= std::clamp(factor, 0.2, 5.0);
    }

    DenseMat rho = Eigen::Map<const DenseMat>(y.data(), d, d);
    const double drift = std::abs(rho.trace().real() - trace_start);
    if (drift > opts.max_trace_drift) {
        throw std::runtime_error("evolve: trace drift " + std::to_string(drift) +
                                 " exceeds bound");
    }
    return DensityMatrix(liou.layout, std::move(rho));
}

Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op) {
    require_same_layout(rho.layout, op.layout(), "expectation");
    Complex out(0, 0);
    const SpMat& m = op.matrix();
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            out += rho.rho(it.col(), it.row()) * it.value();
        }
    }
    return out;
}

TruncationResidual truncation_residual(const DensityMatrix& rho) {
    const int nf = rho.layout.n_fock;
    double pop_cw = 0.0;
    double pop_ccw = 0.0;
    for (int i_cw = 0; i_cw < nf; ++i_cw) {
        for (int i_ccw = 0; i_ccw < nf; ++i_ccw) {
            for (int i_em = 0; i_em < 2; ++i_em) {
                const int idx = (i_cw * nf + i_ccw) * 2 + i_em;
                const double p = rho.rho(idx, idx).real();
                if (i_cw == nf - 1) pop_cw += p;
                if (i_ccw == nf - 1) pop_ccw += p;
            }
        }
    }
    TruncationResidual out;
    out.mode_cw = nf * std::abs(pop_cw);
    out.mode_ccw = nf * std::abs(pop_ccw);
    return out;
}

}  // namespace wgmcqed
