#ifndef WGMCQED_HILBERT_HPP
#define WGMCQED_HILBERT_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <complex>
#include <stdexcept>

namespace wgmcqed {

using Complex = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Complex>;
using DenseMat = Eigen::MatrixXcd;
using DenseVec = Eigen::VectorXcd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Composite Hilbert space of the coupled system. Factor order is fixed:
// slot 0 = CW traveling mode, slot 1 = CCW traveling mode, slot 2 = emitter.
// Every embedding and every composite operator in the library references
// this order; the basis index is (i_cw * n_fock + i_ccw) * 2 + i_emitter.
struct SpaceLayout {
    int n_fock = 6;

    static constexpr int kSlotCw = 0;
    static constexpr int kSlotCcw = 1;
    static constexpr int kSlotEmitter = 2;
    static constexpr int kNumSlots = 3;

    explicit SpaceLayout(int n_fock_dim = 6) : n_fock(n_fock_dim) {
        if (n_fock < 2) {
            throw std::invalid_argument("SpaceLayout: n_fock must be >= 2");
        }
    }

    std::array<int, 3> mode_dims() const { return {n_fock, n_fock, 2}; }
    int factor_dim(int slot) const {
        if (slot < 0 || slot >= kNumSlots) {
            throw std::out_of_range("SpaceLayout: slot out of range");
        }
        return slot == kSlotEmitter ? 2 : n_fock;
    }
    int dim() const { return n_fock * n_fock * 2; }

    bool operator==(const SpaceLayout& other) const { return n_fock == other.n_fock; }
    bool operator!=(const SpaceLayout& other) const { return !(*this == other); }
};

// Sparse complex operator tied to a SpaceLayout. Arithmetic requires matching
// layouts; explicit zeros are pruned on construction. Immutable after
// construction and safe to share between threads.
class OperatorMatrix {
  public:
    OperatorMatrix(SpaceLayout layout, SpMat mat);

    const SpaceLayout& layout() const { return layout_; }
    const SpMat& matrix() const { return mat_; }
    int dim() const { return layout_.dim(); }
    int nonzeros() const { return static_cast<int>(mat_.nonZeros()); }

    OperatorMatrix adjoint() const;

    friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator*(Complex scale, const OperatorMatrix& a);

  private:
    SpaceLayout layout_;
    SpMat mat_;
};

void require_same_layout(const SpaceLayout& a, const SpaceLayout& b, const char* what);

// Single-factor building blocks (plain sparse matrices, no layout attached).
// annihilation: a[n-1, n] = sqrt(n); lower_sigma is the dim-2 special case.
SpMat annihilation(int dim);
SpMat lower_sigma();
SpMat identity_op(int dim);

// I x ... x op x ... x I with op at `slot`, in the fixed factor order.
OperatorMatrix embed(const SpMat& op, int slot, const SpaceLayout& layout);

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

Complex trace_of(const SpMat& m);

}  // namespace wgmcqed

#endif
