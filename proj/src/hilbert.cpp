#include "wgmcqed/hilbert.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <string>

namespace wgmcqed {

OperatorMatrix::OperatorMatrix(SpaceLayout layout, SpMat mat)
    : layout_(layout), mat_(std::move(mat)) {
    if (mat_.rows() != layout_.dim() || mat_.cols() != layout_.dim()) {
        throw std::invalid_argument("OperatorMatrix: matrix dimension " +
                                    std::to_string(mat_.rows()) + "x" +
                                    std::to_string(mat_.cols()) +
                                    " does not match layout dimension " +
                                    std::to_string(layout_.dim()));
    }
    mat_.prune(Complex(0, 0));
    mat_.makeCompressed();
}

OperatorMatrix OperatorMatrix::adjoint() const {
    return OperatorMatrix(layout_, SpMat(mat_.adjoint()));
}

void require_same_layout(const SpaceLayout& a, const SpaceLayout& b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": layout mismatch (n_fock " +
                                    std::to_string(a.n_fock) + " vs " +
                                    std::to_string(b.n_fock) + ")");
    }
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_layout(a.layout_, b.layout_, "operator+");
    return OperatorMatrix(a.layout_, SpMat(a.mat_ + b.mat_));
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_layout(a.layout_, b.layout_, "operator-");
    return OperatorMatrix(a.layout_, SpMat(a.mat_ - b.mat_));
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_layout(a.layout_, b.layout_, "operator*");
    return OperatorMatrix(a.layout_, SpMat(a.mat_ * b.mat_));
}

OperatorMatrix operator*(Complex scale, const OperatorMatrix& a) {
    return OperatorMatrix(a.layout_, SpMat(scale * a.mat_));
}

SpMat annihilation(int dim) {
    if (dim < 2) {
        throw std::invalid_argument("annihilation: dim must be >= 2");
    }
    SpMat a(dim, dim);
    a.reserve(Eigen::VectorXi::Constant(dim, 1));
    for (int n = 1; n < dim; ++n) {
        a.insert(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    a.makeCompressed();
    return a;
}

SpMat lower_sigma() { return annihilation(2); }

SpMat identity_op(int dim) {
    SpMat id(dim, dim);
    id.setIdentity();
    return id;
}

OperatorMatrix embed(const SpMat& op, int slot, const SpaceLayout& layout) {
    if (slot < 0 || slot >= SpaceLayout::kNumSlots) {
        throw std::out_of_range("embed: slot out of range");
    }
    if (op.rows() != layout.factor_dim(slot) || op.cols() != layout.factor_dim(slot)) {
        throw std::invalid_argument("embed: operator dimension does not match factor " +
                                    std::to_string(slot));
    }
    SpMat result = (slot == 0) ? op : identity_op(layout.factor_dim(0));
    for (int s = 1; s < SpaceLayout::kNumSlots; ++s) {
        const SpMat& factor = (s == slot) ? op : identity_op(layout.factor_dim(s));
        result = Eigen::kroneckerProduct(result, factor).eval();
    }
    return OperatorMatrix(layout, std::move(result));
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_layout(a.layout(), b.layout(), "commutator");
    return OperatorMatrix(a.layout(), SpMat(a.matrix() * b.matrix() - b.matrix() * a.matrix()));
}

Complex trace_of(const SpMat& m) {
    Complex tr(0, 0);
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            if (it.row() == it.col()) tr += it.value();
        }
    }
    return tr;
}

}  // namespace wgmcqed
