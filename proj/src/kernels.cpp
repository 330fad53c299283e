// kernels.cpp

#include "opk/kernels.hpp"

#include "opk/error.hpp"

#include <algorithm>
#include <cmath>

namespace opk {

namespace {

std::vector<std::string> default_labels(std::size_t m) {
    std::vector<std::string> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) out.push_back("s" + std::to_string(i));
    return out;
}

void check_index(const OperatorKernel& k, std::size_t i) {
    if (i >= k.size())
        throw Error(ErrorKind::DimensionMismatch, "point index " + std::to_string(i) + " out of range");
}

} // namespace

OperatorKernel::OperatorKernel(std::size_t dim, std::vector<std::string> labels,
                               std::vector<ComplexMatrix> blocks)
    : dim_(dim), labels_(std::move(labels)), blocks_(std::move(blocks)) {
    const std::size_t m = labels_.size();
    if (blocks_.size() != m * m)
        throw Error(ErrorKind::DimensionMismatch, "kernel: expected " + std::to_string(m * m) + " blocks, got " +
                                                      std::to_string(blocks_.size()));
    const auto d = static_cast<Eigen::Index>(dim_);
    for (const auto& b : blocks_) {
        if (b.rows() != d || b.cols() != d)
            throw Error(ErrorKind::DimensionMismatch, "kernel: block is not " + std::to_string(dim_) + "x" +
                                                          std::to_string(dim_));
        if (!b.allFinite()) throw Error(ErrorKind::InvalidArgument, "kernel: non-finite entry");
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const ComplexMatrix& kij = blocks_[i * m + j];
            const ComplexMatrix& kji = blocks_[j * m + i];
            const double scale = std::max({1.0, kij.norm(), kji.norm()});
            if ((kji - kij.adjoint()).norm() > kSymmetryTol * scale)
                throw Error(ErrorKind::NotHermitian, "kernel: K(" + labels_[j] + "," + labels_[i] +
                                                         ") != K(" + labels_[i] + "," + labels_[j] + ")*");
        }
    }
}

OperatorKernel OperatorKernel::from_factors(const std::vector<ComplexMatrix>& factors,
                                            std::vector<std::string> labels) {
    if (factors.empty()) throw Error(ErrorKind::EmptyInput, "from_factors: no factor blocks");
    const std::size_t m = factors.size();
    if (labels.empty()) labels = default_labels(m);
    const Eigen::Index r = factors.front().rows();
    const Eigen::Index d = factors.front().cols();
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(m * m);
    for (const auto& bi : factors) {
        if (bi.rows() != r || bi.cols() != d)
            throw Error(ErrorKind::DimensionMismatch, "from_factors: factor blocks differ in shape");
        for (const auto& bj : factors) blocks.push_back(bi.adjoint() * bj);
    }
    // exact adjoint symmetry, independent of rounding in the products above
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) blocks[j * m + i] = blocks[i * m + j].adjoint();
    return OperatorKernel(static_cast<std::size_t>(d), std::move(labels), std::move(blocks));
}

const ComplexMatrix& OperatorKernel::block(std::size_t i, std::size_t j) const {
    if (i >= size() || j >= size()) throw Error(ErrorKind::DimensionMismatch, "kernel: block index out of range");
    return blocks_[i * size() + j];
}

ComplexMatrix KernelFactorization::stacked() const {
    const auto d = static_cast<Eigen::Index>(dim);
    ComplexMatrix out(static_cast<Eigen::Index>(rank), d * static_cast<Eigen::Index>(blocks.size()));
    for (std::size_t i = 0; i < blocks.size(); ++i) out.middleCols(static_cast<Eigen::Index>(i) * d, d) = blocks[i];
    return out;
}

Complex tilde_eval(const OperatorKernel& k, std::size_t i, const ComplexVector& a, std::size_t j,
                   const ComplexVector& b) {
    check_index(k, i);
    check_index(k, j);
    const auto d = static_cast<Eigen::Index>(k.dim());
    if (a.size() != d || b.size() != d)
        throw Error(ErrorKind::DimensionMismatch, "tilde_eval: vectors must have length " + std::to_string(d));
    return a.dot(k.block(i, j) * b);  // Eigen's dot conjugates the left operand
}

ComplexMatrix assemble_block_gram(const OperatorKernel& k) {
    const auto d = static_cast<Eigen::Index>(k.dim());
    const std::size_t m = k.size();
    ComplexMatrix g(static_cast<Eigen::Index>(m) * d, static_cast<Eigen::Index>(m) * d);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            g.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(j) * d, d, d) = k.block(i, j);
    return g;
}

PdReport check_pd(const OperatorKernel& k, double tol) {
    const ComplexMatrix g = assemble_block_gram(k);
    if (g.rows() == 0) return {true, 0.0};
    const EigenDecomposition eig = hermitian_eig(g, tol);
    const double lmin = eig.eigenvalues(0);
    return {lmin >= -tol * std::max(1.0, g.norm()), lmin};
}

KernelFactorization factorize(const OperatorKernel& k, double tol) {
    const PsdFactor pf = psd_factor(assemble_block_gram(k), tol);
    const auto d = static_cast<Eigen::Index>(k.dim());
    KernelFactorization out;
    out.dim = k.dim();
    out.labels = k.labels();
    out.rank = pf.rank;
    out.tol = tol;
    out.blocks.reserve(k.size());
    for (std::size_t i = 0; i < k.size(); ++i)
        out.blocks.push_back(pf.factor.middleCols(static_cast<Eigen::Index>(i) * d, d));
    return out;
}

ComplexMatrix reconstruct(const KernelFactorization& f, std::size_t i, std::size_t j) {
    if (i >= f.blocks.size() || j >= f.blocks.size())
        throw Error(ErrorKind::DimensionMismatch, "reconstruct: point index out of range");
    const auto d = static_cast<Eigen::Index>(f.dim);
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    const ComplexMatrix vi_adj = f.blocks[i].adjoint();
    const ComplexMatrix vj_adj = f.blocks[j].adjoint();
    for (std::size_t k = 0; k < f.rank; ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        out += vi_adj.col(col) * vj_adj.col(col).adjoint();
    }
    return out;
}

OperatorKernel lift_to_hs(const OperatorKernel& k) {
    const auto d = static_cast<Eigen::Index>(k.dim());
    const ComplexMatrix identity = ComplexMatrix::Identity(d, d);
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(k.blocks().size());
    for (const auto& b : k.blocks()) blocks.push_back(kron(identity, b));
    return OperatorKernel(k.dim() * k.dim(), k.labels(), std::move(blocks));
}

ComplexMatrix intertwining_unitary(const KernelFactorization& a, const KernelFactorization& b) {
    if (a.rank != b.rank || a.dim != b.dim || a.blocks.size() != b.blocks.size())
        throw Error(ErrorKind::DimensionMismatch, "intertwining_unitary: factorizations have different shapes");
    // a.stacked() has full row rank, so U = B A^+ solves U A = B
    return b.stacked() * pseudoinverse(a.stacked(), a.tol);
}

double factorization_residual(const KernelFactorization& f, const OperatorKernel& k) {
    double worst = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i)
        for (std::size_t j = 0; j < k.size(); ++j)
            worst = std::max(worst, (f.blocks[i].adjoint() * f.blocks[j] - k.block(i, j)).norm());
    return worst;
}

} // namespace opk
