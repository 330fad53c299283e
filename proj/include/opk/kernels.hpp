// kernels.hpp - operator-valued positive-definite kernels on a finite index set

#pragma once

#include "opk/numerics.hpp"

#include <string>
#include <vector>

namespace opk {

/// Block table K(s_i, s_j) of d x d operators over m labelled points.
/// Construction enforces K(s_j, s_i) = K(s_i, s_j)*.
class OperatorKernel {
public:
    static constexpr double kSymmetryTol = 1e-12;

    OperatorKernel(std::size_t dim, std::vector<std::string> labels, std::vector<ComplexMatrix> blocks);

    /// K(s_i, s_j) = B_i* B_j for factor blocks B_i (each r x dim).
    static OperatorKernel from_factors(const std::vector<ComplexMatrix>& factors,
                                       std::vector<std::string> labels = {});

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const ComplexMatrix& block(std::size_t i, std::size_t j) const;
    const std::vector<ComplexMatrix>& blocks() const noexcept { return blocks_; }

private:
    std::size_t dim_;
    std::vector<std::string> labels_;
    std::vector<ComplexMatrix> blocks_;  // row-major m x m
};

/// K(s_i,s_j) = V_i* V_j. The coordinate space C^rank stands in for the RKHS of
/// the tilde kernel; its standard basis plays the role of the ONB.
struct KernelFactorization {
    std::size_t dim = 0;
    std::vector<std::string> labels;
    std::size_t rank = 0;
    std::vector<ComplexMatrix> blocks;  // rank x dim each
    double tol = kDefaultTol;

    /// rank x (m * dim) horizontal concatenation [V_1 ... V_m]
    ComplexMatrix stacked() const;
};

struct ScalarKernel {
    std::vector<std::string> labels;
    ComplexMatrix values;
};

struct PdReport {
    bool is_pd = false;
    double min_eigenvalue = 0.0;
};

/// <a, K(s_i,s_j) b>, linear in the second argument.
Complex tilde_eval(const OperatorKernel& k, std::size_t i, const ComplexVector& a, std::size_t j,
                   const ComplexVector& b);

ComplexMatrix assemble_block_gram(const OperatorKernel& k);

PdReport check_pd(const OperatorKernel& k, double tol = kDefaultTol);

KernelFactorization factorize(const OperatorKernel& k, double tol = kDefaultTol);

/// Sum over coordinate directions of |V_i* e_k><V_j* e_k|.
ComplexMatrix reconstruct(const KernelFactorization& f, std::size_t i, std::size_t j);

/// Same kernel acting on Hilbert-Schmidt space: blocks I_d (x) K(s_i,s_j) under
/// column-stacking, i.e. A -> K(s_i,s_j) A.
OperatorKernel lift_to_hs(const OperatorKernel& k);

/// Unitary U with b.blocks[i] = U a.blocks[i] for every i, solved through the
/// pseudoinverse of a's stacked factor. Throws DimensionMismatch if the ranks differ.
ComplexMatrix intertwining_unitary(const KernelFactorization& a, const KernelFactorization& b);

/// Largest ||V_i* V_j - K(s_i,s_j)||_F over all pairs.
double factorization_residual(const KernelFactorization& f, const OperatorKernel& k);

} // namespace opk
