// quantum.hpp - states, POVMs, measurement-channel kernels and completeness tests

#pragma once

#include "opk/kernels.hpp"

#include <cstdint>
#include <vector>

namespace opk {

inline constexpr double kStateTol = 1e-10;

/// Positive trace-one operator. With require_unit_trace = false the trace is
/// only required to be nonnegative.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix matrix, bool require_unit_trace = true, double tol = kStateTol);

    static DensityMatrix maximally_mixed(std::size_t dim);
    static DensityMatrix pure(const ComplexVector& psi);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
    const ComplexMatrix& matrix() const noexcept { return matrix_; }

private:
    ComplexMatrix matrix_;
};

/// Effects Q_k on a finite outcome set {0..m-1}; subsets are bitmasks over it.
class POVM {
public:
    using Subset = std::uint64_t;

    explicit POVM(std::vector<ComplexMatrix> effects, double tol = kStateTol);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return effects_.size(); }
    const std::vector<ComplexMatrix>& effects() const noexcept { return effects_; }
    const ComplexMatrix& effect(std::size_t k) const { return effects_.at(k); }

    /// Q(s) = sum_{k in s} Q_k
    ComplexMatrix measure(Subset s) const;
    Subset full() const noexcept;
    static Subset singleton(std::size_t k) { return Subset{1} << k; }

private:
    std::size_t dim_;
    std::vector<ComplexMatrix> effects_;
};

struct CompletenessReport {
    std::size_t span_rank = 0;
    bool span_complete = false;
    std::size_t commutant_dim = 0;
    bool commutant_trivial = false;
};

struct SpanResult {
    std::size_t span_rank = 0;
    bool span_complete = false;
};

struct CommutantResult {
    std::size_t commutant_dim = 0;
    bool commutant_trivial = false;
};

struct Frequencies {
    std::vector<double> values;
    std::size_t shots = 0;
    bool empty = true;
};

/// K(s_i, s_j) = Q(s_i & s_j)
OperatorKernel povm_kernel(const POVM& q, const std::vector<POVM::Subset>& subsets,
                           std::vector<std::string> labels = {});

/// Kernel on the singletons {0}, ..., {m-1}.
OperatorKernel povm_atom_kernel(const POVM& q);

/// c(s_i, s_j) = tr(rho K(s_i, s_j))
ScalarKernel channel_apply(const DensityMatrix& rho, const OperatorKernel& k);

PdReport check_scalar_pd(const ScalarKernel& c, double tol = kDefaultTol);

/// Rank of the real span of the Hermitian and anti-Hermitian parts of all blocks,
/// inside the d^2-dimensional real space of Hermitian matrices.
SpanResult completeness_span(const OperatorKernel& k, double tol = kDefaultTol);

/// Dimension of {X : XA = AX for every block A and its adjoint}.
CommutantResult double_commutant_check(const OperatorKernel& k, double tol = kDefaultTol);

CompletenessReport completeness(const OperatorKernel& k, double tol = kDefaultTol);

/// Born probabilities tr(rho Q_k), clamped to [0, 1] and renormalized.
std::vector<double> born_probabilities(const DensityMatrix& rho, const POVM& q);

/// Multinomial frequencies of N outcomes, chunked substreams as in sample().
Frequencies simulate_counts(const DensityMatrix& rho, const POVM& q, std::size_t shots, std::uint64_t seed);

/// Real coordinates of a Hermitian matrix: diagonal, then sqrt(2) Re / Im of the
/// strict upper triangle. Isometric for the Hilbert-Schmidt inner product.
RealVector hermitian_coordinates(const ComplexMatrix& h);

} // namespace opk
