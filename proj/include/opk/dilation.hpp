// dilation.hpp - minimal Stinespring dilations of CP maps on M_n and Naimark
// dilations of finite POVMs, both built from tilde-kernel Gram factorizations.

#pragma once

#include "opk/numerics.hpp"
#include "opk/quantum.hpp"

#include <vector>

namespace opk {

inline constexpr double kUnitalTol = 1e-10;

/// phi(A) = sum_k R_k* A R_k on n x n matrices.
class CPMap {
public:
    explicit CPMap(std::vector<ComplexMatrix> kraus, bool declared_unital = false);

    std::size_t dim() const noexcept { return dim_; }
    const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }
    bool unital() const noexcept { return unital_; }

private:
    std::size_t dim_;
    std::vector<ComplexMatrix> kraus_;
    bool unital_;
};

ComplexMatrix cp_apply(const CPMap& phi, const ComplexMatrix& a);

/// Matrix unit E_pq in M_n.
ComplexMatrix matrix_unit(std::size_t n, std::size_t p, std::size_t q);

struct StinespringDilation {
    std::size_t dim = 0;           // n
    std::size_t dilation_dim = 0;  // r
    ComplexMatrix embedding;       // V: r x n
    std::vector<ComplexMatrix> unit_images;  // pi(E_uv) at index u * n + v, each r x r

    /// pi(A) = sum_uv A_uv pi(E_uv)
    ComplexMatrix pi(const ComplexMatrix& a) const;
};

struct NaimarkDilation {
    std::size_t dim = 0;
    std::size_t dilation_dim = 0;
    ComplexMatrix embedding;                 // V: r x d
    std::vector<ComplexMatrix> projections;  // P_k, r x r coordinate projections
};

/// Gram of the section set {(E_pq, e_l)} then {(I, e_l)}: <a, phi(A* B) b>.
ComplexMatrix stinespring_section_gram(const CPMap& phi);

StinespringDilation stinespring(const CPMap& phi, double tol = kDefaultTol);

NaimarkDilation naimark(const POVM& q, double tol = kDefaultTol);

struct DilationReport {
    double representation = 0.0;    // max ||V* pi(A) V - phi(A)|| (or ||V* P_k V - Q_k||)
    double multiplicativity = 0.0;  // max ||pi(A)pi(B) - pi(AB)|| (or ||P_k P_l - delta_kl P_k||)
    double adjoint = 0.0;           // max ||pi(A*) - pi(A)*|| (or ||P_k - P_k*||)
    double isometry = 0.0;          // ||V* V - I|| (unital / POVM case)
    double completeness = 0.0;      // ||sum_k P_k - I|| (Naimark only)
};

DilationReport verify_dilation(const StinespringDilation& dilation, const CPMap& phi);
DilationReport verify_dilation(const NaimarkDilation& dilation, const POVM& q);

} // namespace opk
