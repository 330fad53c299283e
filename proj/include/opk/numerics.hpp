// numerics.hpp - dense complex linear algebra used by every other module:
// Hermitian Jacobi eigensolver, PSD factorization, rank/nullspace,
// Moore-Penrose pseudoinverse and Euclidean projection onto the simplex.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace opk {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Relative tolerance used for every rank decision unless overridden.
inline constexpr double kDefaultTol = 1e-10;

/// Jacobi sweep budget and stopping threshold (relative to ||M||_F).
inline constexpr int kJacobiMaxSweeps = 64;
inline constexpr double kJacobiOffDiagTol = 1e-13;

struct EigenDecomposition {
    RealVector eigenvalues;  // ascending
    ComplexMatrix vectors;   // column k pairs with eigenvalues[k]
};

struct PsdFactor {
    std::size_t rank = 0;
    ComplexMatrix factor;  // rank x n, factor.adjoint() * factor == G
};

struct RankNullspace {
    std::size_t rank = 0;
    ComplexMatrix nullspace;  // cols x (cols - rank), orthonormal columns
};

double frobenius(const ComplexMatrix& m);

/// ||M - M*||_F <= tol * max(1, ||M||_F)
bool is_hermitian(const ComplexMatrix& m, double tol);

/// Cyclic complex Jacobi. Throws NotHermitian / DidNotConverge.
EigenDecomposition hermitian_eig(const ComplexMatrix& m, double tol = kDefaultTol);

/// G = F* F with F of full row rank; rows ordered by decreasing eigenvalue.
PsdFactor psd_factor(const ComplexMatrix& gram, double tol = kDefaultTol);

RankNullspace rank_nullspace(const ComplexMatrix& m, double tol = kDefaultTol);

ComplexMatrix pseudoinverse(const ComplexMatrix& m, double tol = kDefaultTol);

/// Nearest point of the probability simplex in the Euclidean norm.
std::vector<double> project_simplex(std::span<const double> v);

/// Kronecker product a (x) b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column-stacking vectorization.
ComplexVector vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols);

/// (M + M*) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& m);

/// Principal square root / inverse square root of a PSD matrix through hermitian_eig.
ComplexMatrix psd_sqrt(const ComplexMatrix& m, double tol = kDefaultTol);
ComplexMatrix psd_inverse_sqrt(const ComplexMatrix& m, double tol = kDefaultTol);

} // namespace opk
