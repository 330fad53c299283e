// support.hpp - fixtures, random generators and independent oracles for the tests.
// Oracles here use Eigen's own solvers, never the opk Jacobi path.

#pragma once

#include "opk/dilation.hpp"
#include "opk/kernels.hpp"
#include "opk/numerics.hpp"
#include "opk/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace opk::test {

inline const Complex I_unit(0.0, 1.0);

inline ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
    ComplexMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

inline ComplexMatrix identity(Eigen::Index d) { return ComplexMatrix::Identity(d, d); }
inline ComplexMatrix pauli_x() { return mat2(0, 1, 1, 0); }
inline ComplexMatrix pauli_y() { return mat2(0, -I_unit, I_unit, 0); }
inline ComplexMatrix pauli_z() { return mat2(1, 0, 0, -1); }

inline ComplexVector ket(std::initializer_list<Complex> entries) {
    ComplexVector v(static_cast<Eigen::Index>(entries.size()));
    Eigen::Index k = 0;
    for (auto e : entries) v(k++) = e;
    return v;
}

/// {(I +- sigma_a) / 6}
inline POVM pauli6() {
    std::vector<ComplexMatrix> effects;
    for (const auto& s : {pauli_x(), pauli_y(), pauli_z()}) {
        effects.push_back((identity(2) + s) / 6.0);
        effects.push_back((identity(2) - s) / 6.0);
    }
    return POVM(effects);
}

/// (2/3)|psi_k><psi_k|, psi_k = (cos 2 pi k/3, sin 2 pi k/3)
inline POVM trine() {
    std::vector<ComplexMatrix> effects;
    for (int k = 0; k < 3; ++k) {
        const double t = 2.0 * std::numbers::pi * k / 3.0;
        const ComplexVector psi = ket({std::cos(t), std::sin(t)});
        effects.push_back((2.0 / 3.0) * psi * psi.adjoint());
    }
    return POVM(effects);
}

inline POVM half_half() { return POVM({identity(2) / 2.0, identity(2) / 2.0}); }

inline POVM computational(Eigen::Index d) {
    std::vector<ComplexMatrix> effects;
    for (Eigen::Index k = 0; k < d; ++k) {
        ComplexMatrix e = ComplexMatrix::Zero(d, d);
        e(k, k) = 1.0;
        effects.push_back(e);
    }
    return POVM(effects);
}

inline DensityMatrix plus_state() { return DensityMatrix::pure(ket({1.0, 1.0})); }
inline DensityMatrix zero_state() { return DensityMatrix::pure(ket({1.0, 0.0})); }

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
    }
    Complex complex() { return {uniform(), uniform()}; }

    /// entries with real and imaginary parts in [-1, 1]
    ComplexMatrix matrix(Eigen::Index rows, Eigen::Index cols) {
        ComplexMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = complex();
        return m;
    }
    ComplexVector vector(Eigen::Index n) { return matrix(n, 1).col(0); }

    ComplexMatrix hermitian(Eigen::Index n) {
        const ComplexMatrix a = matrix(n, n);
        return 0.5 * (a + a.adjoint());
    }

    /// Product of a random n x k and k x m matrix: rank <= k.
    ComplexMatrix low_rank(Eigen::Index rows, Eigen::Index cols, Eigen::Index rank) {
        return matrix(rows, rank) * matrix(rank, cols);
    }

    DensityMatrix state(Eigen::Index d) {
        const ComplexMatrix b = matrix(d, d);
        ComplexMatrix rho = b * b.adjoint();
        rho /= rho.trace().real();
        return DensityMatrix(0.5 * (rho + rho.adjoint()));
    }

    /// K(s_i,s_j) = B_i* B_j with B_i random r x d
    OperatorKernel factor_kernel(std::size_t m, Eigen::Index d, Eigen::Index r) {
        std::vector<ComplexMatrix> factors;
        for (std::size_t i = 0; i < m; ++i) factors.push_back(matrix(r, d));
        return OperatorKernel::from_factors(factors);
    }

    /// Kraus set normalized to sum R_k* R_k = I by right-multiplying with S^{-1/2}.
    CPMap unital_cp_map(Eigen::Index n, std::size_t count) {
        std::vector<ComplexMatrix> kraus;
        ComplexMatrix s = ComplexMatrix::Zero(n, n);
        for (std::size_t k = 0; k < count; ++k) {
            kraus.push_back(matrix(n, n));
            s += kraus.back().adjoint() * kraus.back();
        }
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (s + s.adjoint()));
        const ComplexMatrix inv_sqrt = es.operatorInverseSqrt();
        for (auto& r : kraus) r = r * inv_sqrt;
        return CPMap(kraus, true);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Eigen-based eigenvalues (ascending) of a Hermitian matrix.
inline RealVector oracle_eigenvalues(const ComplexMatrix& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Rank by Eigen's SVD with a relative cutoff.
inline std::size_t oracle_rank(const ComplexMatrix& m, double rel = 1e-10) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& s = svd.singularValues();
    const double cutoff = rel * std::max(1.0, s(0));
    std::size_t r = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > cutoff) ++r;
    return r;
}

/// Gaussian-elimination rank with partial pivoting on a real matrix.
inline std::size_t row_reduction_rank(Eigen::MatrixXd a, double eps = 1e-9) {
    std::size_t rank = 0;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
        Eigen::Index pivot = row;
        for (Eigen::Index i = row; i < a.rows(); ++i)
            if (std::abs(a(i, col)) > std::abs(a(pivot, col))) pivot = i;
        if (std::abs(a(pivot, col)) <= eps) continue;
        a.row(row).swap(a.row(pivot));
        for (Eigen::Index i = row + 1; i < a.rows(); ++i) a.row(i) -= (a(i, col) / a(row, col)) * a.row(row);
        ++row;
        ++rank;
    }
    return rank;
}

// Matrix of rho -> (Re tr(rho K_b), Im tr(rho K_b))_b on the basis
// {E_ii, E_ij + E_ji, i(E_ij - E_ji)} of Hermitian matrices; its rank is the
// dimension of what the data can see.
inline Eigen::MatrixXd measurement_matrix(const OperatorKernel& k) {
    const auto d = static_cast<Eigen::Index>(k.dim());
    std::vector<ComplexMatrix> basis;
    for (Eigen::Index i = 0; i < d; ++i) {
        ComplexMatrix e = ComplexMatrix::Zero(d, d);
        e(i, i) = 1.0;
        basis.push_back(e);
        for (Eigen::Index j = i + 1; j < d; ++j) {
            ComplexMatrix s = ComplexMatrix::Zero(d, d), a = ComplexMatrix::Zero(d, d);
            s(i, j) = s(j, i) = 1.0;
            a(i, j) = I_unit;
            a(j, i) = -I_unit;
            basis.push_back(s);
            basis.push_back(a);
        }
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(2 * k.blocks().size()), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t b = 0; b < k.blocks().size(); ++b)
        for (std::size_t h = 0; h < basis.size(); ++h) {
            const Complex v = (basis[h] * k.blocks()[b]).trace();
            out(static_cast<Eigen::Index>(2 * b), static_cast<Eigen::Index>(h)) = v.real();
            out(static_cast<Eigen::Index>(2 * b + 1), static_cast<Eigen::Index>(h)) = v.imag();
        }
    return out;
}

// Commutant dimension by Eigen's full-pivot LU kernel on X -> XA - AX.
inline std::size_t commutant_oracle(const std::vector<ComplexMatrix>& ops) {
    const Eigen::Index d = ops.front().rows();
    ComplexMatrix stacked(static_cast<Eigen::Index>(ops.size()) * d * d, d * d);
    for (std::size_t k = 0; k < ops.size(); ++k) {
        // column (p, q) = vec(E_pq A - A E_pq)
        for (Eigen::Index q = 0; q < d; ++q)
            for (Eigen::Index p = 0; p < d; ++p) {
                ComplexMatrix e = ComplexMatrix::Zero(d, d);
                e(p, q) = 1.0;
                stacked.block(static_cast<Eigen::Index>(k) * d * d, q * d + p, d * d, 1) = vec(e * ops[k] - ops[k] * e);
            }
    }
    Eigen::FullPivLU<ComplexMatrix> lu(stacked);
    lu.setThreshold(1e-10);
    return static_cast<std::size_t>(d * d - lu.rank());
}

inline double max_block_residual(const KernelFactorization& f, const OperatorKernel& k) {
    return factorization_residual(f, k);
}

} // namespace opk::test
