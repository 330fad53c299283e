// tomography.hpp - state recovery from kernel data by constrained least squares
//
//   minimize  sum_{(i,j)} |tr(rho K(s_i,s_j)) - c_ij|^2   over density matrices rho
//
// solved by projected gradient descent, plus the unconstrained kernel-ridge
// baseline and an RKHS-coordinate view of the same residuals.

#pragma once

#include "opk/kernels.hpp"
#include "opk/quantum.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace opk {

class TomographyProblem {
public:
    using Pair = std::pair<std::size_t, std::size_t>;

    TomographyProblem(OperatorKernel kernel, std::vector<Pair> pairs, std::vector<Complex> data);

    /// All m^2 pairs with data tr(rho K(s_i,s_j)).
    static TomographyProblem noiseless(const OperatorKernel& kernel, const DensityMatrix& rho);

    const OperatorKernel& kernel() const noexcept { return kernel_; }
    const std::vector<Pair>& pairs() const noexcept { return pairs_; }
    const std::vector<Complex>& data() const noexcept { return data_; }
    std::size_t dim() const noexcept { return kernel_.dim(); }

    /// Pairs present in both orders whose data violate c_ji = conj(c_ij) by more than tol.
    std::vector<std::string> consistency_warnings(double tol = 1e-9) const;

private:
    OperatorKernel kernel_;
    std::vector<Pair> pairs_;
    std::vector<Complex> data_;
};

struct SolverConfig {
    std::size_t max_iters = 5000;
    std::optional<double> step;  // nullopt: 1/L with L = 2 sum ||K_ij||_F^2
    double tol_step = 1e-9;
    double tol_obj = 1e-12;
    bool backtracking = false;
    std::optional<ComplexMatrix> init;  // default I/d

    void validate() const;
};

struct TomographyResult {
    DensityMatrix rho_hat;
    std::vector<double> objective_trajectory;
    std::size_t iterations = 0;
    bool converged = false;
    double final_gradient_norm = 0.0;
    double step = 0.0;
};

struct RidgeSolution {
    ComplexVector coefficients;
    double lambda = 0.0;
    ComplexVector fitted;
    double relative_residual = 0.0;
};

struct RkhsView {
    std::size_t omega_index = 0;
    std::vector<std::size_t> points;       // s_i paired with Omega in the problem
    std::vector<Complex> rkhs_values;       // <K~_(s_i, I), K~_(Omega, A)> through factor coordinates
    std::vector<Complex> trace_values;      // tr(A Q(s_i))
    std::vector<double> residuals;          // |rkhs value - c_i|^2
    double max_discrepancy = 0.0;           // max |rkhs value - trace value|
};

double objective(const ComplexMatrix& rho, const TomographyProblem& problem);

/// sum conj(r_ij) K_ij + r_ij K_ij*, with r_ij = tr(rho K_ij) - c_ij.
ComplexMatrix gradient(const ComplexMatrix& rho, const TomographyProblem& problem);

/// Nearest density matrix to the Hermitian part of m in Hilbert-Schmidt norm.
DensityMatrix project_density(const ComplexMatrix& m);

/// Lipschitz bound 2 sum ||K_ij||_F^2 of the gradient.
double lipschitz_bound(const TomographyProblem& problem);

TomographyResult solve_pgd(const TomographyProblem& problem, const SolverConfig& config = {});

/// Index of the point whose kernel row equals Q(s) for every s, with K(Omega,Omega) = I.
std::optional<std::size_t> find_omega_point(const OperatorKernel& k, double tol = 1e-10);

/// `factorization` must factor lift_to_hs(problem.kernel()).
RkhsView rkhs_view(const TomographyProblem& problem, const KernelFactorization& factorization,
                   const ComplexMatrix& a);

/// alpha = (G + lambda I)^-1 y
RidgeSolution kernel_ridge(const ScalarKernel& gram, const ComplexVector& y, double lambda,
                           double tol = kDefaultTol);

struct RidgeBaseline {
    RidgeSolution solution;
    ComplexMatrix estimate;  // sum_p alpha_p K_p*, not constrained to be a state
};

/// Unconstrained ridge fit of the problem data over all of Hilbert-Schmidt space,
/// with Gram G_pq = tr(K_p K_q*).
RidgeBaseline ridge_baseline(const TomographyProblem& problem, double lambda, double tol = kDefaultTol);

} // namespace opk
