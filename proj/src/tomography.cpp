// tomography.cpp

#include "opk/tomography.hpp"

#include "opk/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace opk {

TomographyProblem::TomographyProblem(OperatorKernel kernel, std::vector<Pair> pairs, std::vector<Complex> data)
    : kernel_(std::move(kernel)), pairs_(std::move(pairs)), data_(std::move(data)) {
    if (pairs_.size() != data_.size())
        throw Error(ErrorKind::DimensionMismatch, "problem: " + std::to_string(pairs_.size()) + " pairs but " +
                                                      std::to_string(data_.size()) + " data values");
    for (const auto& [i, j] : pairs_)
        if (i >= kernel_.size() || j >= kernel_.size())
            throw Error(ErrorKind::DimensionMismatch, "problem: pair index out of range");
    for (const auto& c : data_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw Error(ErrorKind::InvalidArgument, "problem: non-finite data value");
}

TomographyProblem TomographyProblem::noiseless(const OperatorKernel& kernel, const DensityMatrix& rho) {
    if (rho.dim() != kernel.dim()) throw Error(ErrorKind::DimensionMismatch, "noiseless: state and kernel dims differ");
    std::vector<Pair> pairs;
    std::vector<Complex> data;
    for (std::size_t i = 0; i < kernel.size(); ++i)
        for (std::size_t j = 0; j < kernel.size(); ++j) {
            pairs.emplace_back(i, j);
            data.push_back((rho.matrix() * kernel.block(i, j)).trace());
        }
    return TomographyProblem(kernel, std::move(pairs), std::move(data));
}

std::vector<std::string> TomographyProblem::consistency_warnings(double tol) const {
    std::vector<std::string> out;
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
        const auto [i, j] = pairs_[p];
        if (i >= j) continue;
        for (std::size_t q = 0; q < pairs_.size(); ++q) {
            if (pairs_[q].first != j || pairs_[q].second != i) continue;
            if (std::abs(data_[q] - std::conj(data_[p])) > tol) {
                std::ostringstream msg;
                msg << "data for (" << j << "," << i << ") is not the conjugate of (" << i << "," << j << ")";
                out.push_back(msg.str());
            }
        }
    }
    return out;
}

void SolverConfig::validate() const {
    if (step && !(*step > 0.0)) throw Error(ErrorKind::InvalidArgument, "solver: step must be positive");
    if (!(tol_step > 0.0) || !(tol_obj > 0.0)) throw Error(ErrorKind::InvalidArgument, "solver: tolerances must be positive");
}

namespace {

void check_dims(const ComplexMatrix& rho, const TomographyProblem& problem) {
    const auto d = static_cast<Eigen::Index>(problem.dim());
    if (rho.rows() != d || rho.cols() != d)
        throw Error(ErrorKind::DimensionMismatch, "state is not " + std::to_string(d) + "x" + std::to_string(d));
}

Complex residual(const ComplexMatrix& rho, const TomographyProblem& problem, std::size_t p) {
    const auto [i, j] = problem.pairs()[p];
    return (rho * problem.kernel().block(i, j)).trace() - problem.data()[p];
}

} // namespace

double objective(const ComplexMatrix& rho, const TomographyProblem& problem) {
    check_dims(rho, problem);
    double total = 0.0;
    for (std::size_t p = 0; p < problem.pairs().size(); ++p) total += std::norm(residual(rho, problem, p));
    return total;
}

ComplexMatrix gradient(const ComplexMatrix& rho, const TomographyProblem& problem) {
    check_dims(rho, problem);
    const auto d = static_cast<Eigen::Index>(problem.dim());
    ComplexMatrix g = ComplexMatrix::Zero(d, d);
    for (std::size_t p = 0; p < problem.pairs().size(); ++p) {
        const Complex r = residual(rho, problem, p);
        const ComplexMatrix& k = problem.kernel().block(problem.pairs()[p].first, problem.pairs()[p].second);
        g += std::conj(r) * k + r * k.adjoint();
    }
    return g;
}

DensityMatrix project_density(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "project_density: matrix is not square");
    const EigenDecomposition eig = hermitian_eig(hermitian_part(m), 1.0);
    const std::vector<double> lambda(eig.eigenvalues.data(), eig.eigenvalues.data() + eig.eigenvalues.size());
    const std::vector<double> w = project_simplex(lambda);
    const RealVector weights = Eigen::Map<const RealVector>(w.data(), static_cast<Eigen::Index>(w.size()));
    const ComplexMatrix rho = eig.vectors * weights.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    return DensityMatrix(hermitian_part(rho));
}

double lipschitz_bound(const TomographyProblem& problem) {
    double total = 0.0;
    for (const auto& [i, j] : problem.pairs()) total += problem.kernel().block(i, j).squaredNorm();
    return 2.0 * total;
}

TomographyResult solve_pgd(const TomographyProblem& problem, const SolverConfig& config) {
    config.validate();
    if (config.init) check_dims(*config.init, problem);
    if (const PdReport pd = check_pd(problem.kernel()); !pd.is_pd)
        throw Error(ErrorKind::NotPSD, "solve_pgd: kernel is not positive definite (min eigenvalue " +
                                           std::to_string(pd.min_eigenvalue) + ")");
    ComplexMatrix rho = config.init ? project_density(*config.init).matrix()
                                    : DensityMatrix::maximally_mixed(problem.dim()).matrix();

    double value = objective(rho, problem);
    TomographyResult result{DensityMatrix(rho), {value}, 0, false, 0.0, 0.0};
    const double lipschitz = lipschitz_bound(problem);
    if (problem.pairs().empty() || lipschitz == 0.0) {
        // constant objective: nothing to minimize
        result.converged = true;
        return result;
    }
    double step = config.step.value_or(1.0 / lipschitz);

    for (std::size_t it = 0; it < config.max_iters; ++it) {
        const ComplexMatrix g = gradient(rho, problem);
        ComplexMatrix next = project_density(rho - step * g).matrix();
        double next_value = objective(next, problem);
        if (config.backtracking) {
            // halve until the quadratic upper model at rho bounds the new value
            for (int k = 0; k < 60; ++k) {
                const ComplexMatrix delta = next - rho;
                const double model = value + (g.adjoint() * delta).trace().real() + delta.squaredNorm() / (2.0 * step);
                if (next_value <= model + 1e-15 * std::max(1.0, value)) break;
                step *= 0.5;
                next = project_density(rho - step * g).matrix();
                next_value = objective(next, problem);
            }
        }
        const double moved = (next - rho).norm();
        rho = std::move(next);
        value = next_value;
        result.objective_trajectory.push_back(value);
        result.iterations = it + 1;
        if (moved < config.tol_step || value < config.tol_obj) {
            result.converged = true;
            break;
        }
    }
    result.rho_hat = DensityMatrix(rho);
    result.final_gradient_norm = gradient(rho, problem).norm();
    result.step = step;
    return result;
}

std::optional<std::size_t> find_omega_point(const OperatorKernel& k, double tol) {
    const auto d = static_cast<Eigen::Index>(k.dim());
    const ComplexMatrix identity = ComplexMatrix::Identity(d, d);
    for (std::size_t w = 0; w < k.size(); ++w) {
        if ((k.block(w, w) - identity).norm() > tol) continue;
        bool row_matches = true;
        for (std::size_t t = 0; t < k.size() && row_matches; ++t)
            row_matches = (k.block(t, w) - k.block(t, t)).norm() <= tol;
        if (row_matches) return w;
    }
    return std::nullopt;
}

RkhsView rkhs_view(const TomographyProblem& problem, const KernelFactorization& factorization, const ComplexMatrix& a) {
    const OperatorKernel& k = problem.kernel();
    const std::size_t d = k.dim();
    check_dims(a, problem);
    if (factorization.dim != d * d || factorization.blocks.size() != k.size())
        throw Error(ErrorKind::DimensionMismatch, "rkhs_view: factorization does not match the lifted kernel");
    const auto omega = find_omega_point(k);
    if (!omega) throw Error(ErrorKind::MissingOmegaPoint, "rkhs_view: kernel has no full-set point");

    const auto dd = static_cast<Eigen::Index>(d);
    const ComplexVector vec_identity = vec(ComplexMatrix::Identity(dd, dd));
    // coordinates of K~_(Omega, A) in C^rank
    const ComplexVector omega_section = factorization.blocks[*omega] * vec(a);

    RkhsView view;
    view.omega_index = *omega;
    for (std::size_t p = 0; p < problem.pairs().size(); ++p) {
        const auto [i, j] = problem.pairs()[p];
        std::size_t point;
        if (j == *omega)
            point = i;
        else if (i == *omega)
            point = j;
        else
            continue;
        const ComplexVector section = factorization.blocks[point] * vec_identity;
        const Complex through_rkhs = section.dot(omega_section);
        const Complex through_trace = (a * k.block(point, *omega)).trace();
        view.points.push_back(point);
        view.rkhs_values.push_back(through_rkhs);
        view.trace_values.push_back(through_trace);
        view.residuals.push_back(std::norm(through_rkhs - problem.data()[p]));
        view.max_discrepancy = std::max(view.max_discrepancy, std::abs(through_rkhs - through_trace));
    }
    return view;
}

RidgeSolution kernel_ridge(const ScalarKernel& gram, const ComplexVector& y, double lambda, double tol) {
    const ComplexMatrix& g = gram.values;
    const Eigen::Index n = g.rows();
    if (g.cols() != n || y.size() != n) throw Error(ErrorKind::DimensionMismatch, "kernel_ridge: Gram and targets differ in size");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidArgument, "kernel_ridge: lambda must be >= 0");
    RidgeSolution out{ComplexVector::Zero(n), lambda, ComplexVector::Zero(n), 0.0};
    if (n == 0) return out;

    const EigenDecomposition eig = hermitian_eig(g, tol);
    const double scale = std::max(1.0, g.norm());
    if (eig.eigenvalues(0) < -tol * scale) throw Error(ErrorKind::NotPSD, "kernel_ridge: Gram is not PSD");
    const RealVector shifted = eig.eigenvalues.array() + lambda;
    if (shifted(0) <= tol * std::max(1.0, shifted(n - 1)))
        throw Error(ErrorKind::SingularSystem, "kernel_ridge: G + lambda I is numerically singular");

    out.coefficients = eig.vectors * (shifted.cwiseInverse().cast<Complex>().asDiagonal() * (eig.vectors.adjoint() * y));
    out.fitted = g * out.coefficients;
    const ComplexVector res = out.fitted + lambda * out.coefficients - y;
    out.relative_residual = res.norm() / std::max(y.norm(), std::numeric_limits<double>::min());
    return out;
}

RidgeBaseline ridge_baseline(const TomographyProblem& problem, double lambda, double tol) {
    const auto n = static_cast<Eigen::Index>(problem.pairs().size());
    const auto d = static_cast<Eigen::Index>(problem.dim());
    std::vector<ComplexMatrix> features;
    features.reserve(problem.pairs().size());
    for (const auto& [i, j] : problem.pairs()) features.push_back(problem.kernel().block(i, j).adjoint());

    ScalarKernel gram{{}, ComplexMatrix(n, n)};
    for (Eigen::Index p = 0; p < n; ++p) {
        gram.labels.push_back(std::to_string(p));
        for (Eigen::Index q = 0; q < n; ++q)
            gram.values(p, q) =
                (features[static_cast<std::size_t>(p)].adjoint() * features[static_cast<std::size_t>(q)]).trace();
    }
    ComplexVector y(n);
    for (Eigen::Index p = 0; p < n; ++p) y(p) = problem.data()[static_cast<std::size_t>(p)];

    RidgeBaseline out{kernel_ridge(gram, y, lambda, tol), ComplexMatrix::Zero(d, d)};
    for (Eigen::Index p = 0; p < n; ++p)
        out.estimate += out.solution.coefficients(p) * features[static_cast<std::size_t>(p)];
    return out;
}

} // namespace opk
