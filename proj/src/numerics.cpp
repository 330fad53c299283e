// numerics.cpp - Jacobi eigensolver and the spectral routines built on it

#include "opk/numerics.hpp"

#include "opk/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace opk {

namespace {

// Hermitian embedding [[0, M], [M*, 0]]; its spectrum is {+-sigma_k} plus zeros,
// so singular values come out without squaring the condition number.
EigenDecomposition embedding_eig(const ComplexMatrix& m) {
    const Eigen::Index r = m.rows();
    const Eigen::Index c = m.cols();
    ComplexMatrix h = ComplexMatrix::Zero(r + c, r + c);
    h.topRightCorner(r, c) = m;
    h.bottomLeftCorner(c, r) = m.adjoint();
    return hermitian_eig(h, 1.0);
}

} // namespace

double frobenius(const ComplexMatrix& m) { return m.norm(); }

bool is_hermitian(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

EigenDecomposition hermitian_eig(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols())
        throw Error(ErrorKind::DimensionMismatch, "hermitian_eig: matrix is not square");
    if (!m.allFinite())
        throw Error(ErrorKind::InvalidArgument, "hermitian_eig: non-finite entry");
    if (!is_hermitian(m, tol))
        throw Error(ErrorKind::NotHermitian, "hermitian_eig: ||M - M*||_F exceeds tolerance");

    const Eigen::Index n = m.rows();
    ComplexMatrix a = hermitian_part(m);
    ComplexMatrix v = ComplexMatrix::Identity(n, n);
    const double scale = m.norm();
    const double threshold = kJacobiOffDiagTol * scale;

    auto off_diagonal = [&] {
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                if (i != j) s += std::norm(a(i, j));
        return std::sqrt(s);
    };

    bool converged = false;
    for (int sweep = 0; sweep <= kJacobiMaxSweeps; ++sweep) {
        if (off_diagonal() <= threshold) {
            converged = true;
            break;
        }
        if (sweep == kJacobiMaxSweeps) break;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Complex b = a(p, q);
                const double mag = std::abs(b);
                if (mag == 0.0) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // a(p,q) = e^{i phi} |b|: strip the phase, then a real rotation
                const Complex phase = b / mag;
                const double theta = (aqq - app) / (2.0 * mag);
                double t;
                if (std::abs(theta) > 1e150)
                    t = 0.5 / theta;
                else
                    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
                const double cs = 1.0 / std::hypot(t, 1.0);
                const double sn = t * cs;
                // U = diag(phase, 1) * [[cs, sn], [-sn, cs]]
                const Complex u00 = phase * cs, u01 = phase * sn;
                const Complex u10 = -sn, u11 = cs;

                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex x = a(k, p), y = a(k, q);
                    a(k, p) = x * u00 + y * u10;
                    a(k, q) = x * u01 + y * u11;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex x = a(p, k), y = a(q, k);
                    a(p, k) = std::conj(u00) * x + std::conj(u10) * y;
                    a(q, k) = std::conj(u01) * x + std::conj(u11) * y;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex x = v(k, p), y = v(k, q);
                    v(k, p) = x * u00 + y * u10;
                    v(k, q) = x * u01 + y * u11;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }
    if (!converged)
        throw Error(ErrorKind::DidNotConverge, "hermitian_eig: sweep budget exhausted");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });

    EigenDecomposition out{RealVector(n), ComplexMatrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.eigenvalues(k) = a(src, src).real();
        out.vectors.col(k) = v.col(src);
    }
    return out;
}

PsdFactor psd_factor(const ComplexMatrix& gram, double tol) {
    const Eigen::Index n = gram.rows();
    if (n == 0) return {0, ComplexMatrix(0, gram.cols())};
    const EigenDecomposition eig = hermitian_eig(gram, tol);
    const double fro = gram.norm();
    if (eig.eigenvalues(0) < -tol * std::max(1.0, fro))
        throw Error(ErrorKind::NotPSD, "psd_factor: minimum eigenvalue " +
                                           std::to_string(eig.eigenvalues(0)) + " below tolerance");
    const double lmax = eig.eigenvalues(n - 1);
    const double cutoff = tol * std::max(1.0, lmax);

    std::size_t rank = 0;
    for (Eigen::Index k = 0; k < n; ++k)
        if (eig.eigenvalues(k) > cutoff) ++rank;

    PsdFactor out{rank, ComplexMatrix(static_cast<Eigen::Index>(rank), n)};
    for (std::size_t row = 0; row < rank; ++row) {
        const Eigen::Index k = n - 1 - static_cast<Eigen::Index>(row);
        out.factor.row(static_cast<Eigen::Index>(row)) =
            std::sqrt(eig.eigenvalues(k)) * eig.vectors.col(k).adjoint();
    }
    return out;
}

RankNullspace rank_nullspace(const ComplexMatrix& m, double tol) {
    const Eigen::Index r = m.rows();
    const Eigen::Index c = m.cols();
    if (c == 0) return {0, ComplexMatrix(0, 0)};
    if (r == 0) return {0, ComplexMatrix::Identity(c, c)};

    const EigenDecomposition eig = embedding_eig(m);
    const double sigma_max = std::max(0.0, eig.eigenvalues(r + c - 1));
    const double cutoff = tol * std::max(1.0, sigma_max);

    // The bottom halves of the near-zero eigenvectors span null(M); their
    // outer-product sum is the orthogonal projector onto it.
    ComplexMatrix projector = ComplexMatrix::Zero(c, c);
    for (Eigen::Index k = 0; k < r + c; ++k) {
        if (std::abs(eig.eigenvalues(k)) <= cutoff) {
            const ComplexVector bottom = eig.vectors.col(k).tail(c);
            projector += bottom * bottom.adjoint();
        }
    }
    const EigenDecomposition proj = hermitian_eig(hermitian_part(projector), 1.0);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < c; ++k)
        if (proj.eigenvalues(k) > 0.5) keep.push_back(k);

    RankNullspace out;
    out.rank = static_cast<std::size_t>(c) - keep.size();
    out.nullspace.resize(c, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        out.nullspace.col(static_cast<Eigen::Index>(j)) = proj.vectors.col(keep[j]);
    return out;
}

ComplexMatrix pseudoinverse(const ComplexMatrix& m, double tol) {
    const Eigen::Index r = m.rows();
    const Eigen::Index c = m.cols();
    ComplexMatrix out = ComplexMatrix::Zero(c, r);
    if (r == 0 || c == 0) return out;

    const EigenDecomposition eig = embedding_eig(m);
    const double sigma_max = std::max(0.0, eig.eigenvalues(r + c - 1));
    const double cutoff = tol * std::max(1.0, sigma_max);
    // eigenvector for +sigma is (u; v) / sqrt(2), so v u* = 2 * bottom * top*
    for (Eigen::Index k = 0; k < r + c; ++k) {
        const double sigma = eig.eigenvalues(k);
        if (sigma <= cutoff) continue;
        const ComplexVector top = eig.vectors.col(k).head(r);
        const ComplexVector bottom = eig.vectors.col(k).tail(c);
        out += (2.0 / sigma) * bottom * top.adjoint();
    }
    return out;
}

std::vector<double> project_simplex(std::span<const double> v) {
    if (v.empty()) throw Error(ErrorKind::EmptyInput, "project_simplex: empty input");
    for (double x : v)
        if (!std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, "project_simplex: non-finite entry");

    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double shift = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cumulative += sorted[j];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0) shift = candidate;
    }
    std::vector<double> w(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) w[k] = std::max(v[k] - shift, 0.0);
    return w;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexVector vec(const ComplexMatrix& m) {
    ComplexVector out(m.size());
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.segment(j * m.rows(), m.rows()) = m.col(j);
    return out;
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) throw Error(ErrorKind::DimensionMismatch, "unvec: size mismatch");
    ComplexMatrix out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) out.col(j) = v.segment(j * rows, rows);
    return out;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m, double tol) {
    const EigenDecomposition eig = hermitian_eig(m, tol);
    RealVector roots = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    return eig.vectors * roots.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix psd_inverse_sqrt(const ComplexMatrix& m, double tol) {
    const EigenDecomposition eig = hermitian_eig(m, tol);
    const Eigen::Index n = m.rows();
    if (n == 0) return m;
    const double cutoff = tol * std::max(1.0, eig.eigenvalues(n - 1));
    if (eig.eigenvalues(0) <= cutoff)
        throw Error(ErrorKind::SingularSystem, "psd_inverse_sqrt: matrix is not positive definite");
    RealVector inv = eig.eigenvalues.cwiseSqrt().cwiseInverse();
    return eig.vectors * inv.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

} // namespace opk
