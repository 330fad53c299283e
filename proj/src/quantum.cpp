// quantum.cpp

#include "opk/quantum.hpp"

#include "opk/error.hpp"
#include "opk/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace opk {

DensityMatrix::DensityMatrix(ComplexMatrix matrix, bool require_unit_trace, double tol) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
        throw Error(ErrorKind::DimensionMismatch, "density matrix must be square and nonempty");
    if (!is_hermitian(matrix_, tol)) throw Error(ErrorKind::NotDensity, "density matrix is not Hermitian");
    const EigenDecomposition eig = hermitian_eig(matrix_, tol);
    if (eig.eigenvalues(0) < -tol)
        throw Error(ErrorKind::NotDensity, "density matrix has eigenvalue " + std::to_string(eig.eigenvalues(0)));
    const double tr = matrix_.trace().real();
    if (require_unit_trace ? std::abs(tr - 1.0) > tol : tr < -tol)
        throw Error(ErrorKind::NotDensity, "density matrix has trace " + std::to_string(tr));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
    const double n = psi.norm();
    if (n == 0.0) throw Error(ErrorKind::NotDensity, "pure state from zero vector");
    const ComplexVector u = psi / n;
    return DensityMatrix(u * u.adjoint());
}

POVM::POVM(std::vector<ComplexMatrix> effects, double tol) : dim_(0), effects_(std::move(effects)) {
    if (effects_.empty()) throw Error(ErrorKind::NotPOVM, "POVM needs at least one effect");
    if (effects_.size() > 64) throw Error(ErrorKind::NotPOVM, "POVM limited to 64 outcomes (bitmask subsets)");
    dim_ = static_cast<std::size_t>(effects_.front().rows());
    const auto d = static_cast<Eigen::Index>(dim_);
    ComplexMatrix total = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < effects_.size(); ++k) {
        const ComplexMatrix& q = effects_[k];
        if (q.rows() != d || q.cols() != d)
            throw Error(ErrorKind::DimensionMismatch, "POVM effects differ in dimension");
        if (!is_hermitian(q, tol)) throw Error(ErrorKind::NotPOVM, "effect " + std::to_string(k) + " not Hermitian");
        if (hermitian_eig(q, tol).eigenvalues(0) < -tol)
            throw Error(ErrorKind::NotPOVM, "effect " + std::to_string(k) + " not positive semidefinite");
        total += q;
    }
    if ((total - ComplexMatrix::Identity(d, d)).norm() > tol)
        throw Error(ErrorKind::NotPOVM, "effects do not sum to the identity");
}

ComplexMatrix POVM::measure(Subset s) const {
    const auto d = static_cast<Eigen::Index>(dim_);
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < effects_.size(); ++k)
        if (s & singleton(k)) out += effects_[k];
    return out;
}

POVM::Subset POVM::full() const noexcept {
    return effects_.size() == 64 ? ~Subset{0} : (Subset{1} << effects_.size()) - 1;
}

OperatorKernel povm_kernel(const POVM& q, const std::vector<POVM::Subset>& subsets, std::vector<std::string> labels) {
    const std::size_t m = subsets.size();
    for (auto s : subsets)
        if (s & ~q.full()) throw Error(ErrorKind::DimensionMismatch, "subset refers to a nonexistent outcome");
    if (labels.empty()) {
        for (auto s : subsets) {
            if (s == q.full()) {
                labels.push_back("Omega");
                continue;
            }
            std::string name = "{";
            for (std::size_t k = 0; k < q.size(); ++k)
                if (s & POVM::singleton(k)) name += (name.size() > 1 ? "," : "") + std::to_string(k);
            labels.push_back(name + "}");
        }
    }
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(m * m);
    for (auto si : subsets)
        for (auto sj : subsets) blocks.push_back(q.measure(si & sj));
    return OperatorKernel(q.dim(), std::move(labels), std::move(blocks));
}

OperatorKernel povm_atom_kernel(const POVM& q) {
    std::vector<POVM::Subset> subsets;
    for (std::size_t k = 0; k < q.size(); ++k) subsets.push_back(POVM::singleton(k));
    return povm_kernel(q, subsets);
}

ScalarKernel channel_apply(const DensityMatrix& rho, const OperatorKernel& k) {
    if (rho.dim() != k.dim()) throw Error(ErrorKind::DimensionMismatch, "channel_apply: state and kernel dims differ");
    const auto m = static_cast<Eigen::Index>(k.size());
    ScalarKernel out{k.labels(), ComplexMatrix(m, m)};
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            out.values(i, j) = (rho.matrix() * k.block(static_cast<std::size_t>(i), static_cast<std::size_t>(j))).trace();
    return out;
}

PdReport check_scalar_pd(const ScalarKernel& c, double tol) {
    if (c.values.rows() == 0) return {true, 0.0};
    const EigenDecomposition eig = hermitian_eig(c.values, tol);
    const double lmin = eig.eigenvalues(0);
    return {lmin >= -tol * std::max(1.0, c.values.norm()), lmin};
}

RealVector hermitian_coordinates(const ComplexMatrix& h) {
    const Eigen::Index d = h.rows();
    RealVector out(d * d);
    Eigen::Index pos = 0;
    for (Eigen::Index i = 0; i < d; ++i) out(pos++) = h(i, i).real();
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) {
            out(pos++) = std::numbers::sqrt2 * h(i, j).real();
            out(pos++) = std::numbers::sqrt2 * h(i, j).imag();
        }
    return out;
}

SpanResult completeness_span(const OperatorKernel& k, double tol) {
    const auto d2 = static_cast<Eigen::Index>(k.dim() * k.dim());
    const auto& blocks = k.blocks();
    ComplexMatrix rows(static_cast<Eigen::Index>(2 * blocks.size()), d2);
    const Complex two_i(0.0, 2.0);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const ComplexMatrix& kb = blocks[b];
        // K = H + iA with H, A Hermitian; tr(rho K) = tr(rho H) + i tr(rho A)
        const ComplexMatrix herm = hermitian_part(kb);
        const ComplexMatrix anti = (kb - kb.adjoint()) / two_i;
        rows.row(static_cast<Eigen::Index>(2 * b)) = hermitian_coordinates(herm).cast<Complex>().transpose();
        rows.row(static_cast<Eigen::Index>(2 * b + 1)) = hermitian_coordinates(anti).cast<Complex>().transpose();
    }
    const std::size_t rank = rows.rows() == 0 ? 0 : rank_nullspace(rows, tol).rank;
    return {rank, rank == static_cast<std::size_t>(d2)};
}

CommutantResult double_commutant_check(const OperatorKernel& k, double tol) {
    const auto d = static_cast<Eigen::Index>(k.dim());
    const ComplexMatrix identity = ComplexMatrix::Identity(d, d);
    const auto& blocks = k.blocks();
    // the block table already contains every adjoint (K(t,s) = K(s,t)*)
    ComplexMatrix stacked(static_cast<Eigen::Index>(blocks.size()) * d * d, d * d);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        stacked.middleRows(static_cast<Eigen::Index>(b) * d * d, d * d) =
            kron(blocks[b].transpose(), identity) - kron(identity, blocks[b]);
    const std::size_t dim =
        stacked.rows() == 0 ? static_cast<std::size_t>(d * d) : static_cast<std::size_t>(rank_nullspace(stacked, tol).nullspace.cols());
    return {dim, dim == 1};
}

CompletenessReport completeness(const OperatorKernel& k, double tol) {
    const SpanResult span = completeness_span(k, tol);
    const CommutantResult comm = double_commutant_check(k, tol);
    return {span.span_rank, span.span_complete, comm.commutant_dim, comm.commutant_trivial};
}

std::vector<double> born_probabilities(const DensityMatrix& rho, const POVM& q) {
    if (rho.dim() != q.dim()) throw Error(ErrorKind::DimensionMismatch, "state and POVM dims differ");
    std::vector<double> p;
    p.reserve(q.size());
    double total = 0.0;
    for (const auto& e : q.effects()) {
        p.push_back(std::clamp((rho.matrix() * e).trace().real(), 0.0, 1.0));
        total += p.back();
    }
    for (auto& x : p) x /= total;
    return p;
}

Frequencies simulate_counts(const DensityMatrix& rho, const POVM& q, std::size_t shots, std::uint64_t seed) {
    const std::vector<double> p = born_probabilities(rho, q);
    Frequencies out{std::vector<double>(p.size(), 0.0), shots, shots == 0};
    if (shots == 0) return out;

    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) cdf[k] = (acc += p[k]);
    cdf.back() = 1.0;

    std::vector<std::size_t> counts(p.size(), 0);
    const std::size_t chunks = (shots + kSampleChunk - 1) / kSampleChunk;
    for (std::size_t c = 0; c < chunks; ++c) {
        NormalStream stream(seed, c);
        const std::size_t len = std::min(kSampleChunk, shots - c * kSampleChunk);
        for (std::size_t n = 0; n < len; ++n) {
            const double u = stream.uniform();
            const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            ++counts[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                                        static_cast<std::ptrdiff_t>(p.size()) - 1))];
        }
    }
    for (std::size_t k = 0; k < p.size(); ++k)
        out.values[k] = static_cast<double>(counts[k]) / static_cast<double>(shots);
    return out;
}

} // namespace opk
