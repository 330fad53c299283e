// dilation.cpp

#include "opk/dilation.hpp"

#include "opk/error.hpp"

#include <algorithm>

namespace opk {

CPMap::CPMap(std::vector<ComplexMatrix> kraus, bool declared_unital)
    : dim_(0), kraus_(std::move(kraus)), unital_(declared_unital) {
    if (kraus_.empty()) throw Error(ErrorKind::InvalidArgument, "CP map needs at least one Kraus operator");
    dim_ = static_cast<std::size_t>(kraus_.front().rows());
    const auto n = static_cast<Eigen::Index>(dim_);
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "CP map on a zero-dimensional space");
    ComplexMatrix total = ComplexMatrix::Zero(n, n);
    for (const auto& r : kraus_) {
        if (r.rows() != n || r.cols() != n) throw Error(ErrorKind::DimensionMismatch, "Kraus operators differ in shape");
        if (!r.allFinite()) throw Error(ErrorKind::InvalidArgument, "Kraus operator has a non-finite entry");
        total += r.adjoint() * r;
    }
    if (unital_ && (total - ComplexMatrix::Identity(n, n)).norm() > kUnitalTol)
        throw Error(ErrorKind::InvalidArgument, "CP map declared unital but sum R_k* R_k != I");
}

ComplexMatrix cp_apply(const CPMap& phi, const ComplexMatrix& a) {
    const auto n = static_cast<Eigen::Index>(phi.dim());
    if (a.rows() != n || a.cols() != n)
        throw Error(ErrorKind::DimensionMismatch, "cp_apply: argument is not " + std::to_string(n) + "x" + std::to_string(n));
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (const auto& r : phi.kraus()) out += r.adjoint() * a * r;
    return out;
}

ComplexMatrix matrix_unit(std::size_t n, std::size_t p, std::size_t q) {
    const auto sz = static_cast<Eigen::Index>(n);
    ComplexMatrix e = ComplexMatrix::Zero(sz, sz);
    e(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = 1.0;
    return e;
}

ComplexMatrix StinespringDilation::pi(const ComplexMatrix& a) const {
    const auto n = static_cast<Eigen::Index>(dim);
    if (a.rows() != n || a.cols() != n) throw Error(ErrorKind::DimensionMismatch, "pi: argument has wrong shape");
    const auto r = static_cast<Eigen::Index>(dilation_dim);
    ComplexMatrix out = ComplexMatrix::Zero(r, r);
    for (Eigen::Index u = 0; u < n; ++u)
        for (Eigen::Index v = 0; v < n; ++v)
            if (a(u, v) != Complex(0.0)) out += a(u, v) * unit_images[static_cast<std::size_t>(u * n + v)];
    return out;
}

namespace {

// Section s < n^3 is (E_pq, e_l) with s = (p n + q) n + l; s = n^3 + l is (I, e_l).
struct Section {
    ComplexMatrix op;
    Eigen::Index vector;
};

std::vector<Section> stinespring_sections(std::size_t n) {
    std::vector<Section> out;
    const auto sz = static_cast<Eigen::Index>(n);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
            for (Eigen::Index l = 0; l < sz; ++l) out.push_back({matrix_unit(n, p, q), l});
    for (Eigen::Index l = 0; l < sz; ++l) out.push_back({ComplexMatrix::Identity(sz, sz), l});
    return out;
}

} // namespace

ComplexMatrix stinespring_section_gram(const CPMap& phi) {
    const std::vector<Section> sections = stinespring_sections(phi.dim());
    const auto count = static_cast<Eigen::Index>(sections.size());
    ComplexMatrix g(count, count);
    for (Eigen::Index s = 0; s < count; ++s) {
        const Section& a = sections[static_cast<std::size_t>(s)];
        for (Eigen::Index t = s; t < count; ++t) {
            const Section& b = sections[static_cast<std::size_t>(t)];
            g(s, t) = cp_apply(phi, a.op.adjoint() * b.op)(a.vector, b.vector);
            g(t, s) = std::conj(g(s, t));
        }
    }
    return g;
}

StinespringDilation stinespring(const CPMap& phi, double tol) {
    const std::size_t n = phi.dim();
    const auto sz = static_cast<Eigen::Index>(n);
    const Eigen::Index units = sz * sz * sz;
    const Eigen::Index count = units + sz;

    const PsdFactor pf = psd_factor(stinespring_section_gram(phi), tol);
    const ComplexMatrix& coords = pf.factor;  // column s = coordinates of section s
    const ComplexMatrix coords_pinv = pseudoinverse(coords, tol);

    StinespringDilation out;
    out.dim = n;
    out.dilation_dim = pf.rank;
    out.embedding = coords.middleCols(units, sz);

    auto unit_section = [&](Eigen::Index p, Eigen::Index q, Eigen::Index l) { return (p * sz + q) * sz + l; };
    out.unit_images.reserve(n * n);
    for (Eigen::Index u = 0; u < sz; ++u) {
        for (Eigen::Index v = 0; v < sz; ++v) {
            // E_uv acts on section labels: (E_pq, e_l) -> delta_vp (E_uq, e_l), (I, e_l) -> (E_uv, e_l)
            ComplexMatrix shift = ComplexMatrix::Zero(count, count);
            for (Eigen::Index q = 0; q < sz; ++q)
                for (Eigen::Index l = 0; l < sz; ++l) shift(unit_section(u, q, l), unit_section(v, q, l)) = 1.0;
            for (Eigen::Index l = 0; l < sz; ++l) shift(unit_section(u, v, l), units + l) = 1.0;
            out.unit_images.push_back(coords * shift * coords_pinv);
        }
    }
    return out;
}

NaimarkDilation naimark(const POVM& q, double tol) {
    const auto d = static_cast<Eigen::Index>(q.dim());
    std::vector<PsdFactor> atoms;
    atoms.reserve(q.size());
    std::size_t total = 0;
    for (const auto& e : q.effects()) {
        atoms.push_back(psd_factor(e, tol));
        total += atoms.back().rank;
    }
    const auto r = static_cast<Eigen::Index>(total);
    NaimarkDilation out;
    out.dim = q.dim();
    out.dilation_dim = total;
    out.embedding = ComplexMatrix(r, d);
    Eigen::Index offset = 0;
    for (const auto& a : atoms) {
        const auto rk = static_cast<Eigen::Index>(a.rank);
        out.embedding.middleRows(offset, rk) = a.factor;
        ComplexMatrix p = ComplexMatrix::Zero(r, r);
        p.block(offset, offset, rk, rk).setIdentity();
        out.projections.push_back(std::move(p));
        offset += rk;
    }
    return out;
}

DilationReport verify_dilation(const StinespringDilation& dilation, const CPMap& phi) {
    if (dilation.dim != phi.dim()) throw Error(ErrorKind::DimensionMismatch, "verify_dilation: dimension mismatch");
    const std::size_t n = phi.dim();
    const auto sz = static_cast<Eigen::Index>(n);
    const ComplexMatrix& v = dilation.embedding;
    auto image = [&](std::size_t p, std::size_t q) -> const ComplexMatrix& { return dilation.unit_images[p * n + q]; };

    DilationReport rep;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            const ComplexMatrix e = matrix_unit(n, p, q);
            rep.representation =
                std::max(rep.representation, (v.adjoint() * image(p, q) * v - cp_apply(phi, e)).norm());
            rep.adjoint = std::max(rep.adjoint, (image(q, p) - image(p, q).adjoint()).norm());
            for (std::size_t s = 0; s < n; ++s) {
                for (std::size_t t = 0; t < n; ++t) {
                    // E_pq E_st = delta_qs E_pt
                    ComplexMatrix expected = q == s ? image(p, t) : ComplexMatrix::Zero(v.rows(), v.rows());
                    rep.multiplicativity =
                        std::max(rep.multiplicativity, (image(p, q) * image(s, t) - expected).norm());
                }
            }
        }
    }
    rep.isometry = (v.adjoint() * v - ComplexMatrix::Identity(sz, sz)).norm();
    return rep;
}

DilationReport verify_dilation(const NaimarkDilation& dilation, const POVM& q) {
    if (dilation.dim != q.dim() || dilation.projections.size() != q.size())
        throw Error(ErrorKind::DimensionMismatch, "verify_dilation: dimension mismatch");
    const ComplexMatrix& v = dilation.embedding;
    const auto r = static_cast<Eigen::Index>(dilation.dilation_dim);
    const auto d = static_cast<Eigen::Index>(q.dim());

    DilationReport rep;
    ComplexMatrix total = ComplexMatrix::Zero(r, r);
    for (std::size_t k = 0; k < q.size(); ++k) {
        const ComplexMatrix& pk = dilation.projections[k];
        total += pk;
        rep.representation = std::max(rep.representation, (v.adjoint() * pk * v - q.effect(k)).norm());
        rep.adjoint = std::max(rep.adjoint, (pk - pk.adjoint()).norm());
        for (std::size_t l = 0; l < q.size(); ++l) {
            const ComplexMatrix& pl = dilation.projections[l];
            const ComplexMatrix expected = k == l ? pk : ComplexMatrix::Zero(r, r);
            rep.multiplicativity = std::max(rep.multiplicativity, (pk * pl - expected).norm());
        }
    }
    rep.isometry = (v.adjoint() * v - ComplexMatrix::Identity(d, d)).norm();
    rep.completeness = (total - ComplexMatrix::Identity(r, r)).norm();
    return rep;
}

} // namespace opk
