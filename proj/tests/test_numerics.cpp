#include "doctest.h"
#include "support.hpp"

#include "opk/error.hpp"
#include "opk/numerics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

using namespace opk;
using namespace opk::test;

namespace {

void check_eig_invariants(const ComplexMatrix& m, const EigenDecomposition& e, double tol) {
    const Eigen::Index n = m.rows();
    const double scale = std::max(1.0, m.norm());
    for (Eigen::Index k = 0; k < n; ++k) {
        const ComplexVector v = e.vectors.col(k);
        CHECK((m * v - e.eigenvalues(k) * v).norm() <= tol * scale);
        if (k > 0) CHECK(e.eigenvalues(k - 1) <= e.eigenvalues(k));
    }
    CHECK((e.vectors.adjoint() * e.vectors - identity(n)).norm() <= tol * std::max<double>(1.0, static_cast<double>(n)));
}

// Brute force over supports: w_S = v_S - theta with sum w = 1, zero elsewhere.
std::vector<double> simplex_oracle(const std::vector<double>& v) {
    const std::size_t n = v.size();
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_w;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 0; k < n; ++k)
            if (mask >> k & 1) {
                sum += v[k];
                ++count;
            }
        const double theta = (sum - 1.0) / static_cast<double>(count);
        std::vector<double> w(n, 0.0);
        bool feasible = true;
        for (std::size_t k = 0; k < n; ++k)
            if (mask >> k & 1) {
                w[k] = v[k] - theta;
                if (w[k] < -1e-15) feasible = false;
            }
        if (!feasible) continue;
        double dist = 0.0;
        for (std::size_t k = 0; k < n; ++k) dist += (w[k] - v[k]) * (w[k] - v[k]);
        if (dist < best) {
            best = dist;
            best_w = w;
        }
    }
    return best_w;
}

} // namespace

TEST_SUITE("numerics") {

TEST_CASE("hermitian_eig on fixed examples") {
    SUBCASE("identity") {
        const auto e = hermitian_eig(identity(3));
        CHECK(e.eigenvalues.isApprox(RealVector::Ones(3)));
        check_eig_invariants(identity(3), e, 1e-12);
    }
    SUBCASE("pauli x") {
        const auto e = hermitian_eig(pauli_x());
        CHECK(e.eigenvalues(0) == doctest::Approx(-1.0));
        CHECK(e.eigenvalues(1) == doctest::Approx(1.0));
        check_eig_invariants(pauli_x(), e, 1e-12);
    }
    SUBCASE("diagonal") {
        ComplexMatrix d = ComplexMatrix::Zero(3, 3);
        d.diagonal() << 3.0, 1.0, 2.0;
        const auto e = hermitian_eig(d);
        CHECK(e.eigenvalues(0) == doctest::Approx(1.0));
        CHECK(e.eigenvalues(1) == doctest::Approx(2.0));
        CHECK(e.eigenvalues(2) == doctest::Approx(3.0));
        // permutation eigenvectors up to phase
        CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
        CHECK(std::abs(e.vectors(2, 1)) == doctest::Approx(1.0));
        CHECK(std::abs(e.vectors(0, 2)) == doctest::Approx(1.0));
    }
    SUBCASE("pauli y has complex eigenvectors") {
        const auto e = hermitian_eig(pauli_y());
        check_eig_invariants(pauli_y(), e, 1e-12);
    }
    SUBCASE("zero matrix") {
        const auto e = hermitian_eig(ComplexMatrix::Zero(4, 4));
        CHECK(e.eigenvalues.isZero());
    }
}

TEST_CASE("hermitian_eig errors") {
    CHECK_THROWS_AS(hermitian_eig(mat2(0, 1, 0, 0)), Error);
    try {
        hermitian_eig(mat2(0, 1, 0, 0));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotHermitian);
    }
    try {
        hermitian_eig(ComplexMatrix::Zero(2, 3));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionMismatch);
    }
}

TEST_CASE("hermitian_eig reconstructs random Hermitian matrices and matches Eigen") {
    Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const auto n = static_cast<Eigen::Index>(rng.index(1, 16));
        const ComplexMatrix m = rng.hermitian(n) * std::pow(10.0, rng.uniform(-3, 3));
        const auto e = hermitian_eig(m);
        const ComplexMatrix rebuilt = e.vectors * e.eigenvalues.cast<Complex>().asDiagonal() * e.vectors.adjoint();
        CHECK((rebuilt - m).norm() <= 1e-10 * m.norm());
        CHECK((e.eigenvalues - oracle_eigenvalues(m)).norm() <= 1e-10 * m.norm());
        check_eig_invariants(m, e, 1e-10);
    }
}

TEST_CASE("hermitian_eig handles degenerate spectra") {
    Rng rng(5);
    const ComplexMatrix q = rng.matrix(6, 6).householderQr().householderQ();
    RealVector spectrum(6);
    spectrum << 1, 1, 1, 2, 2, -3;
    const ComplexMatrix m = q * spectrum.cast<Complex>().asDiagonal() * q.adjoint();
    const auto e = hermitian_eig(m);
    check_eig_invariants(m, e, 1e-10);
    std::sort(spectrum.data(), spectrum.data() + 6);
    CHECK((e.eigenvalues - spectrum).norm() <= 1e-12);
}

TEST_CASE("psd_factor examples") {
    SUBCASE("zero") {
        const auto f = psd_factor(ComplexMatrix::Zero(2, 2));
        CHECK(f.rank == 0);
        CHECK(f.factor.rows() == 0);
        CHECK(f.factor.cols() == 2);
    }
    SUBCASE("identity") {
        const auto f = psd_factor(identity(2));
        CHECK(f.rank == 2);
        CHECK((f.factor.adjoint() * f.factor - identity(2)).norm() <= 1e-14);
    }
    SUBCASE("ones") {
        // eigenvalues {2, 0}, eigenvector (1,1)/sqrt2 -> F = (1, 1) up to phase
        const ComplexMatrix g = mat2(1, 1, 1, 1);
        const auto f = psd_factor(g);
        CHECK(f.rank == 1);
        CHECK((f.factor.adjoint() * f.factor - g).norm() <= 1e-14);
        CHECK(std::abs(f.factor(0, 0)) == doctest::Approx(1.0));
        CHECK(std::abs(f.factor(0, 0) - f.factor(0, 1)) <= 1e-14);
    }
    SUBCASE("negative eigenvalue rejected") {
        try {
            psd_factor(mat2(1, 2, 2, 1));
            FAIL("expected NotPSD");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotPSD);
        }
    }
}

TEST_CASE("psd_factor round trip on random Gram matrices") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<Eigen::Index>(rng.index(1, 12));
        const auto k = static_cast<Eigen::Index>(rng.index(1, 12));
        const ComplexMatrix b = rng.matrix(k, n);
        const ComplexMatrix g = b.adjoint() * b;
        const auto f = psd_factor(g);
        CHECK((f.factor.adjoint() * f.factor - g).norm() <= 1e-9 * std::max(1.0, g.norm()));
        CHECK(f.rank == oracle_rank(b));
    }
}

TEST_CASE("rank_nullspace examples") {
    SUBCASE("identity") {
        const auto r = rank_nullspace(identity(2));
        CHECK(r.rank == 2);
        CHECK(r.nullspace.cols() == 0);
    }
    SUBCASE("ones") {
        const auto r = rank_nullspace(mat2(1, 1, 1, 1));
        CHECK(r.rank == 1);
        REQUIRE(r.nullspace.cols() == 1);
        const ComplexVector n = r.nullspace.col(0);
        // proportional to (1, -1)/sqrt2
        CHECK(std::abs(n(0) + n(1)) <= 1e-12);
        CHECK(n.norm() == doctest::Approx(1.0));
    }
    SUBCASE("wide zero") {
        const auto r = rank_nullspace(ComplexMatrix::Zero(2, 3));
        CHECK(r.rank == 0);
        CHECK(r.nullspace.cols() == 3);
        CHECK((r.nullspace.adjoint() * r.nullspace - identity(3)).norm() <= 1e-12);
    }
}

TEST_CASE("rank_nullspace on random rank-deficient matrices") {
    Rng rng(31);
    for (int trial = 0; trial < 80; ++trial) {
        const auto rows = static_cast<Eigen::Index>(rng.index(1, 12));
        const auto cols = static_cast<Eigen::Index>(rng.index(1, 12));
        const auto k = static_cast<Eigen::Index>(rng.index(0, static_cast<std::size_t>(std::min(rows, cols))));
        const ComplexMatrix m = k == 0 ? ComplexMatrix::Zero(rows, cols) : rng.low_rank(rows, cols, k);
        const auto r = rank_nullspace(m);
        CHECK(r.rank == oracle_rank(m));
        CHECK(r.rank + static_cast<std::size_t>(r.nullspace.cols()) == static_cast<std::size_t>(cols));
        const double bound = 1e-10 * std::max(1.0, m.norm());
        for (Eigen::Index c = 0; c < r.nullspace.cols(); ++c) CHECK((m * r.nullspace.col(c)).norm() <= bound);
        if (r.nullspace.cols() > 0)
            CHECK((r.nullspace.adjoint() * r.nullspace - identity(r.nullspace.cols())).norm() <= 1e-10);
    }
}

TEST_CASE("pseudoinverse examples") {
    CHECK((pseudoinverse(identity(2)) - identity(2)).norm() <= 1e-14);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
    expected(0, 0) = 0.5;
    CHECK((pseudoinverse(d) - expected).norm() <= 1e-14);

    ComplexMatrix row(1, 2);
    row << 1.0, 1.0;
    const ComplexMatrix p = pseudoinverse(row);
    REQUIRE(p.rows() == 2);
    REQUIRE(p.cols() == 1);
    CHECK(std::abs(p(0, 0) - 0.5) <= 1e-14);
    CHECK(std::abs(p(1, 0) - 0.5) <= 1e-14);
    // Penrose identities by direct multiplication
    CHECK((row * p * row - row).norm() <= 1e-14);
    CHECK((p * row * p - p).norm() <= 1e-14);
}

TEST_CASE("pseudoinverse satisfies the Penrose identities on random matrices") {
    Rng rng(41);
    for (int trial = 0; trial < 80; ++trial) {
        const auto rows = static_cast<Eigen::Index>(rng.index(1, 12));
        const auto cols = static_cast<Eigen::Index>(rng.index(1, 12));
        const auto k = static_cast<Eigen::Index>(rng.index(1, static_cast<std::size_t>(std::min(rows, cols))));
        const ComplexMatrix m = trial % 2 ? rng.low_rank(rows, cols, k) : rng.matrix(rows, cols);
        const ComplexMatrix p = pseudoinverse(m);
        const double bound = 1e-9 * std::max(1.0, m.norm());
        CHECK((m * p * m - m).norm() <= bound);
        CHECK((p * m * p - p).norm() <= bound * std::max(1.0, p.norm()));
        const ComplexMatrix mp = m * p;
        const ComplexMatrix pm = p * m;
        CHECK((mp - mp.adjoint()).norm() <= bound);
        CHECK((pm - pm.adjoint()).norm() <= bound);
    }
}

TEST_CASE("project_simplex examples") {
    auto near = [](const std::vector<double>& a, const std::vector<double>& b) {
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-14));
    };
    near(project_simplex(std::vector<double>{0.5, 0.5}), {0.5, 0.5});
    near(project_simplex(std::vector<double>{2.0, 0.0}), {1.0, 0.0});
    const std::vector<double> v{0.4, 0.2, 0.1};
    near(project_simplex(v), {0.5, 0.3, 0.2});
    near(simplex_oracle(v), {0.5, 0.3, 0.2});
    try {
        project_simplex(std::vector<double>{});
        FAIL("expected EmptyInput");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyInput);
    }
}

TEST_CASE("project_simplex properties") {
    Rng rng(51);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = rng.index(1, 32);
        std::vector<double> v(n);
        for (auto& x : v) x = rng.uniform(-3.0, 3.0);
        const auto w = project_simplex(v);
        CHECK(std::all_of(w.begin(), w.end(), [](double x) { return x >= 0.0; }));
        CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) <= 1e-12);
        const auto again = project_simplex(w);
        for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(again[k] - w[k]) <= 1e-12);
        if (n <= 10) {
            const auto oracle = simplex_oracle(v);
            for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(oracle[k] - w[k]) <= 1e-12);
        }
    }
}

TEST_CASE("kron and vec follow column stacking") {
    Rng rng(61);
    const ComplexMatrix a = rng.matrix(3, 3);
    const ComplexMatrix x = rng.matrix(3, 3);
    const ComplexMatrix b = rng.matrix(3, 3);
    // vec(A X B) = (B^T (x) A) vec(X)
    CHECK((vec(a * x * b) - kron(b.transpose(), a) * vec(x)).norm() <= 1e-12);
    CHECK((unvec(vec(x), 3, 3) - x).norm() == 0.0);
}

TEST_CASE("psd square roots") {
    Rng rng(71);
    const ComplexMatrix b = rng.matrix(4, 4);
    const ComplexMatrix g = b.adjoint() * b + identity(4);
    const ComplexMatrix s = psd_sqrt(g);
    CHECK((s * s - g).norm() <= 1e-10 * g.norm());
    const ComplexMatrix inv = psd_inverse_sqrt(g);
    CHECK((inv * g * inv - identity(4)).norm() <= 1e-10);
    CHECK_THROWS_AS(psd_inverse_sqrt(ComplexMatrix::Zero(2, 2)), Error);
}

}
