#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hjac/errors.hpp"
#include "hjac/hsvd.hpp"
#include "oracles.hpp"

using namespace hjac;

namespace {

// G J G^T in long double, reading the signs out of the diagonal packages.
DenseMatrix gjgt(const DenseMatrix& g, const DiagonalPackageVector& diag) {
    const std::size_t n = g.rows();
    DenseMatrix m(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            long double s = 0;
            for (const auto& pkg : diag) s += static_cast<long double>(g(a, pkg.rho)) * pkg.sign * g(b, pkg.rho);
            m(a, b) = static_cast<double>(s);
        }
    return m;
}

double rel_diff(const DenseMatrix& a, const DenseMatrix& b) {
    long double num = 0, den = 0;
    for (std::size_t k = 0; k < a.data().size(); ++k) {
        const long double d = static_cast<long double>(a.data()[k]) - b.data()[k];
        num += d * d;
        den += static_cast<long double>(b.data()[k]) * b.data()[k];
    }
    return static_cast<double>(std::sqrt(num / den));
}

// Random well-conditioned factor with p positive columns.
DenseMatrix random_factor(std::size_t n, std::size_t r, std::mt19937_64& rng) {
    auto g = oracle::random_matrix(n, r, rng);
    for (std::size_t k = 0; k < r; ++k) g(k, k) += 3.0;  // keep it far from rank deficiency
    return g;
}

std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("precompute") {
    const auto g = DenseMatrix::from_rows({{3, 0}, {4, 1}});
    const auto d = precompute(g, SignatureVector(2, 1));
    REQUIRE(d.size() == 2);
    CHECK(d[0] == DiagonalPackage{25.0, 0, 1});
    CHECK(d[1] == DiagonalPackage{1.0, 1, -1});
    CHECK_THROWS_AS(precompute(DenseMatrix::from_rows({{1, 0}, {1, 0}}), SignatureVector(2, 2)),
                    RankDeficiencyError);
    CHECK_THROWS_AS(precompute(g, SignatureVector(3, 1)), ShapeError);
}

TEST_CASE("sort_diagonal orders positives descending and negatives ascending, stably") {
    DiagonalPackageVector d{{1, 0, 1}, {5, 1, 1}, {3, 2, 1}, {4, 3, -1}, {2, 4, -1}};
    sort_diagonal(d, 3);
    std::vector<std::uint32_t> rho;
    for (const auto& x : d) rho.push_back(x.rho);
    CHECK(rho == std::vector<std::uint32_t>{1, 2, 0, 4, 3});

    DiagonalPackageVector ties{{2, 0, 1}, {2, 1, 1}, {2, 2, 1}};
    sort_diagonal(ties, 3);
    CHECK(ties[0].rho == 0);
    CHECK(ties[1].rho == 1);
    CHECK(ties[2].rho == 2);
}

TEST_CASE("check_convergence") {
    using C = ConvergenceCode;
    const std::vector<C> none{C::none, C::none};
    const std::vector<C> quad{C::quadratic, C::none};
    const std::vector<C> act{C::quadratic, C::active};
    CHECK(check_convergence(none) == ConvergenceDecision::stop_orthogonal);
    CHECK(check_convergence(quad) == ConvergenceDecision::stop_quadratic);
    CHECK(check_convergence(act) == ConvergenceDecision::proceed);
}

TEST_CASE("jacobi_step orthogonalizes every pivot pair of the step") {
    std::mt19937_64 rng(4);
    const auto g0 = random_factor(6, 4, rng);
    const SignatureVector j(4, 2);
    SolverWorkspace ws{g0, DenseMatrix::identity(4), precompute(g0, j)};
    auto stepper = stepper_init(4);
    const auto pairs = std::vector<IndexPair>{stepper.blocks[0].pair(), stepper.blocks[1].pair()};
    std::vector<ConvergenceCode> codes(2);
    jacobi_step(ws, stepper, codes, SolverConfig{});
    for (const auto& pr : pairs) {
        const auto gi = ws.g.col(ws.diag[pr.i].rho);
        const auto gj = ws.g.col(ws.diag[pr.j].rho);
        long double dot = 0;
        for (std::size_t k = 0; k < gi.size(); ++k) dot += static_cast<long double>(gi[k]) * gj[k];
        CHECK(std::fabs(static_cast<double>(dot)) <= 1e-13 * std::sqrt(ws.diag[pr.i].d * ws.diag[pr.j].d));
        // d is the fresh squared norm of the column.
        CHECK(ws.diag[pr.i].d == doctest::Approx(squared_norm(gi)).epsilon(1e-15));
    }
    CHECK(stepper.blocks[0].pair() != pairs[0]);
    std::vector<ConvergenceCode> wrong(3);
    CHECK_THROWS_AS(jacobi_step(ws, stepper, wrong, SolverConfig{}), ShapeError);
}

TEST_CASE("drive: 2x2 definite case") {
    // G G^T = [[2,1],[1,1]].
    const auto g = DenseMatrix::from_rows({{1, 1}, {0, 1}});
    const auto res = drive(g, SignatureVector(2, 2));
    const auto lam = sorted(res.lambda);
    CHECK(lam[0] == doctest::Approx((3 - std::sqrt(5.0)) / 2).epsilon(1e-14));
    CHECK(lam[1] == doctest::Approx((3 + std::sqrt(5.0)) / 2).epsilon(1e-14));
    CHECK(orthonormality_distance(res.u) <= 4 * kEps);
    CHECK(res.stop_reason != StopReason::max_sweeps);
}

TEST_CASE("drive: 2x2 indefinite case") {
    // G J G^T = [[3,-1],[-1,-1]] with eigenvalues 1 +- sqrt(5).
    const auto g = DenseMatrix::from_rows({{2, 1}, {0, 1}});
    const SignatureVector j(2, 1);
    const auto res = drive(g, j);
    const auto lam = sorted(res.lambda);
    CHECK(std::fabs(lam[0] - (1 - std::sqrt(5.0))) <= 1e-14);
    CHECK(std::fabs(lam[1] - (1 + std::sqrt(5.0))) <= 1e-14);
    REQUIRE(res.vinv_t);
    // V is J-orthogonal: V^T J V = J.
    const auto v = recover_v(*res.vinv_t, j);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
            double s = 0;
            for (std::size_t k = 0; k < 2; ++k) s += v(k, a) * j[k] * v(k, b);
            CHECK(s == doctest::Approx(a == b ? j[a] : 0.0).epsilon(1e-14).scale(1.0));
        }
    // G = U Sigma V^T.
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
            double s = 0;
            for (std::size_t k = 0; k < 2; ++k) s += res.u(a, k) * res.sigma[k] * v(b, k);
            CHECK(s == doctest::Approx(g(a, b)).epsilon(1e-14).scale(1.0));
        }
}

TEST_CASE("drive: diagonal factor stops after one sweep") {
    const auto g = DenseMatrix::from_rows({{2, 0}, {0, 1}});
    const auto res = drive(g, SignatureVector(2, 1));
    CHECK(res.lambda == std::vector<double>{4.0, -1.0});
    CHECK(res.sweeps_used == 1);
    CHECK(res.stop_reason == StopReason::orthogonal);
    CHECK(res.u == DenseMatrix::identity(2));
}

TEST_CASE("drive rejects bad input") {
    CHECK_THROWS_AS(drive(DenseMatrix(3, 3, 1.0), SignatureVector(3, 3)), ShapeError);
    CHECK_THROWS_AS(drive(DenseMatrix(2, 4, 1.0), SignatureVector(4, 4)), ShapeError);
    auto g = DenseMatrix::identity(2);
    g(0, 1) = std::nan("");
    CHECK_THROWS_AS(drive(g, SignatureVector(2, 2)), DomainError);
    CHECK_THROWS_AS(drive(DenseMatrix::identity(2), SignatureVector(3, 3)), ShapeError);
}

TEST_CASE("drive reports lost definiteness") {
    // Two parallel columns of equal norm with opposite signs: the hyperbolic
    // rotation does not exist.
    const auto g = DenseMatrix::from_rows({{1, 1}, {0, 0}});
    CHECK_THROWS_AS(drive(g, SignatureVector(2, 1)), DefinitenessLostError);
}

TEST_CASE("property: G J G^T is invariant across sweeps") {
    std::mt19937_64 rng(8);
    for (std::size_t p : {0u, 3u, 8u, 12u}) {
        const auto g = random_factor(14, 12, rng);
        const SignatureVector j(12, p);
        SolverWorkspace init{g, std::nullopt, precompute(g, j)};
        const auto m0 = gjgt(g, init.diag);
        std::size_t seen = 0;
        const auto res = drive(g, j, SolverConfig{}, [&](const SweepTelemetry&, const SolverWorkspace& ws) {
            ++seen;
            CHECK(rel_diff(gjgt(ws.g, ws.diag), m0) <= 1e-13);
        });
        CHECK(seen == res.sweeps_used);
        CHECK(res.stop_reason != StopReason::max_sweeps);
        CHECK(orthonormality_distance(res.u) <= 1e-13);
    }
}

TEST_CASE("property: results do not depend on the worker count") {
    std::mt19937_64 rng(12);
    const auto g = random_factor(40, 32, rng);
    const SignatureVector j(32, 11);
    SolverConfig cfg;
    const auto ref = drive(g, j, cfg);
    for (std::size_t w : {2u, 3u, 16u}) {
        cfg.workers = w;
        const auto res = drive(g, j, cfg);
        CHECK(res.sigma == ref.sigma);
        CHECK(res.lambda == ref.lambda);
        CHECK(res.u == ref.u);
        CHECK(*res.vinv_t == *ref.vinv_t);
        CHECK(res.sweeps_used == ref.sweeps_used);
    }
}

TEST_CASE("property: modulus and row-cyclic schedules agree") {
    std::mt19937_64 rng(21);
    for (std::size_t p : {0u, 5u, 10u}) {
        const auto g = random_factor(24, 20, rng);
        const SignatureVector j(20, p);
        SolverConfig cyc;
        cyc.schedule = Schedule::row_cyclic;
        const auto a = sorted(drive(g, j).lambda);
        const auto b = sorted(drive(g, j, cyc).lambda);
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::fabs(a[k] - b[k]) <= 1e-12 * std::fabs(b[k]));
    }
}

TEST_CASE("sorting and V accumulation switches do not change the spectrum") {
    std::mt19937_64 rng(31);
    const auto g = random_factor(18, 16, rng);
    const SignatureVector j(16, 6);
    const auto ref = sorted(drive(g, j).lambda);
    SolverConfig cfg;
    cfg.sort = false;
    cfg.accumulate_v = false;
    const auto res = drive(g, j, cfg);
    CHECK_FALSE(res.vinv_t);
    const auto lam = sorted(res.lambda);
    for (std::size_t k = 0; k < lam.size(); ++k) CHECK(std::fabs(lam[k] - ref[k]) <= 1e-12 * std::fabs(ref[k]));
}

TEST_CASE("property: predicted diagonal update matches the recomputed norms") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int trial = 0; trial < 500; ++trial) {
        auto pair = oracle::random_matrix(20, 2, rng);
        for (int hyp : {-1, 1}) {
            auto x = std::vector<double>(pair.col(0).begin(), pair.col(0).end());
            auto y = std::vector<double>(pair.col(1).begin(), pair.col(1).end());
            // Blend the columns to control their correlation.
            const double w = u(rng);
            for (std::size_t k = 0; k < y.size(); ++k) y[k] = w * x[k] + (1 - std::fabs(w)) * y[k];
            const PivotGram gram{squared_norm(x), squared_norm(y), dot_chunked(x, y)};
            const auto rot = compute_rotation(gram, hyp);
            const auto [pi, pj] = diagonal_update_predicted(gram, rot);
            const auto [di, dj] = fused_pair_update(x, y, rot.t, rot.c, rot.hyp);
            const double scale = gram.a_ii + gram.a_jj;
            CHECK(std::fabs(pi - di) <= 1e-12 * scale);
            CHECK(std::fabs(pj - dj) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("border and strip_border") {
    const auto g = DenseMatrix::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 10}});
    const SignatureVector j(3, 2);
    const auto b = border(g, j, 4, 4);
    CHECK(b.g.rows() == 4);
    CHECK(b.g.cols() == 4);
    CHECK(b.j.positives() == 3);
    REQUIRE(b.info.synthetic_column);
    CHECK(*b.info.synthetic_column == 2);
    CHECK(b.g(3, 2) == 1.0);
    CHECK(b.g(2, 3) == 10.0);
    CHECK(b.g(0, 1) == 2.0);
    CHECK_THROWS_AS(border(g, j, 4, 3), ShapeError);
    CHECK_THROWS_AS(border(g, j, 6, 8), ShapeError);

    const auto direct = drive_bordered(g, j);
    CHECK(direct.sigma.size() == 3);
    CHECK(direct.u.rows() == 3);
    SolverConfig cyc;
    cyc.schedule = Schedule::row_cyclic;
    const auto ref = sorted(drive(g, j, cyc).lambda);
    const auto lam = sorted(direct.lambda);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::fabs(lam[k] - ref[k]) <= 1e-12 * std::fabs(ref[k]));
    CHECK(orthonormality_distance(direct.u) <= 1e-13);
}

TEST_CASE("telemetry CSV") {
    std::ostringstream os;
    const std::vector<SweepTelemetry> rows{{0, 3, 1, 0.5, ConvergenceCode::active}};
    write_telemetry_csv(os, rows);
    CHECK(os.str() == "sweep,rotations,skips,max_abs_t,code\n0,3,1,0.5,3\n");
}
