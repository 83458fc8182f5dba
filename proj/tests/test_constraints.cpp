#include <doctest.h>

#include "pap/constraints.hpp"

#include <cmath>
#include <random>

using namespace pap;

namespace {

Eigen::VectorXd randvec(std::size_t k, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::VectorXd v(k);
    for (auto& x : v) x = g(rng);
    return v;
}

}  // namespace

TEST_CASE("check rows against the monomial definition")
{
    for (auto basis : {Basis::gaussian, Basis::boolean}) {
        int n = basis == Basis::boolean ? 9 : 6;
        auto inst = sample_instance(n, 4, basis, 3);
        auto pe = build_pe(inst, 4, 4);
        auto C = build_Q(inst, 4);
        auto r = constraint_residual(C, pe);
        for (std::size_t row = 0; row < C.rows.size(); ++row) {
            auto key = C.rows.key(row);
            int u = key.circles[0];
            double want = -pe(key.squares);
            for (int j = 0; j < n; ++j)
                for (int jj = 0; jj < n; ++jj) {
                    auto c = key.squares;
                    c.push_back(j);
                    c.push_back(jj);
                    want += inst.data(u, j) * inst.data(u, jj) * pe.monomial(c);
                }
            CHECK(r[row] == doctest::Approx(want).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("matrix-free operator matches the sparse matrix")
{
    for (int D : {2, 3, 4}) {
        auto inst = sample_instance(7, 5, Basis::gaussian, 10 + D);
        auto C = build_Q(inst, D);
        CheckOperator op(inst, D);
        REQUIRE(op.rows() == C.rows.size());
        REQUIRE(op.cols() == C.cols.size());
        auto x = randvec(op.cols(), 1), y = randvec(op.rows(), 2);
        Eigen::VectorXd a = C.Q * x, b = op.apply(x);
        CHECK((a - b).norm() <= 1e-11 * a.norm());
        Eigen::VectorXd at = C.Q.transpose() * y, bt = op.apply_t(y);
        CHECK((at - bt).norm() <= 1e-11 * at.norm());
    }
}

TEST_CASE("projection")
{
    auto inst = sample_instance(8, 3, Basis::gaussian, 4);
    auto pe = build_pe(inst, 4, 4);
    auto C = build_Q(inst, 4);
    auto rep = project(pe, C);
    CHECK(rep.method == "eigen");
    CHECK(rep.residual_before > 0);
    CHECK(rep.residual_after <= 1e-8 * std::max(1.0, rep.residual_before));
    CHECK(!rep.cutoff_ambiguous);
    CHECK(rep.change <= rep.q_norm * rep.pinv_norm * rep.residual_before * (1 + 1e-9));

    auto again = project(rep.pe, C);
    CHECK(again.change <= 1e-10 * std::max(1.0, rep.pe.values().norm()));

    // the correction is orthogonal to the kernel of Q
    Eigen::MatrixXd Qd = C.dense();
    Eigen::VectorXd delta = pe.values() - rep.pe.values();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Qd, Eigen::ComputeFullV);
    int rank = int(svd.rank());
    CHECK(rank == rep.rank);
    Eigen::MatrixXd K = svd.matrixV().rightCols(Qd.cols() - rank);
    CHECK((K.transpose() * delta).norm() <= 1e-9 * delta.norm());

    // CG agrees with the eigen route
    ProjectOptions cg;
    cg.dense_limit = 0;
    auto rc = project(pe, C, cg);
    CHECK(rc.method == "cg");
    CHECK((rc.pe.values() - rep.pe.values()).norm() <= 1e-7 * rep.pe.values().norm());
}

TEST_CASE("projector identities")
{
    auto inst = sample_instance(7, 3, Basis::gaussian, 6);
    auto C = build_Q(inst, 4);
    Eigen::MatrixXd Q = C.dense();
    // P projects onto ker Q
    Eigen::MatrixXd Qp = Q.completeOrthogonalDecomposition().pseudoInverse();
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(Q.cols(), Q.cols()) - Qp * Q;
    CHECK((P * P - P).norm() <= 1e-9 * P.norm());
    CHECK((Q * P).norm() <= 1e-9 * Q.norm());
    CHECK((P * Q.transpose()).norm() <= 1e-9 * Q.norm());
}

TEST_CASE("N_k lies in the left kernel")
{
    for (int k : {4, 5}) {
        auto inst = sample_instance(6, 4, Basis::gaussian, 30 + k);
        auto C = build_Q(inst, k);
        auto N = build_Nk(k, inst);
        REQUIRE(N.rows == C.rows);
        Eigen::MatrixXd QN = Eigen::MatrixXd(SparseRowMatrix(C.Q.transpose()) * N.N);
        CHECK(QN.norm() <= 1e-10 * C.dense().norm() * Eigen::MatrixXd(N.N).norm());
        CHECK(Eigen::MatrixXd(N.N).norm() > 0);

        std::vector<int> S(k - 4);
        for (int i = 0; i < k - 4; ++i) S[i] = i + 1;
        Eigen::VectorXd ab = nk_column(k, inst, S, 0, 2), ba = nk_column(k, inst, S, 2, 0);
        CHECK((ab + ba).norm() == 0.0);
        CHECK(ab.norm() > 0);
    }
    CHECK_THROWS_AS(nk_column(4, sample_instance(4, 2, Basis::gaussian, 1), {}, 1, 1), InvalidArgument);
}

TEST_CASE("QQ^T nullity at small n")
{
    for (auto [n, m] : {std::pair{8, 3}, std::pair{9, 4}, std::pair{10, 5}}) {
        auto inst = sample_instance(n, m, Basis::gaussian, 40 + n);
        auto s = qq_spectrum(inst, 4);
        CHECK(s.method == "dense");
        CHECK(s.nullity == m * (m - 1) / 2);
        CHECK(s.min_nonzero > 0);
    }
}

TEST_CASE("Lanczos matches the dense spectrum")
{
    for (int n : {9, 10}) {
        auto inst = sample_instance(n, 4, Basis::gaussian, 50 + n);
        auto dense = qq_spectrum(inst, 4);
        SpectrumOptions o;
        o.dense_limit = 0;
        auto lz = qq_spectrum(inst, 4, o);
        CHECK(lz.method == "lanczos");
        CHECK(lz.min_nonzero == doctest::Approx(dense.min_nonzero).epsilon(1e-6));
        CHECK(lz.max_eig == doctest::Approx(dense.max_eig).epsilon(1e-4));
    }
}
