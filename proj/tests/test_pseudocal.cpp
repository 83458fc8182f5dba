#include <doctest.h>

#include "pap/pseudocal.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

using namespace pap;

namespace {

CellMultiIndex cells(std::initializer_list<std::tuple<int, int, int>> xs)
{
    CellMultiIndex a;
    for (auto [u, i, k] : xs) a.set(u, i, k);
    return a;
}

void binary_alphas(int n, int m, int T, const std::function<void(const CellMultiIndex&)>& f)
{
    int c = n * m;
    for (unsigned mask = 0; mask < (1u << c); ++mask) {
        if (__builtin_popcount(mask) > T) continue;
        CellMultiIndex a;
        for (int x = 0; x < c; ++x)
            if (mask >> x & 1) a.set(x / n, x % n, 1);
        f(a);
    }
}

}  // namespace

TEST_CASE("sampling")
{
    auto a = sample_instance(5, 4, Basis::gaussian, 7), b = sample_instance(5, 4, Basis::gaussian, 7);
    CHECK(a.data == b.data);
    auto c = sample_instance(6, 3, Basis::boolean, 3);
    for (int u = 0; u < 3; ++u)
        for (int i = 0; i < 6; ++i) CHECK(std::abs(c.data(u, i)) == 1.0);
    auto big = sample_instance(1000, 100, Basis::gaussian, 11);
    CHECK(std::abs(big.data.mean()) <= 4.0 / std::sqrt(1e5));

    auto g = sample_planted(7, 5, Basis::gaussian, 1);
    auto v = g.v();
    for (int i = 0; i < 7; ++i) CHECK(std::abs(std::abs(v[i]) - 1 / std::sqrt(7.0)) < 1e-15);
    for (int u = 0; u < 5; ++u) CHECK(std::abs(g.instance.data.row(u).dot(v) - g.b[u]) <= 1e-10);

    auto p = sample_planted(4, 6, Basis::boolean, 2);
    for (int u = 0; u < 6; ++u) {
        int s = 0;
        for (int i = 0; i < 4; ++i) s += int(p.instance.data(u, i)) * p.v_sign[i];
        CHECK(std::abs(s) == 2);
        CHECK(s == 2 * p.b[u]);
    }
    CHECK_THROWS_AS(sample_planted(5, 2, Basis::boolean, 0), UnsupportedInstance);
}

TEST_CASE("planted conditional moment")
{
    Eigen::VectorXd v(3);
    v << 0.6, 0.8, 0.0;
    CHECK(planted_conditional_moment({0, 0, 0}, v, 0.3) == 1.0);
    CHECK(planted_conditional_moment({1, 0, 0}, v, 0.3) == doctest::Approx(0.18));
    CHECK(planted_conditional_moment({2, 0, 0}, v, 1.0) == doctest::Approx(0.0));
    CHECK_THROWS(planted_conditional_moment({1, 0, 0}, Eigen::VectorXd::Zero(3), 1.0));

    // Monte Carlo at n=3, fixed v and b
    Eigen::VectorXd w(3);
    w << 1, -1, 1;
    w /= std::sqrt(3.0);
    double b = -1;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    const int N = 100000;
    std::vector<std::vector<int>> alphas;
    for (int a = 0; a <= 4; ++a)
        for (int c = 0; a + c <= 4; ++c)
            for (int e = 0; a + c + e <= 4; ++e) alphas.push_back({a, c, e});
    std::vector<double> s1(alphas.size()), s2(alphas.size());
    for (int t = 0; t < N; ++t) {
        Eigen::Vector3d x(g(rng), g(rng), g(rng));
        Eigen::Vector3d d = b * w + x - w * w.dot(x);
        for (std::size_t k = 0; k < alphas.size(); ++k) {
            double h = 1;
            for (int i = 0; i < 3; ++i) h *= hermite_eval(alphas[k][i], d[i], Basis::gaussian);
            s1[k] += h;
            s2[k] += h * h;
        }
    }
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        double mean = s1[k] / N, var = s2[k] / N - mean * mean;
        double se = std::sqrt(std::max(var, 0.0) / N);
        double want = planted_conditional_moment(alphas[k], w, b);
        CHECK(std::abs(mean - want) <= 4 * se + 1e-12);
    }
}

TEST_CASE("fourier coefficients")
{
    CHECK(planted_fourier_coeff({}, CellMultiIndex{}, 5, 2, Basis::gaussian) == 1);
    CHECK(planted_fourier_coeff({}, CellMultiIndex{}, 4, 2, Basis::boolean) == 1);
    CHECK(planted_fourier_coeff({0}, cells({{0, 0, 1}}), 5, 1, Basis::gaussian) == 0);
    CHECK(planted_fourier_coeff({0, 1}, cells({{0, 0, 1}, {0, 1, 1}, {0, 2, 2}}), 3, 1, Basis::gaussian) ==
          Rational(-1, 27));
    CHECK(planted_fourier_coeff({0, 1}, cells({{0, 0, 1}, {0, 1, 1}, {0, 2, 2}}), 5, 1, Basis::gaussian) ==
          Rational(-1, 125));
    // parity mismatch
    CHECK(planted_fourier_coeff({0}, cells({{0, 0, 1}, {0, 1, 1}, {0, 2, 2}}), 3, 1, Basis::gaussian) == 0);
    // boolean, non-binary alpha
    CHECK(planted_fourier_coeff({}, cells({{0, 0, 2}}), 4, 1, Basis::boolean) == 0);
}

TEST_CASE("boolean coefficients match the exhaustive planted expectation")
{
    for (int n : {4}) {
        int m = 2;
        int checked = 0, nonzero = 0;
        for (unsigned Im = 0; Im < (1u << n); ++Im) {
            std::vector<int> I;
            for (int i = 0; i < n; ++i)
                if (Im >> i & 1) I.push_back(i);
            if (I.size() > 4) continue;
            binary_alphas(n, m, 4, [&](const CellMultiIndex& a) {
                Rational f = planted_fourier_coeff(I, a, n, m, Basis::boolean);
                Rational o = planted_expectation_exhaustive(I, a, n, m);
                CHECK(f == o);
                ++checked;
                if (f != 0) ++nonzero;
            });
        }
        CHECK(checked > 1000);
        CHECK(nonzero > 1);
    }
}

TEST_CASE("pseudoexpectation modes agree")
{
    SUBCASE("T=0")
    {
        auto inst = sample_instance(5, 3, Basis::gaussian, 1);
        auto pe = build_pe(inst, 4, 0);
        CHECK(pe.values()[0] == 1.0);
        CHECK(pe.values().tail(pe.values().size() - 1).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("alpha-enum vs shape-sum, small")
    {
        for (auto basis : {Basis::gaussian, Basis::boolean})
            for (int T : {3, 4}) {
                auto inst = sample_instance(4, 3, basis, 17 + T);
                auto a = build_pe(inst, 2, T, {PeMode::alpha_enum});
                auto s = build_pe(inst, 2, T, {PeMode::shape_sum});
                auto r = build_pe(inst, 2, T, {PeMode::row_series});
                double scale = a.values().norm();
                CHECK((a.values() - s.values()).norm() <= 1e-10 * scale);
                CHECK((a.values() - r.values()).norm() <= 1e-10 * scale);
            }
    }
    SUBCASE("alpha-enum D=4")
    {
        auto inst = sample_instance(4, 3, Basis::gaussian, 99);
        auto a = build_pe(inst, 4, 4, {PeMode::alpha_enum});
        auto s = build_pe(inst, 4, 4, {PeMode::shape_sum});
        CHECK((a.values() - s.values()).norm() <= 1e-10 * a.values().norm());
    }
    SUBCASE("row-series vs shape-sum, larger")
    {
        auto inst = sample_instance(7, 5, Basis::gaussian, 3);
        for (int T : {4, 6}) {
            auto s = build_pe(inst, 4, T, {PeMode::shape_sum});
            auto r = build_pe(inst, 4, T, {PeMode::row_series});
            CHECK((s.values() - r.values()).norm() <= 1e-10 * s.values().norm());
        }
        auto bi = sample_instance(9, 4, Basis::boolean, 4);
        auto s = build_pe(bi, 4, 6, {PeMode::shape_sum});
        auto r = build_pe(bi, 4, 6, {PeMode::row_series});
        CHECK((s.values() - r.values()).norm() <= 1e-10 * s.values().norm());
        CHECK(s.values().segment(s.index().offset(4), s.index().count(4)).norm() > 0);
    }
}

TEST_CASE("pseudoexpectation basics")
{
    auto inst = sample_instance(6, 4, Basis::gaussian, 8);
    auto pe = build_pe(inst, 4, 4);
    auto nz = normalize(pe);
    CHECK(nz.normalized());
    CHECK(nz({}) == 1.0);
    CHECK(normalize(nz).values() == nz.values());
    PseudoExpectation scaled = pe;
    scaled.values() *= 3.5;
    CHECK((normalize(scaled).values() - nz.values()).norm() <= 1e-14);
    CHECK(nz.monomial({1, 1, 2, 3}) == doctest::Approx(nz({2, 3}) / 6.0));
    CHECK(nz.monomial({2, 2}) == doctest::Approx(1.0 / 6.0));

    // relabeling coordinates together with I
    std::vector<int> perm{3, 0, 5, 1, 4, 2};
    Instance p = inst;
    for (int u = 0; u < inst.m; ++u)
        for (int i = 0; i < 6; ++i) p.data(u, perm[i]) = inst.data(u, i);
    auto pp = build_pe(p, 4, 4);
    for (std::size_t r = 0; r < pe.index().size(); ++r) {
        auto I = pe.index().unrank(r);
        std::vector<int> J;
        for (int i : I) J.push_back(perm[i]);
        std::sort(J.begin(), J.end());
        CHECK(pp(J) == doctest::Approx(pe(I)).epsilon(1e-12));
    }
}

TEST_CASE("truncation window")
{
    auto r = truncation_window_check(3, 2, 4, 4, Basis::gaussian);
    CHECK(r.in_window);
    CHECK(!r.identically_zero);
    for (int s : r.support_sizes) {
        CHECK(s >= 2);
        CHECK(s <= 6);
    }
    auto rb = truncation_window_check(3, 2, 2, 2, Basis::boolean);
    CHECK(rb.in_window);
}

TEST_CASE("serialization")
{
    auto inst = sample_instance(4, 3, Basis::gaussian, 21);
    std::string base = "test_pseudocal_instance";
    write_instance(inst, base);
    auto back = read_instance(base);
    CHECK(back.data == inst.data);
    CHECK(back.seed == 21);
    std::remove((base + ".csv").c_str());
    std::remove((base + ".json").c_str());

    auto pe = build_pe(inst, 2, 4);
    auto js = pe_to_json(pe);
    auto pe2 = pe_from_json(js);
    CHECK(pe2.values() == pe.values());
    CHECK(pe_to_json(pe2) == js);
}
