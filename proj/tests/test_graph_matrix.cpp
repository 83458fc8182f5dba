#include "doctest.h"
#include "pap/graph_matrix.hpp"
#include "pap/hermite.hpp"

#include <cmath>
#include <random>

using namespace pap;

namespace {

Instance random_instance(int n, int m, Basis b, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Instance inst;
    inst.n = n;
    inst.m = m;
    inst.setting = b;
    inst.data.resize(m, n);
    for (int u = 0; u < m; ++u)
        for (int i = 0; i < n; ++i) inst.data(u, i) = b == Basis::gaussian ? g(rng) : (rng() & 1 ? 1.0 : -1.0);
    return inst;
}

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    double s = std::max({a.norm(), b.norm(), 1e-300});
    return (a - b).norm() / s;
}

Eigen::MatrixXd combo(const std::vector<Term>& terms, const Instance& inst, const IndexSpace& r, const IndexSpace& c)
{
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(r.size(), c.size());
    for (const auto& t : terms) M += t.coeff.get_d() * realize(t.shape, inst, r, c).M;
    return M;
}

}  // namespace

TEST_CASE("subset and index ranks round trip")
{
    SubsetIndex si(7, 3);
    CHECK(si.size() == 1 + 7 + 21 + 35);
    for (std::size_t r = 0; r < si.size(); ++r) CHECK(si.rank(si.unrank(r)) == r);
    CHECK(si.unrank(0).empty());
    CHECK(si.unrank(8) == std::vector<int>{0, 1});
    IndexSpace sp(6, 4, {{0, 0}, {1, 1}, {2, 0}});
    for (std::size_t r = 0; r < sp.size(); ++r) CHECK(sp.rank(sp.key(r)) == r);
    CHECK(sp.size() == 1 + 24 + 15);
}

TEST_CASE("canonical keys")
{
    std::mt19937 rng(5);
    std::vector<Shape> probes = {shapes::basic_spider(), shapes::basic_non_spider(), shapes::fourier_example(),
                                 shapes::ell(4), shapes::ribbon_symmetry_improper()};
    for (const auto& s : probes) {
        auto k = canonical_key(s);
        CHECK(canonical_key(canonical_form(s)) == k);
        for (int t = 0; t < 100; ++t) {
            std::vector<int> perm(s.num_vertices());
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            CHECK(canonical_key(relabel(s, perm)) == k);
        }
    }
    auto f = shapes::fourier_example();
    CHECK(canonical_key(f) != canonical_key(f.transpose()));
    CHECK(canonical_key(shapes::basic_spider()) == canonical_key(shapes::basic_spider().transpose()));
}

TEST_CASE("automorphism counts")
{
    CHECK(aut_size(shapes::trivial(3), AutSemantics::ordered) == 1);
    CHECK(aut_size(shapes::trivial(3)) == 6);
    Shape e;
    e.add_vertex(VType::square);
    e.add_vertex(VType::circle);
    e.add_edge(0, 1, 1);
    e.U = {0};
    CHECK(aut_size(e) == 1);
    CHECK(aut_size(shapes::basic_spider()) == 4);
    CHECK(aut_size(shapes::basic_non_spider()) == 6);
    CHECK(aut_size(shapes::basic_non_spider(), AutSemantics::ordered) == 6);
    CHECK(aut_size(shapes::ell(4)) == 4);
    CHECK(aut_size(shapes::ell(4), AutSemantics::ordered) == 1);
}

TEST_CASE("ribbon symmetry expansion")
{
    auto terms = expand_improper(shapes::ribbon_symmetry_improper(), Basis::gaussian);
    REQUIRE(terms.size() == 2);
    Shape g1, g2;
    {
        int u1 = g1.add_vertex(VType::square), v2 = g1.add_vertex(VType::square);
        int w1 = g1.add_vertex(VType::circle), w2 = g1.add_vertex(VType::circle);
        g1.add_edge(u1, w1, 2);
        g1.add_edge(u1, w2, 2);
        g1.add_edge(v2, w1, 2);
        g1.add_edge(v2, w2, 2);
        g1.U = {u1};
        g1.V = {v2};
    }
    {
        int u1 = g2.add_vertex(VType::square), v2 = g2.add_vertex(VType::square);
        int w1 = g2.add_vertex(VType::circle), w2 = g2.add_vertex(VType::circle);
        g2.add_edge(u1, w2, 2);
        g2.add_edge(v2, w1, 2);
        g2.add_edge(v2, w2, 2);
        g2.U = {u1};
        g2.V = {v2};
    }
    CHECK(aut_size(g1) == 2);
    CHECK(aut_size(g2) == 1);
    CHECK(canonical_key(g1) != canonical_key(g2));
    for (const auto& t : terms) {
        if (canonical_key(t.shape) == canonical_key(g1)) CHECK(t.coeff == 2);
        if (canonical_key(t.shape) == canonical_key(g2)) CHECK(t.coeff == 1);
    }
    auto inst = random_instance(5, 3, Basis::gaussian, 11);
    auto imp = realize(shapes::ribbon_symmetry_improper(), inst);
    CHECK(rel_err(imp.M, 2 * realize(g1, inst).M + realize(g2, inst).M) < 1e-12);
}

TEST_CASE("parallel pair expansion")
{
    Shape s;
    int a = s.add_vertex(VType::square), c = s.add_vertex(VType::circle);
    s.add_edge(a, c, 1);
    s.add_edge(a, c, 1);
    s.U = {a};
    s.V = {c};
    auto terms = expand_improper(s, Basis::gaussian);
    CHECK(terms.size() == 2);
    for (const auto& t : terms) CHECK(t.coeff == 1);
    auto inst = random_instance(5, 3, Basis::gaussian, 3);
    auto R = realize(s, inst);
    CHECK(rel_err(R.M, combo(terms, inst, R.rows, R.cols)) < 1e-12);
    auto bterms = expand_improper(s, Basis::boolean);
    REQUIRE(bterms.size() == 1);
    CHECK(bterms[0].shape.edges.empty());
}

TEST_CASE("realization basics")
{
    auto inst = random_instance(6, 4, Basis::gaussian, 7);
    auto T = realize(shapes::trivial(2), inst);
    CHECK(rel_err(T.M, Eigen::MatrixXd::Identity(15, 15)) < 1e-15);

    auto f = shapes::fourier_example();
    auto R = realize(f, inst);
    // entry for U = {0,1}, V = {3,4}: sum over circle, over which of U carries label 3, which w
    std::vector<int> U{0, 1}, V{3, 4};
    double expect = 0;
    for (int u = 0; u < 4; ++u)
        for (int w = 2; w < 3; ++w)
            for (int flip = 0; flip < 2; ++flip) {
                int i1 = U[flip], i2 = U[1 - flip];
                expect += hermite_eval(3, inst.d(u, i1), Basis::gaussian) * inst.d(u, i2) *
                          hermite_eval(2, inst.d(u, w), Basis::gaussian) * inst.d(u, 3) * inst.d(u, 4);
            }
    // w ranges over the squares not in U or V: only 2 and 5
    for (int u = 0; u < 4; ++u)
        for (int flip = 0; flip < 2; ++flip) {
            int i1 = U[flip], i2 = U[1 - flip];
            expect += hermite_eval(3, inst.d(u, i1), Basis::gaussian) * inst.d(u, i2) *
                      hermite_eval(2, inst.d(u, 5), Basis::gaussian) * inst.d(u, 3) * inst.d(u, 4);
        }
    auto r = R.rows.rank(IndexKey{U, {}});
    auto c = R.cols.rank(IndexKey{V, {}});
    CHECK(R.M(*r, *c) == doctest::Approx(expect).epsilon(1e-12));

    for (const auto& s : {shapes::basic_spider(), shapes::basic_non_spider(), shapes::ell(3), f}) {
        auto A = realize(s, inst), B = realize(s.transpose(), inst);
        CHECK((A.M.transpose() - B.M).norm() == 0.0);
    }
}

TEST_CASE("fast realization matches backtracking")
{
    auto inst = random_instance(7, 5, Basis::gaussian, 9);
    CatalogOptions o;
    o.max_vertices = 7;
    o.max_edges = 4;
    o.max_index = 2;
    for (const auto& s : enumerate_shapes(o)) {
        auto A = realize(s, inst);
        auto B = realize_square_fast(s, inst);
        INFO(s.describe());
        CHECK(rel_err(A.M, B) < 1e-12);
    }
    auto binst = random_instance(7, 5, Basis::boolean, 2);
    auto s = shapes::basic_non_spider();
    CHECK(rel_err(realize(s, binst).M, realize_square_fast(s, binst)) < 1e-12);
}

TEST_CASE("catalog enumeration")
{
    auto triv = enumerate_shapes(3, 0, ShapeFilter::calL);
    CHECK(triv.size() == 4);
    for (const auto& s : triv) CHECK(s.is_trivial());
    auto cat = enumerate_shapes(8, 4, ShapeFilter::calL);
    bool has_spider = false;
    auto sk = canonical_key(shapes::basic_spider());
    for (const auto& s : cat) {
        CHECK(in_calL(s));
        if (canonical_key(s) == sk) has_spider = true;
    }
    CHECK(has_spider);
    for (int k = 0; k <= 4; ++k) {
        std::size_t cnt = 0;
        for (const auto& s : cat)
            if (s.total_label() == k) ++cnt;
        CHECK(double(cnt) <= std::pow(8.0, 8 * (k + 1)));
    }
    auto bcat = enumerate_shapes(8, 4, ShapeFilter::calL_bool);
    for (const auto& s : bcat) CHECK(in_calL(s, true));
    CHECK(bcat.size() < cat.size());
}

TEST_CASE("weights separators and bounds")
{
    Shape s = shapes::basic_spider();
    CHECK(weight(s, {}, 16, 64) == 0.0);
    CHECK(weight(s, {0}, 16, 64) == 1.0);
    CHECK(weight(s, {4}, 16, 64) == doctest::Approx(1.5));
    auto sep = min_vertex_separator(s, 100, std::pow(100, 1.4));
    CHECK(sep.vertices == std::vector<int>{4});

    auto t = shapes::trivial(2);
    auto ts = min_vertex_separator(t, 100, 100);
    CHECK(ts.vertices == t.U);
    CHECK(ts.weight == 2.0);
    CHECK(norm_bound_exponent(t, 100, 100) == 0.0);

    // square - circle - square path with U, V the ends
    Shape p;
    int a = p.add_vertex(VType::square), c = p.add_vertex(VType::circle), b = p.add_vertex(VType::square);
    p.add_edge(a, c, 1);
    p.add_edge(b, c, 1);
    p.U = {a};
    p.V = {b};
    auto ps = min_vertex_separator(p, 100, 1000);
    CHECK(ps.vertices == std::vector<int>{a});
    auto pc = min_vertex_separator(p, 100, 50);
    CHECK(pc.vertices == std::vector<int>{c});

    double n = 1e4, m = std::pow(n, 1.4);
    auto ns = shapes::basic_non_spider();
    CHECK(norm_bound_exponent(ns, n, m) == doctest::Approx(4 + 2 * 1.4));
    CHECK(lambda_coeff(ns, Basis::gaussian, 10) == Rational(1, 25000));
    CHECK(lambda_coeff(shapes::basic_spider(), Basis::gaussian, 10) == Rational(-1, 5000));
    CHECK(lambda_coeff(shapes::trivial(3), Basis::gaussian, 7) == Rational(1, 343));
    CHECK(norm_bound_exponent(shapes::basic_spider(), n, m) / 2 == doctest::Approx(2 + 0.0));
    auto ch = charging_exponent(ns, n, m, 0.1);
    CHECK(ch.holds());
    CHECK_THROWS_AS(charging_exponent(shapes::basic_spider(), n, m, 0.1), InvalidArgument);
}

TEST_CASE("multiplication and collapse against dense products")
{
    auto inst = random_instance(6, 4, Basis::gaussian, 21);
    auto A = shapes::ell(3);
    Shape body;
    int c = body.add_vertex(VType::circle), sq = body.add_vertex(VType::square);
    int w = body.add_vertex(VType::square);
    body.add_edge(sq, c, 1);
    body.add_edge(w, c, 2);
    body.U = {sq, c};
    body.V = {sq};
    auto terms = multiply_decompose(A, body, Basis::gaussian);
    auto RA = realize(A, inst), RB = realize(body, inst);
    CHECK(rel_err(RA.M * RB.M, combo(terms, inst, RA.rows, RB.cols)) < 1e-9);
    for (const auto& t : multiply_improper(A, body)) CHECK(abs(t.coeff) <= multiply_coeff_bound(A, t.shape));
}

TEST_CASE("spectral norm and norm sweep")
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    for (auto [r, c] : {std::pair{40, 30}, std::pair{420, 350}, std::pair{310, 500}}) {
        Eigen::MatrixXd M(r, c);
        for (auto& x : M.reshaped()) x = g(rng);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
        CHECK(spectral_norm(M) == doctest::Approx(svd.singularValues()[0]).epsilon(1e-9));
    }
    CHECK(spectral_norm(Eigen::MatrixXd::Zero(400, 400)) == 0.0);

    CatalogOptions o;
    o.max_vertices = 6;
    o.max_edges = 4;
    o.max_index = 2;
    auto cat = enumerate_shapes(o);
    std::vector<Instance> draws{random_instance(9, 12, Basis::gaussian, 1), random_instance(9, 12, Basis::gaussian, 2)};
    auto rows = norm_sweep(cat, draws);
    REQUIRE(rows.size() == cat.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].norms.size() == 2);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(realize(cat[i], draws[1]).M);
        CHECK(rows[i].norms[1] == doctest::Approx(svd.singularValues()[0]).epsilon(1e-9));
        CHECK(rows[i].bound == norm_bound(cat[i], 9, 12));
        CHECK(rows[i].within == 2);
    }
    CHECK_THROWS_AS(norm_sweep(cat, draws, {}, 10.0), BudgetExceeded);
}
