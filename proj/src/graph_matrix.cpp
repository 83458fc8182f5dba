#include "pap/graph_matrix.hpp"

#include "pap/hermite.hpp"
#include "pap/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace pap {

IndexSpace::IndexSpace(int n, int m, std::vector<std::pair<int, int>> blocks) : n_(n), m_(m), blocks_(std::move(blocks))
{
    int amax = 0, bmax = 0;
    for (auto [a, b] : blocks_) {
        if (a < 0 || b < 0 || a > n || b > m) throw InvalidArgument("index block out of range");
        amax = std::max(amax, a);
        bmax = std::max(bmax, b);
    }
    sq_ = SubsetIndex(n, amax);
    ci_ = SubsetIndex(m, bmax);
    lookup_.assign(amax + 1, std::vector<int>(bmax + 1, -1));
    offsets_ = {0};
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        auto [a, b] = blocks_[k];
        if (lookup_[a][b] >= 0) throw InvalidArgument("duplicate index block");
        lookup_[a][b] = int(k);
        offsets_.push_back(offsets_.back() + sq_.count(a) * ci_.count(b));
    }
}

IndexSpace IndexSpace::squares_upto(int n, int m, int k)
{
    std::vector<std::pair<int, int>> b;
    for (int a = 0; a <= std::min(k, n); ++a) b.push_back({a, 0});
    return IndexSpace(n, m, b);
}

IndexSpace IndexSpace::composition(int n, int m, int a, int b) { return IndexSpace(n, m, {{a, b}}); }

std::optional<std::size_t> IndexSpace::rank(const int* sq, int a, const int* ci, int b) const
{
    if (a >= int(lookup_.size()) || b >= int(lookup_[0].size())) return std::nullopt;
    int blk = lookup_[a][b];
    if (blk < 0) return std::nullopt;
    std::size_t rs = sq_.rank(sq, a) - sq_.offset(a);
    std::size_t rc = ci_.rank(ci, b) - ci_.offset(b);
    return offsets_[blk] + rs * ci_.count(b) + rc;
}

std::optional<std::size_t> IndexSpace::rank(const IndexKey& k) const
{
    return rank(k.squares.data(), int(k.squares.size()), k.circles.data(), int(k.circles.size()));
}

IndexKey IndexSpace::key(std::size_t r) const
{
    if (r >= size()) throw InvalidArgument("index rank out of range");
    std::size_t blk = std::upper_bound(offsets_.begin(), offsets_.end(), r) - offsets_.begin() - 1;
    auto [a, b] = blocks_[blk];
    std::size_t loc = r - offsets_[blk];
    std::size_t cb = ci_.count(b);
    IndexKey k;
    k.squares = sq_.unrank(sq_.offset(a) + loc / cb);
    k.circles = ci_.unrank(ci_.offset(b) + loc % cb);
    return k;
}

double realization_work(const Shape& s, int n, int m)
{
    double w = 1;
    int si = 0, ci = 0;
    for (auto t : s.types) {
        if (t == VType::square)
            w *= std::max(0, n - si++);
        else
            w *= std::max(0, m - ci++);
    }
    return w;
}

namespace {

struct HTable {
    // h_l(d_{u,i}) for each needed label
    std::map<int, Eigen::MatrixXd> tab;
    HTable(const Shape& s, const Instance& inst)
    {
        for (const auto& e : s.edges) {
            if (tab.count(e.label)) continue;
            Eigen::MatrixXd H(inst.m, inst.n);
            for (int u = 0; u < inst.m; ++u)
                for (int i = 0; i < inst.n; ++i) H(u, i) = hermite_eval(e.label, inst.data(u, i), inst.setting);
            tab.emplace(e.label, std::move(H));
        }
    }
};

std::pair<int, int> block_of(const Shape& s, const std::vector<int>& side)
{
    int a = 0, b = 0;
    for (int v : side) (s.types[v] == VType::square ? a : b)++;
    return {a, b};
}

}  // namespace

void realize_into(const Shape& s, const Instance& inst, double scale, RealizedMatrix& out, const RealizeOptions& opt)
{
    s.validate();
    if (realization_work(s, inst.n, inst.m) > opt.work_budget) throw BudgetExceeded("realization work budget exceeded");
    HTable H(s, inst);
    int nv = s.num_vertices();
    std::vector<int> order;
    for (int v = 0; v < nv; ++v)
        if (s.types[v] == VType::circle) order.push_back(v);
    for (int v = 0; v < nv; ++v)
        if (s.types[v] == VType::square) order.push_back(v);
    std::vector<int> pos(nv);
    for (int p = 0; p < nv; ++p) pos[order[p]] = p;
    std::vector<std::vector<std::pair<const Eigen::MatrixXd*, std::pair<int, int>>>> close(nv);
    for (const auto& e : s.edges) {
        int p = std::max(pos[e.s], pos[e.c]);
        close[p].push_back({&H.tab.at(e.label), {e.c, e.s}});
    }
    std::vector<int> sigma(nv, -1);
    std::vector<char> used_sq(inst.n, 0), used_ci(inst.m, 0);
    Integer aut = aut_size(s);
    double inv_aut = scale / aut.get_d();
    std::vector<int> usq, uci, vsq, vci;
    auto leaf = [&](double val) {
        usq.clear();
        uci.clear();
        vsq.clear();
        vci.clear();
        for (int v : s.U) (s.types[v] == VType::square ? usq : uci).push_back(sigma[v]);
        for (int v : s.V) (s.types[v] == VType::square ? vsq : vci).push_back(sigma[v]);
        std::sort(usq.begin(), usq.end());
        std::sort(uci.begin(), uci.end());
        std::sort(vsq.begin(), vsq.end());
        std::sort(vci.begin(), vci.end());
        auto r = out.rows.rank(usq.data(), int(usq.size()), uci.data(), int(uci.size()));
        auto c = out.cols.rank(vsq.data(), int(vsq.size()), vci.data(), int(vci.size()));
        if (!r || !c) {
            if (opt.allow_truncation) return;
            throw InvalidArgument("realization produced an index outside the configured universe");
        }
        out.M(*r, *c) += val * inv_aut;
    };
    std::function<void(int, double)> rec = [&](int p, double val) {
        if (p == nv) {
            leaf(val);
            return;
        }
        int v = order[p];
        bool sq = s.types[v] == VType::square;
        int lim = sq ? inst.n : inst.m;
        auto& used = sq ? used_sq : used_ci;
        for (int x = 0; x < lim; ++x) {
            if (used[x]) continue;
            sigma[v] = x;
            double nv2 = val;
            for (const auto& [tab, cs] : close[p]) nv2 *= (*tab)(sigma[cs.first], sigma[cs.second]);
            if (nv2 == 0.0) continue;
            used[x] = 1;
            rec(p + 1, nv2);
            used[x] = 0;
        }
        sigma[v] = -1;
    };
    rec(0, 1.0);
}

RealizedMatrix realize(const Shape& s, const Instance& inst, const IndexSpace& rows, const IndexSpace& cols,
                       const RealizeOptions& opt)
{
    RealizedMatrix out{rows, cols, Eigen::MatrixXd::Zero(rows.size(), cols.size())};
    realize_into(s, inst, 1.0, out, opt);
    return out;
}

RealizedMatrix realize(const Shape& s, const Instance& inst, const RealizeOptions& opt)
{
    auto [a, b] = block_of(s, s.U);
    auto [c, d] = block_of(s, s.V);
    return realize(s, inst, IndexSpace::composition(inst.n, inst.m, a, b), IndexSpace::composition(inst.n, inst.m, c, d),
                   opt);
}

Eigen::MatrixXd realize_square_fast(const Shape& s, const Instance& inst)
{
    if (!s.index_squares_only()) throw InvalidArgument("fast realization needs square-only index sets");
    s.validate();
    int n = inst.n;
    HTable H(s, inst);
    auto P = set_minus(s.U, s.V), Qv = set_minus(s.V, s.U), S = set_intersection(s.U, s.V);
    std::vector<int> Z = S;  // ordered: intersection, circles, middle squares
    for (auto t : {VType::circle, VType::square})
        for (int v = 0; v < s.num_vertices(); ++v)
            if (!s.in_U(v) && !s.in_V(v) && s.types[v] == t) Z.push_back(v);
    int a = int(P.size()), b = int(Qv.size()), k = int(S.size());
    SubsetIndex SA(n, a), SB(n, b), SU(n, int(s.U.size())), SV(n, int(s.V.size()));
    std::size_t na = SA.count(a), nb = SB.count(b);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(SU.count(int(s.U.size())), SV.count(int(s.V.size())));

    std::vector<int> sigma(s.num_vertices(), -1);
    std::vector<char> used_sq(n, 0), used_ci(inst.m, 0);
    std::vector<int> zpos(s.num_vertices(), -1);
    for (int p = 0; p < int(Z.size()); ++p) zpos[Z[p]] = p;

    // edges inside Z close at the later Z position; edges touching P or Q handled per side
    std::vector<std::vector<const Edge*>> zclose(Z.size());
    std::vector<const Edge*> pedges, qedges;
    for (const auto& e : s.edges) {
        if (std::binary_search(P.begin(), P.end(), e.s))
            pedges.push_back(&e);
        else if (std::binary_search(Qv.begin(), Qv.end(), e.s))
            qedges.push_back(&e);
        else
            zclose[std::max(zpos[e.s], zpos[e.c])].push_back(&e);
    }

    const std::size_t chunk = 256;
    Eigen::MatrixXd X(na, chunk), Y(nb, chunk);
    std::size_t cols_used = 0;

    auto side_vector = [&](const std::vector<int>& side, const std::vector<const Edge*>& es, const SubsetIndex& SI,
                           int sz, Eigen::Ref<Eigen::VectorXd> x) {
        x.setZero();
        if (sz == 0) {
            x(0) = 1;
            return;
        }
        int t[16];
        std::function<void(int, double)> rec = [&](int p, double val) {
            if (p == sz) {
                for (int q = 0; q < sz; ++q) t[q] = sigma[side[q]];
                std::sort(t, t + sz);
                x(SI.rank(t, sz) - SI.offset(sz)) += val;
                return;
            }
            int v = side[p];
            for (int i = 0; i < n; ++i) {
                if (used_sq[i]) continue;
                double nv = val;
                for (const Edge* e : es)
                    if (e->s == v) nv *= H.tab.at(e->label)(sigma[e->c], i);
                if (nv == 0.0) continue;
                sigma[v] = i;
                used_sq[i] = 1;
                rec(p + 1, nv);
                used_sq[i] = 0;
            }
            sigma[v] = -1;
        };
        rec(0, 1.0);
    };

    std::vector<int> sset(k);
    auto flush = [&]() {
        if (cols_used == 0) return;
        Eigen::MatrixXd blk = X.leftCols(cols_used) * Y.leftCols(cols_used).transpose();
        cols_used = 0;
        std::vector<int> sorted_s = sset;
        std::sort(sorted_s.begin(), sorted_s.end());
        std::vector<int> ru(s.U.size()), rv(s.V.size());
        for (std::size_t i = 0; i < na; ++i) {
            const int* A = SA.data(SA.offset(a) + i);
            std::merge(sorted_s.begin(), sorted_s.end(), A, A + a, ru.begin());
            std::size_t r = SU.rank(ru.data(), int(ru.size())) - SU.offset(int(ru.size()));
            for (std::size_t j = 0; j < nb; ++j) {
                double val = blk(i, j);
                if (val == 0.0) continue;
                const int* B = SB.data(SB.offset(b) + j);
                bool disjoint = true;
                for (int x = 0, y = 0; x < a && y < b;) {
                    if (A[x] == B[y]) {
                        disjoint = false;
                        break;
                    }
                    if (A[x] < B[y])
                        ++x;
                    else
                        ++y;
                }
                if (!disjoint) continue;
                std::merge(sorted_s.begin(), sorted_s.end(), B, B + b, rv.begin());
                std::size_t c = SV.rank(rv.data(), int(rv.size())) - SV.offset(int(rv.size()));
                out(r, c) += val;
            }
        }
    };

    // both sides empty: the matrix is diagonal in S, accumulate a scalar and unroll the last vertex
    if (a == 0 && b == 0 && int(Z.size()) > k) {
        double acc = 0;
        int last = int(Z.size()) - 1;
        std::vector<int> srt(k);
        struct Close {
            const Eigen::MatrixXd* tab;
            int c, s;
        };
        std::vector<std::vector<Close>> zc(Z.size());
        for (std::size_t p = 0; p < Z.size(); ++p)
            for (const Edge* e : zclose[p]) zc[p].push_back({&H.tab.at(e->label), e->c, e->s});
        std::map<const Eigen::MatrixXd*, Eigen::VectorXd> rowsum;
        for (const auto& [l, t] : H.tab) rowsum[&t] = t.rowwise().sum();
        std::function<void(int, double)> rec0 = [&](int p, double val) {
            int v = Z[p];
            bool sq = s.types[v] == VType::square;
            int lim = sq ? n : inst.m;
            auto& used = sq ? used_sq : used_ci;
            if (p == last && sq && zc[p].size() <= 1) {
                double sum;
                if (zc[p].empty()) {
                    sum = 0;
                    for (int x = 0; x < lim; ++x) sum += used[x] ? 0 : 1;
                } else {
                    const auto& e = zc[p][0];
                    int ci = sigma[e.c];
                    sum = rowsum.at(e.tab)[ci];
                    for (int u : Z)
                        if (u != v && s.types[u] == VType::square && sigma[u] >= 0) sum -= (*e.tab)(ci, sigma[u]);
                }
                acc += val * sum;
                return;
            }
            if (p == last) {
                double sum = 0;
                for (int x = 0; x < lim; ++x) {
                    if (used[x]) continue;
                    sigma[v] = x;
                    double nv = val;
                    for (const auto& e : zc[p]) nv *= (*e.tab)(sigma[e.c], sigma[e.s]);
                    sum += nv;
                }
                sigma[v] = -1;
                acc += sum;
                return;
            }
            for (int x = 0; x < lim; ++x) {
                if (used[x]) continue;
                sigma[v] = x;
                double nv = val;
                for (const auto& e : zc[p]) nv *= (*e.tab)(sigma[e.c], sigma[e.s]);
                if (nv == 0.0) continue;
                if (p < k) sset[p] = x;
                used[x] = 1;
                if (p + 1 == k) {
                    acc = 0;
                    rec0(p + 1, nv);
                    srt = sset;
                    std::sort(srt.begin(), srt.end());
                    std::size_t r = SU.rank(srt.data(), k) - SU.offset(k);
                    out(r, r) += acc;
                } else {
                    rec0(p + 1, nv);
                }
                used[x] = 0;
            }
            sigma[v] = -1;
        };
        if (k == 0) {
            rec0(0, 1.0);
            out(0, 0) = acc;
        } else {
            rec0(0, 1.0);
        }
        out /= aut_size(s).get_d();
        return out;
    }

    std::function<void(int, double)> rec = [&](int p, double val) {
        if (p == int(Z.size())) {
            side_vector(P, pedges, SA, a, X.col(cols_used));
            side_vector(Qv, qedges, SB, b, Y.col(cols_used));
            X.col(cols_used) *= val;
            if (++cols_used == chunk || p == k) flush();
            return;
        }
        if (p == k) flush();
        int v = Z[p];
        bool sq = s.types[v] == VType::square;
        int lim = sq ? n : inst.m;
        auto& used = sq ? used_sq : used_ci;
        for (int x = 0; x < lim; ++x) {
            if (used[x]) continue;
            sigma[v] = x;
            double nv = val;
            for (const Edge* e : zclose[p]) nv *= H.tab.at(e->label)(sigma[e->c], sigma[e->s]);
            if (nv == 0.0) continue;
            if (p < k) sset[p] = x;
            used[x] = 1;
            rec(p + 1, nv);
            used[x] = 0;
        }
        sigma[v] = -1;
        if (p == k) flush();
    };
    rec(0, 1.0);
    flush();
    out /= aut_size(s).get_d();
    return out;
}

std::vector<Term> collect_terms(const std::vector<Term>& terms)
{
    std::map<std::string, Term> acc;
    for (const auto& t : terms) {
        if (t.coeff == 0) continue;
        auto c = canonicalize(t.shape);
        auto it = acc.find(c.key);
        if (it == acc.end())
            acc.emplace(c.key, Term{c.shape, t.coeff});
        else
            it->second.coeff += t.coeff;
    }
    std::vector<Term> out;
    for (auto& [k, t] : acc)
        if (t.coeff != 0) out.push_back(std::move(t));
    return out;
}

std::vector<Term> expand_improper(const Shape& in, Basis basis)
{
    Shape s = in;
    s.normalize();
    std::map<std::pair<int, int>, std::vector<int>> groups;
    for (const auto& e : s.edges) groups[{e.s, e.c}].push_back(e.label);
    std::vector<std::pair<std::pair<int, int>, std::vector<std::pair<int, Rational>>>> opts;
    for (const auto& [pc, labels] : groups) {
        std::vector<std::pair<int, Rational>> o;
        if (labels.size() == 1) {
            o.push_back({labels[0], Rational(1)});
        } else {
            auto lc = linearize_product(labels, basis);
            for (const auto& [p, c] : lc.coeffs) o.push_back({p, c});
        }
        opts.push_back({pc, o});
    }
    Integer aut_imp = aut_size(s);
    std::vector<Term> raw;
    Shape cur = s;
    std::function<void(std::size_t, Rational)> rec = [&](std::size_t g, Rational c) {
        if (g == opts.size()) {
            Shape t = cur;
            t.normalize();
            Rational coeff = c * Rational(aut_size(t)) / Rational(aut_imp);
            raw.push_back({t, coeff});
            return;
        }
        for (const auto& [p, cc] : opts[g].second) {
            std::size_t before = cur.edges.size();
            if (p > 0) cur.edges.push_back({opts[g].first.first, opts[g].first.second, p});
            rec(g + 1, c * cc);
            cur.edges.resize(before);
        }
    };
    cur.edges.clear();
    rec(0, Rational(1));
    return collect_terms(raw);
}

bool composable(const Shape& a, const Shape& b)
{
    auto count = [](const Shape& s, const std::vector<int>& side) {
        int q = 0, c = 0;
        for (int v : side) (s.types[v] == VType::square ? q : c)++;
        return std::make_pair(q, c);
    };
    return count(a, a.V) == count(b, b.U);
}

std::vector<Term> multiply_improper(const Shape& A0, const Shape& B0)
{
    Shape A = A0, B = B0;
    A.normalize();
    B.normalize();
    if (!composable(A, B)) throw InvalidArgument("shapes are not composable");
    Integer autA = aut_size(A), autB = aut_size(B);
    std::vector<int> restA, restB;
    for (int v = 0; v < A.num_vertices(); ++v)
        if (!A.in_V(v)) restA.push_back(v);
    for (int v = 0; v < B.num_vertices(); ++v)
        if (!B.in_U(v)) restB.push_back(v);
    std::vector<Term> raw;
    std::vector<int> ub = B.U;
    std::sort(ub.begin(), ub.end());
    std::vector<int> mapB(B.num_vertices(), -1);
    auto emit = [&]() {
        Shape g;
        g.types = A.types;
        for (int v = 0; v < B.num_vertices(); ++v)
            if (mapB[v] < 0) mapB[v] = -2;
        std::vector<int> m = mapB;
        for (int v = 0; v < B.num_vertices(); ++v)
            if (m[v] == -2) m[v] = g.add_vertex(B.types[v]);
        g.U = A.U;
        for (int v : B.V) g.V.push_back(m[v]);
        g.edges = A.edges;
        for (const auto& e : B.edges) g.edges.push_back({m[e.s], m[e.c], e.label});
        g.normalize();
        for (int v = 0; v < B.num_vertices(); ++v)
            if (mapB[v] == -2) mapB[v] = -1;
        Rational c = Rational(aut_size(g)) / Rational(autA * autB);
        raw.push_back({g, c});
    };
    std::vector<char> usedB(B.num_vertices(), 0);
    std::function<void(std::size_t)> match = [&](std::size_t i) {
        if (i == restA.size()) {
            emit();
            return;
        }
        match(i + 1);
        int a = restA[i];
        for (int b : restB) {
            if (usedB[b] || B.types[b] != A.types[a]) continue;
            usedB[b] = 1;
            mapB[b] = a;
            match(i + 1);
            mapB[b] = -1;
            usedB[b] = 0;
        }
    };
    do {
        bool ok = true;
        for (std::size_t t = 0; t < A.V.size(); ++t)
            if (A.types[A.V[t]] != B.types[ub[t]]) ok = false;
        if (!ok) continue;
        std::fill(mapB.begin(), mapB.end(), -1);
        for (std::size_t t = 0; t < A.V.size(); ++t) mapB[ub[t]] = A.V[t];
        match(0);
    } while (std::next_permutation(ub.begin(), ub.end()));
    return collect_terms(raw);
}

std::vector<Term> multiply_decompose(const Shape& a, const Shape& b, Basis basis)
{
    std::vector<Term> all;
    for (const auto& t : multiply_improper(a, b))
        for (const auto& p : expand_improper(t.shape, basis)) all.push_back({p.shape, p.coeff * t.coeff});
    return collect_terms(all);
}

Rational multiply_coeff_bound(const Shape& a, const Shape& gamma)
{
    int nv = a.num_vertices();
    int outV = nv - int(a.V.size()), outU = nv - int(a.U.size());
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, outV);
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), gamma.num_vertices(), outU);
    return Rational(r * p);
}

Shape improper_collapse(const Shape& s, int i, int j)
{
    if (i == j || s.types[i] != VType::square || s.types[j] != VType::square)
        throw InvalidArgument("collapse needs two distinct squares");
    int keep = std::min(i, j), drop = std::max(i, j);
    std::vector<int> perm(s.num_vertices());
    for (int v = 0, nid = 0; v < s.num_vertices(); ++v) perm[v] = v == drop ? -1 : nid++;
    perm[drop] = perm[keep];
    Shape r;
    for (int v = 0; v < s.num_vertices(); ++v)
        if (v != drop) r.types.push_back(s.types[v]);
    bool u = s.in_U(i) != s.in_U(j), w = s.in_V(i) != s.in_V(j);
    for (int v : s.U)
        if (v != i && v != j) r.U.push_back(perm[v]);
    for (int v : s.V)
        if (v != i && v != j) r.V.push_back(perm[v]);
    if (u) r.U.push_back(perm[keep]);
    if (w) r.V.push_back(perm[keep]);
    for (const auto& e : s.edges) r.edges.push_back({perm[e.s], perm[e.c], e.label});
    r.normalize();
    return r;
}

double spectral_norm(const Eigen::MatrixXd& M)
{
    if (M.size() == 0) return 0;
    if (std::min(M.rows(), M.cols()) <= 300) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
        return svd.singularValues()[0];
    }
    bool tall = M.rows() >= M.cols();
    auto op = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        if (tall) return -(M.transpose() * (M * x));
        return -(M * (M.transpose() * x));
    };
    auto r = lanczos_min(op, std::size_t(tall ? M.cols() : M.rows()), 300, 1e-12, 7);
    return std::sqrt(std::max(0.0, -r.value));
}

std::vector<NormSweepEntry> norm_sweep(const std::vector<Shape>& catalog, const std::vector<Instance>& draws,
                                       const NormBoundOptions& nb, double work_budget)
{
    if (draws.empty()) return {};
    int n = draws[0].n, m = draws[0].m;
    double work = 0;
    for (const auto& s : catalog) work += realization_work(s, n, m) * double(draws.size());
    if (work > work_budget) throw BudgetExceeded("norm sweep work budget exceeded");
    std::vector<NormSweepEntry> out;
    for (const auto& s : catalog) {
        NormSweepEntry e;
        e.shape = s;
        e.bound = norm_bound(s, n, m, nb);
        for (const auto& inst : draws) {
            if (inst.n != n || inst.m != m) throw InvalidArgument("norm_sweep: draws differ in size");
            Eigen::MatrixXd M = s.index_squares_only() ? realize_square_fast(s, inst) : realize(s, inst).M;
            double x = spectral_norm(M);
            e.norms.push_back(x);
            if (x <= e.bound) ++e.within;
        }
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace pap
