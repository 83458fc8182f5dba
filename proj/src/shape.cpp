#include "pap/shape.hpp"

#include "pap/hermite.hpp"
#include "pap/slice.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace pap {

int Shape::add_vertex(VType t)
{
    types.push_back(t);
    return int(types.size()) - 1;
}

void Shape::add_edge(int s, int c, int label) { edges.push_back({s, c, label}); }

void Shape::normalize()
{
    std::sort(U.begin(), U.end());
    U.erase(std::unique(U.begin(), U.end()), U.end());
    std::sort(V.begin(), V.end());
    V.erase(std::unique(V.begin(), V.end()), V.end());
    std::sort(edges.begin(), edges.end());
}

void Shape::validate() const
{
    int nv = num_vertices();
    for (const auto& e : edges) {
        if (e.s < 0 || e.s >= nv || e.c < 0 || e.c >= nv) throw InvalidArgument("edge endpoint out of range");
        if (types[e.s] != VType::square || types[e.c] != VType::circle)
            throw InvalidArgument("edges must join a square and a circle");
        if (e.label < 1) throw InvalidArgument("edge labels must be positive");
    }
    for (int v : U)
        if (v < 0 || v >= nv) throw InvalidArgument("U vertex out of range");
    for (int v : V)
        if (v < 0 || v >= nv) throw InvalidArgument("V vertex out of range");
}

int Shape::num_squares() const { return int(std::count(types.begin(), types.end(), VType::square)); }
int Shape::num_circles() const { return int(std::count(types.begin(), types.end(), VType::circle)); }

int Shape::total_label() const
{
    int t = 0;
    for (const auto& e : edges) t += e.label;
    return t;
}

int Shape::degree(int v) const
{
    int d = 0;
    for (const auto& e : edges)
        if (e.s == v || e.c == v) d += e.label;
    return d;
}

bool Shape::in_U(int v) const { return std::binary_search(U.begin(), U.end(), v); }
bool Shape::in_V(int v) const { return std::binary_search(V.begin(), V.end(), v); }

bool Shape::is_proper() const
{
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (edges[i].s == edges[i - 1].s && edges[i].c == edges[i - 1].c) return false;
    return true;
}

bool Shape::is_trivial() const { return edges.empty() && U == V && int(U.size()) == num_vertices(); }

bool Shape::index_squares_only() const
{
    for (int v : U)
        if (types[v] != VType::square) return false;
    for (int v : V)
        if (types[v] != VType::square) return false;
    return true;
}

std::vector<int> Shape::middle() const
{
    std::vector<int> w;
    for (int v = 0; v < num_vertices(); ++v)
        if (!in_U(v) && !in_V(v)) w.push_back(v);
    return w;
}

Shape Shape::transpose() const
{
    Shape t = *this;
    std::swap(t.U, t.V);
    return t;
}

std::string Shape::describe() const
{
    std::ostringstream os;
    os << "[";
    for (int v = 0; v < num_vertices(); ++v) os << (types[v] == VType::square ? "s" : "c") << v << (v + 1 < num_vertices() ? " " : "");
    os << "] U{";
    for (int v : U) os << " " << v;
    os << " } V{";
    for (int v : V) os << " " << v;
    os << " } E{";
    for (const auto& e : edges) os << " " << e.s << "-" << e.c << ":" << e.label;
    os << " }";
    return os.str();
}

Shape relabel(const Shape& s, const std::vector<int>& perm)
{
    Shape r;
    r.types.resize(s.types.size());
    for (int v = 0; v < s.num_vertices(); ++v) r.types[perm[v]] = s.types[v];
    for (int v : s.U) r.U.push_back(perm[v]);
    for (int v : s.V) r.V.push_back(perm[v]);
    for (const auto& e : s.edges) r.edges.push_back({perm[e.s], perm[e.c], e.label});
    r.normalize();
    return r;
}

namespace {

std::vector<int> refined_colors(const Shape& s)
{
    int nv = s.num_vertices();
    std::vector<std::vector<int>> sig(nv);
    for (int v = 0; v < nv; ++v) {
        sig[v] = {int(s.types[v]), s.in_U(v) ? 1 : 0, s.in_V(v) ? 1 : 0};
        std::vector<int> labels;
        for (const auto& e : s.edges)
            if (e.s == v || e.c == v) labels.push_back(e.label);
        std::sort(labels.begin(), labels.end());
        sig[v].push_back(int(labels.size()));
        sig[v].insert(sig[v].end(), labels.begin(), labels.end());
    }
    auto to_colors = [&](const std::vector<std::vector<int>>& sg) {
        std::vector<std::vector<int>> uniq = sg;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        std::vector<int> c(nv);
        for (int v = 0; v < nv; ++v) c[v] = int(std::lower_bound(uniq.begin(), uniq.end(), sg[v]) - uniq.begin());
        return std::make_pair(c, int(uniq.size()));
    };
    auto [col, ncol] = to_colors(sig);
    for (int round = 0; round < nv; ++round) {
        std::vector<std::vector<int>> nsig(nv);
        for (int v = 0; v < nv; ++v) {
            std::vector<std::pair<int, int>> nb;
            for (const auto& e : s.edges) {
                if (e.s == v) nb.push_back({col[e.c], e.label});
                if (e.c == v) nb.push_back({col[e.s], e.label});
            }
            std::sort(nb.begin(), nb.end());
            nsig[v] = {col[v]};
            for (auto [a, b] : nb) {
                nsig[v].push_back(a);
                nsig[v].push_back(b);
            }
        }
        auto [c2, n2] = to_colors(nsig);
        bool stable = n2 == ncol;
        col = c2;
        ncol = n2;
        if (stable) break;
    }
    return col;
}

using EdgeKey = std::vector<std::array<int, 3>>;

struct ClassPerm {
    std::vector<std::vector<int>> classes;  // members per color, ascending color
    std::vector<int> start;
};

ClassPerm make_classes(const std::vector<int>& col)
{
    int ncol = col.empty() ? 0 : *std::max_element(col.begin(), col.end()) + 1;
    ClassPerm cp;
    cp.classes.assign(ncol, {});
    for (int v = 0; v < int(col.size()); ++v) cp.classes[col[v]].push_back(v);
    int pos = 0;
    for (auto& cl : cp.classes) {
        cp.start.push_back(pos);
        pos += int(cl.size());
    }
    return cp;
}

double perm_count(const ClassPerm& cp)
{
    double t = 1;
    for (const auto& cl : cp.classes)
        for (int i = 2; i <= int(cl.size()); ++i) t *= i;
    return t;
}

constexpr double kPermCap = 5e6;

// enumerate all class-respecting bijections, calling f(perm)
void for_each_perm(ClassPerm cp, const std::function<void(const std::vector<int>&)>& f, int nv)
{
    if (perm_count(cp) > kPermCap) throw BudgetExceeded("canonical form: permutation cap exceeded");
    std::vector<int> perm(nv);
    std::function<void(int)> rec = [&](int ci) {
        if (ci == int(cp.classes.size())) {
            f(perm);
            return;
        }
        auto& cl = cp.classes[ci];
        std::sort(cl.begin(), cl.end());
        do {
            for (int j = 0; j < int(cl.size()); ++j) perm[cl[j]] = cp.start[ci] + j;
            rec(ci + 1);
        } while (std::next_permutation(cl.begin(), cl.end()));
    };
    rec(0);
}

EdgeKey edge_key(const Shape& s, const std::vector<int>& perm)
{
    EdgeKey k;
    k.reserve(s.edges.size());
    for (const auto& e : s.edges) k.push_back({perm[e.s], perm[e.c], e.label});
    std::sort(k.begin(), k.end());
    return k;
}

std::string encode(const Shape& s)
{
    std::string k;
    auto put = [&](int x) {
        if (x < 0 || x > 250) throw BudgetExceeded("shape too large to encode");
        k.push_back(char(x));
    };
    put(s.num_vertices());
    for (auto t : s.types) put(int(t));
    put(int(s.U.size()));
    for (int v : s.U) put(v);
    put(int(s.V.size()));
    for (int v : s.V) put(v);
    put(int(s.edges.size()));
    for (const auto& e : s.edges) {
        put(e.s);
        put(e.c);
        put(e.label);
    }
    return k;
}

}  // namespace

CanonicalResult canonicalize(const Shape& in)
{
    Shape s = in;
    s.normalize();
    s.validate();
    if (s.num_vertices() > 16) throw BudgetExceeded("canonical form: more than 16 vertices");
    auto col = refined_colors(s);
    auto cp = make_classes(col);
    EdgeKey best;
    std::vector<int> best_perm;
    long count = 0;
    bool first = true;
    for_each_perm(cp, [&](const std::vector<int>& perm) {
        EdgeKey k = edge_key(s, perm);
        if (first || k < best) {
            best = std::move(k);
            best_perm = perm;
            count = 1;
            first = false;
        } else if (k == best) {
            ++count;
        }
    }, s.num_vertices());
    CanonicalResult r;
    r.shape = relabel(s, best_perm);
    r.key = encode(r.shape);
    r.aut = count;
    return r;
}

Shape canonical_form(const Shape& s) { return canonicalize(s).shape; }
std::string canonical_key(const Shape& s) { return canonicalize(s).key; }

Integer aut_size(const Shape& in, AutSemantics sem)
{
    if (sem == AutSemantics::set) return canonicalize(in).aut;
    Shape s = in;
    s.normalize();
    auto col = refined_colors(s);
    // pin every index vertex into its own class
    int next = s.num_vertices() + 1;
    for (int v = 0; v < s.num_vertices(); ++v)
        if (s.in_U(v) || s.in_V(v)) col[v] = next++;
    std::vector<int> uniq = col;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (auto& c : col) c = int(std::lower_bound(uniq.begin(), uniq.end(), c) - uniq.begin());
    auto cp = make_classes(col);
    std::vector<int> ident(s.num_vertices());
    // identity-in-class positions
    for (std::size_t ci = 0; ci < cp.classes.size(); ++ci) {
        auto cl = cp.classes[ci];
        std::sort(cl.begin(), cl.end());
        for (int j = 0; j < int(cl.size()); ++j) ident[cl[j]] = cp.start[ci] + j;
    }
    EdgeKey base = edge_key(s, ident);
    long count = 0;
    for_each_perm(cp, [&](const std::vector<int>& perm) {
        if (edge_key(s, perm) == base) ++count;
    }, s.num_vertices());
    return count;
}

bool in_calL(const Shape& s, bool boolean_labels)
{
    if (!s.is_proper() || !s.index_squares_only()) return false;
    for (int v = 0; v < s.num_vertices(); ++v) {
        int d = s.degree(v);
        bool u = s.in_U(v), w = s.in_V(v);
        if (!u && !w && d == 0) return false;
        if (s.types[v] == VType::square) {
            if ((d + (u ? 1 : 0) + (w ? 1 : 0)) % 2) return false;
        } else {
            if (d % 2 || d < 4) return false;
        }
    }
    if (boolean_labels)
        for (const auto& e : s.edges)
            if (e.label != 1) return false;
    return true;
}

namespace {

// rows of a label matrix (squares x circles), nonincreasing lexicographic order
void gen_rows(int c, int budget, std::vector<std::vector<int>>& cur, std::vector<std::vector<std::vector<int>>>& out,
              const std::vector<std::vector<int>>& row_pool, std::size_t min_idx, int max_rows)
{
    out.push_back(cur);
    if (int(cur.size()) >= max_rows) return;
    for (std::size_t i = min_idx; i < row_pool.size(); ++i) {
        int s = std::accumulate(row_pool[i].begin(), row_pool[i].end(), 0);
        if (s > budget) continue;
        cur.push_back(row_pool[i]);
        gen_rows(c, budget - s, cur, out, row_pool, i, max_rows);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> all_rows(int c, int max_sum)
{
    std::vector<std::vector<int>> rows;
    std::vector<int> r(c, 0);
    std::function<void(int, int)> rec = [&](int j, int left) {
        if (j == c) {
            if (std::accumulate(r.begin(), r.end(), 0) > 0) rows.push_back(r);
            return;
        }
        for (int x = 0; x <= left; ++x) {
            r[j] = x;
            rec(j + 1, left - x);
        }
        r[j] = 0;
    };
    rec(0, max_sum);
    return rows;
}

}  // namespace

std::vector<Shape> enumerate_shapes(const CatalogOptions& opt)
{
    std::map<std::string, Shape> found;
    int max_index = opt.max_index < 0 ? opt.max_vertices : opt.max_index;
    auto accept = [&](Shape s) {
        s.normalize();
        if (s.num_vertices() > opt.max_vertices) return;
        if (int(s.U.size()) > max_index || int(s.V.size()) > max_index) return;
        if (opt.right_empty && !s.V.empty()) return;
        auto c = canonicalize(s);
        if (found.emplace(c.key, c.shape).second && found.size() > opt.cap)
            throw BudgetExceeded("shape catalog cap exceeded");
    };

    if (opt.filter == ShapeFilter::all) {
        for (int nc = 0; nc <= opt.max_vertices; ++nc)
            for (int ns = 0; ns + nc <= opt.max_vertices; ++ns) {
                int cells = ns * nc;
                std::vector<int> lab(cells, 0);
                std::function<void(int, int)> rec = [&](int idx, int left) {
                    if (idx == cells) {
                        Shape base;
                        for (int i = 0; i < ns; ++i) base.add_vertex(VType::square);
                        for (int j = 0; j < nc; ++j) base.add_vertex(VType::circle);
                        for (int i = 0; i < ns; ++i)
                            for (int j = 0; j < nc; ++j)
                                if (lab[i * nc + j]) base.add_edge(i, ns + j, lab[i * nc + j]);
                        int nv = ns + nc;
                        std::vector<int> deg(nv);
                        for (int v = 0; v < nv; ++v) deg[v] = base.degree(v);
                        for (int um = 0; um < (1 << nv); ++um)
                            for (int vm = 0; vm < (1 << nv); ++vm) {
                                bool ok = true;
                                for (int v = 0; v < nv && ok; ++v)
                                    if (deg[v] == 0 && !((um | vm) >> v & 1)) ok = false;
                                if (!ok) continue;
                                if (__builtin_popcount(um) > max_index || __builtin_popcount(vm) > max_index) continue;
                                Shape s = base;
                                for (int v = 0; v < nv; ++v) {
                                    if (um >> v & 1) s.U.push_back(v);
                                    if (vm >> v & 1) s.V.push_back(v);
                                }
                                accept(s);
                            }
                        return;
                    }
                    for (int x = 0; x <= left; ++x) {
                        lab[idx] = x;
                        rec(idx + 1, left - x);
                    }
                    lab[idx] = 0;
                };
                rec(0, opt.max_edges);
            }
    } else {
        bool boolean = opt.filter == ShapeFilter::calL_bool;
        for (int nc = 0; 4 * nc <= opt.max_edges && nc <= opt.max_vertices; ++nc) {
            auto pool = all_rows(nc, opt.max_edges);
            if (boolean) {
                std::vector<std::vector<int>> b;
                for (auto& r : pool)
                    if (*std::max_element(r.begin(), r.end()) <= 1) b.push_back(r);
                pool = b;
            }
            std::vector<std::vector<std::vector<int>>> mats;
            std::vector<std::vector<int>> cur;
            if (nc == 0) {
                mats.push_back({});
            } else {
                gen_rows(nc, opt.max_edges, cur, mats, pool, 0, opt.max_vertices - nc);
            }
            for (const auto& rows : mats) {
                std::vector<int> colsum(nc, 0);
                for (const auto& r : rows)
                    for (int j = 0; j < nc; ++j) colsum[j] += r[j];
                bool ok = true;
                for (int j = 0; j < nc; ++j)
                    if (colsum[j] % 2 || colsum[j] < 4) ok = false;
                if (!ok) continue;
                int ns = int(rows.size());
                // role per square: odd -> 0 (U only) / 1 (V only); even -> 2 (W) / 3 (U and V)
                std::vector<int> role(ns, 0);
                std::function<void(int)> rec = [&](int i) {
                    if (i == ns) {
                        for (int iso = 0; ns + nc + iso <= opt.max_vertices; ++iso) {
                            Shape s;
                            for (int a = 0; a < ns + iso; ++a) s.add_vertex(VType::square);
                            for (int j = 0; j < nc; ++j) s.add_vertex(VType::circle);
                            for (int a = 0; a < ns; ++a) {
                                for (int j = 0; j < nc; ++j)
                                    if (rows[a][j]) s.add_edge(a, ns + iso + j, rows[a][j]);
                                if (role[a] == 0 || role[a] == 3) s.U.push_back(a);
                                if (role[a] == 1 || role[a] == 3) s.V.push_back(a);
                            }
                            for (int a = ns; a < ns + iso; ++a) {
                                s.U.push_back(a);
                                s.V.push_back(a);
                            }
                            if (int(s.U.size()) > max_index || int(s.V.size()) > max_index) break;
                            accept(s);
                        }
                        return;
                    }
                    int d = std::accumulate(rows[i].begin(), rows[i].end(), 0);
                    if (d % 2) {
                        for (int r : {0, 1}) {
                            role[i] = r;
                            rec(i + 1);
                        }
                    } else {
                        for (int r : {2, 3}) {
                            role[i] = r;
                            rec(i + 1);
                        }
                    }
                };
                rec(0);
            }
        }
    }
    std::vector<Shape> out;
    out.reserve(found.size());
    for (auto& [k, s] : found) out.push_back(std::move(s));
    return out;
}

std::vector<Shape> enumerate_shapes(int max_vertices, int max_edges, ShapeFilter f)
{
    CatalogOptions o;
    o.max_vertices = max_vertices;
    o.max_edges = max_edges;
    o.filter = f;
    return enumerate_shapes(o);
}

double weight(const Shape& s, const std::vector<int>& vertices, double n, double m)
{
    if (n < 2) throw InvalidArgument("weight needs n >= 2");
    double lm = std::log(m) / std::log(n), w = 0;
    for (int v : vertices) w += s.types[v] == VType::circle ? lm : 1.0;
    return w;
}

namespace {

bool separates(const Shape& s, unsigned mask)
{
    int nv = s.num_vertices();
    std::vector<char> seen(nv, 0);
    std::queue<int> q;
    for (int v : s.U)
        if (!(mask >> v & 1)) {
            seen[v] = 1;
            q.push(v);
        }
    std::vector<std::vector<int>> adj(nv);
    for (const auto& e : s.edges) {
        adj[e.s].push_back(e.c);
        adj[e.c].push_back(e.s);
    }
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        if (s.in_V(v)) return false;
        for (int w : adj[v])
            if (!seen[w] && !(mask >> w & 1)) {
                seen[w] = 1;
                q.push(w);
            }
    }
    return true;
}

}  // namespace

Separator min_vertex_separator(const Shape& s, double n, double m)
{
    int nv = s.num_vertices();
    if (nv > 14) throw BudgetExceeded("separator search limited to 14 vertices");
    Separator best;
    bool have = false;
    for (unsigned mask = 0; mask < (1u << nv); ++mask) {
        if (!separates(s, mask)) continue;
        std::vector<int> vs;
        for (int v = 0; v < nv; ++v)
            if (mask >> v & 1) vs.push_back(v);
        double w = weight(s, vs, n, m);
        if (!have || w < best.weight - 1e-12 || (std::abs(w - best.weight) <= 1e-12 && vs < best.vertices)) {
            best = {vs, w};
            have = true;
        }
    }
    return best;
}

std::vector<int> isolated_middle(const Shape& s)
{
    std::vector<int> r;
    for (int v : s.middle())
        if (s.degree(v) == 0) r.push_back(v);
    return r;
}

double norm_bound_exponent(const Shape& s, double n, double m)
{
    std::vector<int> all(s.num_vertices());
    std::iota(all.begin(), all.end(), 0);
    auto sep = min_vertex_separator(s, n, m);
    return weight(s, all, n, m) - sep.weight + weight(s, isolated_middle(s), n, m);
}

double norm_bound(const Shape& s, double n, double m, const NormBoundOptions& opt)
{
    int nv = s.num_vertices();
    auto uv = set_intersection(s.U, s.V);
    int vrel = nv - int(uv.size());
    double base = nv * (1.0 + s.total_label()) * std::log(n);
    double pref = 2.0 * std::pow(base, opt.C * (vrel + s.total_label()));
    return pref * std::pow(n, norm_bound_exponent(s, n, m) / 2.0);
}

Rational lambda_coeff(const Shape& s, Basis b, int n)
{
    if (!in_calL(s, b == Basis::boolean)) return 0;
    int e = int(s.U.size() + s.V.size()) + s.total_label();
    if (e % 2) return 0;
    Rational c = rpow(Rational(n), -e / 2);
    if (b == Basis::gaussian) {
        for (int v = 0; v < s.num_vertices(); ++v)
            if (s.types[v] == VType::circle) c *= hermite_at_one(s.degree(v));
        for (const auto& ed : s.edges) c /= factorial(ed.label);
    } else {
        int maxd = 0;
        for (int v = 0; v < s.num_vertices(); ++v)
            if (s.types[v] == VType::circle) maxd = std::max(maxd, s.degree(v));
        if (maxd > 0) {
            SliceMomentTable t(n, maxd);
            for (int v = 0; v < s.num_vertices(); ++v)
                if (s.types[v] == VType::circle) c *= t.scaled(s.degree(v));
        }
    }
    return c;
}

ChargingExponents charging_exponent(const Shape& s, double n, double m, double eps)
{
    if (!in_calL(s)) throw InvalidArgument("charging_exponent: shape outside the family");
    if (s.is_trivial()) throw InvalidArgument("charging_exponent: trivial shape");
    if (has_spider_ends(s)) throw InvalidArgument("charging_exponent: spider shape");
    std::vector<int> all(s.num_vertices());
    std::iota(all.begin(), all.end(), 0);
    auto sep = min_vertex_separator(s, n, m);
    ChargingExponents r;
    r.lhs = (weight(s, all, n, m) - sep.weight) / 2.0 - s.total_label() / 2.0;
    r.rhs = -(eps / 10.0) * s.total_label();
    return r;
}

bool has_spider_ends(const Shape& s)
{
    for (int side = 0; side < 2; ++side) {
        const auto& A = side == 0 ? s.U : s.V;
        const auto& B = side == 0 ? s.V : s.U;
        std::map<int, int> hubs;
        for (int v : A) {
            if (s.types[v] != VType::square || std::binary_search(B.begin(), B.end(), v)) continue;
            if (s.degree(v) != 1) continue;
            for (const auto& e : s.edges)
                if (e.s == v && ++hubs[e.c] >= 2) return true;
        }
    }
    return false;
}

namespace shapes {

Shape trivial(int k)
{
    Shape s;
    for (int i = 0; i < k; ++i) {
        s.add_vertex(VType::square);
        s.U.push_back(i);
        s.V.push_back(i);
    }
    return s;
}

Shape basic_spider()
{
    Shape s;
    int u1 = s.add_vertex(VType::square), u2 = s.add_vertex(VType::square);
    int v1 = s.add_vertex(VType::square), v2 = s.add_vertex(VType::square);
    int u = s.add_vertex(VType::circle);
    for (int x : {u1, u2, v1, v2}) s.add_edge(x, u, 1);
    s.U = {u1, u2};
    s.V = {v1, v2};
    s.normalize();
    return s;
}

Shape basic_non_spider()
{
    Shape s;
    int u1 = s.add_vertex(VType::square), v1 = s.add_vertex(VType::square);
    int w1 = s.add_vertex(VType::square), w2 = s.add_vertex(VType::square), w3 = s.add_vertex(VType::square);
    int u = s.add_vertex(VType::circle), up = s.add_vertex(VType::circle);
    s.add_edge(u1, u, 1);
    for (int w : {w1, w2, w3}) {
        s.add_edge(w, u, 1);
        s.add_edge(w, up, 1);
    }
    s.add_edge(v1, up, 1);
    s.U = {u1};
    s.V = {v1};
    s.normalize();
    return s;
}

Shape ribbon_symmetry_improper()
{
    Shape s;
    int u1 = s.add_vertex(VType::square), v2 = s.add_vertex(VType::square);
    int w1 = s.add_vertex(VType::circle), w2 = s.add_vertex(VType::circle);
    s.add_edge(u1, w1, 1);
    s.add_edge(u1, w1, 1);
    s.add_edge(u1, w2, 2);
    s.add_edge(v2, w1, 2);
    s.add_edge(v2, w2, 2);
    s.U = {u1};
    s.V = {v2};
    s.normalize();
    return s;
}

Shape fourier_example()
{
    Shape s;
    int i1 = s.add_vertex(VType::square), i2 = s.add_vertex(VType::square);
    int w1 = s.add_vertex(VType::square);
    int j1 = s.add_vertex(VType::square), j2 = s.add_vertex(VType::square);
    int u = s.add_vertex(VType::circle);
    s.add_edge(i1, u, 3);
    s.add_edge(i2, u, 1);
    s.add_edge(w1, u, 2);
    s.add_edge(j1, u, 1);
    s.add_edge(j2, u, 1);
    s.U = {i1, i2};
    s.V = {j1, j2};
    s.normalize();
    return s;
}

Shape ell(int k)
{
    if (k < 2) throw InvalidArgument("ell_k needs k >= 2");
    Shape s;
    for (int i = 0; i < k; ++i) s.add_vertex(VType::square);
    int c = s.add_vertex(VType::circle);
    s.add_edge(0, c, 1);
    s.add_edge(1, c, 1);
    for (int i = 0; i < k; ++i) s.U.push_back(i);
    for (int i = 2; i < k; ++i) s.V.push_back(i);
    s.V.push_back(c);
    s.normalize();
    return s;
}

}  // namespace shapes

std::string shape_to_json(const Shape& s)
{
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (int v = 0; v < s.num_vertices(); ++v)
        j["vertices"].push_back({{"id", v}, {"type", s.types[v] == VType::square ? "square" : "circle"}});
    j["U"] = s.U;
    j["V"] = s.V;
    j["edges"] = nlohmann::json::array();
    for (const auto& e : s.edges) j["edges"].push_back({e.s, e.c, e.label});
    std::string key = canonical_key(s), hex;
    static const char* digits = "0123456789abcdef";
    for (unsigned char ch : key) {
        hex.push_back(digits[ch >> 4]);
        hex.push_back(digits[ch & 15]);
    }
    j["key"] = hex;
    return j.dump();
}

}  // namespace pap
