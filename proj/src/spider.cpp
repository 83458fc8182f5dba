#include "pap/spider.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace pap {

namespace {

Rational npow_factor(int n, int p)
{
    Integer d;
    mpz_ui_pow_ui(d.get_mpz_t(), unsigned(n), unsigned(p));
    Rational r(1, 1);
    r /= Rational(d);
    return r;
}

}  // namespace

double NTerm::value(int n) const { return coeff.get_d() * std::pow(double(n), -npow); }
Rational NTerm::exact(int n) const { return coeff * npow_factor(n, npow); }

bool parity_ok(const Shape& s)
{
    for (int v = 0; v < s.num_vertices(); ++v)
        if ((s.degree(v) + (s.in_U(v) ? 1 : 0) + (s.in_V(v) ? 1 : 0)) % 2) return false;
    return true;
}

std::optional<SpiderInfo> is_spider(const Shape& in)
{
    Shape s = canonical_form(in);
    for (Side side : {Side::left, Side::right}) {
        const auto& A = side == Side::left ? s.U : s.V;
        const auto& B = side == Side::left ? s.V : s.U;
        std::vector<std::pair<int, int>> ends;  // (vertex, hub)
        for (int v : A) {
            if (s.types[v] != VType::square || std::binary_search(B.begin(), B.end(), v) || s.degree(v) != 1) continue;
            for (const auto& e : s.edges)
                if (e.s == v) ends.push_back({v, e.c});
        }
        for (std::size_t i = 0; i < ends.size(); ++i)
            for (std::size_t j = i + 1; j < ends.size(); ++j)
                if (ends[i].second == ends[j].second) {
                    SpiderInfo r;
                    r.shape = s;
                    r.side = side;
                    r.end1 = ends[i].first;
                    r.end2 = ends[j].first;
                    r.hub = ends[i].second;
                    return r;
                }
    }
    return std::nullopt;
}

std::vector<NTerm> build_Lk(int k)
{
    if (k < 2) throw InvalidArgument("L_k needs k >= 2");
    std::vector<NTerm> out;
    auto make = [&](int extra_sq, auto&& build, Rational c, int p, const char* name) {
        Shape s;
        std::vector<int> rest;
        for (int i = 0; i < extra_sq; ++i) rest.push_back(s.add_vertex(VType::square));
        build(s, rest);
        s.normalize();
        out.push_back({canonical_form(s), c, p, name});
    };
    out.push_back({canonical_form(shapes::ell(k)), Rational(2), 0, "ell"});
    if (k >= 3)
        make(k - 3, [](Shape& s, const std::vector<int>& rest) {
            int o = s.add_vertex(VType::square), i = s.add_vertex(VType::square), c = s.add_vertex(VType::circle);
            s.add_edge(o, c, 1);
            s.add_edge(i, c, 1);
            s.U = rest;
            s.U.push_back(o);
            s.V = rest;
            s.V.push_back(i);
            s.V.push_back(c);
        }, Rational(2), 1, "swap");
    if (k >= 4)
        make(k - 4, [](Shape& s, const std::vector<int>& rest) {
            int a = s.add_vertex(VType::square), b = s.add_vertex(VType::square), c = s.add_vertex(VType::circle);
            s.add_edge(a, c, 1);
            s.add_edge(b, c, 1);
            s.U = rest;
            s.V = rest;
            s.V.push_back(a);
            s.V.push_back(b);
            s.V.push_back(c);
        }, Rational(2), 2, "double");
    make(k - 2, [](Shape& s, const std::vector<int>& rest) {
        int j = s.add_vertex(VType::square), c = s.add_vertex(VType::circle);
        s.add_edge(j, c, 2);
        s.U = rest;
        s.V = rest;
        s.V.push_back(c);
    }, Rational(1), 1, "middle-collapse");
    if (k >= 3)
        make(k - 2, [](Shape& s, const std::vector<int>& rest) {
            int c = s.add_vertex(VType::circle);
            s.add_edge(rest[0], c, 2);
            s.U = rest;
            s.V = rest;
            s.V.push_back(c);
        }, Rational(1), 1, "index-collapse");
    return out;
}

RealizedMatrix realize_Lk(int k, const Instance& inst)
{
    std::vector<std::pair<int, int>> rb;
    for (int a = k; a >= 0 && a >= k - 4; a -= 2) rb.push_back({a, 0});
    RealizedMatrix out{IndexSpace(inst.n, inst.m, rb), IndexSpace(inst.n, inst.m, {{k - 2, 1}}), {}};
    out.M = Eigen::MatrixXd::Zero(out.rows.size(), out.cols.size());
    for (const auto& t : build_Lk(k)) realize_into(t.shape, inst, t.value(inst.n), out);
    return out;
}

AnnihilationReport verify_annihilation(const PseudoExpectation& pe, int k, const Instance& inst, double tol)
{
    int D = pe.D();
    if (k < 2 || k > D) throw InvalidArgument("verify_annihilation needs 2 <= k <= D");
    if (pe.n() != inst.n) throw InvalidArgument("pseudoexpectation and instance disagree on n");
    AnnihilationReport r;
    r.k = k;
    auto L = realize_Lk(k, inst);
    SubsetIndex rows(inst.n, D - k);
    const auto& cols = L.rows;
    Eigen::MatrixXd M(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto J = rows.unrank(i);
        for (std::size_t j = 0; j < cols.size(); ++j) {
            auto I = cols.key(j).squares;
            auto sd = set_symdiff(J, I);
            int inter = int(set_intersection(J, I).size());
            M(i, j) = pe(sd) * std::pow(double(inst.n), -inter);
        }
    }
    r.residual = (M * L.M).norm();
    r.m_norm = M.norm();
    r.l_norm = L.M.norm();
    double scale = r.m_norm * r.l_norm;
    r.relative = scale > 0 ? r.residual / scale : 0.0;
    r.pass = r.residual <= tol * scale;
    return r;
}

Shape spider_body(const SpiderInfo& sp)
{
    const Shape& s = sp.shape;
    if (sp.side == Side::right) {
        SpiderInfo t = sp;
        t.shape = s.transpose();
        t.side = Side::left;
        return spider_body(t).transpose();
    }
    std::vector<int> perm(s.num_vertices(), -1);
    Shape b;
    for (int v = 0; v < s.num_vertices(); ++v)
        if (v != sp.end1 && v != sp.end2) perm[v] = b.add_vertex(s.types[v]);
    for (const auto& e : s.edges)
        if (e.s != sp.end1 && e.s != sp.end2) b.edges.push_back({perm[e.s], perm[e.c], e.label});
    for (int v : s.U)
        if (v != sp.end1 && v != sp.end2) b.U.push_back(perm[v]);
    b.U.push_back(perm[sp.hub]);
    for (int v : s.V) b.V.push_back(perm[v]);
    b.normalize();
    return b;
}

IntersectionTerms intersection_terms(const SpiderInfo& sp, Basis basis)
{
    if (sp.side == Side::right) {
        SpiderInfo t = sp;
        t.shape = sp.shape.transpose();
        t.side = Side::left;
        auto r = intersection_terms(t, basis);
        for (auto* list : {&r.type1, &r.type2})
            for (auto& x : *list) x.shape = canonical_form(x.shape.transpose());
        return r;
    }
    Shape body = spider_body(sp);
    int k = int(sp.shape.U.size());
    std::string akey = canonical_key(sp.shape);
    int asq = sp.shape.num_squares();
    std::map<std::pair<std::string, int>, NTerm> acc;
    IntersectionTerms out;
    out.alpha_coeff = 0;
    for (const auto& L : build_Lk(k)) {
        for (const auto& t : multiply_decompose(L.shape, body, basis)) {
            Rational c = t.coeff * L.coeff;
            auto c2 = canonicalize(t.shape);
            if (c2.key == akey && L.npow == 0) {
                out.alpha_coeff += c;
                continue;
            }
            if (c2.shape.num_squares() >= asq)
                throw InvalidArgument("intersection term does not reduce the square count");
            auto key = std::make_pair(c2.key, L.npow);
            auto it = acc.find(key);
            if (it == acc.end())
                acc.emplace(key, NTerm{c2.shape, c, L.npow, L.name});
            else
                it->second.coeff += c;
        }
    }
    for (auto& [key, t] : acc) {
        if (t.coeff == 0) continue;
        (t.npow == 0 ? out.type1 : out.type2).push_back(std::move(t));
    }
    return out;
}

double eval(const NPoly& p, double n)
{
    double s = 0;
    for (const auto& [k, c] : p) s += c.get_d() * std::pow(n, -k);
    return s;
}

Rational eval_exact(const NPoly& p, int n)
{
    Rational s = 0;
    for (const auto& [k, c] : p) s += c * npow_factor(n, k);
    return s;
}

std::vector<int> Web::leaves() const
{
    std::vector<int> r;
    for (int i = 0; i < int(nodes.size()); ++i)
        if (!nodes[i].spider) r.push_back(i);
    return r;
}

Web build_web(const SpiderInfo& root, const WebOptions& opt)
{
    Web w;
    std::map<std::string, int> index;
    // buckets by square count give a topological order since squares strictly decrease along edges
    std::map<int, std::vector<int>, std::greater<>> bucket;
    auto add = [&](const Shape& s) {
        auto c = canonicalize(s);
        auto it = index.find(c.key);
        if (it != index.end()) return it->second;
        if (w.nodes.size() >= opt.node_cap) throw BudgetExceeded("web node cap exceeded");
        int id = int(w.nodes.size());
        w.nodes.push_back({c.shape, c.key, {}, false});
        index.emplace(c.key, id);
        bucket[c.shape.num_squares()].push_back(id);
        return id;
    };
    add(root.shape);
    w.nodes[0].value[0] = 1;
    std::vector<int> order;
    while (!bucket.empty()) {
        auto it = bucket.begin();
        auto ids = std::move(it->second);
        bucket.erase(it);
        for (int id : ids) {
            order.push_back(id);
            auto sp = is_spider(w.nodes[id].shape);
            if (!sp) continue;
            w.nodes[id].spider = true;
            auto terms = intersection_terms(*sp, opt.basis);
            if (terms.alpha_coeff == 0) throw DegenerateInstance("spider identity lost its leading term");
            Rational scale = Rational(-1) / terms.alpha_coeff;
            for (int type : {1, 2})
                for (const auto& t : type == 1 ? terms.type1 : terms.type2) {
                    int child = add(t.shape);
                    WebEdge e{id, child, type, {}};
                    e.coeff[t.npow] = t.coeff * scale;
                    w.edges.push_back(std::move(e));
                }
        }
    }
    // renumber so that node order is topological
    std::vector<int> pos(w.nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = int(i);
    std::vector<WebNode> nodes(w.nodes.size());
    for (std::size_t i = 0; i < w.nodes.size(); ++i) nodes[pos[i]] = std::move(w.nodes[i]);
    w.nodes = std::move(nodes);
    for (auto& e : w.edges) {
        e.from = pos[e.from];
        e.to = pos[e.to];
    }
    std::stable_sort(w.edges.begin(), w.edges.end(), [](const WebEdge& a, const WebEdge& b) { return a.from < b.from; });
    for (const auto& e : w.edges) {
        const auto& pv = w.nodes[e.from].value;
        auto& cv = w.nodes[e.to].value;
        for (const auto& [p1, c1] : pv)
            for (const auto& [p2, c2] : e.coeff) cv[p1 + p2] += c1 * c2;
    }
    for (auto& nd : w.nodes)
        for (auto it = nd.value.begin(); it != nd.value.end();)
            it = it->second == 0 ? nd.value.erase(it) : std::next(it);
    return w;
}

WebInvariants check_web(const Web& w)
{
    WebInvariants r;
    const Shape& root = w.nodes[0].shape;
    int V = root.num_vertices(), E = root.total_label();
    r.edge_count = E;
    r.height_bound = V;
    r.parent_bound = 4.0 * V * V * V * double(E) * E;
    std::size_t N = w.nodes.size();
    std::vector<std::set<int>> parents(N);
    for (const auto& e : w.edges) {
        if (e.to <= e.from) r.acyclic = false;
        if (w.nodes[e.to].shape.num_squares() >= w.nodes[e.from].shape.num_squares()) r.squares_decrease = false;
        parents[e.to].insert(e.from);
    }
    for (const auto& nd : w.nodes)
        if (!parity_ok(nd.shape)) r.parity = false;
    for (const auto& p : parents) r.max_parents = std::max(r.max_parents, int(p.size()));
    // longest path and max (#1 - 2 #2) over root paths, by dynamic programming in topological order
    const int neg = -1 << 29;
    std::vector<int> depth(N, neg), excess(N, neg);
    std::vector<double> paths(N, 0);
    depth[0] = 0;
    excess[0] = 0;
    paths[0] = 1;
    for (const auto& e : w.edges) {
        if (depth[e.from] == neg) continue;
        depth[e.to] = std::max(depth[e.to], depth[e.from] + 1);
        excess[e.to] = std::max(excess[e.to], excess[e.from] + (e.type == 1 ? 1 : -2));
        paths[e.to] += paths[e.from];
    }
    for (std::size_t i = 0; i < N; ++i) {
        r.height = std::max(r.height, depth[i]);
        r.max_excess = std::max(r.max_excess, excess[i]);
        r.paths += paths[i];
    }
    double denom = E * std::log(std::max(2.0, double(V) * E));
    for (int l : w.leaves()) {
        double mag = 0;
        for (const auto& [p, c] : w.nodes[l].value) mag += std::abs(c.get_d());
        if (mag > 1) r.leaf_c2 = std::max(r.leaf_c2, std::log(mag) / denom);
    }
    return r;
}

std::string web_to_json(const Web& w, int n)
{
    nlohmann::ordered_json j;
    auto poly = [&](const NPoly& p) {
        nlohmann::ordered_json o = nlohmann::ordered_json::object();
        for (const auto& [k, c] : p) o[std::to_string(k)] = c.get_str();
        return o;
    };
    j["nodes"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < w.nodes.size(); ++i) {
        auto sj = nlohmann::ordered_json::parse(shape_to_json(w.nodes[i].shape));
        nlohmann::ordered_json nd;
        nd["id"] = i;
        nd["key"] = sj["key"];
        sj.erase("key");
        nd["shape"] = sj;
        nd["spider"] = w.nodes[i].spider;
        nd["value"] = poly(w.nodes[i].value);
        if (n > 0) nd["value_at_n"] = eval(w.nodes[i].value, n);
        j["nodes"].push_back(nd);
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : w.edges) j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"type", e.type}, {"coeff", poly(e.coeff)}});
    return j.dump(1);
}

std::vector<Term> kill_spiders(const std::vector<Term>& decomposition, int n, const WebOptions& opt)
{
    std::vector<Term> raw;
    for (const auto& t : decomposition) {
        auto sp = is_spider(t.shape);
        if (!sp) {
            raw.push_back(t);
            continue;
        }
        Web w = build_web(*sp, opt);
        for (int l : w.leaves()) raw.push_back({w.nodes[l].shape, t.coeff * eval_exact(w.nodes[l].value, n)});
    }
    return collect_terms(raw);
}

Eigen::MatrixXd realize_terms(const std::vector<Term>& terms, const Instance& inst, const IndexSpace& rows,
                              const IndexSpace& cols)
{
    RealizedMatrix out{rows, cols, Eigen::MatrixXd::Zero(rows.size(), cols.size())};
    for (const auto& t : terms)
        if (t.coeff != 0) realize_into(t.shape, inst, t.coeff.get_d(), out);
    return out.M;
}

}  // namespace pap
