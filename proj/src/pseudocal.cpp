#include "pap/pseudocal.hpp"

#include "pap/graph_matrix.hpp"
#include "pap/shape.hpp"
#include "pap/slice.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

namespace pap {

Eigen::VectorXd PlantedSample::v() const
{
    double s = 1.0 / std::sqrt(double(v_sign.size()));
    Eigen::VectorXd out(v_sign.size());
    for (std::size_t i = 0; i < v_sign.size(); ++i) out[i] = v_sign[i] * s;
    return out;
}

Instance sample_instance(int n, int m, Basis setting, std::uint64_t seed)
{
    if (n < 1 || m < 1) throw InvalidArgument("sample_instance: n, m must be positive");
    std::mt19937_64 rng(seed);
    Instance inst;
    inst.n = n;
    inst.m = m;
    inst.setting = setting;
    inst.seed = seed;
    inst.data.resize(m, n);
    std::normal_distribution<double> g;
    for (int u = 0; u < m; ++u)
        for (int i = 0; i < n; ++i)
            inst.data(u, i) = setting == Basis::gaussian ? g(rng) : ((rng() >> 63) ? 1.0 : -1.0);
    return inst;
}

PlantedSample sample_planted(int n, int m, Basis setting, std::uint64_t seed)
{
    if (n < 1 || m < 1) throw InvalidArgument("sample_planted: n, m must be positive");
    if (setting == Basis::boolean && !is_perfect_square(n))
        throw UnsupportedInstance("boolean planted distribution needs n a perfect square");
    std::mt19937_64 rng(seed);
    PlantedSample ps;
    ps.v_sign.resize(n);
    ps.b.resize(m);
    for (auto& s : ps.v_sign) s = (rng() >> 63) ? 1 : -1;
    for (auto& b : ps.b) b = (rng() >> 63) ? 1 : -1;
    Instance& inst = ps.instance;
    inst.n = n;
    inst.m = m;
    inst.setting = setting;
    inst.seed = seed;
    inst.data.resize(m, n);
    if (setting == Basis::gaussian) {
        Eigen::VectorXd v = ps.v();
        std::normal_distribution<double> g;
        Eigen::VectorXd x(n);
        for (int u = 0; u < m; ++u) {
            for (int i = 0; i < n; ++i) x[i] = g(rng);
            Eigen::VectorXd d = ps.b[u] * v + x - v * v.dot(x);
            inst.data.row(u) = d.transpose();
        }
    } else {
        int r = int(std::lround(std::sqrt(double(n))));
        std::vector<int> y(n);
        for (int u = 0; u < m; ++u) {
            int neg = (n - ps.b[u] * r) / 2;
            for (int i = 0; i < n; ++i) y[i] = i < neg ? -1 : 1;
            std::shuffle(y.begin(), y.end(), rng);
            for (int i = 0; i < n; ++i) inst.data(u, i) = ps.v_sign[i] * y[i];
        }
    }
    return ps;
}

double planted_conditional_moment(const std::vector<int>& alpha_u, const Eigen::VectorXd& v, double b)
{
    double nv = v.norm();
    if (nv == 0.0) throw InvalidArgument("planted_conditional_moment: zero vector");
    if (alpha_u.size() != std::size_t(v.size())) throw InvalidArgument("planted_conditional_moment: size mismatch");
    double p = 1;
    int k = 0;
    for (std::size_t i = 0; i < alpha_u.size(); ++i) {
        p *= std::pow(v[i] / nv, alpha_u[i]);
        k += alpha_u[i];
    }
    return p * hermite_eval(k, b, Basis::gaussian);
}

namespace {

bool parity_ok(const std::vector<int>& I, const CellMultiIndex& alpha, int n, int m)
{
    for (const auto& [c, x] : alpha.cells())
        if (c.first < 0 || c.first >= m || c.second < 0 || c.second >= n) throw InvalidArgument("cell out of range");
    for (const auto& [u, r] : alpha.rows())
        if (r % 2) return false;
    std::vector<int> par(n, 0);
    for (const auto& [i, c] : alpha.cols()) par[i] = c % 2;
    for (int i : I) par[i] ^= 1;
    return std::all_of(par.begin(), par.end(), [](int x) { return x == 0; });
}

}  // namespace

Rational planted_fourier_coeff(const std::vector<int>& I, const CellMultiIndex& alpha, int n, int m, Basis setting)
{
    if (!parity_ok(I, alpha, n, m)) return 0;
    int e = int(I.size()) + alpha.total();
    Rational c = rpow(Rational(n), -e / 2);
    if (setting == Basis::gaussian) {
        for (const auto& [u, r] : alpha.rows()) c *= hermite_at_one(r);
        c /= alpha.factorial();
    } else {
        int kmax = 0;
        for (const auto& [cell, x] : alpha.cells())
            if (x > 1) return 0;
        for (const auto& [u, r] : alpha.rows()) kmax = std::max(kmax, r);
        if (kmax > 0) {
            SliceMomentTable t(n, kmax);
            for (const auto& [u, r] : alpha.rows()) c *= t.scaled(r);
        }
    }
    c.canonicalize();
    return c;
}

Rational planted_expectation_exhaustive(const std::vector<int>& I, const CellMultiIndex& alpha, int n, int m)
{
    if (!is_perfect_square(n)) throw UnsupportedInstance("exhaustive planted oracle needs n a perfect square");
    if (n > 16) throw BudgetExceeded("exhaustive planted oracle limited to n <= 16");
    int r = int(std::lround(std::sqrt(double(n))));
    Rational total = 0;
    for (unsigned sm = 0; sm < (1u << n); ++sm) {
        auto s = [&](int i) { return (sm >> i & 1) ? -1 : 1; };
        int sI = 1;
        for (int i : I) sI *= s(i);
        Rational prod = sI;
        for (int u = 0; u < m && prod != 0; ++u) {
            Rational row = 0;
            for (int b : {1, -1}) {
                Rational acc = 0;
                long cnt = 0;
                for (unsigned dm = 0; dm < (1u << n); ++dm) {
                    int ip = 0, chi = 1;
                    for (int i = 0; i < n; ++i) {
                        int d = (dm >> i & 1) ? -1 : 1;
                        ip += s(i) * d;
                        if (alpha.get(u, i) % 2) chi *= d;
                    }
                    if (ip != b * r) continue;
                    ++cnt;
                    acc += chi;
                }
                row += acc / cnt;
            }
            prod *= row / 2;
        }
        total += prod;
    }
    total /= Rational(Integer(1) << n);
    total *= rpow(Rational(1, r), int(I.size()));
    total.canonicalize();
    return total;
}

PseudoExpectation::PseudoExpectation(int n, int D, int T, Basis setting)
    : n_(n), D_(D), T_(T), setting_(setting), index_(n, D), values_(Eigen::VectorXd::Zero(index_.size()))
{
    if (D < 0 || T < 0) throw InvalidArgument("PseudoExpectation: negative degree");
}

double PseudoExpectation::monomial(std::vector<int> coords) const
{
    std::sort(coords.begin(), coords.end());
    std::vector<int> I;
    int pairs = 0;
    for (std::size_t a = 0; a < coords.size();) {
        std::size_t b = a;
        while (b < coords.size() && coords[b] == coords[a]) ++b;
        int mult = int(b - a);
        pairs += mult / 2;
        if (mult % 2) I.push_back(coords[a]);
        a = b;
    }
    if (int(I.size()) > index_.max_size()) throw InvalidArgument("monomial degree exceeds pseudoexpectation degree");
    return (*this)(I) * std::pow(double(n_), -pairs);
}

std::string to_string(PeMode m)
{
    switch (m) {
    case PeMode::shape_sum: return "shape-sum";
    case PeMode::alpha_enum: return "alpha-enum";
    case PeMode::row_series: return "row-series";
    }
    return "?";
}

PeMode pe_mode_from_string(const std::string& s)
{
    if (s == "shape-sum") return PeMode::shape_sum;
    if (s == "alpha-enum") return PeMode::alpha_enum;
    if (s == "row-series") return PeMode::row_series;
    throw InvalidArgument("unknown pe mode: " + s);
}

namespace {

void for_each_alpha(int n, int m, int T, bool binary, const std::function<void(const CellMultiIndex&)>& f)
{
    int cells = n * m;
    CellMultiIndex a;
    std::function<void(int, int)> rec = [&](int c, int left) {
        if (c == cells) {
            f(a);
            return;
        }
        int hi = binary ? std::min(1, left) : left;
        for (int x = 0; x <= hi; ++x) {
            if (x) a.set(c / n, c % n, x);
            rec(c + 1, left - x);
        }
        a.set(c / n, c % n, 0);
    };
    rec(0, T);
}

std::vector<int> odd_columns(const CellMultiIndex& a)
{
    std::vector<int> I;
    for (const auto& [i, c] : a.cols())
        if (c % 2) I.push_back(i);
    return I;
}

void build_shape_sum(const Instance& inst, int D, int T, const PeOptions& opt, PseudoExpectation& pe)
{
    CatalogOptions co;
    co.max_edges = T;
    co.max_index = D;
    co.max_vertices = D + T / 2 + T / 4;
    co.filter = inst.setting == Basis::boolean ? ShapeFilter::calL_bool : ShapeFilter::calL;
    co.right_empty = true;
    co.cap = opt.catalog_cap;
    auto catalog = enumerate_shapes(co);
    double work = 0;
    for (const auto& s : catalog) work += realization_work(s, inst.n, inst.m);
    if (work > opt.work_budget) throw BudgetExceeded("shape-sum realization work exceeds budget");
    const auto& idx = pe.index();
    for (const auto& s : catalog) {
        int k = int(s.U.size());
        if (k > idx.max_size()) continue;
        Rational lam = lambda_coeff(s, inst.setting, inst.n);
        if (lam == 0) continue;
        RealizedMatrix col{IndexSpace::composition(inst.n, inst.m, k, 0), IndexSpace::composition(inst.n, inst.m, 0, 0),
                           Eigen::MatrixXd::Zero(idx.count(k), 1)};
        realize_into(s, inst, 1.0, col, {opt.work_budget, false});
        pe.values().segment(idx.offset(k), idx.count(k)) += to_double(lam) * col.M.col(0);
    }
}

void build_alpha_enum(const Instance& inst, int D, int T, PseudoExpectation& pe)
{
    if (inst.n * inst.m > 12 || T > 4) throw InvalidArgument("alpha-enum mode limited to n*m <= 12 and T <= 4");
    auto series = pe_fourier_series(inst.n, inst.m, D, T, inst.setting);
    for (const auto& [I, f] : series) pe.at(I) = evaluate_series(f, inst);
}

void series_mul(const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& out)
{
    std::size_t L = a.size();
    std::vector<double> r(L, 0.0);
    for (std::size_t i = 0; i < L; ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; i + j < L; ++j) r[i + j] += a[i] * b[j];
    }
    out.swap(r);
}

// only alpha supported on one row survive when T < 8: rows need |alpha_u| >= 4
void build_row_series(const Instance& inst, int D, int T, PseudoExpectation& pe)
{
    if (T >= 8) throw InvalidArgument("row-series mode needs T < 8");
    int n = inst.n;
    const auto& idx = pe.index();
    auto& vals = pe.values();
    vals[0] += 1.0;
    if (T < 4) return;
    if (inst.setting == Basis::boolean) {
        SliceMomentTable t(n, std::min(T, n));
        for (std::size_t r = 0; r < idx.size(); ++r) {
            int k = idx.size_of(r);
            if (k < 4 || k > T || k % 2) continue;
            const int* I = idx.data(r);
            double sum = 0;
            for (int u = 0; u < inst.m; ++u) {
                double chi = 1;
                for (int q = 0; q < k; ++q) chi *= inst.data(u, I[q]);
                sum += chi;
            }
            vals[r] += sum * to_double(t.scaled(k)) * std::pow(double(n), -k);
        }
        return;
    }
    int L = T + 1;
    std::vector<double> hone(L), fact(L, 1.0);
    for (int a = 0; a < L; ++a) {
        hone[a] = hermite_at_one(a).get_d();
        if (a) fact[a] = fact[a - 1] * a;
    }
    std::vector<std::vector<double>> R(n, std::vector<double>(L));
    std::vector<double> P(L), cur;
    for (int u = 0; u < inst.m; ++u) {
        std::fill(P.begin(), P.end(), 0.0);
        P[0] = 1;
        for (int i = 0; i < n; ++i) {
            std::vector<double> E(L, 0.0), O(L, 0.0);
            for (int a = 0; a < L; ++a) {
                double h = hermite_eval(a, inst.data(u, i), Basis::gaussian) / fact[a];
                (a % 2 ? O : E)[a] = h;
            }
            for (int a = 0; a < L; ++a) {
                double x = O[a];
                for (int j = 1; j <= a; ++j) x -= E[j] * R[i][a - j];
                R[i][a] = x;
            }
            series_mul(P, E, P);
        }
        for (std::size_t r = 0; r < idx.size(); ++r) {
            int k = idx.size_of(r);
            if (k > T) continue;
            const int* I = idx.data(r);
            cur = P;
            for (int q = 0; q < k; ++q) series_mul(cur, R[I[q]], cur);
            double add = 0;
            for (int a = 4; a <= T; a += 2) add += hone[a] * std::pow(double(n), -(k + a) / 2.0) * cur[a];
            vals[r] += add;
        }
    }
}

}  // namespace

PseudoExpectation build_pe(const Instance& inst, int D, int T, const PeOptions& opt)
{
    inst.validate();
    if (D < 0 || D % 2) throw InvalidArgument("D must be a nonnegative even integer");
    if (T < 0) throw InvalidArgument("T must be nonnegative");
    PseudoExpectation pe(inst.n, D, T, inst.setting);
    switch (opt.mode) {
    case PeMode::shape_sum: build_shape_sum(inst, D, T, opt, pe); break;
    case PeMode::alpha_enum: build_alpha_enum(inst, D, T, pe); break;
    case PeMode::row_series: build_row_series(inst, D, T, pe); break;
    }
    if (!pe.values().allFinite()) throw DegenerateInstance("non-finite pseudoexpectation value");
    return pe;
}

PseudoExpectation normalize(const PseudoExpectation& pe)
{
    double z = pe.values()[0];
    if (z == 0.0 || !std::isfinite(z)) throw DegenerateInstance("cannot normalize: E~[1] = 0");
    PseudoExpectation out = pe;
    out.values() /= z;
    out.values()[0] = 1.0;
    out.set_normalized(true);
    return out;
}

std::map<std::vector<int>, FourierSeries> pe_fourier_series(int n, int m, int D, int T, Basis setting)
{
    std::map<std::vector<int>, FourierSeries> out;
    SubsetIndex idx(n, D);
    for (std::size_t r = 0; r < idx.size(); ++r) out[idx.unrank(r)];
    for_each_alpha(n, m, T, setting == Basis::boolean, [&](const CellMultiIndex& a) {
        auto I = odd_columns(a);
        if (int(I.size()) > D) return;
        Rational c = planted_fourier_coeff(I, a, n, m, setting);
        if (c != 0) out[I][a] = c;
    });
    return out;
}

double evaluate_series(const FourierSeries& f, const Instance& inst)
{
    double s = 0;
    for (const auto& [a, c] : f) {
        double p = to_double(c);
        for (const auto& [cell, x] : a.cells()) p *= hermite_eval(x, inst.data(cell.first, cell.second), inst.setting);
        s += p;
    }
    return s;
}

namespace {

// multiply by d_{u,j}
FourierSeries times_d(const FourierSeries& f, int u, int j, Basis setting)
{
    FourierSeries out;
    for (const auto& [a, c] : f) {
        int x = a.get(u, j);
        if (setting == Basis::boolean) {
            CellMultiIndex b = a;
            b.set(u, j, 1 - x);
            out[b] += c;
            continue;
        }
        CellMultiIndex up = a;
        up.set(u, j, x + 1);
        out[up] += c;
        if (x > 0) {
            CellMultiIndex dn = a;
            dn.set(u, j, x - 1);
            out[dn] += c * x;
        }
    }
    return out;
}

void add_scaled(FourierSeries& acc, const FourierSeries& f, const Rational& s)
{
    for (const auto& [a, c] : f) acc[a] += c * s;
}

}  // namespace

WindowReport truncation_window_check(int n, int m, int D, int T, Basis setting, const Instance* inst)
{
    if (inst && (inst->n != n || inst->m != m || inst->setting != setting))
        throw InvalidArgument("truncation_window_check: instance does not match");
    if (n * m > 12) throw InvalidArgument("truncation_window_check limited to n*m <= 12");
    if (D < 2) throw InvalidArgument("truncation_window_check needs D >= 2");
    WindowReport rep;
    rep.n = n;
    rep.m = m;
    rep.D = D;
    rep.T = T;
    auto S = pe_fourier_series(n, m, D, T, setting);
    Rational inv_n(1, n);
    double sq = 0, isq = 0;
    SubsetIndex idx(n, D - 2);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        auto I = idx.unrank(r);
        for (int u = 0; u < m; ++u) {
            FourierSeries res;
            for (int j = 0; j < n; ++j)
                for (int jp = 0; jp < n; ++jp) {
                    if (j == jp) {
                        add_scaled(res, times_d(times_d(S.at(I), u, j, setting), u, j, setting), inv_n);
                        continue;
                    }
                    std::vector<int> pair{std::min(j, jp), std::max(j, jp)};
                    auto K = set_symdiff(I, pair);
                    int common = int(set_intersection(I, pair).size());
                    add_scaled(res, times_d(times_d(S.at(K), u, j, setting), u, jp, setting), rpow(inv_n, common));
                }
            add_scaled(res, S.at(I), Rational(-1));
            if (inst) {
                double x = evaluate_series(res, *inst);
                isq += x * x;
            }
            for (const auto& [a, c] : res) {
                if (c == 0) continue;
                rep.identically_zero = false;
                rep.support_sizes.insert(a.total());
                if (a.total() < T - 2 || a.total() > T + 2) rep.in_window = false;
                double w = to_double(c);
                w *= w;
                if (setting == Basis::gaussian) w *= a.factorial().get_d();
                sq += w;
            }
        }
    }
    rep.residual_l2 = std::sqrt(sq);
    rep.instance_residual_l2 = std::sqrt(isq);
    return rep;
}

void write_instance(const Instance& inst, const std::string& base)
{
    std::ofstream csv(base + ".csv");
    if (!csv) throw InvalidArgument("cannot write " + base + ".csv");
    csv << std::setprecision(17);
    for (int u = 0; u < inst.m; ++u) {
        for (int i = 0; i < inst.n; ++i) csv << (i ? "," : "") << inst.data(u, i);
        csv << "\n";
    }
    nlohmann::ordered_json h;
    h["n"] = inst.n;
    h["m"] = inst.m;
    h["setting"] = to_string(inst.setting);
    h["seed"] = inst.seed;
    std::ofstream js(base + ".json");
    if (!js) throw InvalidArgument("cannot write " + base + ".json");
    js << h.dump(2) << "\n";
}

Instance read_instance(const std::string& base)
{
    std::ifstream js(base + ".json");
    if (!js) throw InvalidArgument("cannot read " + base + ".json");
    auto h = nlohmann::json::parse(js);
    Instance inst;
    inst.n = h.at("n").get<int>();
    inst.m = h.at("m").get<int>();
    inst.setting = basis_from_string(h.at("setting").get<std::string>());
    inst.seed = h.value("seed", std::uint64_t(0));
    inst.data.resize(inst.m, inst.n);
    std::ifstream csv(base + ".csv");
    if (!csv) throw InvalidArgument("cannot read " + base + ".csv");
    std::string line;
    for (int u = 0; u < inst.m; ++u) {
        if (!std::getline(csv, line)) throw InvalidArgument("instance csv has too few rows");
        std::stringstream ss(line);
        std::string cell;
        for (int i = 0; i < inst.n; ++i) {
            if (!std::getline(ss, cell, ',')) throw InvalidArgument("instance csv has too few columns");
            inst.data(u, i) = std::stod(cell);
        }
    }
    inst.validate();
    return inst;
}

std::string pe_to_json(const PseudoExpectation& pe)
{
    nlohmann::ordered_json j;
    j["n"] = pe.n();
    j["D"] = pe.D();
    j["T"] = pe.T();
    j["setting"] = to_string(pe.setting());
    j["normalized"] = pe.normalized();
    nlohmann::ordered_json vals = nlohmann::ordered_json::object();
    const auto& idx = pe.index();
    for (std::size_t r = 0; r < idx.size(); ++r) {
        std::string key;
        const int* s = idx.data(r);
        for (int q = 0; q < idx.size_of(r); ++q) key += (q ? "," : "") + std::to_string(s[q]);
        vals[key] = pe.values()[r];
    }
    j["values"] = std::move(vals);
    return j.dump(1);
}

PseudoExpectation pe_from_json(const std::string& text)
{
    auto j = nlohmann::json::parse(text);
    PseudoExpectation pe(j.at("n").get<int>(), j.at("D").get<int>(), j.at("T").get<int>(),
                         basis_from_string(j.at("setting").get<std::string>()));
    pe.set_normalized(j.value("normalized", false));
    for (const auto& [key, val] : j.at("values").items()) {
        std::vector<int> I;
        std::stringstream ss(key);
        std::string tok;
        while (std::getline(ss, tok, ',')) I.push_back(std::stoi(tok));
        if (!std::is_sorted(I.begin(), I.end())) throw InvalidArgument("pe json: unsorted index " + key);
        pe.at(I) = val.get<double>();
    }
    return pe;
}

}  // namespace pap
