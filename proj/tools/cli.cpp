#include "cli.hpp"

#include "pap/sk.hpp"
#include "pap/spider.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace pap::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct RunConfig {
    std::string subcommand;
    int n = 8, m = 4, p = 0, D = 2, T = 4;
    double eps = 0.1;
    std::string setting = "gaussian";
    std::uint64_t seed = 1;
    int trials = 1;
    std::string mode = "shape-sum";
    double work_budget = 2e9;
    std::size_t catalog_cap = 200000;
    std::size_t node_cap = 5000;
    std::string out_dir;
    double tol = -1;  // < 0: subcommand default

    // subcommand specific
    bool planted = false;
    bool project = true;
    bool assert_decrease = false;
    std::string instance;
    std::string suites = "all";
    long samples = 100000;
    double se = 3;
    int edges = 4, max_vertices = 8, max_index = 2;
    double C = 1.0;
    double min_fraction = 0.95;
    int min_psd = 0;
    std::string json_dir;
    std::vector<std::string> inputs;
};

struct Outcome {
    Json body;
    bool pass = true;
};

double tol_or(const RunConfig& c, double def) { return c.tol >= 0 ? c.tol : def; }

std::vector<std::uint64_t> trial_seeds(std::uint64_t seed, int count)
{
    std::mt19937_64 g(seed);
    std::vector<std::uint64_t> s(count);
    for (auto& x : s) x = g();
    return s;
}

Json config_json(const RunConfig& c)
{
    Json j;
    j["n"] = c.n;
    j["m"] = c.m;
    j["p"] = c.p;
    j["D"] = c.D;
    j["T"] = c.T;
    j["eps"] = c.eps;
    j["setting"] = c.setting;
    j["seed"] = c.seed;
    j["trials"] = c.trials;
    j["mode"] = c.mode;
    j["work_budget"] = c.work_budget;
    if (c.tol >= 0) j["tol"] = c.tol;
    return j;
}

void validate(const RunConfig& c)
{
    if (c.n < 1 || c.m < 0) throw InvalidArgument("need n >= 1 and m >= 0");
    if (c.D < 0 || c.D % 2) throw InvalidArgument("D must be even and nonnegative");
    if (c.T < 0) throw InvalidArgument("T must be nonnegative");
    if (c.trials < 1) throw InvalidArgument("trials must be positive");
    if (c.work_budget <= 0) throw InvalidArgument("work budget must be positive");
    basis_from_string(c.setting);
    pe_mode_from_string(c.mode);
    for (const auto& d : {c.out_dir, c.json_dir}) {
        if (d.empty()) continue;
        std::error_code ec;
        fs::create_directories(d, ec);
        fs::path probe = fs::path(d) / ".write_probe";
        std::ofstream f(probe);
        if (!f) throw InvalidArgument("output directory not writable: " + d);
        f.close();
        fs::remove(probe, ec);
    }
}

PeOptions pe_options(const RunConfig& c)
{
    PeOptions o;
    o.mode = pe_mode_from_string(c.mode);
    o.catalog_cap = c.catalog_cap;
    o.work_budget = c.work_budget;
    return o;
}

Json matrix_rows(const Eigen::MatrixXd& M)
{
    Json a = Json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        a.push_back(row);
    }
    return a;
}

// ---- sample

Outcome cmd_sample(const RunConfig& c)
{
    Basis b = basis_from_string(c.setting);
    Outcome o;
    Instance inst;
    if (c.planted) {
        auto ps = sample_planted(c.n, c.m, b, c.seed);
        inst = ps.instance;
        o.body["v_sign"] = ps.v_sign;
        o.body["b"] = ps.b;
    } else {
        inst = sample_instance(c.n, c.m, b, c.seed);
    }
    o.body["frobenius"] = inst.data.norm();
    if (!c.out_dir.empty()) {
        write_instance(inst, (fs::path(c.out_dir) / "instance").string());
        o.body["files"] = {"instance.csv", "instance.json"};
    } else if (std::size_t(c.n) * c.m <= 4096) {
        o.body["data"] = matrix_rows(inst.data);
    }
    return o;
}

// ---- pseudocalibrate

Outcome cmd_pseudocalibrate(const RunConfig& c)
{
    Instance inst = c.instance.empty() ? sample_instance(c.n, c.m, basis_from_string(c.setting), c.seed)
                                       : read_instance(c.instance);
    auto pe = build_pe(inst, c.D, c.T, pe_options(c));
    Outcome o;
    o.body["raw_norm"] = pe.values().norm();
    if (c.project) {
        auto rep = project(pe, build_Q(inst, c.D));
        o.body["projection"] = {{"method", rep.method},
                                {"residual_before", rep.residual_before},
                                {"residual_after", rep.residual_after},
                                {"change", rep.change}};
        pe = rep.pe;
    }
    if (pe.values().norm() > 0) pe = normalize(pe);
    o.body["entries"] = pe.values().size();
    if (!c.out_dir.empty()) {
        std::ofstream f(fs::path(c.out_dir) / "pe.json");
        f << pe_to_json(pe) << "\n";
        o.body["files"] = {"pe.json"};
    } else {
        o.body["pe"] = Json::parse(pe_to_json(pe));
    }
    return o;
}

// ---- verify

void binary_alphas(int n, int m, int T, const std::function<void(const CellMultiIndex&)>& f)
{
    int cells = n * m;
    for (unsigned long mask = 0; mask < (1ul << cells); ++mask) {
        if (__builtin_popcountl(mask) > T) continue;
        CellMultiIndex a;
        for (int x = 0; x < cells; ++x)
            if (mask >> x & 1) a.set(x / n, x % n, 1);
        f(a);
    }
}

Json suite_booleanity(const RunConfig& c, Basis b, bool& pass)
{
    auto inst = sample_instance(c.n, c.m, b, c.seed);
    auto pe = build_pe(inst, c.D, c.T, pe_options(c));
    auto check = [&](const PseudoExpectation& e) {
        double dev = 0, scale = std::max(1.0, e.values().cwiseAbs().maxCoeff());
        const auto& idx = e.index();
        for (std::size_t r = 0; r < idx.size(); ++r) {
            auto J = idx.unrank(r);
            if (int(J.size()) > c.D - 2) continue;
            for (int i = 0; i < c.n; ++i) {
                std::vector<int> coords = J;
                coords.push_back(i);
                coords.push_back(i);
                dev = std::max(dev, std::abs(e.monomial(coords) - e(J) / c.n) / scale);
            }
        }
        return dev;
    };
    Json j;
    j["max_deviation"] = check(pe);
    double tol = tol_or(c, 1e-12);
    bool ok = j["max_deviation"].get<double>() <= tol;
    if (c.D >= 2) {
        auto proj = project(pe, build_Q(inst, c.D)).pe;
        j["projected_max_deviation"] = check(proj);
        ok = ok && j["projected_max_deviation"].get<double>() <= tol;
    }
    if (b == Basis::boolean) {
        bool entries = (inst.data.array().abs() == 1.0).all();
        bool basis = true;
        for (int k = 2; k <= 8; ++k)
            for (int x : {-1, 1}) basis = basis && hermite_eval(k, Rational(x), b) == 0;
        j["entries_pm1"] = entries;
        j["basis_degenerate"] = basis;
        ok = ok && entries && basis;
    }
    j["pass"] = ok;
    pass = pass && ok;
    return j;
}

Json suite_oracle(const RunConfig& c, Basis b, bool& pass)
{
    Json j;
    if (b == Basis::boolean) {
        if (!is_perfect_square(c.n)) throw UnsupportedInstance("boolean oracle needs n a perfect square");
        if (c.n * c.m > 20) throw BudgetExceeded("boolean oracle limited to n*m <= 20");
        long checked = 0, mismatched = 0, nonzero = 0;
        SubsetIndex subsets(c.n, c.D);
        auto inst = sample_instance(c.n, c.m, b, c.seed);
        double value_err = 0;
        std::vector<Rational> value(subsets.size(), Rational(0));
        for (std::size_t r = 0; r < subsets.size(); ++r) {
            auto I = subsets.unrank(r);
            binary_alphas(c.n, c.m, c.T, [&](const CellMultiIndex& a) {
                Rational f = planted_fourier_coeff(I, a, c.n, c.m, b);
                Rational x = planted_expectation_exhaustive(I, a, c.n, c.m);
                ++checked;
                if (f != x) ++mismatched;
                if (x == 0) return;
                ++nonzero;
                Rational chi = 1;
                for (const auto& [cell, k] : a.cells()) chi *= Rational(int(inst.data(cell.first, cell.second)));
                value[r] += x * chi;
            });
        }
        auto pe = build_pe(inst, c.D, c.T, pe_options(c));
        double scale = std::max(1.0, pe.values().cwiseAbs().maxCoeff());
        for (std::size_t r = 0; r < subsets.size(); ++r)
            value_err = std::max(value_err, std::abs(pe.values()[r] - value[r].get_d()) / scale);
        j["coefficients_checked"] = checked;
        j["coefficients_nonzero"] = nonzero;
        j["mismatches"] = mismatched;
        j["value_max_error"] = value_err;
        j["pass"] = mismatched == 0 && value_err <= tol_or(c, 1e-12);
    } else {
        // Monte Carlo of the planted conditional moments at a fixed sign vector and b = -1
        std::mt19937_64 rng(c.seed);
        std::normal_distribution<double> g;
        Eigen::VectorXd w(c.n);
        for (int i = 0; i < c.n; ++i) w[i] = (rng() & 1) ? 1.0 : -1.0;
        w /= std::sqrt(double(c.n));
        double bval = -1;
        std::vector<std::vector<int>> alphas;
        std::vector<int> a(c.n, 0);
        std::function<void(int, int)> gen = [&](int i, int left) {
            if (i == c.n) {
                alphas.push_back(a);
                return;
            }
            for (int k = 0; k <= left; ++k) {
                a[i] = k;
                gen(i + 1, left - k);
            }
            a[i] = 0;
        };
        gen(0, 4);
        if (double(alphas.size()) * c.samples * c.n > c.work_budget)
            throw BudgetExceeded("Monte Carlo oracle exceeds the work budget");
        std::vector<double> s1(alphas.size()), s2(alphas.size());
        Eigen::VectorXd x(c.n), d(c.n);
        std::vector<std::vector<double>> h(c.n, std::vector<double>(5));
        for (long t = 0; t < c.samples; ++t) {
            for (int i = 0; i < c.n; ++i) x[i] = g(rng);
            d = bval * w + x - w * w.dot(x);
            for (int i = 0; i < c.n; ++i)
                for (int k = 0; k <= 4; ++k) h[i][k] = hermite_eval(k, d[i], Basis::gaussian);
            for (std::size_t q = 0; q < alphas.size(); ++q) {
                double v = 1;
                for (int i = 0; i < c.n; ++i) v *= h[i][alphas[q][i]];
                s1[q] += v;
                s2[q] += v * v;
            }
        }
        double worst = 0;
        int fails = 0;
        for (std::size_t q = 0; q < alphas.size(); ++q) {
            double mean = s1[q] / c.samples, var = s2[q] / c.samples - mean * mean;
            double se = std::sqrt(std::max(var, 0.0) / c.samples);
            double want = planted_conditional_moment(alphas[q], w, bval);
            double z = se > 0 ? std::abs(mean - want) / se : (std::abs(mean - want) > 1e-12 ? INFINITY : 0.0);
            worst = std::max(worst, z);
            if (z > c.se) ++fails;
        }
        j["moments_checked"] = alphas.size();
        j["samples"] = c.samples;
        j["max_standard_errors"] = worst;
        j["outside"] = fails;
        j["pass"] = fails == 0;
    }
    pass = pass && j["pass"].get<bool>();
    return j;
}

Json suite_window(const RunConfig& c, Basis b, bool& pass)
{
    auto r = truncation_window_check(c.n, c.m, c.D, c.T, b);
    Json j;
    j["support_sizes"] = std::vector<int>(r.support_sizes.begin(), r.support_sizes.end());
    j["window"] = {c.T - 2, c.T + 2};
    j["in_window"] = r.in_window;
    j["residual_l2"] = r.residual_l2;
    Json sweep = Json::array();
    double prev = INFINITY;
    bool dec = true;
    for (int t = std::max(0, c.T - 2); t <= c.T; ++t) {
        double res = t == c.T ? r.residual_l2 : truncation_window_check(c.n, c.m, c.D, t, b).residual_l2;
        sweep.push_back({{"T", t}, {"residual_l2", res}});
        if (!(res < prev)) dec = false;
        prev = res;
    }
    j["residual_by_T"] = sweep;
    j["strictly_decreasing"] = dec;
    bool ok = r.in_window && (!c.assert_decrease || dec);
    j["pass"] = ok;
    pass = pass && ok;
    return j;
}

Outcome cmd_verify(const RunConfig& c)
{
    Basis b = basis_from_string(c.setting);
    std::set<std::string> want;
    std::stringstream ss(c.suites);
    for (std::string s; std::getline(ss, s, ',');) want.insert(s);
    bool all = want.count("all");
    for (const auto& s : want)
        if (s != "all" && s != "booleanity" && s != "oracle" && s != "window")
            throw InvalidArgument("unknown suite: " + s);
    Outcome o;
    if (all || want.count("booleanity")) o.body["booleanity"] = suite_booleanity(c, b, o.pass);
    if (all || want.count("oracle")) o.body["oracle"] = suite_oracle(c, b, o.pass);
    if (all || want.count("window")) o.body["window"] = suite_window(c, b, o.pass);
    return o;
}

// ---- norms

Outcome cmd_norms(const RunConfig& c)
{
    Basis b = basis_from_string(c.setting);
    int m = c.m > 0 ? c.m : int(std::ceil(std::pow(double(c.n), 1.3) - 1e-9));
    CatalogOptions co;
    co.max_edges = c.edges;
    co.max_vertices = c.max_vertices;
    co.max_index = c.max_index;
    co.cap = c.catalog_cap;
    co.filter = b == Basis::boolean ? ShapeFilter::calL_bool : ShapeFilter::calL;
    auto cat = enumerate_shapes(co);
    std::vector<Instance> draws;
    for (auto s : trial_seeds(c.seed, c.trials)) draws.push_back(sample_instance(c.n, m, b, s));
    NormBoundOptions nb;
    nb.C = c.C;
    auto rows = norm_sweep(cat, draws, nb, c.work_budget);
    Outcome o;
    o.body["m_used"] = m;
    o.body["shapes"] = cat.size();
    Json arr = Json::array();
    for (const auto& r : rows) {
        double mx = 0, mean = 0;
        for (double x : r.norms) {
            mx = std::max(mx, x);
            mean += x / r.norms.size();
        }
        double frac = double(r.within) / r.norms.size();
        arr.push_back({{"shape", r.shape.describe()},
                       {"bound", r.bound},
                       {"max_norm", mx},
                       {"mean_norm", mean},
                       {"within", r.within},
                       {"fraction", frac}});
        if (frac < c.min_fraction) o.pass = false;
    }
    o.body["rows"] = arr;
    return o;
}

// ---- psd

Outcome cmd_psd(const RunConfig& c)
{
    Basis b = basis_from_string(c.setting);
    double tol = tol_or(c, 1e-8);
    Outcome o;
    Json arr = Json::array();
    int psd = 0, certified = 0;
    for (auto s : trial_seeds(c.seed, c.trials)) {
        auto inst = sample_instance(c.n, c.m, b, s);
        auto pe = build_pe(inst, c.D, c.T, pe_options(c));
        if (c.project) pe = project(pe, build_Q(inst, c.D)).pe;
        Json t;
        t["seed"] = s;
        if (pe.values().norm() == 0) {
            t["degenerate"] = true;
            arr.push_back(t);
            continue;
        }
        auto mm = assemble(normalize(pe), c.D);
        auto er = min_eigenvalue(mm.M);
        auto cert = block_psd_certify(mm);
        bool ok = er.min_eig >= -tol * er.norm;
        psd += ok;
        certified += cert.certified;
        t["min_eig"] = er.min_eig;
        t["norm"] = er.norm;
        t["relative"] = er.norm > 0 ? er.min_eig / er.norm : 0.0;
        t["psd"] = ok;
        t["certified"] = cert.certified;
        arr.push_back(t);
    }
    o.body["trials"] = arr;
    o.body["psd_count"] = psd;
    o.body["certified_count"] = certified;
    o.pass = psd >= c.min_psd;
    return o;
}

// ---- project

Outcome cmd_project(const RunConfig& c)
{
    if (c.D < 2) throw InvalidArgument("project needs D >= 2");
    Basis b = basis_from_string(c.setting);
    double tol = tol_or(c, 1e-8);
    auto inst = sample_instance(c.n, c.m, b, c.seed);
    auto pe = build_pe(inst, c.D, c.T, pe_options(c));
    auto C = build_Q(inst, c.D);
    auto rep = project(pe, C);
    double enorm = pe.values().norm();
    // Q of full column rank leaves only rounding noise
    bool vacuous = rep.pe.values().norm() <= 1e-10 * enorm;
    if (vacuous) rep.pe.values().setZero();
    double rel = rep.q_norm * enorm > 0 ? rep.residual_after / (rep.q_norm * enorm) : 0.0;
    auto again = project(rep.pe, C);
    double idem = again.change / std::max(1e-300, rep.pe.values().norm());
    if (rep.pe.values().norm() == 0) idem = again.change;
    Outcome o;
    o.body["method"] = rep.method;
    o.body["rank"] = rep.rank;
    o.body["residual_before"] = rep.residual_before;
    o.body["residual_after"] = rep.residual_after;
    o.body["relative_residual"] = rel;
    o.body["retained_fraction"] = enorm > 0 ? rep.pe.values().norm() / enorm : 0.0;
    o.body["idempotence"] = idem;
    o.body["cutoff_ambiguous"] = rep.cutoff_ambiguous;
    o.body["vacuous"] = vacuous;
    o.pass = rel <= tol && idem <= tol;
    Json ann = Json::array();
    for (int k = 2; k <= c.D; ++k) {
        auto a = verify_annihilation(rep.pe, k, inst, 1e-6);
        ann.push_back({{"k", k}, {"relative", a.relative}, {"pass", a.pass}});
        o.pass = o.pass && a.pass;
    }
    o.body["annihilation"] = ann;
    Json nk = Json::array();
    for (int k : {4, 5}) {
        if (k > c.D + 1) continue;
        auto Ck = build_Q(inst, k);
        auto N = build_Nk(k, inst);
        Eigen::MatrixXd QN = Eigen::MatrixXd(SparseRowMatrix(Ck.Q.transpose()) * N.N);
        double scale = Ck.Q.norm() * N.N.norm();
        double r = scale > 0 ? QN.norm() / scale : 0.0;
        nk.push_back({{"k", k}, {"relative", r}});
        o.pass = o.pass && r <= tol;
    }
    o.body["left_kernel"] = nk;
    return o;
}

// ---- webs

Outcome cmd_webs(const RunConfig& c)
{
    Basis b = basis_from_string(c.setting);
    CatalogOptions co;
    co.max_vertices = c.max_vertices;
    co.max_edges = c.edges;
    co.max_index = c.max_index;
    co.cap = c.catalog_cap;
    co.filter = b == Basis::boolean ? ShapeFilter::calL_bool : ShapeFilter::calL;
    WebOptions wo;
    wo.basis = b;
    wo.node_cap = c.node_cap;
    Outcome o;
    Json arr = Json::array();
    int count = 0, failed = 0;
    for (const auto& s : enumerate_shapes(co)) {
        auto sp = is_spider(s);
        if (!sp) continue;
        auto w = build_web(*sp, wo);
        auto inv = check_web(w);
        bool ok = inv.all_pass();
        failed += !ok;
        if (!c.json_dir.empty()) {
            std::ofstream f(fs::path(c.json_dir) / ("web_" + std::to_string(count) + ".json"));
            f << web_to_json(w, c.n) << "\n";
        }
        arr.push_back({{"id", count},
                       {"spider", sp->shape.describe()},
                       {"side", sp->side == Side::left ? "left" : "right"},
                       {"nodes", w.nodes.size()},
                       {"edges", w.edges.size()},
                       {"leaves", w.leaves().size()},
                       {"height", inv.height},
                       {"height_bound", inv.height_bound},
                       {"max_parents", inv.max_parents},
                       {"parent_bound", inv.parent_bound},
                       {"max_excess", inv.max_excess},
                       {"root_edges", inv.edge_count},
                       {"leaf_c2", inv.leaf_c2},
                       {"pass", ok}});
        ++count;
    }
    o.body["spiders"] = count;
    o.body["failed"] = failed;
    o.body["webs"] = arr;
    o.pass = failed == 0;

    // spider removal on the full decomposition at (n, D, T)
    CatalogOptions dc;
    dc.max_edges = c.T;
    dc.max_index = c.D / 2;
    dc.max_vertices = c.D + c.T / 2 + c.T / 4;
    dc.cap = c.catalog_cap;
    dc.filter = co.filter;
    std::vector<Term> decomp;
    for (const auto& s : enumerate_shapes(dc)) {
        Rational l = lambda_coeff(s, b, c.n);
        if (l != 0) decomp.push_back({s, l});
    }
    auto killed = kill_spiders(decomp, c.n, wo);
    bool free = true;
    for (const auto& t : killed) free = free && !is_spider(t.shape);
    std::map<std::string, Rational> before, after;
    for (const auto& t : decomp)
        if (t.shape.is_trivial()) before[canonical_key(t.shape)] = t.coeff;
    for (const auto& t : killed)
        if (t.shape.is_trivial()) after[canonical_key(t.shape)] = t.coeff;
    o.body["kill"] = {{"terms_in", decomp.size()},
                      {"terms_out", killed.size()},
                      {"spider_free", free},
                      {"trivial_unchanged", before == after}};
    o.pass = o.pass && free && before == after;
    return o;
}

// ---- sk-demo

Outcome cmd_sk(const RunConfig& c)
{
    SkDemoOptions so;
    so.n = c.n;
    so.p = c.p;
    so.D = c.D;
    so.T = c.T;
    so.seed = c.seed;
    so.mode = pe_mode_from_string(c.mode);
    so.work_budget = c.work_budget;
    auto r = sk_demo(so);
    Outcome o;
    o.body = Json::parse(sk_report_json(r));
    double tol = tol_or(c, 1e-6);
    double n = r.n;
    double lower = r.lambda_p * n - std::abs(r.lambda_min) * (n - r.in_subspace) - 1e-6 * n * n;
    double top = r.lambda_max / std::sqrt(n);
    bool bpb = std::abs(r.bpb - 1) <= tol, chain = r.objective >= lower, edge = top >= 1.7 && top <= 2.3;
    o.body["checks"] = {{"bpb_is_one", bpb}, {"objective_lower_bound", lower}, {"chain", chain}, {"lambda_max_over_sqrt_n", top},
                        {"edge_in_range", edge}};
    o.pass = bpb && chain && edge;
    return o;
}

// ---- report

std::string cell(const Json& v)
{
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

Outcome cmd_report(const RunConfig& c, std::ostream& out)
{
    if (c.inputs.empty()) throw InvalidArgument("report needs at least one input file");
    std::ostringstream md;
    md << "# Report\n";
    for (const auto& path : c.inputs) {
        std::ifstream f(path);
        if (!f) throw InvalidArgument("cannot read " + path);
        Json j;
        try {
            j = Json::parse(f);
        } catch (const std::exception& e) {
            throw InvalidArgument(path + ": " + e.what());
        }
        md << "\n## " << fs::path(path).filename().string();
        if (j.contains("command")) md << " (" << cell(j["command"]) << ")";
        md << "\n\n| key | value |\n|---|---|\n";
        std::function<void(const Json&, const std::string&)> flat = [&](const Json& x, const std::string& pre) {
            for (auto it = x.begin(); it != x.end(); ++it) {
                std::string k = pre.empty() ? it.key() : pre + "." + it.key();
                if (it->is_object())
                    flat(*it, k);
                else if (!it->is_array() || (!it->empty() && !(*it)[0].is_object() && it->size() <= 8))
                    md << "| " << k << " | " << cell(*it) << " |\n";
            }
        };
        flat(j, "");
        std::function<void(const Json&, const std::string&)> tables = [&](const Json& x, const std::string& pre) {
            for (auto it = x.begin(); it != x.end(); ++it) {
                std::string k = pre.empty() ? it.key() : pre + "." + it.key();
                if (it->is_object()) {
                    tables(*it, k);
                    continue;
                }
                if (!it->is_array() || it->empty() || !(*it)[0].is_object()) continue;
                std::vector<std::string> cols;
                for (const auto& row : *it)
                    for (auto c2 = row.begin(); c2 != row.end(); ++c2)
                        if (!c2->is_structured() && std::find(cols.begin(), cols.end(), c2.key()) == cols.end())
                            cols.push_back(c2.key());
                md << "\n### " << k << "\n\n|";
                for (const auto& h : cols) md << " " << h << " |";
                md << "\n|";
                for (std::size_t i = 0; i < cols.size(); ++i) md << "---|";
                md << "\n";
                for (const auto& row : *it) {
                    md << "|";
                    for (const auto& h : cols) md << " " << (row.contains(h) ? cell(row[h]) : "") << " |";
                    md << "\n";
                }
            }
        };
        tables(j, "");
    }
    if (!c.out_dir.empty()) {
        std::ofstream f(fs::path(c.out_dir) / "report.md");
        f << md.str();
        out << (fs::path(c.out_dir) / "report.md").string() << "\n";
    } else {
        out << md.str();
    }
    Outcome o;
    o.body = nullptr;
    return o;
}

void add_common(CLI::App* sc, RunConfig& c)
{
    sc->add_option("--n", c.n, "dimension")->capture_default_str();
    sc->add_option("--m", c.m, "number of constraints")->capture_default_str();
    sc->add_option("--D", c.D, "degree (even)")->capture_default_str();
    sc->add_option("--T", c.T, "truncation")->capture_default_str();
    sc->add_option("--eps", c.eps, "epsilon")->capture_default_str();
    sc->add_option("--setting", c.setting, "gaussian or boolean")->capture_default_str();
    sc->add_option("--seed", c.seed, "master seed")->capture_default_str();
    sc->add_option("--trials", c.trials, "number of seeded trials")->capture_default_str();
    sc->add_option("--mode", c.mode, "shape-sum, alpha-enum or row-series")->capture_default_str();
    sc->add_option("--out", c.out_dir, "output directory");
    sc->add_option("--tol", c.tol, "tolerance override");
    sc->add_option("--work-budget", c.work_budget, "work cap")->envname("PAP_WORK_BUDGET")->capture_default_str();
    sc->add_option("--catalog-cap", c.catalog_cap, "shape catalog cap")
        ->envname("PAP_CATALOG_CAP")
        ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv{"pap"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(int(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"pseudocalibration and sum-of-squares artifact toolkit", "pap"};
    app.require_subcommand(1);
    std::map<std::string, RunConfig> cfg;
    auto sub = [&](const std::string& name, const std::string& help, auto&& defaults) {
        RunConfig& c = cfg[name];
        c.subcommand = name;
        defaults(c);
        auto* sc = app.add_subcommand(name, help);
        add_common(sc, c);
        return std::pair<CLI::App*, RunConfig*>{sc, &c};
    };

    auto [s_sample, c_sample] = sub("sample", "sample an instance", [](RunConfig&) {});
    s_sample->add_flag("--planted", c_sample->planted, "sample from the planted distribution");

    auto [s_pc, c_pc] = sub("pseudocalibrate", "build and serialize a pseudoexpectation", [](RunConfig&) {});
    s_pc->add_option("--instance", c_pc->instance, "instance base path (base.csv + base.json)");
    s_pc->add_flag("!--raw", c_pc->project, "skip the constraint projection");

    auto [s_verify, c_verify] = sub("verify", "booleanity, oracle equivalence and truncation window suites", [](RunConfig& c) {
        c.n = 4;
        c.m = 2;
        c.T = 3;
    });
    s_verify->add_option("--suite", c_verify->suites, "comma list of booleanity, oracle, window, all")->capture_default_str();
    s_verify->add_option("--samples", c_verify->samples, "Monte Carlo samples (gaussian oracle)")->capture_default_str();
    s_verify->add_option("--se", c_verify->se, "standard errors allowed (gaussian oracle)")->capture_default_str();
    s_verify->add_flag("--assert-decrease", c_verify->assert_decrease, "require the residual to decrease in T");

    auto [s_norms, c_norms] = sub("norms", "catalog norm-bound sweep", [](RunConfig& c) {
        c.n = 64;
        c.m = 0;
        c.trials = 50;
    });
    s_norms->add_option("--edges", c_norms->edges, "max total edge label")->capture_default_str();
    s_norms->add_option("--max-vertices", c_norms->max_vertices)->capture_default_str();
    s_norms->add_option("--max-index", c_norms->max_index, "cap on |U| and |V|")->capture_default_str();
    s_norms->add_option("--C", c_norms->C, "log prefactor exponent")->capture_default_str();
    s_norms->add_option("--min-fraction", c_norms->min_fraction)->capture_default_str();

    auto [s_psd, c_psd] = sub("psd", "assemble, certify and report eigenvalues", [](RunConfig& c) {
        c.n = 16;
        c.m = 16;
        c.trials = 20;
        c.mode = "row-series";
    });
    s_psd->add_flag("!--raw", c_psd->project, "skip the constraint projection");
    s_psd->add_option("--min-psd", c_psd->min_psd, "required number of PSD trials")->capture_default_str();

    auto [s_proj, c_proj] = sub("project", "constraint residual, projection and annihilation", [](RunConfig& c) {
        c.m = 3;
        c.D = 4;
    });
    (void)c_proj;
    (void)s_proj;

    auto [s_webs, c_webs] = sub("webs", "spider enumeration and web invariants", [](RunConfig& c) {
        c.D = 4;
        c.edges = 6;
        c.max_index = -1;
    });
    s_webs->add_option("--edges", c_webs->edges, "max total edge label of spiders")->capture_default_str();
    s_webs->add_option("--max-vertices", c_webs->max_vertices)->capture_default_str();
    s_webs->add_option("--max-index", c_webs->max_index, "cap on |U| and |V|, -1 for none")->capture_default_str();
    s_webs->add_option("--node-cap", c_webs->node_cap)->envname("PAP_NODE_CAP")->capture_default_str();
    s_webs->add_option("--json-dir", c_webs->json_dir, "write each web as JSON");

    auto [s_sk, c_sk] = sub("sk-demo", "Sherrington-Kirkpatrick pipeline", [](RunConfig& c) {
        c.n = 400;
        c.mode = "row-series";
    });
    s_sk->add_option("--p", c_sk->p, "subspace dimension, 0 for ceil(n^0.67)")->capture_default_str();

    auto [s_rep, c_rep] = sub("report", "aggregate JSON outputs into Markdown tables", [](RunConfig&) {});
    s_rep->add_option("inputs", c_rep->inputs, "JSON files")->required();

    if (argc <= 1) {
        err << app.help();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const auto* chosen = app.get_subcommands().front();
    RunConfig& c = cfg.at(chosen->get_name());
    try {
        validate(c);
        Outcome o;
        if (c.subcommand == "report") {
            cmd_report(c, out);
            return 0;
        }
        if (c.subcommand == "sample") o = cmd_sample(c);
        else if (c.subcommand == "pseudocalibrate") o = cmd_pseudocalibrate(c);
        else if (c.subcommand == "verify") o = cmd_verify(c);
        else if (c.subcommand == "norms") o = cmd_norms(c);
        else if (c.subcommand == "psd") o = cmd_psd(c);
        else if (c.subcommand == "project") o = cmd_project(c);
        else if (c.subcommand == "webs") o = cmd_webs(c);
        else if (c.subcommand == "sk-demo") o = cmd_sk(c);
        Json j;
        j["command"] = c.subcommand;
        j["config"] = config_json(c);
        j["pass"] = o.pass;
        for (auto it = o.body.begin(); it != o.body.end(); ++it) j[it.key()] = *it;
        std::string text = j.dump(1) + "\n";
        if (c.out_dir.empty()) {
            out << text;
        } else {
            fs::path p = fs::path(c.out_dir) / (c.subcommand + ".json");
            std::ofstream f(p);
            f << text;
            out << p.string() << "\n";
        }
        if (!o.pass) err << c.subcommand << ": assertion failed\n";
        return o.pass ? 0 : 1;
    } catch (const BudgetExceeded& e) {
        err << "budget error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgument& e) {
        err << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedInstance& e) {
        err << "unsupported instance: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace pap::cli
