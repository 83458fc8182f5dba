// acceptance runner: one PASS/FAIL line per criterion
// usage: acceptance [criterion ids...]

#include "cli.hpp"
#include "pap/constraints.hpp"
#include "pap/hermite.hpp"
#include "pap/moment.hpp"
#include "pap/slice.hpp"
#include "pap/spider.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

using namespace pap;
using Json = nlohmann::json;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... xs)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, xs...);
    return buf;
}

// runs a CLI subcommand, returns {exit code, parsed json}
std::pair<int, Json> cli(const std::vector<std::string>& args)
{
    std::ostringstream o, e;
    int code = cli::run(args, o, e);
    if (code == 2) throw std::runtime_error("cli error: " + e.str());
    return {code, Json::parse(o.str())};
}

// ---- 1

Verdict slice_moments()
{
    Verdict v;
    int e2 = 0, brute = 0, ident = 0, bound = 0, total_bound = 0;
    for (int n : {4, 5, 7, 9, 10, 16, 25, 36, 49, 64}) {
        if (e_coeff(n, 2) != 0) ++e2;
        for (int k = 0; k <= std::min(6, n); ++k) {
            // odd k only exists for perfect squares
            if (k % 2 && !is_perfect_square(n)) continue;
            ++total_bound;
            if (!slice_bound_check(n, k)) ++bound;
        }
    }
    int pairs = 0;
    for (int n : {4, 9, 16})
        for (int k = 0; k <= std::min(6, n); ++k) {
            ++pairs;
            if (e_coeff(n, k) != slice_moment_bruteforce(n, k)) ++brute;
            if (slice_identity_lhs_scaled(n, k) != rpow(Rational(n), k)) ++ident;
        }
    v.pass = !e2 && !brute && !ident && !bound;
    v.detail = fmt("e(2)!=0: %d, brute-force mismatches: %d/%d, identity failures: %d/%d, bound failures: %d/%d",
                   e2, brute, pairs, ident, pairs, bound, total_bound);
    return v;
}

// ---- 2

void label_lists(int budget, int maxl, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    if (!cur.empty()) out.push_back(cur);
    for (int l = 1; l <= std::min(budget, maxl); ++l) {
        cur.push_back(l);
        label_lists(budget - l, l, cur, out);
        cur.pop_back();
    }
}

Verdict hermite_algebra()
{
    Verdict v;
    bool h2 = hermite_at_one(2) == 0;
    int rec = 0;
    for (int k = 1; k <= 20; ++k) rec += !hermite_one_bound_check(k);
    std::vector<std::vector<int>> lists;
    std::vector<int> cur;
    label_lists(12, 12, cur, lists);
    std::vector<Rational> pts;
    for (int i = 0; i < 25; ++i) {
        pts.emplace_back(2 * i - 23, 7);
        pts.back().canonicalize();
    }
    long evals = 0, bad_eval = 0, coeffs = 0, bad_coeff = 0;
    for (const auto& ls : lists) {
        auto lc = linearize_product(ls, Basis::gaussian);
        int L = 0, lmax = 0;
        for (int l : ls) {
            L += l;
            lmax = std::max(lmax, l);
        }
        Integer bound;
        mpz_ui_pow_ui(bound.get_mpz_t(), 2 * L, L - lmax);
        for (const auto& [deg, c] : lc.coeffs) {
            ++coeffs;
            if (abs(c) > bound) ++bad_coeff;
        }
        for (const auto& x : pts) {
            Rational raw = 1;
            for (int l : ls) raw *= hermite_eval(l, x, Basis::gaussian);
            ++evals;
            if (lc.eval(x, Basis::gaussian) != raw) ++bad_eval;
        }
    }
    v.pass = h2 && !rec && !bad_eval && !bad_coeff;
    v.detail = fmt("h2(1)=0: %s, |h_k(1)|<=k^k failures: %d/20, products: %zu, pointwise mismatches: %ld/%ld, "
                   "coefficient bound failures: %ld/%ld",
                   h2 ? "yes" : "no", rec, lists.size(), bad_eval, evals, bad_coeff, coeffs);
    return v;
}

// ---- 3

Verdict oracle()
{
    Verdict v;
    auto [c1, b] = cli({"verify", "--suite", "oracle", "--setting", "boolean", "--n", "4", "--m", "2", "--D", "2", "--T", "3"});
    auto [c2, b4] =
        cli({"verify", "--suite", "oracle", "--setting", "boolean", "--n", "4", "--m", "2", "--D", "2", "--T", "4"});
    auto [c3, g] = cli({"verify", "--suite", "oracle", "--setting", "gaussian", "--n", "3", "--D", "4", "--T", "4",
                        "--samples", "1000000", "--se", "3"});
    v.pass = c1 == 0 && c3 == 0;
    auto& o = b["oracle"];
    auto& o4 = b4["oracle"];
    auto& og = g["oracle"];
    v.detail = fmt("boolean T=3: %d mismatches of %d (%d nonzero); T=4 (extra): %d of %d (%d nonzero); gaussian: %d "
                   "moments, max %.2f SE, %d outside 3 SE",
                   o["mismatches"].get<int>(), o["coefficients_checked"].get<int>(), o["coefficients_nonzero"].get<int>(),
                   o4["mismatches"].get<int>(), o4["coefficients_checked"].get<int>(),
                   o4["coefficients_nonzero"].get<int>(), og["moments_checked"].get<int>(),
                   og["max_standard_errors"].get<double>(), og["outside"].get<int>());
    if (c2 != 0) v.detail += " (T=4 oracle failed)";
    return v;
}

// ---- 4

Verdict window()
{
    Verdict v;
    auto [code, j] = cli({"verify", "--suite", "window", "--setting", "gaussian", "--n", "3", "--m", "2", "--D", "4",
                          "--T", "4", "--assert-decrease"});
    auto& w = j["window"];
    std::string sizes, res;
    for (auto& s : w["support_sizes"]) sizes += std::to_string(s.get<int>()) + " ";
    for (auto& r : w["residual_by_T"]) res += fmt("T=%d:%.4g ", r["T"].get<int>(), r["residual_l2"].get<double>());
    v.pass = code == 0;
    v.detail = fmt("support sizes { %s} in window: %s; residual %sstrictly decreasing: %s", sizes.c_str(),
                   w["in_window"].get<bool>() ? "yes" : "no", res.c_str(),
                   w["strictly_decreasing"].get<bool>() ? "yes" : "no");
    return v;
}

// ---- 5

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    double s = std::max({a.norm(), b.norm(), 1e-300});
    return (a - b).norm() / s;
}

Verdict structural()
{
    Verdict v;
    auto inst8 = sample_instance(8, 6, Basis::gaussian, 5);
    auto a = assemble(build_pe(inst8, 4, 4), 4);
    auto g = assemble_graph_sum(inst8, 4, 4);
    double asm_err = rel(a.M, g.M);

    auto inst = sample_instance(6, 4, Basis::gaussian, 21);
    CatalogOptions o;
    o.max_vertices = 8;
    o.max_edges = 3;
    o.max_index = 2;
    std::vector<Shape> cat = enumerate_shapes(o);
    o.filter = ShapeFilter::all;
    o.max_vertices = 3;
    std::set<std::string> seen;
    for (const auto& s : cat) seen.insert(canonical_key(s));
    for (const auto& s : enumerate_shapes(o))
        if (seen.insert(canonical_key(s)).second) cat.push_back(s);

    std::unordered_map<std::string, Eigen::MatrixXd> cache;
    auto get = [&](const Shape& s) -> const Eigen::MatrixXd& {
        auto k = canonical_key(s);
        auto it = cache.find(k);
        if (it == cache.end()) it = cache.emplace(k, realize(s, inst).M).first;
        return it->second;
    };
    long pairs = 0, improper = 0;
    double mul_err = 0, imp_err = 0;
    std::set<std::string> imp_seen;
    for (const auto& x : cat)
        for (const auto& y : cat) {
            if (!composable(x, y)) continue;
            ++pairs;
            Eigen::MatrixXd P = get(x) * get(y);
            Eigen::MatrixXd S = Eigen::MatrixXd::Zero(P.rows(), P.cols());
            for (const auto& t : multiply_decompose(x, y, Basis::gaussian)) S += t.coeff.get_d() * get(t.shape);
            mul_err = std::max(mul_err, rel(P, S));
            for (const auto& t : multiply_improper(x, y)) {
                if (!imp_seen.insert(canonical_key(t.shape)).second) continue;
                ++improper;
                auto R = realize(t.shape, inst);
                Eigen::MatrixXd E = Eigen::MatrixXd::Zero(R.M.rows(), R.M.cols());
                for (const auto& e : expand_improper(t.shape, Basis::gaussian)) E += e.coeff.get_d() * get(e.shape);
                imp_err = std::max(imp_err, rel(R.M, E));
            }
        }

    // ribbon symmetry: the collapsed two-circle shape appears with coefficient 2
    auto terms = expand_improper(shapes::ribbon_symmetry_improper(), Basis::gaussian);
    bool two = false;
    for (const auto& t : terms) two = two || (t.coeff == 2 && aut_size(t.shape) == 2);
    auto ri = sample_instance(5, 3, Basis::gaussian, 11);
    Eigen::MatrixXd lhs = realize(shapes::ribbon_symmetry_improper(), ri).M;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(lhs.rows(), lhs.cols());
    for (const auto& t : terms) rhs += t.coeff.get_d() * realize(t.shape, ri).M;
    double rib_err = rel(lhs, rhs);

    v.pass = asm_err <= 1e-9 && mul_err <= 1e-9 && imp_err <= 1e-9 && two && rib_err <= 1e-9;
    v.detail = fmt("assemble vs graph sum %.2e; %zu shapes, %ld products max err %.2e; %ld improper expansions max "
                   "err %.2e; ribbon coefficient 2: %s (err %.2e)",
                   asm_err, cat.size(), pairs, mul_err, improper, imp_err, two ? "yes" : "no", rib_err);
    return v;
}

// ---- 6

std::string project_summary(const Json& j)
{
    double ann = 0, lk = 0;
    for (auto& a : j["annihilation"]) ann = std::max(ann, a["relative"].get<double>());
    for (auto& a : j["left_kernel"]) lk = std::max(lk, a["relative"].get<double>());
    return fmt("rank %d, retained %.3f, residual %.1e, idempotence %.1e, annihilation %.1e, L_k N_k %.1e%s",
               j["rank"].get<int>(), j["retained_fraction"].get<double>(), j["relative_residual"].get<double>(),
               j["idempotence"].get<double>(), ann, lk, j["vacuous"].get<bool>() ? " (vacuous)" : "");
}

Verdict constraint_machinery()
{
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    auto [c6, j6] = cli({"project", "--n", "8", "--m", "6", "--D", "4", "--T", "4"});
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto [c3, j3] = cli({"project", "--n", "8", "--m", "3", "--D", "4", "--T", "4"});
    v.pass = c6 == 0 && c3 == 0 && secs < 600;
    v.detail = "m=6: " + project_summary(j6) + fmt(", %.0fs; m=3: ", secs) + project_summary(j3);
    return v;
}

// ---- 7

Verdict qq_spectrum_scaling()
{
    Verdict v;
    std::map<int, std::vector<double>> ratios;
    std::string methods;
    for (int n : {20, 40, 80}) {
        SpectrumOptions o;
        o.dense_limit = n == 20 ? 100000 : 0;
        for (int s = 1; s <= 20; ++s) {
            auto inst = sample_instance(n, n, Basis::gaussian, 7000 + 100 * n + s);
            auto r = qq_spectrum(inst, 4, o);
            ratios[n].push_back(r.min_nonzero / (double(n) * n));
            if (s == 1) methods += fmt("%d:%s ", n, r.method.c_str());
        }
    }
    auto stats = [](const std::vector<double>& x) {
        double m = 0, q = 0;
        for (double a : x) m += a / x.size();
        for (double a : x) q += (a - m) * (a - m) / (x.size() - 1);
        return std::pair{m, std::sqrt(q)};
    };
    std::string d;
    for (auto& [n, x] : ratios) {
        auto [m, sd] = stats(x);
        auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        d += fmt("n=%d mean %.4f sd %.4f range [%.4f, %.4f]; ", n, m, sd, *lo, *hi);
    }
    auto [m80, sd80] = stats(ratios[80]);
    auto [m20, sd20] = stats(ratios[20]);
    bool in_range = true;
    for (double x : ratios[80]) in_range = in_range && x >= 1 && x <= 3;
    v.pass = in_range && sd80 < sd20;
    v.detail = d + fmt("all n=80 in [1,3]: %s; spread shrinks: %s; methods %s", in_range ? "yes" : "no",
                       sd80 < sd20 ? "yes" : "no", methods.c_str());
    return v;
}

// ---- 8

Verdict norms()
{
    Verdict v;
    auto [code, j] = cli({"norms", "--n", "64", "--trials", "50", "--edges", "4", "--max-vertices", "8",
                          "--max-index", "2", "--C", "1", "--min-fraction", "0.95", "--work-budget", "1e13"});
    double worst = 1, ratio = 0;
    for (auto& r : j["rows"]) {
        worst = std::min(worst, r["fraction"].get<double>());
        ratio = std::max(ratio, r["max_norm"].get<double>() / r["bound"].get<double>());
    }
    v.pass = code == 0;
    v.detail = fmt("m=%d, %d shapes, 50 draws, worst within-bound fraction %.2f, max norm/bound %.2e",
                   j["m_used"].get<int>(), j["shapes"].get<int>(), worst, ratio);
    return v;
}

// ---- 9

Eigen::MatrixXd range_projector(const Eigen::MatrixXd& M)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    double cut = 1e-8 * es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        if (std::abs(es.eigenvalues()[i]) > cut) P += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
    return P;
}

Verdict spider_webs()
{
    Verdict v;
    auto [code, j] = cli({"webs", "--n", "8", "--D", "4", "--T", "4", "--max-vertices", "8", "--edges", "6"});
    auto& k = j["kill"];

    int n = 8;
    auto inst = sample_instance(n, 3, Basis::gaussian, 12);
    auto pe = project(build_pe(inst, 4, 4), build_Q(inst, 4)).pe;
    Eigen::MatrixXd P = range_projector(assemble(pe, 4).M);
    auto space = IndexSpace::squares_upto(n, inst.m, 2);
    auto sp = *is_spider(shapes::basic_spider());
    auto w = build_web(sp);
    std::vector<Term> leaves;
    for (int l : w.leaves()) leaves.push_back({w.nodes[l].shape, eval_exact(w.nodes[l].value, n)});
    Eigen::MatrixXd A = realize_terms({{sp.shape, Rational(1)}}, inst, space, space);
    Eigen::MatrixXd Dm = A - realize_terms(leaves, inst, space, space);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd x(P.rows());
        for (auto& e : x) e = g(rng);
        x = P * x;
        x.normalize();
        worst = std::max(worst, std::abs(x.dot(Dm * x)));
    }
    v.pass = code == 0 && worst <= 1e-6;
    v.detail = fmt("%d spiders, %d invariant failures; kill: %d terms in, %d out, spider-free %s, trivial unchanged "
                   "%s; web-sum max |x'(A-S)x| %.1e over 20 probes (rank %.0f)",
                   j["spiders"].get<int>(), j["failed"].get<int>(), k["terms_in"].get<int>(), k["terms_out"].get<int>(),
                   k["spider_free"].get<bool>() ? "yes" : "no", k["trivial_unchanged"].get<bool>() ? "yes" : "no", worst,
                   P.trace());
    return v;
}

// ---- 10

Verdict psd_harness()
{
    Verdict v;
    std::string d;
    for (int n : {16, 25}) {
        auto ns = std::to_string(n);
        auto [code, j] =
            cli({"psd", "--n", ns, "--m", ns, "--D", "2", "--T", "4", "--trials", "20", "--min-psd", "18"});
        double worst = 0;
        for (auto& t : j["trials"])
            if (t.contains("relative")) worst = std::min(worst, t["relative"].get<double>());
        v.pass = v.pass && code == 0;
        d += fmt("n=%d: %d/20 PSD, worst min_eig/norm %.1e; ", n, j["psd_count"].get<int>(), worst);
    }
    auto [c4, j4] = cli({"psd", "--n", "16", "--m", "16", "--D", "4", "--T", "4", "--trials", "3"});
    double lo = 0;
    for (auto& t : j4["trials"])
        if (t.contains("relative")) lo = std::min(lo, t["relative"].get<double>());
    d += fmt("D=4 exploratory at n=16: %d/3 PSD, worst min_eig/norm %.2e", j4["psd_count"].get<int>(), lo);
    v.detail = d;
    return v;
}

// ---- 11

Verdict sk()
{
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    auto [code, j] = cli({"sk-demo", "--n", "400", "--D", "2"});
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto& c = j["checks"];
    v.pass = code == 0 && secs < 300;
    v.detail = fmt("bpb/n %.9f, objective %.2f >= bound %.2f, lambda_max/sqrt(n) %.3f, %.0fs", j["bpb"].get<double>(),
                   j["objective"].get<double>(), c["objective_lower_bound"].get<double>(),
                   c["lambda_max_over_sqrt_n"].get<double>(), secs);
    return v;
}

// ---- 12

Verdict nullspace_props()
{
    Verdict v;
    auto r = nullspace_shift_tests(100, 3);
    v.pass = r.shift_pass == 100 && r.scaling_pass == 100 && r.example_null_exact;
    v.detail = fmt("shift %d/100, scaling %d/100, Mx=0 exactly: %s", r.shift_pass, r.scaling_pass,
                   r.example_null_exact ? "yes" : "no");
    return v;
}

}  // namespace

int main(int argc, char** argv)
{
    std::vector<std::pair<std::string, std::function<Verdict()>>> crit{
        {"slice moments", slice_moments},       {"hermite algebra", hermite_algebra},
        {"oracle equivalence", oracle},         {"truncation window", window},
        {"structural identities", structural}, {"constraint machinery", constraint_machinery},
        {"QQ^T spectrum", qq_spectrum_scaling}, {"norm bounds", norms},
        {"spider webs", spider_webs},           {"PSD harness", psd_harness},
        {"SK pipeline", sk},                    {"nullspace propositions", nullspace_props}};
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < crit.size(); ++i) {
        int id = int(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = crit[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !v.pass;
        std::printf("[%s] %2d %-22s %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, crit[i].first.c_str(),
                    v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d failed\n", failed);
    return failed ? 1 : 0;
}
