#include "pap/sk.hpp"

#include "pap/moment.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <random>

namespace pap {

GoeSample sample_goe(int n, std::uint64_t seed)
{
    if (n < 2) throw InvalidArgument("sample_goe needs n >= 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd A(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) A(i, j) = g(rng);
    GoeSample s;
    s.n = n;
    s.seed = seed;
    s.W = (A + A.transpose()) / std::sqrt(2.0);
    return s;
}

int default_p(int n) { return int(std::ceil(std::pow(double(n), 0.67) - 1e-12)); }

PbvInstance pbv_from_eigenspace(const Eigen::MatrixXd& W, int p)
{
    int n = int(W.rows());
    if (W.cols() != n) throw InvalidArgument("W must be square");
    if (p < 1 || p > n) throw InvalidArgument("need 1 <= p <= n");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
    if (es.info() != Eigen::Success) throw DegenerateInstance("eigensolver failed");
    PbvInstance r;
    r.p = p;
    r.n = n;
    r.eigenvalues = es.eigenvalues().reverse();
    r.eigenvectors = es.eigenvectors().rowwise().reverse();
    r.A = r.eigenvectors.leftCols(p);
    r.Pi = r.A * r.A.transpose();
    r.lambda_p = r.eigenvalues[p - 1];
    r.lambda_max = r.eigenvalues[0];
    r.lambda_min = r.eigenvalues[n - 1];
    return r;
}

Instance PbvInstance::pap_instance(std::uint64_t seed) const
{
    Instance inst;
    inst.n = p;
    inst.m = n;
    inst.setting = Basis::gaussian;
    inst.data = std::sqrt(double(n)) * A;
    inst.seed = seed;
    return inst;
}

Eigen::MatrixXd HypercubePe::second_moments() const
{
    if (D < 2) throw InvalidArgument("second moments need D >= 2");
    Eigen::MatrixXd B(n, n);
    for (int u = 0; u < n; ++u) {
        B(u, u) = values[0];
        for (int w = u + 1; w < n; ++w) B(u, w) = B(w, u) = (*this)({u, w});
    }
    return B;
}

Eigen::MatrixXd HypercubePe::moment_matrix() const
{
    SubsetIndex idx(n, D / 2);
    Eigen::MatrixXd M(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto S = idx.unrank(i);
        for (std::size_t j = i; j < idx.size(); ++j) M(i, j) = M(j, i) = (*this)(set_symdiff(S, idx.unrank(j)));
    }
    return M;
}

HypercubePe pushforward_pe(const PseudoExpectation& pe0, const Eigen::MatrixXd& d, const PushforwardOptions& opt)
{
    int n = int(d.rows()), p = int(d.cols());
    if (p != pe0.n()) throw InvalidArgument("pushforward: dimension mismatch");
    PseudoExpectation pe = pe0.normalized() ? pe0 : normalize(pe0);
    int D = pe.D();
    HypercubePe out;
    out.n = n;
    out.D = D;
    out.index = SubsetIndex(n, D);
    double work = 0;
    for (int k = 3; k <= D; ++k) work += double(out.index.count(k)) * std::pow(double(p), k);
    if (work > opt.work_budget) throw BudgetExceeded("pushforward work budget exceeded");
    out.values = Eigen::VectorXd::Zero(out.index.size());
    out.values[0] = pe({});
    if (D >= 1) {
        Eigen::VectorXd g(p);
        for (int i = 0; i < p; ++i) g[i] = pe({i});
        Eigen::VectorXd first = d * g;
        for (int u = 0; u < n; ++u) out.values[out.index.rank({u})] = first[u];
    }
    if (D >= 2) {
        Eigen::MatrixXd G(p, p);
        for (int i = 0; i < p; ++i) {
            G(i, i) = pe({}) / p;
            for (int j = i + 1; j < p; ++j) G(i, j) = G(j, i) = pe({i, j});
        }
        Eigen::MatrixXd B = d * G * d.transpose();
        for (int u = 0; u < n; ++u) {
            out.square_residual = std::max(out.square_residual, std::abs(B(u, u) - pe({})));
            for (int w = u + 1; w < n; ++w) out.values[out.index.rank({u, w})] = B(u, w);
        }
        if (out.square_residual > opt.tol)
            throw InvalidArgument("pushforward: pseudoexpectation violates <v, d_u>^2 = 1");
    }
    // general degree: expand prod <v, d_u> as a multilinear polynomial, v_i^2 -> 1/p
    for (int k = 3; k <= D; ++k) {
        for (std::size_t r = out.index.offset(k); r < out.index.offset(k) + out.index.count(k); ++r) {
            const int* S = out.index.data(r);
            std::map<std::vector<int>, double> poly{{{}, 1.0}};
            for (int t = 0; t < k; ++t) {
                std::map<std::vector<int>, double> next;
                for (const auto& [I, c] : poly)
                    for (int i = 0; i < p; ++i) {
                        double x = c * d(S[t], i);
                        if (x == 0.0) continue;
                        auto it = std::lower_bound(I.begin(), I.end(), i);
                        std::vector<int> J = I;
                        if (it != I.end() && *it == i) {
                            J.erase(J.begin() + (it - I.begin()));
                            x /= p;
                        } else {
                            J.insert(J.begin() + (it - I.begin()), i);
                        }
                        next[J] += x;
                    }
                poly = std::move(next);
            }
            double v = 0;
            for (const auto& [I, c] : poly) v += c * pe(I);
            out.values[r] = v;
        }
    }
    return out;
}

SkReport sk_objective(const HypercubePe& pe, const Eigen::MatrixXd& W, const PbvInstance& pbv)
{
    SkReport r;
    int n = pe.n;
    if (W.rows() != n || pbv.n != n) throw InvalidArgument("sk_objective: size mismatch");
    Eigen::MatrixXd B = pe.second_moments();
    r.n = n;
    r.p = pbv.p;
    r.D = pe.D;
    r.lambda_p = pbv.lambda_p;
    r.lambda_max = pbv.lambda_max;
    r.lambda_min = pbv.lambda_min;
    r.objective = W.cwiseProduct(B).sum();
    r.spectral_sum = 0;
    if (pbv.eigenvectors.cols() == n)
        for (int i = 0; i < n; ++i) {
            auto w = pbv.eigenvectors.col(i);
            r.spectral_sum += pbv.eigenvalues[i] * w.dot(B * w);
        }
    r.in_subspace = pbv.Pi.cwiseProduct(B).sum();
    r.bpb = r.in_subspace / n;
    r.chain = pbv.lambda_p * r.in_subspace - std::abs(pbv.lambda_min) * (n - r.in_subspace);
    r.chain_holds = r.objective >= r.chain - 1e-6 * double(n) * n;
    r.ratio = r.objective / std::pow(double(n), 1.5);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pe.moment_matrix(), Eigen::EigenvaluesOnly);
    r.psd_min_eig = es.eigenvalues()[0];
    r.square_residual = pe.square_residual;
    return r;
}

SkReport sk_demo(const SkDemoOptions& opt)
{
    if (opt.D < 2 || opt.D % 2) throw InvalidArgument("sk_demo: D must be even and >= 2");
    auto goe = sample_goe(opt.n, opt.seed);
    int p = opt.p > 0 ? opt.p : default_p(opt.n);
    auto pbv = pbv_from_eigenspace(goe.W, p);
    auto inst = pbv.pap_instance(opt.seed);
    PeOptions po;
    po.mode = opt.mode;
    po.work_budget = opt.work_budget;
    auto pe = build_pe(inst, opt.D, opt.T, po);
    auto C = build_Q(inst, opt.D);
    auto pr = project(pe, C);
    auto fixed = normalize(pr.pe);
    auto mm = assemble(fixed, opt.D);
    PushforwardOptions pf;
    pf.work_budget = opt.work_budget;
    auto hb = pushforward_pe(fixed, inst.data, pf);
    auto r = sk_objective(hb, goe.W, pbv);
    r.T = opt.T;
    r.goe_seed = opt.seed;
    r.pap_psd_min_eig = min_eigenvalue(mm.M).min_eig;
    r.projection_change = pr.change / std::max(1e-300, pe.values().norm());
    r.method = pr.method;
    return r;
}

std::string sk_report_json(const SkReport& r)
{
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["p"] = r.p;
    j["D"] = r.D;
    j["T"] = r.T;
    j["lambda_p"] = r.lambda_p;
    j["lambda_max"] = r.lambda_max;
    j["lambda_min"] = r.lambda_min;
    j["objective"] = r.objective;
    j["chain"] = r.chain;
    j["chain_holds"] = r.chain_holds;
    j["bpb"] = r.bpb;
    j["ratio"] = r.ratio;
    j["psd_min_eig"] = r.psd_min_eig;
    j["pap_psd_min_eig"] = r.pap_psd_min_eig;
    j["square_residual"] = r.square_residual;
    j["projection_change"] = r.projection_change;
    j["seeds"] = {r.goe_seed};
    return j.dump(1);
}

}  // namespace pap
