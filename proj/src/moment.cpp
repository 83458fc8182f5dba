#include "pap/moment.hpp"

#include "pap/graph_matrix.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <random>

namespace pap {

MomentMatrix assemble(const PseudoExpectation& pe, int D)
{
    if (D < 0 || D % 2) throw InvalidArgument("assemble: D must be even");
    if (pe.index().max_size() < std::min(D, pe.n())) throw InvalidArgument("assemble: pseudoexpectation degree too small");
    MomentMatrix mm;
    mm.n = pe.n();
    mm.D = D;
    mm.index = SubsetIndex(pe.n(), D / 2);
    std::size_t N = mm.index.size();
    mm.M.resize(N, N);
    std::vector<double> npow(D + 1);
    for (int c = 0; c <= D; ++c) npow[c] = std::pow(double(pe.n()), -c);
    std::vector<int> K;
    for (std::size_t r = 0; r < N; ++r) {
        const int* I = mm.index.data(r);
        int a = mm.index.size_of(r);
        for (std::size_t c = r; c < N; ++c) {
            const int* J = mm.index.data(c);
            int b = mm.index.size_of(c);
            K.clear();
            int common = 0, x = 0, y = 0;
            while (x < a || y < b) {
                if (y == b || (x < a && I[x] < J[y]))
                    K.push_back(I[x++]);
                else if (x == a || J[y] < I[x])
                    K.push_back(J[y++]);
                else {
                    ++common;
                    ++x;
                    ++y;
                }
            }
            double v = pe.values()[pe.index().rank(K.data(), int(K.size()))] * npow[common];
            mm.M(r, c) = mm.M(c, r) = v;
        }
    }
    return mm;
}

MomentMatrix assemble_graph_sum(const Instance& inst, int D, int T, const GraphSumOptions& opt)
{
    inst.validate();
    if (D < 0 || D % 2) throw InvalidArgument("assemble_graph_sum: D must be even");
    CatalogOptions co;
    co.max_edges = T;
    co.max_index = D / 2;
    co.max_vertices = D + T / 2 + T / 4;
    co.filter = inst.setting == Basis::boolean ? ShapeFilter::calL_bool : ShapeFilter::calL;
    co.cap = opt.catalog_cap;
    auto catalog = enumerate_shapes(co);
    double work = 0;
    for (const auto& s : catalog) work += realization_work(s, inst.n, inst.m);
    if (work > opt.work_budget) throw BudgetExceeded("graph-sum realization work exceeds budget");
    MomentMatrix mm;
    mm.n = inst.n;
    mm.D = D;
    mm.index = SubsetIndex(inst.n, D / 2);
    auto space = IndexSpace::squares_upto(inst.n, inst.m, D / 2);
    RealizedMatrix out{space, space, Eigen::MatrixXd::Zero(space.size(), space.size())};
    for (const auto& s : catalog) {
        Rational lam = lambda_coeff(s, inst.setting, inst.n);
        if (lam == 0) continue;
        realize_into(s, inst, to_double(lam), out, {opt.work_budget, false});
    }
    mm.M = std::move(out.M);
    return mm;
}

namespace {

double min_eig_sym(const Eigen::MatrixXd& A)
{
    if (A.size() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

double op_norm(const Eigen::MatrixXd& A)
{
    if (A.size() == 0) return 0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
    return svd.singularValues()[0];
}

}  // namespace

BlockCertificate block_psd_certify(const Eigen::MatrixXd& M, const SubsetIndex& index, double eta, int D)
{
    BlockCertificate c;
    c.certified = true;
    int K = index.max_size();
    for (int k = 0; k <= K; ++k) {
        auto blk = M.block(index.offset(k), index.offset(k), index.count(k), index.count(k));
        double s = min_eig_sym(blk);
        double t = std::pow(eta, 2 * k) * (1.0 - 1.0 / (D + 1));
        c.diag_min_sv.push_back(s);
        c.diag_threshold.push_back(t);
        if (s < t) c.certified = false;
    }
    for (int k = 0; k <= K; ++k)
        for (int l = k + 1; l <= K; ++l) {
            double nrm = op_norm(M.block(index.offset(k), index.offset(l), index.count(k), index.count(l)));
            double t = std::pow(eta, k + l) / (D + 1);
            c.offdiag_norm.push_back(nrm);
            c.offdiag_threshold.push_back(t);
            if (nrm > t) c.certified = false;
        }
    return c;
}

BlockCertificate block_psd_certify(const MomentMatrix& mm) { return block_psd_certify(mm.M, mm.index, mm.eta(), mm.D); }

EigenReport min_eigenvalue(const Eigen::MatrixXd& M)
{
    if (M.rows() != M.cols()) throw InvalidArgument("min_eigenvalue: matrix not square");
    EigenReport r;
    if (M.size() == 0) return r;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success) throw DegenerateInstance("eigensolver did not converge");
    r.eigenvalues = es.eigenvalues();
    r.min_eig = r.eigenvalues[0];
    r.norm = std::max(std::abs(r.eigenvalues[0]), std::abs(r.eigenvalues[r.eigenvalues.size() - 1]));
    Eigen::VectorXd x = es.eigenvectors().col(0);
    r.residual = (M * x - r.min_eig * x).norm();
    return r;
}

bool is_psd(const Eigen::MatrixXd& M, double rel_tol)
{
    auto r = min_eigenvalue(M);
    return r.min_eig >= -rel_tol * std::max(r.norm, 1e-300);
}

NullspaceShiftReport nullspace_shift_tests(int trials, std::uint64_t seed)
{
    NullspaceShiftReport rep;
    rep.trials = trials;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < trials; ++t) {
        int N = 2 + int(rng() % 5);
        bool psd = t % 2 == 0;
        Eigen::MatrixXd G(N, N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) G(i, j) = g(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
        Eigen::MatrixXd Q = qr.householderQ();
        Eigen::VectorXd lam(N);
        lam[0] = 0;  // Q.col(0) spans the null direction
        for (int i = 1; i < N; ++i) lam[i] = (unif(rng) < 0.2) ? 0.0 : 0.1 + 3 * unif(rng);
        if (!psd) lam[N - 1] = -0.5 - unif(rng);
        Eigen::MatrixXd M = Q * lam.asDiagonal() * Q.transpose();
        M = (M + M.transpose()) / 2;
        Eigen::VectorXd x = Q.col(0) * (0.5 + 2 * unif(rng));
        // project so that Mx = 0 holds to rounding
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(N, N) - x * x.transpose() / x.squaredNorm();
        M = P * M * P;
        double c = (t % 10 == 0) ? 0.0 : 10 * unif(rng);
        Eigen::MatrixXd Ms = M + c * x * x.transpose();
        bool a = is_psd(M, 1e-9), b = is_psd(Ms, 1e-9);
        if (a == b && a == psd) ++rep.shift_pass;
        Eigen::VectorXd d(N);
        for (int i = 0; i < N; ++i) d[i] = (rng() >> 63 ? 1 : -1) * (0.2 + 4.8 * unif(rng));
        Eigen::MatrixXd DMD = d.asDiagonal() * M * d.asDiagonal();
        if (is_psd(DMD, 1e-9) == psd) ++rep.scaling_pass;
    }

    Eigen::Matrix3d M;
    M << 1, 1, 2, 1, 2, 3, 2, 3, 5;
    Eigen::Vector3d x(1, 1, -1);
    rep.example_null_exact = (M * x).cwiseAbs().maxCoeff() == 0.0;
    bool ok = true;
    std::vector<double> corner;
    for (double lam : {0.5, 2.0}) {
        for (double c : {0.0, 1.0, 3.0}) {
            Eigen::Vector3d dg(1, 1, lam);
            Eigen::Matrix3d A = dg.asDiagonal() * M * dg.asDiagonal();
            Eigen::Vector3d y = dg.cwiseInverse().cwiseProduct(x);
            A += c * y * y.transpose();
            if (!is_psd(A, 1e-12)) ok = false;
            Eigen::Vector3d s = A.diagonal().cwiseSqrt().cwiseInverse();
            Eigen::Matrix3d B = s.asDiagonal() * A * s.asDiagonal();
            if (std::abs(B(0, 1) - std::sqrt((1 + c) / (2 + c))) > 1e-12) ok = false;
            double want = (2 * lam - c / lam) / std::sqrt((1 + c) * (5 * lam * lam + c / (lam * lam)));
            if (std::abs(B(0, 2) - want) > 1e-12) ok = false;
            if (c == 1.0) corner.push_back(B(0, 2));
        }
    }
    if (corner.size() != 2 || std::abs(corner[0] - corner[1]) < 1e-6) ok = false;
    rep.example_rescaling_ok = ok;
    return rep;
}

double non_spider_mass(const std::vector<Shape>& catalog, int n, double m, int k, int l, Basis basis,
                       const NormBoundOptions& nb)
{
    double mass = 0;
    for (const auto& s : catalog) {
        if (int(s.U.size()) != k || int(s.V.size()) != l) continue;
        if (s.is_trivial() || has_spider_ends(s)) continue;
        Rational lam = lambda_coeff(s, basis, n);
        if (lam == 0) continue;
        mass += std::abs(to_double(lam)) * norm_bound(s, n, m, nb);
    }
    return mass * std::pow(double(n), (k + l) / 2.0);
}

void export_matrix(const Eigen::MatrixXd& M, const std::string& base, const MatrixMeta& meta, int csv_limit)
{
    std::ofstream bin(base + ".bin", std::ios::binary);
    if (!bin) throw InvalidArgument("cannot write " + base + ".bin");
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            double v = M(r, c);
            bin.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
    nlohmann::ordered_json j;
    j["rows"] = M.rows();
    j["cols"] = M.cols();
    j["dtype"] = "float64-le";
    j["layout"] = "row-major";
    j["ordering"] = meta.ordering;
    j["n"] = meta.n;
    j["m"] = meta.m;
    j["D"] = meta.D;
    j["seed"] = meta.seed;
    std::ofstream js(base + ".json");
    js << j.dump(2) << "\n";
    if (M.rows() <= csv_limit && M.cols() <= csv_limit) {
        std::ofstream csv(base + ".csv");
        csv << std::setprecision(17);
        for (Eigen::Index r = 0; r < M.rows(); ++r) {
            for (Eigen::Index c = 0; c < M.cols(); ++c) csv << (c ? "," : "") << M(r, c);
            csv << "\n";
        }
    }
}

Eigen::MatrixXd import_matrix(const std::string& base)
{
    std::ifstream js(base + ".json");
    if (!js) throw InvalidArgument("cannot read " + base + ".json");
    auto j = nlohmann::json::parse(js);
    Eigen::Index R = j.at("rows").get<Eigen::Index>(), C = j.at("cols").get<Eigen::Index>();
    Eigen::MatrixXd M(R, C);
    std::ifstream bin(base + ".bin", std::ios::binary);
    if (!bin) throw InvalidArgument("cannot read " + base + ".bin");
    for (Eigen::Index r = 0; r < R; ++r)
        for (Eigen::Index c = 0; c < C; ++c) {
            double v;
            if (!bin.read(reinterpret_cast<char*>(&v), sizeof v)) throw InvalidArgument("matrix binary truncated");
            M(r, c) = v;
        }
    return M;
}

}  // namespace pap
