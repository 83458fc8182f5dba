#include "pap/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace pap {

IndexSpace check_row_space(int n, int m, int D)
{
    if (D < 2) throw InvalidArgument("check matrix needs D >= 2");
    std::vector<std::pair<int, int>> blocks;
    for (int k = 2; k <= D; ++k) blocks.push_back({k - 2, 1});
    return IndexSpace(n, m, blocks);
}

namespace {

std::size_t row_base(const IndexSpace& rows, const int* T, int t)
{
    int u0 = 0;
    return *rows.rank(T, t, &u0, 1);
}

}  // namespace

CheckMatrix build_Q(const Instance& inst, int D)
{
    inst.validate();
    CheckMatrix C;
    C.n = inst.n;
    C.m = inst.m;
    C.D = D;
    C.rows = check_row_space(inst.n, inst.m, D);
    C.cols = SubsetIndex(inst.n, D);
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t r = 0; r < C.rows.size(); ++r) {
        auto key = C.rows.key(r);
        check_row_entries(inst, key.squares, key.circles[0], [&](const std::vector<int>& col, double v) {
            trip.emplace_back(int(r), int(C.cols.rank(col)), v);
        });
    }
    C.Q.resize(Eigen::Index(C.rows.size()), Eigen::Index(C.cols.size()));
    C.Q.setFromTriplets(trip.begin(), trip.end());
    C.Q.makeCompressed();
    return C;
}

namespace {

// column hit by pair a < b in row T, and its weight class
std::pair<std::size_t, std::uint8_t> pair_column(const SubsetIndex& cols, const int* T, int t, const char* inT, int a,
                                                 int b, std::vector<int>& col)
{
    col.clear();
    std::uint8_t cls;
    if (!inT[a] && !inT[b]) {
        col.assign(T, T + t);
        col.push_back(a);
        col.push_back(b);
        std::sort(col.begin(), col.end());
        cls = 0;
    } else if (inT[a] != inT[b]) {
        int in = inT[a] ? a : b, out = inT[a] ? b : a;
        for (int i = 0; i < t; ++i)
            if (T[i] != in) col.push_back(T[i]);
        col.push_back(out);
        std::sort(col.begin(), col.end());
        cls = 1;
    } else {
        for (int i = 0; i < t; ++i)
            if (T[i] != a && T[i] != b) col.push_back(T[i]);
        cls = 2;
    }
    return {cols.rank(col.data(), int(col.size())), cls};
}

constexpr std::size_t table_limit = std::size_t(1) << 26;

}  // namespace

CheckOperator::CheckOperator(const Instance& inst, int D)
    : inst_(&inst), n_(inst.n), m_(inst.m), D_(D), rows_(check_row_space(inst.n, inst.m, D)), cols_(inst.n, D)
{
    inst.validate();
    row_base_.assign(cols_.offset(D - 1), 0);
    std::size_t P = std::size_t(n_) * (n_ - 1) / 2;
    std::vector<int> col;
    std::vector<char> inT(n_, 0);
    col_.resize(D - 1);
    cls_.resize(D - 1);
    for (int t = 0; t + 2 <= D; ++t) {
        std::size_t cnt = cols_.count(t), off = cols_.offset(t);
        for (std::size_t q = 0; q < cnt; ++q) row_base_[off + q] = row_base(rows_, cols_.data(off + q), t);
        if (cnt * P > table_limit) continue;
        col_[t].resize(cnt * P);
        cls_[t].resize(cnt * P);
        for (std::size_t q = 0; q < cnt; ++q) {
            const int* T = cols_.data(off + q);
            for (int i = 0; i < t; ++i) inT[T[i]] = 1;
            std::size_t p = q * P;
            for (int a = 0; a < n_; ++a)
                for (int b = a + 1; b < n_; ++b, ++p) {
                    auto [c, k] = pair_column(cols_, T, t, inT.data(), a, b, col);
                    col_[t][p] = std::uint32_t(c);
                    cls_[t][p] = k;
                }
            for (int i = 0; i < t; ++i) inT[T[i]] = 0;
        }
    }
}

template <class F>
void CheckOperator::for_pairs(int t, std::size_t q, const int* T, F&& f) const
{
    std::size_t P = std::size_t(n_) * (n_ - 1) / 2;
    if (!col_[t].empty()) {
        const std::uint32_t* c = col_[t].data() + q * P;
        const std::uint8_t* k = cls_[t].data() + q * P;
        std::size_t p = 0;
        for (int a = 0; a < n_; ++a)
            for (int b = a + 1; b < n_; ++b, ++p) f(a, b, std::size_t(c[p]), k[p]);
        return;
    }
    std::vector<int> col;
    std::vector<char> inT(n_, 0);
    for (int i = 0; i < t; ++i) inT[T[i]] = 1;
    for (int a = 0; a < n_; ++a)
        for (int b = a + 1; b < n_; ++b) {
            auto [c, k] = pair_column(cols_, T, t, inT.data(), a, b, col);
            f(a, b, c, k);
        }
}

Eigen::VectorXd CheckOperator::apply(const Eigen::VectorXd& x) const
{
    const Eigen::MatrixXd& Dm = inst_->data;
    const int n = n_;
    const double invn = 1.0 / n, w[3] = {1.0, invn, invn * invn};
    Eigen::VectorXd y(rows());
    const std::size_t B = 32;
    Eigen::MatrixXd Xs(n, n * B), Z(m_, n * B);
    for (int t = 0; t + 2 <= D_; ++t) {
        std::size_t cnt = cols_.count(t), off = cols_.offset(t);
        for (std::size_t s = 0; s < cnt; s += B) {
            std::size_t e = std::min(cnt, s + B);
            for (std::size_t q = s; q < e; ++q) {
                auto X = Xs.block(0, (q - s) * n, n, n);
                for_pairs(t, q, cols_.data(off + q), [&](int a, int b, std::size_t c, std::uint8_t k) {
                    X(a, b) = X(b, a) = w[k] * x[c];
                });
                X.diagonal().setConstant(x[off + q] * invn);
            }
            Eigen::Index wd = Eigen::Index((e - s) * n);
            Z.leftCols(wd).noalias() = Dm * Xs.leftCols(wd);
            for (std::size_t q = s; q < e; ++q) {
                auto Zq = Z.middleCols((q - s) * n, n);
                std::size_t base = row_base_[off + q];
                y.segment(base, m_) = Zq.cwiseProduct(Dm).rowwise().sum().array() - x[off + q];
            }
        }
    }
    return y;
}

Eigen::VectorXd CheckOperator::apply_t(const Eigen::VectorXd& y) const
{
    const Eigen::MatrixXd& Dm = inst_->data;
    const int n = n_;
    const double invn = 1.0 / n, w[3] = {2.0, 2.0 * invn, 2.0 * invn * invn};
    Eigen::VectorXd x = Eigen::VectorXd::Zero(cols());
    const std::size_t B = 32;
    Eigen::MatrixXd Es(m_, n * B), Ys(n, n * B);
    Eigen::MatrixXd Dt = Dm.transpose();
    for (int t = 0; t + 2 <= D_; ++t) {
        std::size_t cnt = cols_.count(t), off = cols_.offset(t);
        for (std::size_t s = 0; s < cnt; s += B) {
            std::size_t e = std::min(cnt, s + B);
            for (std::size_t q = s; q < e; ++q)
                Es.middleCols((q - s) * n, n) = y.segment(row_base_[off + q], m_).asDiagonal() * Dm;
            Eigen::Index wd = Eigen::Index((e - s) * n);
            Ys.leftCols(wd).noalias() = Dt * Es.leftCols(wd);
            for (std::size_t q = s; q < e; ++q) {
                auto Y = Ys.middleCols((q - s) * n, n);
                for_pairs(t, q, cols_.data(off + q), [&](int a, int b, std::size_t c, std::uint8_t k) {
                    x[c] += w[k] * Y(a, b);
                });
                x[off + q] += invn * Y.trace() - y.segment(row_base_[off + q], m_).sum();
            }
        }
    }
    return x;
}

Eigen::VectorXd constraint_residual(const CheckMatrix& Q, const PseudoExpectation& pe)
{
    if (pe.n() != Q.n || pe.index().size() != Q.cols.size())
        throw InvalidArgument("constraint_residual: pseudoexpectation does not match the check matrix");
    return Q.Q * pe.values();
}

namespace {

double power_norm(const SparseRowMatrix& Q, int iters = 60)
{
    Eigen::VectorXd v = Eigen::VectorXd::Ones(Q.cols()).normalized();
    double lam = 0;
    for (int i = 0; i < iters; ++i) {
        Eigen::VectorXd w = Q.transpose() * (Q * v);
        lam = w.norm();
        if (lam == 0) return 0;
        v = w / lam;
    }
    return std::sqrt(lam);
}

}  // namespace

ProjectionReport project(const PseudoExpectation& pe, const CheckMatrix& Q, const ProjectOptions& opt)
{
    ProjectionReport rep;
    Eigen::VectorXd e = pe.values();
    Eigen::VectorXd r = constraint_residual(Q, pe);
    rep.residual_before = r.norm();
    Eigen::VectorXd y;
    if (Q.rows.size() <= opt.dense_limit) {
        rep.method = "eigen";
        Eigen::MatrixXd G = Eigen::MatrixXd(Q.Q * SparseRowMatrix(Q.Q.transpose()));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
        if (es.info() != Eigen::Success) throw DegenerateInstance("QQ^T eigendecomposition failed");
        const auto& lam = es.eigenvalues();
        double lmax = lam.size() ? lam[lam.size() - 1] : 0.0;
        rep.q_norm = std::sqrt(std::max(lmax, 0.0));
        rep.cutoff = opt.rank_cutoff * lmax;
        rep.rank = 0;
        double lmin_kept = 0;
        Eigen::VectorXd inv(lam.size());
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
            if (lam[i] > rep.cutoff) {
                inv[i] = 1.0 / lam[i];
                ++rep.rank;
                if (lmin_kept == 0) lmin_kept = lam[i];
            } else {
                inv[i] = 0;
            }
            if (lam[i] > rep.cutoff * 1e-3 && lam[i] < rep.cutoff * 1e3) rep.cutoff_ambiguous = true;
        }
        rep.pinv_norm = lmin_kept > 0 ? 1.0 / lmin_kept : 0.0;
        const auto& W = es.eigenvectors();
        y = W * inv.asDiagonal() * (W.transpose() * r);
    } else {
        rep.method = "cg";
        rep.q_norm = power_norm(Q.Q);
        // conjugate gradients on the consistent system QQ^T y = r
        y = Eigen::VectorXd::Zero(r.size());
        Eigen::VectorXd res = r, p = r;
        double rr = res.squaredNorm(), r0 = std::sqrt(rr);
        for (int it = 0; it < opt.cg_max_iter && std::sqrt(rr) > opt.cg_tol * r0; ++it) {
            Eigen::VectorXd Ap = Q.Q * (Q.Q.transpose() * p);
            double a = rr / p.dot(Ap);
            y += a * p;
            res -= a * Ap;
            double rr2 = res.squaredNorm();
            p = res + (rr2 / rr) * p;
            rr = rr2;
        }
    }
    Eigen::VectorXd delta = Q.Q.transpose() * y;
    rep.pe = pe;
    rep.pe.values() = e - delta;
    rep.pe.set_normalized(false);
    rep.change = delta.norm();
    rep.residual_after = constraint_residual(Q, rep.pe).norm();
    return rep;
}

NkMatrix build_Nk(int k, const Instance& inst)
{
    if (k < 4) throw InvalidArgument("build_Nk needs k >= 4");
    inst.validate();
    NkMatrix N;
    N.k = k;
    N.rows = check_row_space(inst.n, inst.m, k);
    SubsetIndex S(inst.n, k - 4);
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t s = S.offset(k - 4); s < S.size(); ++s) {
        auto Sv = S.unrank(s);
        for (int a = 0; a < inst.m; ++a)
            for (int b = a + 1; b < inst.m; ++b) {
                int c = int(N.cols.size());
                N.cols.push_back({Sv, {a, b}});
                auto put = [&](int circle, double sign) {
                    return [&, circle, sign](const std::vector<int>& I, double v) {
                        trip.emplace_back(int(*N.rows.rank(I.data(), int(I.size()), &circle, 1)), c, sign * v);
                    };
                };
                check_row_entries(inst, Sv, a, put(b, 1.0));
                check_row_entries(inst, Sv, b, put(a, -1.0));
            }
    }
    N.N.resize(Eigen::Index(N.rows.size()), Eigen::Index(N.cols.size()));
    N.N.setFromTriplets(trip.begin(), trip.end());
    N.N.makeCompressed();
    return N;
}

Eigen::VectorXd nk_column(int k, const Instance& inst, const std::vector<int>& S, int a, int b)
{
    if (k < 4 || int(S.size()) != k - 4) throw InvalidArgument("nk_column: |S| must be k-4");
    if (a == b) throw InvalidArgument("nk_column: circles must differ");
    auto rows = check_row_space(inst.n, inst.m, k);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(rows.size());
    check_row_entries(inst, S, a, [&](const std::vector<int>& I, double x) {
        v[*rows.rank(I.data(), int(I.size()), &b, 1)] += x;
    });
    check_row_entries(inst, S, b, [&](const std::vector<int>& I, double x) {
        v[*rows.rank(I.data(), int(I.size()), &a, 1)] -= x;
    });
    return v;
}

namespace {

// N_4 restricted to S = {} acting matrix-free on the D = 4 check row space
struct N4Operator {
    const Instance* inst;
    const IndexSpace* rows;
    int n, m;
    Eigen::VectorXd c;
    std::vector<std::size_t> pair_row;  // row offset of ({j1,j2}, u=0), indexed by pair id

    N4Operator(const Instance& I, const IndexSpace& R) : inst(&I), rows(&R), n(I.n), m(I.m)
    {
        c.resize(m);
        for (int u = 0; u < m; ++u) c[u] = I.data.row(u).squaredNorm() / n - 1.0;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                int sq[2] = {a, b}, u0 = 0;
                pair_row.push_back(*R.rank(sq, 2, &u0, 1));
            }
    }
    std::size_t cols() const { return std::size_t(m) * (m - 1) / 2; }
    std::size_t empty_row(int u) const
    {
        int u0 = u;
        return *rows->rank(nullptr, 0, &u0, 1);
    }
    // N^T x, antisymmetric m x m packed as a < b
    Eigen::VectorXd apply_t(const Eigen::VectorXd& x) const
    {
        const auto& Dm = inst->data;
        Eigen::MatrixXd G(m, m);
        Eigen::MatrixXd Xb = Eigen::MatrixXd::Zero(n, n);
        for (int b = 0; b < m; ++b) {
            int p = 0;
            for (int j1 = 0; j1 < n; ++j1)
                for (int j2 = j1 + 1; j2 < n; ++j2, ++p) Xb(j1, j2) = Xb(j2, j1) = x[pair_row[p] + b];
            Eigen::MatrixXd Z = Dm * Xb;
            double xe = x[empty_row(b)];
            for (int a = 0; a < m; ++a) G(a, b) = Z.row(a).dot(Dm.row(a)) + c[a] * xe;
        }
        Eigen::VectorXd out(cols());
        std::size_t q = 0;
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) out[q++] = G(a, b) - G(b, a);
        return out;
    }
    Eigen::VectorXd apply(const Eigen::VectorXd& z) const
    {
        const auto& Dm = inst->data;
        Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(m, m);
        std::size_t q = 0;
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b, ++q) {
                Z(a, b) = z[q];
                Z(b, a) = -z[q];
            }
        Eigen::VectorXd out = Eigen::VectorXd::Zero(rows->size());
        for (int b = 0; b < m; ++b) {
            Eigen::MatrixXd Y = Dm.transpose() * (Z.col(b).asDiagonal() * Dm);
            int p = 0;
            for (int j1 = 0; j1 < n; ++j1)
                for (int j2 = j1 + 1; j2 < n; ++j2, ++p) out[pair_row[p] + b] += 2.0 * Y(j1, j2);
            out[empty_row(b)] += Z.col(b).dot(c);
        }
        return out;
    }
};

}  // namespace

QQSpectrum qq_spectrum(const Instance& inst, int D, const SpectrumOptions& opt)
{
    QQSpectrum rep;
    rep.n = inst.n;
    rep.m = inst.m;
    rep.D = D;
    auto rows = check_row_space(inst.n, inst.m, D);
    if (rows.size() <= opt.dense_limit) {
        rep.method = "dense";
        auto C = build_Q(inst, D);
        Eigen::MatrixXd G = Eigen::MatrixXd(C.Q * SparseRowMatrix(C.Q.transpose()));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
        rep.eigenvalues = es.eigenvalues();
        rep.max_eig = rep.eigenvalues[rep.eigenvalues.size() - 1];
        double zero = opt.rel_zero * rep.max_eig;
        rep.nullity = 0;
        rep.min_nonzero = 0;
        for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i) {
            if (rep.eigenvalues[i] <= zero) {
                ++rep.nullity;
            } else {
                rep.min_nonzero = rep.eigenvalues[i];
                break;
            }
        }
        return rep;
    }
    if (D > 4) throw BudgetExceeded("matrix-free spectrum supports D <= 4");
    rep.method = "lanczos";
    CheckOperator Q(inst, D);
    std::size_t dim = Q.rows();
    double n2 = double(inst.n) * inst.n;
    double weight = opt.deflation * n2;
    std::optional<N4Operator> N;
    if (D >= 4) N.emplace(inst, Q.row_space());
    auto qqt = [&](const Eigen::VectorXd& v) { return Q.apply_qqt(v); };
    for (int attempt = 0; attempt < 4; ++attempt) {
        auto op = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
            Eigen::VectorXd w = qqt(v);
            if (N) {
                Eigen::VectorXd z = N->apply_t(v);
                w += (weight / n2) * N->apply(z);
            }
            return w;
        };
        auto lr = lanczos_min(op, dim, opt.max_steps, opt.tol, opt.seed + attempt);
        rep.lanczos_steps = lr.steps;
        double rq = lr.vector.dot(qqt(lr.vector)) / lr.vector.squaredNorm();
        rep.null_leak = N ? N->apply_t(lr.vector).norm() / lr.vector.norm() : 0.0;
        rep.min_nonzero = lr.value;
        // the minimizer must live in the range of QQ^T, otherwise the deflation weight was too small
        if (rq >= 0.5 * lr.value) break;
        weight *= 4;
    }
    auto top = lanczos_min([&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return -qqt(v); }, dim, 60, 1e-6,
                           opt.seed + 17);
    rep.max_eig = -top.value;
    return rep;
}

}  // namespace pap
