#pragma once

#include "pap/common.hpp"
#include "pap/graph_matrix.hpp"
#include "pap/instance.hpp"
#include "pap/lanczos.hpp"
#include "pap/pseudocal.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace pap {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// rows: (T, u) with |T| = k-2 for k = 2..D, as blocks (k-2 squares, 1 circle)
// cols: subsets |I| <= D in graded-lex order
struct CheckMatrix {
    int n = 0, m = 0, D = 0;
    IndexSpace rows;
    SubsetIndex cols;
    SparseRowMatrix Q;

    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(Q); }
};

CheckMatrix build_Q(const Instance& inst, int D);
IndexSpace check_row_space(int n, int m, int D);

// visits the nonzero entries of row (T, u): f(column subset, value)
template <class F>
void check_row_entries(const Instance& inst, const std::vector<int>& T, int u, F&& f);

// matrix-free Q and Q^T, grouped per T into GEMMs
class CheckOperator {
public:
    CheckOperator(const Instance& inst, int D);
    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_.size(); }
    const IndexSpace& row_space() const { return rows_; }
    const SubsetIndex& col_space() const { return cols_; }
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;    // Q x
    Eigen::VectorXd apply_t(const Eigen::VectorXd& y) const;  // Q^T y
    Eigen::VectorXd apply_qqt(const Eigen::VectorXd& y) const { return apply(apply_t(y)); }

private:
    const Instance* inst_;
    int n_, m_, D_;
    IndexSpace rows_;
    SubsetIndex cols_;
    // per |T| = t: for each T and pair a < b, the column hit and its weight class (0: 1, 1: 1/n, 2: 1/n^2)
    std::vector<std::vector<std::uint32_t>> col_;
    std::vector<std::vector<std::uint8_t>> cls_;
    std::vector<std::size_t> row_base_;  // first row of (T, 0), indexed by column rank of T
    template <class F>
    void for_pairs(int t, std::size_t q, const int* T, F&& f) const;
};

Eigen::VectorXd constraint_residual(const CheckMatrix& Q, const PseudoExpectation& pe);

struct ProjectOptions {
    double rank_cutoff = 1e-8;      // relative to lambda_max
    std::size_t dense_limit = 3000;  // larger systems use conjugate gradients
    double cg_tol = 1e-14;
    int cg_max_iter = 2000;
};

struct ProjectionReport {
    PseudoExpectation pe;
    std::string method;
    int rank = -1;
    double cutoff = 0;
    bool cutoff_ambiguous = false;
    double residual_before = 0, residual_after = 0;  // |Q E|
    double q_norm = 0;                               // spectral norm of Q
    double change = 0;                               // |E - E'|
    double pinv_norm = 0;                            // |(QQ^T)^+|
};
ProjectionReport project(const PseudoExpectation& pe, const CheckMatrix& Q, const ProjectOptions& opt = {});

// N_k: columns (S, i < i') with |S| = k-4, rows in the check row space of degree k
struct NkMatrix {
    int k = 0;
    IndexSpace rows;
    std::vector<std::pair<std::vector<int>, std::pair<int, int>>> cols;
    SparseRowMatrix N;
};
NkMatrix build_Nk(int k, const Instance& inst);
// a single column for an arbitrary ordered circle pair (a, b), a != b
Eigen::VectorXd nk_column(int k, const Instance& inst, const std::vector<int>& S, int a, int b);

struct QQSpectrum {
    int n = 0, m = 0, D = 0;
    std::string method;
    double min_nonzero = 0;
    double max_eig = 0;
    int nullity = -1;           // dense method only
    int lanczos_steps = 0;
    double null_leak = 0;        // |N^T x| / |x| for the Lanczos vector
    Eigen::VectorXd eigenvalues;  // dense method only
};
struct SpectrumOptions {
    std::size_t dense_limit = 3000;
    double rel_zero = 1e-8;
    int max_steps = 400;
    double tol = 1e-9;
    double deflation = 4.0;  // weight on N N^T relative to the Rayleigh target
    std::uint64_t seed = 1;
};
QQSpectrum qq_spectrum(const Instance& inst, int D, const SpectrumOptions& opt = {});

}  // namespace pap

#include "pap/constraints_impl.hpp"
