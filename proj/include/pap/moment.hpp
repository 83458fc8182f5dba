#pragma once

#include "pap/common.hpp"
#include "pap/instance.hpp"
#include "pap/pseudocal.hpp"
#include "pap/shape.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace pap {

// rows/cols: subsets of size <= D/2 in graded-lex order
struct MomentMatrix {
    int n = 0, D = 0;
    SubsetIndex index;
    Eigen::MatrixXd M;

    double eta() const { return 1.0 / std::sqrt(double(n)); }
};

MomentMatrix assemble(const PseudoExpectation& pe, int D);

struct GraphSumOptions {
    std::size_t catalog_cap = 200000;
    double work_budget = 2e9;
};
MomentMatrix assemble_graph_sum(const Instance& inst, int D, int T, const GraphSumOptions& opt = {});

struct BlockCertificate {
    bool certified = false;
    std::vector<double> diag_min_sv, diag_threshold;
    std::vector<double> offdiag_norm, offdiag_threshold;  // k < l, row-major over pairs
};
BlockCertificate block_psd_certify(const Eigen::MatrixXd& M, const SubsetIndex& index, double eta, int D);
BlockCertificate block_psd_certify(const MomentMatrix& mm);

struct EigenReport {
    double min_eig = 0;
    double norm = 0;
    double residual = 0;  // |Mx - lx| for the minimizing eigenpair
    Eigen::VectorXd eigenvalues;
};
EigenReport min_eigenvalue(const Eigen::MatrixXd& M);
bool is_psd(const Eigen::MatrixXd& M, double rel_tol = 1e-8);

struct NullspaceShiftReport {
    int trials = 0;
    int shift_pass = 0;
    int scaling_pass = 0;
    bool example_null_exact = false;
    bool example_rescaling_ok = false;
    bool all_pass() const { return shift_pass == trials && scaling_pass == trials && example_null_exact && example_rescaling_ok; }
};
NullspaceShiftReport nullspace_shift_tests(int trials = 100, std::uint64_t seed = 1);

// sum |lambda_a| * norm_bound(a) over non-trivial non-spiders on block (k, l), divided by eta^{k+l}
double non_spider_mass(const std::vector<Shape>& catalog, int n, double m, int k, int l,
                       Basis basis = Basis::gaussian, const NormBoundOptions& nb = {});

struct MatrixMeta {
    std::string ordering = "graded-lex";
    int n = 0, m = 0, D = 0;
    std::uint64_t seed = 0;
};
// base.bin (row-major little-endian doubles) + base.json; base.csv when both dims <= csv_limit
void export_matrix(const Eigen::MatrixXd& M, const std::string& base, const MatrixMeta& meta, int csv_limit = 64);
Eigen::MatrixXd import_matrix(const std::string& base);

}  // namespace pap
