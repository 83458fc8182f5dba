#pragma once

#include "pap/constraints.hpp"
#include "pap/instance.hpp"
#include "pap/pseudocal.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace pap {

struct GoeSample {
    int n = 0;
    Eigen::MatrixXd W;
    std::uint64_t seed = 0;
};
// (A + A^T) / sqrt(2), A with i.i.d. standard normal entries
GoeSample sample_goe(int n, std::uint64_t seed);

struct PbvInstance {
    int p = 0, n = 0;
    Eigen::MatrixXd A;            // n x p, orthonormal columns w_1..w_p
    Eigen::MatrixXd Pi;           // A A^T
    Eigen::VectorXd eigenvalues;  // all eigenvalues of W, descending
    Eigen::MatrixXd eigenvectors; // matching columns
    double lambda_p = 0, lambda_max = 0, lambda_min = 0;

    // planted-vector instance in dimension p with one constraint per row: d_u = sqrt(n) A[u, :]
    Instance pap_instance(std::uint64_t seed = 0) const;
};
PbvInstance pbv_from_eigenspace(const Eigen::MatrixXd& W, int p);
int default_p(int n);  // ceil(n^0.67)

// multilinear pseudoexpectation over b in {-1, 1}^n
struct HypercubePe {
    int n = 0, D = 0;
    SubsetIndex index;
    Eigen::VectorXd values;
    double square_residual = 0;  // max_u |E~[<v, d_u>^2] - 1|

    double operator()(const std::vector<int>& S) const { return values[index.rank(S)]; }
    Eigen::MatrixXd second_moments() const;  // E~[b b^T], unit diagonal
    Eigen::MatrixXd moment_matrix() const;   // rows/cols |S| <= D/2, entries E~[b^{S xor T}]
};

struct PushforwardOptions {
    double tol = 1e-6;
    double work_budget = 2e9;
};
// E~[b^S] = E~'[prod_{u in S} <v, d_u>], rows of `d` are the d_u
HypercubePe pushforward_pe(const PseudoExpectation& pe, const Eigen::MatrixXd& d, const PushforwardOptions& opt = {});

struct SkReport {
    int n = 0, p = 0, D = 0, T = 0;
    std::uint64_t goe_seed = 0;
    double lambda_p = 0, lambda_max = 0, lambda_min = 0;
    double objective = 0;        // E~[x^T W x]
    double spectral_sum = 0;     // sum_i lambda_i E~[<x, w_i>^2]
    double in_subspace = 0;      // E~[x^T Pi x]
    double bpb = 0;              // (1/n) E~[b^T Pi b]
    double chain = 0;            // lambda_p E~[x^T Pi x] - |lambda_n| (n - E~[x^T Pi x])
    bool chain_holds = false;    // objective >= chain - 1e-6 n^2
    double ratio = 0;            // objective / n^{3/2}
    double psd_min_eig = 0;      // of the degree-D/2 moment matrix of b
    double pap_psd_min_eig = 0;  // of the projected moment matrix over v
    double square_residual = 0;
    double projection_change = 0;
    std::string method;
};
SkReport sk_objective(const HypercubePe& pe, const Eigen::MatrixXd& W, const PbvInstance& pbv);

struct SkDemoOptions {
    int n = 400;
    int p = 0;  // 0: ceil(n^0.67)
    int D = 2;
    int T = 4;
    std::uint64_t seed = 1;
    PeMode mode = PeMode::row_series;
    double work_budget = 2e9;
};
SkReport sk_demo(const SkDemoOptions& opt);
std::string sk_report_json(const SkReport& r);

}  // namespace pap
