#pragma once

#include "pap/constraints.hpp"
#include "pap/graph_matrix.hpp"
#include "pap/moment.hpp"
#include "pap/shape.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pap {

enum class Side { left, right };

struct SpiderInfo {
    Shape shape;  // canonical form; vertex ids below refer to it
    Side side = Side::left;
    int end1 = -1, end2 = -1;
    int hub = -1;
};

std::optional<SpiderInfo> is_spider(const Shape& s);

// degree parity matches membership in U and V
bool parity_ok(const Shape& s);

// coeff * n^{-npow}
struct NTerm {
    Shape shape;
    Rational coeff;
    int npow = 0;
    std::string name;

    double value(int n) const;
    Rational exact(int n) const;
};

std::vector<NTerm> build_Lk(int k);
// rows: squares of size k, k-2, k-4; cols: (k-2 squares, 1 circle)
RealizedMatrix realize_Lk(int k, const Instance& inst);

struct AnnihilationReport {
    int k = 0;
    double residual = 0;  // Frobenius norm of M_fix L_k
    double m_norm = 0, l_norm = 0;
    double relative = 0;
    bool pass = false;
};
// M_fix rows |J| <= D-k, cols |I| <= k, built from pe
AnnihilationReport verify_annihilation(const PseudoExpectation& pe, int k, const Instance& inst, double tol = 1e-6);

// spider with end vertices removed and the hub moved into the index set
Shape spider_body(const SpiderInfo& sp);

// realize(L_k) realize(body) = alpha_coeff M_alpha + sum of the listed terms
struct IntersectionTerms {
    Rational alpha_coeff;
    std::vector<NTerm> type1, type2;  // type 2 carries at least one factor 1/n
};
IntersectionTerms intersection_terms(const SpiderInfo& sp, Basis basis = Basis::gaussian);

// Laurent polynomial in 1/n: power -> coefficient
using NPoly = std::map<int, Rational>;
double eval(const NPoly& p, double n);
Rational eval_exact(const NPoly& p, int n);

struct WebNode {
    Shape shape;
    std::string key;
    NPoly value;
    bool spider = false;
};
struct WebEdge {
    int from = 0, to = 0, type = 1;
    NPoly coeff;
};
struct Web {
    std::vector<WebNode> nodes;  // nodes[0] is the root, order is topological
    std::vector<WebEdge> edges;
    std::vector<int> leaves() const;
};
struct WebOptions {
    Basis basis = Basis::gaussian;
    std::size_t node_cap = 5000;
};
Web build_web(const SpiderInfo& root, const WebOptions& opt = {});

struct WebInvariants {
    bool acyclic = true;
    bool squares_decrease = true;
    bool parity = true;
    int height = 0;
    int height_bound = 0;
    int max_parents = 0;
    double parent_bound = 0;
    int max_excess = 0;  // max over root paths of #1 - 2 #2
    int edge_count = 0;  // |E(root)|
    double paths = 0;
    double leaf_c2 = 0;  // fitted C2 at C1 = 1
    bool all_pass() const
    {
        return acyclic && squares_decrease && parity && height <= height_bound && max_parents <= parent_bound &&
               max_excess <= edge_count;
    }
};
WebInvariants check_web(const Web& w);
std::string web_to_json(const Web& w, int n = 0);

// replaces every spider by the leaves of its web; coefficients exact at the given n
std::vector<Term> kill_spiders(const std::vector<Term>& decomposition, int n, const WebOptions& opt = {});

// sum of coeff * M_shape over square-only index spaces
Eigen::MatrixXd realize_terms(const std::vector<Term>& terms, const Instance& inst, const IndexSpace& rows,
                              const IndexSpace& cols);

}  // namespace pap
