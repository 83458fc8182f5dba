#pragma once

#include "pap/common.hpp"
#include "pap/instance.hpp"
#include "pap/shape.hpp"

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

namespace pap {

struct IndexKey {
    std::vector<int> squares, circles;
    bool operator==(const IndexKey&) const = default;
};

// concatenation of blocks; block (a, b) = a-subsets of squares x b-subsets of circles, lex order
class IndexSpace {
public:
    IndexSpace() = default;
    IndexSpace(int n, int m, std::vector<std::pair<int, int>> blocks);
    static IndexSpace squares_upto(int n, int m, int k);
    static IndexSpace composition(int n, int m, int a, int b);

    int n() const { return n_; }
    int m() const { return m_; }
    std::size_t size() const { return offsets_.back(); }
    const std::vector<std::pair<int, int>>& blocks() const { return blocks_; }
    std::size_t block_offset(std::size_t blk) const { return offsets_[blk]; }
    std::optional<std::size_t> rank(const int* sq, int a, const int* ci, int b) const;
    std::optional<std::size_t> rank(const IndexKey& k) const;
    IndexKey key(std::size_t r) const;
    bool operator==(const IndexSpace& o) const { return n_ == o.n_ && m_ == o.m_ && blocks_ == o.blocks_; }

private:
    int n_ = 0, m_ = 0;
    std::vector<std::pair<int, int>> blocks_;
    std::vector<std::size_t> offsets_{0};
    SubsetIndex sq_, ci_;
    std::vector<std::vector<int>> lookup_;  // lookup_[a][b] = block id or -1
};

struct RealizedMatrix {
    IndexSpace rows, cols;
    Eigen::MatrixXd M;
};

struct RealizeOptions {
    double work_budget = 2e9;
    bool allow_truncation = false;  // drop entries outside the index spaces instead of failing
};

double realization_work(const Shape& s, int n, int m);

RealizedMatrix realize(const Shape& s, const Instance& inst, const IndexSpace& rows, const IndexSpace& cols,
                       const RealizeOptions& opt = {});
RealizedMatrix realize(const Shape& s, const Instance& inst, const RealizeOptions& opt = {});
// adds scale * M_shape into out (spaces taken from out)
void realize_into(const Shape& s, const Instance& inst, double scale, RealizedMatrix& out, const RealizeOptions& opt = {});

// grouped-GEMM realization for shapes whose index sets are square-only
Eigen::MatrixXd realize_square_fast(const Shape& s, const Instance& inst);

struct Term {
    Shape shape;
    Rational coeff;
};

std::vector<Term> collect_terms(const std::vector<Term>& terms);
std::vector<Term> expand_improper(const Shape& s, Basis b);
bool composable(const Shape& a, const Shape& b);
std::vector<Term> multiply_improper(const Shape& a, const Shape& b);
std::vector<Term> multiply_decompose(const Shape& a, const Shape& b, Basis basis);
Rational multiply_coeff_bound(const Shape& a, const Shape& gamma);

// largest singular value; dense SVD for small matrices, Lanczos on the Gram matrix otherwise
double spectral_norm(const Eigen::MatrixXd& M);

struct NormSweepEntry {
    Shape shape;
    double bound = 0;
    std::vector<double> norms;  // one per draw
    int within = 0;             // draws with norm <= bound
};
std::vector<NormSweepEntry> norm_sweep(const std::vector<Shape>& catalog, const std::vector<Instance>& draws,
                                       const NormBoundOptions& nb = {}, double work_budget = 2e9);

// merge squares i and j, membership by parity
Shape improper_collapse(const Shape& s, int i, int j);

}  // namespace pap
