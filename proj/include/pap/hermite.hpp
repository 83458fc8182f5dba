#pragma once

#include "pap/common.hpp"

#include <map>
#include <utility>
#include <vector>

namespace pap {

struct LinearCombination {
    std::map<int, Rational> coeffs;

    void add(int degree, const Rational& c);
    Rational eval(const Rational& x, Basis b) const;
    bool operator==(const LinearCombination&) const = default;
};

class CellMultiIndex {
public:
    using Cell = std::pair<int, int>;  // (u, i)

    void set(int u, int i, int mult);
    void add(int u, int i, int mult);
    int get(int u, int i) const;

    int total() const { return total_; }
    int row_sum(int u) const;
    int col_sum(int i) const;
    const std::map<Cell, int>& cells() const { return cells_; }
    const std::map<int, int>& rows() const { return rows_; }
    const std::map<int, int>& cols() const { return cols_; }
    Integer factorial() const;  // prod alpha_{u,i}!
    bool aggregates_consistent() const;
    bool operator==(const CellMultiIndex& o) const { return cells_ == o.cells_; }
    bool operator<(const CellMultiIndex& o) const { return cells_ < o.cells_; }

private:
    std::map<Cell, int> cells_;
    std::map<int, int> rows_, cols_;
    int total_ = 0;
};

Rational hermite_eval(int k, const Rational& x, Basis b);
double hermite_eval(int k, double x, Basis b);
Integer hermite_at_one(int k, Basis b = Basis::gaussian);
std::vector<Integer> hermite_poly(int k);  // monomial coefficients, gaussian
bool hermite_one_bound_check(int k_max);

// E[z^k] for z ~ N(0,1)
Integer gaussian_moment(int k);

LinearCombination linearize_product(const std::vector<int>& labels, Basis b, bool strict = false);
Integer linearization_coeff(const CellMultiIndex& a, const CellMultiIndex& b, const CellMultiIndex& delta);

}  // namespace pap
