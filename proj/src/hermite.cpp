#include "pap/hermite.hpp"

#include <algorithm>
#include <cmath>

namespace pap {

void LinearCombination::add(int degree, const Rational& c)
{
    if (c == 0) return;
    auto it = coeffs.find(degree);
    if (it == coeffs.end()) {
        coeffs.emplace(degree, c);
        return;
    }
    it->second += c;
    if (it->second == 0) coeffs.erase(it);
}

Rational LinearCombination::eval(const Rational& x, Basis b) const
{
    Rational s = 0;
    for (const auto& [k, c] : coeffs) s += c * hermite_eval(k, x, b);
    return s;
}

void CellMultiIndex::set(int u, int i, int mult)
{
    if (mult < 0) throw InvalidArgument("negative multiplicity");
    int old = get(u, i);
    add(u, i, mult - old);
}

void CellMultiIndex::add(int u, int i, int mult)
{
    if (mult == 0) return;
    int& c = cells_[{u, i}];
    if (c + mult < 0) throw InvalidArgument("negative multiplicity");
    c += mult;
    if (c == 0) cells_.erase({u, i});
    total_ += mult;
    if ((rows_[u] += mult) == 0) rows_.erase(u);
    if ((cols_[i] += mult) == 0) cols_.erase(i);
}

int CellMultiIndex::get(int u, int i) const
{
    auto it = cells_.find({u, i});
    return it == cells_.end() ? 0 : it->second;
}

int CellMultiIndex::row_sum(int u) const
{
    auto it = rows_.find(u);
    return it == rows_.end() ? 0 : it->second;
}

int CellMultiIndex::col_sum(int i) const
{
    auto it = cols_.find(i);
    return it == cols_.end() ? 0 : it->second;
}

Integer CellMultiIndex::factorial() const
{
    Integer r = 1;
    for (const auto& [c, a] : cells_) r *= pap::factorial(a);
    return r;
}

bool CellMultiIndex::aggregates_consistent() const
{
    int t = 0;
    std::map<int, int> r, c;
    for (const auto& [cell, a] : cells_) {
        t += a;
        r[cell.first] += a;
        c[cell.second] += a;
    }
    return t == total_ && r == rows_ && c == cols_;
}

Rational hermite_eval(int k, const Rational& x, Basis b)
{
    if (k < 0) throw InvalidArgument("negative degree");
    if (b == Basis::boolean) {
        if (k == 0) return 1;
        if (k == 1) return x;
        return 0;
    }
    Rational h0 = 1, h1 = x;
    if (k == 0) return h0;
    for (int j = 1; j < k; ++j) {
        Rational h2 = x * h1 - j * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double hermite_eval(int k, double x, Basis b)
{
    if (b == Basis::boolean) return k == 0 ? 1.0 : (k == 1 ? x : 0.0);
    double h0 = 1, h1 = x;
    if (k == 0) return h0;
    for (int j = 1; j < k; ++j) {
        double h2 = x * h1 - j * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

Integer hermite_at_one(int k, Basis b)
{
    Rational v = hermite_eval(k, Rational(1), b);
    return v.get_num();
}

std::vector<Integer> hermite_poly(int k)
{
    std::vector<Integer> h0{1}, h1{0, 1};
    if (k == 0) return h0;
    for (int j = 1; j < k; ++j) {
        std::vector<Integer> h2(j + 2, 0);
        for (int i = 0; i <= j; ++i) h2[i + 1] += h1[i];
        for (int i = 0; i < int(h0.size()); ++i) h2[i] -= j * h0[i];
        h0 = std::move(h1);
        h1 = std::move(h2);
    }
    return h1;
}

bool hermite_one_bound_check(int k_max)
{
    if (k_max < 1) throw InvalidArgument("k_max >= 1");
    Integer h0 = 1, h1 = 1;
    for (int k = 1; k <= k_max; ++k) {
        Integer kk;
        mpz_ui_pow_ui(kk.get_mpz_t(), k, k);
        if (abs(h1) > kk) return false;
        Integer h2 = h1 - k * h0;
        h0 = h1;
        h1 = h2;
    }
    return true;
}

Integer gaussian_moment(int k)
{
    if (k % 2) return 0;
    return double_factorial(k - 1);
}

LinearCombination linearize_product(const std::vector<int>& labels, Basis b, bool strict)
{
    if (labels.empty()) throw InvalidArgument("linearize_product: empty label list");
    std::vector<int> ls;
    for (int l : labels) {
        if (l < 0) throw InvalidArgument("negative label");
        if (l == 0) {
            if (strict) throw InvalidArgument("label 0 in strict mode");
            continue;
        }
        ls.push_back(l);
    }
    LinearCombination out;
    if (b == Basis::boolean) {
        int ones = 0;
        for (int l : ls) {
            if (l >= 2) return out;
            ++ones;
        }
        out.add(ones % 2, 1);
        return out;
    }
    std::vector<Integer> prod{1};
    for (int l : ls) {
        auto h = hermite_poly(l);
        std::vector<Integer> next(prod.size() + h.size() - 1, 0);
        for (std::size_t i = 0; i < prod.size(); ++i)
            if (prod[i] != 0)
                for (std::size_t j = 0; j < h.size(); ++j) next[i + j] += prod[i] * h[j];
        prod = std::move(next);
    }
    int L = int(prod.size()) - 1;
    std::vector<Integer> mom(2 * L + 1);
    for (int j = 0; j <= 2 * L; ++j) mom[j] = gaussian_moment(j);
    for (int p = L % 2; p <= L; p += 2) {
        auto h = hermite_poly(p);
        Integer s = 0;
        for (int j = 0; j <= L; ++j) {
            if (prod[j] == 0) continue;
            for (int i = 0; i <= p; ++i)
                if (h[i] != 0) s += prod[j] * h[i] * mom[i + j];
        }
        Rational c(s, factorial(p));
        c.canonicalize();
        out.add(p, c);
    }
    return out;
}

Integer linearization_coeff(const CellMultiIndex& a, const CellMultiIndex& b, const CellMultiIndex& delta)
{
    Integer r = 1;
    for (const auto& [cell, d] : delta.cells()) {
        int x = a.get(cell.first, cell.second), y = b.get(cell.first, cell.second);
        if (d > x || d > y) throw InvalidArgument("linearization_coeff: delta exceeds alpha or beta");
        r *= binomial(x, d) * binomial(y, d) * factorial(d);
    }
    return r;
}

}  // namespace pap
