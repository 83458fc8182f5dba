#pragma once

#include "pap/common.hpp"

#include <vector>

namespace pap {

struct Partition {
    std::vector<int> parts;  // weakly decreasing

    int k() const;
    int length() const { return int(parts.size()); }
    int odd_parts() const;
    Partition transpose() const;
    bool operator==(const Partition&) const = default;
};

std::vector<Partition> partitions(int k);
Integer aut_size(const Partition& p);

// k!/prod(parts!) * (n)_{len} / |aut|
Integer partition_word_count(const Partition& p, long n);

Rational slice_moment_bruteforce(int n, int k);

// f(k) = e(k) * n^{k/2}; always rational
class SliceMomentTable {
public:
    SliceMomentTable(int n, int k_max);

    int n() const { return n_; }
    int k_max() const { return int(scaled_.size()) - 1; }
    const Rational& scaled(int k) const;
    double value(int k) const;  // e(k) as a double
    bool exact(int k) const;     // e(k) itself rational
    Rational exact_value(int k) const;

private:
    int n_;
    std::vector<Rational> scaled_;
};

Rational e_scaled(int n, int k);
Rational e_coeff(int n, int k);

// sum_lambda c_lambda f(j_lambda) n^{(k - j_lambda)/2}; equals n^k
Rational slice_identity_lhs_scaled(int n, int k);
bool slice_bound_check(int n, int k);          // |e(k)| <= k^{3k} n^{-k/2}
bool slice_product_bound_check(int n, int k);  // (n)_{len}|E[x^lambda]| <= 3^{k^3} n^{k/2}

}  // namespace pap
