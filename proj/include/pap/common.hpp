#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pap {

using Rational = mpq_class;
using Integer = mpz_class;

enum class Basis { gaussian, boolean };

std::string to_string(Basis b);
Basis basis_from_string(const std::string& s);

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct UnsupportedInstance : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateInstance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Integer factorial(int k);
Integer falling_factorial(long n, int k);
Integer binomial(long n, int k);
Integer double_factorial(int k);  // k!! with (-1)!! = 0!! = 1
Rational rpow(const Rational& x, int e);
double to_double(const Rational& q);
bool is_perfect_square(long n);

// subsets of [n] with |S| <= max_size, graded-lex order (by size, then lexicographic)
class SubsetIndex {
public:
    SubsetIndex() = default;
    SubsetIndex(int n, int max_size);

    int n() const { return n_; }
    int max_size() const { return k_; }
    std::size_t size() const { return offset_.back(); }
    std::size_t count(int k) const { return offset_[k + 1] - offset_[k]; }
    std::size_t offset(int k) const { return offset_[k]; }

    std::size_t rank(const std::vector<int>& sorted) const { return rank(sorted.data(), int(sorted.size())); }
    std::size_t rank(const int* s, int k) const;
    std::vector<int> unrank(std::size_t r) const;
    int size_of(std::size_t r) const;
    const int* data(std::size_t r) const { return flat_.data() + r * stride_; }

private:
    int n_ = 0, k_ = 0;
    std::vector<std::size_t> offset_;
    std::size_t stride_ = 0;
    // cum_[j][x] = sum_{y<x} C(n-1-y, j)
    std::vector<std::vector<std::size_t>> cum_;
    std::vector<int> flat_;
};

std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b);
std::vector<int> set_symdiff(const std::vector<int>& a, const std::vector<int>& b);
std::vector<int> set_intersection(const std::vector<int>& a, const std::vector<int>& b);
std::vector<int> set_minus(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace pap
