#include "pap/common.hpp"

#include <algorithm>
#include <cmath>

namespace pap {

std::string to_string(Basis b) { return b == Basis::gaussian ? "gaussian" : "boolean"; }

Basis basis_from_string(const std::string& s)
{
    if (s == "gaussian" || s == "gaussian-hermite") return Basis::gaussian;
    if (s == "boolean" || s == "boolean-parity") return Basis::boolean;
    throw InvalidArgument("unknown setting: " + s);
}

Integer factorial(int k)
{
    Integer r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(k));
    return r;
}

Integer falling_factorial(long n, int k)
{
    Integer r = 1;
    for (int i = 0; i < k; ++i) r *= (n - i);
    return r;
}

Integer binomial(long n, int k)
{
    if (k < 0 || n < 0 || k > n) return 0;
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

Integer double_factorial(int k)
{
    Integer r = 1;
    for (int i = k; i > 1; i -= 2) r *= i;
    return r;
}

Rational rpow(const Rational& x, int e)
{
    Rational r = 1, b = x;
    if (e < 0) {
        if (x == 0) throw DegenerateInstance("zero to negative power");
        b = 1 / x;
        e = -e;
    }
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

double to_double(const Rational& q) { return q.get_d(); }

bool is_perfect_square(long n)
{
    if (n < 0) return false;
    long r = std::lround(std::sqrt(double(n)));
    for (long c = std::max(0L, r - 1); c <= r + 1; ++c)
        if (c * c == n) return true;
    return false;
}

SubsetIndex::SubsetIndex(int n, int max_size) : n_(n), k_(std::min(max_size, n))
{
    if (n < 0 || max_size < 0) throw InvalidArgument("SubsetIndex: negative size");
    std::vector<std::vector<std::size_t>> C(n + 1, std::vector<std::size_t>(k_ + 1, 0));
    for (int a = 0; a <= n; ++a) {
        C[a][0] = 1;
        for (int b = 1; b <= std::min(a, k_); ++b) C[a][b] = C[a - 1][b - 1] + (b <= a - 1 ? C[a - 1][b] : 0);
    }
    offset_.assign(k_ + 2, 0);
    for (int j = 0; j <= k_; ++j) offset_[j + 1] = offset_[j] + C[n][j];
    cum_.assign(k_ + 1, std::vector<std::size_t>(n + 1, 0));
    for (int j = 0; j <= k_; ++j)
        for (int x = 0; x < n; ++x) cum_[j][x + 1] = cum_[j][x] + C[n - 1 - x][j];
    stride_ = std::max(k_, 1);
    flat_.assign(size() * stride_, -1);
    std::size_t r = 0;
    std::vector<int> s;
    for (int j = 0; j <= k_; ++j) {
        s.resize(j);
        for (int i = 0; i < j; ++i) s[i] = i;
        while (true) {
            std::copy(s.begin(), s.end(), flat_.begin() + r * stride_);
            ++r;
            int i = j - 1;
            while (i >= 0 && s[i] == n - j + i) --i;
            if (i < 0) break;
            ++s[i];
            for (int t = i + 1; t < j; ++t) s[t] = s[t - 1] + 1;
        }
    }
}

std::size_t SubsetIndex::rank(const int* s, int k) const
{
    if (k > k_) throw InvalidArgument("SubsetIndex: subset too large");
    std::size_t r = offset_[k];
    int prev = -1;
    for (int i = 0; i < k; ++i) {
        int j = k - 1 - i;
        r += cum_[j][s[i]] - cum_[j][prev + 1];
        prev = s[i];
    }
    return r;
}

int SubsetIndex::size_of(std::size_t r) const
{
    int k = 0;
    while (offset_[k + 1] <= r) ++k;
    return k;
}

std::vector<int> SubsetIndex::unrank(std::size_t r) const
{
    int k = size_of(r);
    const int* p = data(r);
    return std::vector<int>(p, p + k);
}

std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b)
{
    std::vector<int> r;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

std::vector<int> set_symdiff(const std::vector<int>& a, const std::vector<int>& b)
{
    std::vector<int> r;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

std::vector<int> set_intersection(const std::vector<int>& a, const std::vector<int>& b)
{
    std::vector<int> r;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

std::vector<int> set_minus(const std::vector<int>& a, const std::vector<int>& b)
{
    std::vector<int> r;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

}  // namespace pap
