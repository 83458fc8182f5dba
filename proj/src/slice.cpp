#include "pap/slice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace pap {

int Partition::k() const { return std::accumulate(parts.begin(), parts.end(), 0); }

int Partition::odd_parts() const
{
    return int(std::count_if(parts.begin(), parts.end(), [](int p) { return p % 2; }));
}

Partition Partition::transpose() const
{
    Partition t;
    if (parts.empty()) return t;
    for (int i = 1; i <= parts.front(); ++i)
        t.parts.push_back(int(std::count_if(parts.begin(), parts.end(), [i](int p) { return p >= i; })));
    return t;
}

static void gen_partitions(int rem, int maxp, std::vector<int>& cur, std::vector<Partition>& out)
{
    if (rem == 0) {
        out.push_back({cur});
        return;
    }
    for (int p = std::min(rem, maxp); p >= 1; --p) {
        cur.push_back(p);
        gen_partitions(rem - p, p, cur, out);
        cur.pop_back();
    }
}

std::vector<Partition> partitions(int k)
{
    if (k < 0) throw InvalidArgument("partitions: k < 0");
    std::vector<Partition> out;
    std::vector<int> cur;
    gen_partitions(k, k, cur, out);
    return out;
}

Integer aut_size(const Partition& p)
{
    std::map<int, int> mult;
    for (int x : p.parts) ++mult[x];
    Integer r = 1;
    for (auto [x, c] : mult) r *= factorial(c);
    return r;
}

Integer partition_word_count(const Partition& p, long n)
{
    Integer w = factorial(p.k());
    for (int x : p.parts) w /= factorial(x);
    return w * falling_factorial(n, p.length()) / aut_size(p);
}

Rational slice_moment_bruteforce(int n, int k)
{
    if (!is_perfect_square(n)) throw UnsupportedInstance("slice S(sqrt n) is empty unless n is a perfect square");
    if (k < 0 || k > n) throw InvalidArgument("slice_moment_bruteforce: need 0 <= k <= n");
    int s = int(std::lround(std::sqrt(double(n))));
    int q = (n - s) / 2;  // number of -1 coordinates
    if (n <= 20) {
        Integer num = 0, cnt = 0;
        for (unsigned long x = 0; x < (1UL << n); ++x) {
            if (__builtin_popcountl(x) != q) continue;
            ++cnt;
            int neg = __builtin_popcountl(x & ((1UL << k) - 1));
            num += (neg % 2) ? -1 : 1;
        }
        Rational r(num, cnt);
        r.canonicalize();
        return r;
    }
    Integer num = 0;
    for (int j = 0; j <= std::min(k, q); ++j) {
        Integer t = binomial(k, j) * binomial(n - k, q - j);
        num += (j % 2) ? -t : t;
    }
    Rational r(num, binomial(n, q));
    r.canonicalize();
    return r;
}

SliceMomentTable::SliceMomentTable(int n, int k_max) : n_(n)
{
    if (k_max < 0) throw InvalidArgument("k_max < 0");
    if (k_max > n) throw InvalidArgument("slice moments need n >= k (falling factorial vanishes)");
    scaled_.resize(k_max + 1);
    for (int k = 0; k <= k_max; ++k) {
        // n^k = sum_lambda c_lambda f(j) n^{(k-j)/2}
        Rational rhs = rpow(Rational(n), k);
        Integer lead = 0;
        for (const auto& p : partitions(k)) {
            Integer c = partition_word_count(p, n);
            int j = p.odd_parts();
            if (j == k) {
                lead = c;
                continue;
            }
            rhs -= c * scaled_[j] * rpow(Rational(n), (k - j) / 2);
        }
        if (lead == 0) throw InvalidArgument("falling factorial (n)_k vanishes");
        scaled_[k] = rhs / lead;
    }
}

const Rational& SliceMomentTable::scaled(int k) const
{
    if (k < 0 || k > k_max()) throw InvalidArgument("slice moment index out of table range");
    return scaled_[k];
}

double SliceMomentTable::value(int k) const { return scaled(k).get_d() * std::pow(double(n_), -0.5 * k); }

bool SliceMomentTable::exact(int k) const { return k % 2 == 0 || is_perfect_square(n_) || scaled(k) == 0; }

Rational SliceMomentTable::exact_value(int k) const
{
    if (!exact(k)) throw UnsupportedInstance("e(k) is irrational for odd k and non-square n");
    if (scaled(k) == 0) return 0;
    if (k % 2 == 0) return scaled(k) / rpow(Rational(n_), k / 2);
    long s = std::lround(std::sqrt(double(n_)));
    return scaled(k) / rpow(Rational(s), k);
}

Rational e_scaled(int n, int k) { return SliceMomentTable(n, k).scaled(k); }

Rational e_coeff(int n, int k) { return SliceMomentTable(n, k).exact_value(k); }

Rational slice_identity_lhs_scaled(int n, int k)
{
    SliceMomentTable t(n, k);
    Rational s = 0;
    for (const auto& p : partitions(k)) {
        int j = p.odd_parts();
        s += partition_word_count(p, n) * t.scaled(j) * rpow(Rational(n), (k - j) / 2);
    }
    return s;
}

static Integer ipow(long b, unsigned long e)
{
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), b, e);
    return r;
}

bool slice_bound_check(int n, int k)
{
    Rational f = e_scaled(n, k);
    return abs(f) <= ipow(k, 3UL * k);
}

bool slice_product_bound_check(int n, int k)
{
    SliceMomentTable t(n, k);
    for (const auto& p : partitions(k)) {
        int j = p.odd_parts();
        // (n)_len |f(j)| n^{-j/2} <= 3^{k^3} n^{k/2}, squared
        Rational lhs = falling_factorial(n, p.length()) * abs(t.scaled(j));
        Rational l2 = lhs * lhs;
        Rational r2 = Rational(ipow(3, 2UL * k * k * k)) * rpow(Rational(n), k + j);
        if (l2 > r2) return false;
    }
    return true;
}

}  // namespace pap
