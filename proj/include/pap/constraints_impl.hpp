#pragma once

#include <algorithm>
#include <cmath>
#include <random>

namespace pap {

template <class F>
void check_row_entries(const Instance& inst, const std::vector<int>& T, int u, F&& f)
{
    int n = inst.n;
    double invn = 1.0 / n;
    std::vector<char> inT(n, 0);
    for (int j : T) inT[j] = 1;
    auto d = [&](int j) { return inst.data(u, j); };
    std::vector<int> col;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            double dd = d(a) * d(b);
            if (dd == 0.0) continue;
            col.clear();
            if (!inT[a] && !inT[b]) {
                col = T;
                col.push_back(a);
                col.push_back(b);
                std::sort(col.begin(), col.end());
                f(col, 2.0 * dd);
            } else if (inT[a] != inT[b]) {
                int in = inT[a] ? a : b, out = inT[a] ? b : a;
                for (int j : T)
                    if (j != in) col.push_back(j);
                col.push_back(out);
                std::sort(col.begin(), col.end());
                f(col, 2.0 * invn * dd);
            } else {
                for (int j : T)
                    if (j != a && j != b) col.push_back(j);
                f(col, 2.0 * invn * invn * dd);
            }
        }
    double s = 0;
    for (int j = 0; j < n; ++j) s += d(j) * d(j);
    double diag = s * invn - 1.0;
    if (diag != 0.0) f(T, diag);
}

}  // namespace pap
