#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace pap {

struct LanczosResult {
    double value = 0;
    Eigen::VectorXd vector;
    int steps = 0;
    bool converged = false;
};

// lowest eigenvalue of a symmetric operator, full reorthogonalization
template <class Op>
LanczosResult lanczos_min(const Op& op, std::size_t dim, int max_steps, double tol, std::uint64_t seed)
{
    LanczosResult res;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<Eigen::VectorXd> V;
    Eigen::VectorXd v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = g(rng);
    v.normalize();
    V.push_back(v);
    std::vector<double> alpha, beta;
    int steps = std::min<int>(max_steps, int(dim));
    Eigen::VectorXd s;
    double theta = 0;
    for (int j = 0; j < steps; ++j) {
        Eigen::VectorXd w = op(V[j]);
        double a = V[j].dot(w);
        alpha.push_back(a);
        w -= a * V[j];
        if (j > 0) w -= beta[j - 1] * V[j - 1];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : V) w -= q.dot(w) * q;
        double b = w.norm();
        int k = j + 1;
        bool check = (k % 5 == 0) || k == steps || b < 1e-12;
        if (check) {
            Eigen::MatrixXd Tm = Eigen::MatrixXd::Zero(k, k);
            for (int i = 0; i < k; ++i) {
                Tm(i, i) = alpha[i];
                if (i + 1 < k) Tm(i, i + 1) = Tm(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tm);
            theta = es.eigenvalues()[0];
            s = es.eigenvectors().col(0);
            double scale = std::max(std::abs(es.eigenvalues()[0]), std::abs(es.eigenvalues()[k - 1]));
            res.steps = k;
            if (b * std::abs(s[k - 1]) <= tol * scale || b < 1e-12) {
                res.converged = true;
                break;
            }
        }
        beta.push_back(b);
        V.push_back(w / b);
    }
    res.value = theta;
    res.vector = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < int(s.size()); ++i) res.vector += s[i] * V[i];
    return res;
}


}  // namespace pap
