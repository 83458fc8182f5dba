#pragma once

#include "pap/common.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace pap {

struct Instance {
    int n = 0, m = 0;
    Basis setting = Basis::gaussian;
    Eigen::MatrixXd data;  // m x n, row u is d_u
    std::uint64_t seed = 0;

    double d(int u, int i) const { return data(u, i); }
    void validate() const;
};

}  // namespace pap
