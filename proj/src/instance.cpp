#include "pap/instance.hpp"

#include <cmath>

namespace pap {

void Instance::validate() const
{
    if (n < 1 || m < 1) throw InvalidArgument("instance dimensions must be positive");
    if (data.rows() != m || data.cols() != n) throw InvalidArgument("instance data has wrong shape");
    if (setting == Basis::boolean)
        for (int u = 0; u < m; ++u)
            for (int i = 0; i < n; ++i)
                if (std::abs(data(u, i)) != 1.0) throw InvalidArgument("boolean instance entries must be +-1");
}

}  // namespace pap
