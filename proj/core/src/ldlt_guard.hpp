#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "pulsecomp/errors.hpp"
#include "pulsecomp/types.hpp"

namespace pulsecomp::detail {

/// LDLT of a Hermitian PSD system with an explicit pivot-ratio condition
/// estimate. Eigen's rcond() norm estimator returns garbage once a pivot is
/// exactly zero, so the guard inspects the D factor directly.
inline Eigen::LDLT<CMatrix> checked_ldlt(const CMatrix& hermitian, double max_condition,
                                         const std::string& context) {
    Eigen::LDLT<CMatrix> ldlt(hermitian);
    double d_min = std::numeric_limits<double>::infinity();
    double d_max = 0.0;
    bool healthy = ldlt.info() == Eigen::Success;
    if (healthy) {
        const auto d = ldlt.vectorD();
        for (Index i = 0; i < d.size(); ++i) {
            const double v = d[i].real();
            if (!std::isfinite(v) || v < 0.0) {
                healthy = false;
                break;
            }
            d_min = std::min(d_min, v);
            d_max = std::max(d_max, v);
        }
    }
    const double condition = (healthy && d_min > 0.0)
                                 ? d_max / d_min
                                 : std::numeric_limits<double>::infinity();
    if (!healthy || !(condition < max_condition)) {
        throw SingularSystemError(context + ": system is rank deficient", condition);
    }
    return ldlt;
}

}  // namespace pulsecomp::detail
