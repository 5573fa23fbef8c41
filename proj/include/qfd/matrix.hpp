#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace qfd {

/// Row-major dense matrix; rows are contiguous so they can be viewed as spans.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> row_span(const RowMatrix &m, Eigen::Index i) {
    return {m.row(i).data(), static_cast<std::size_t>(m.cols())};
}

}  // namespace qfd
