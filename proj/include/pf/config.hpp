#ifndef PF_CONFIG_HPP
#define PF_CONFIG_HPP

#include <Eigen/Core>

namespace pf {

/// Library-wide scalar type. Build with PF_SINGLE_PRECISION to switch to float.
#ifdef PF_SINGLE_PRECISION
using real = float;
#else
using real = double;
#endif

template <int Dim>
using Vec = Eigen::Matrix<real, Dim, 1>;

template <int Rows, int Cols>
using Mat = Eigen::Matrix<real, Rows, Cols>;

using DynVec = Eigen::Matrix<real, Eigen::Dynamic, 1>;
using DynMat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace pf

#endif  // PF_CONFIG_HPP
