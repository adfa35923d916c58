#pragma once

#include <Eigen/Dense>

#include "qmetro/core.hpp"

namespace qmetro {

using Mat16 = Eigen::Matrix<cplx, 16, 16>;
using Vec16 = Eigen::Matrix<cplx, 16, 1>;
using RealMat16 = Eigen::Matrix<double, 16, 16>;
using RealVec16 = Eigen::Matrix<double, 16, 1>;

// Matrix exponential by scaling and squaring with diagonal Pade approximants
// (degrees 3, 5, 7, 9, 13 selected from the 1-norm; Higham 2005).
// Non-finite input or output throws ErrorCode::Numerical.
ComplexMatrix expm(const ComplexMatrix& a);
Mat16 expm(const Mat16& a);
RealMat16 expm(const RealMat16& a);

}  // namespace qmetro
