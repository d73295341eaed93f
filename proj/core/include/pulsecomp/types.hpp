#pragma once

#include <complex>

#include <Eigen/Dense>

namespace pulsecomp {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace pulsecomp
