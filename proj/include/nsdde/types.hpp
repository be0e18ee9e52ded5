#pragma once

#include <Eigen/Dense>

namespace nsdde {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace nsdde
