#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "smc/errors.hpp"
#include "smc/grids.hpp"

namespace smc::detail {

struct Solve4Result {
  Eigen::Vector4cd x;
  double residual = 0.0;  // max_i |b - Mx|_i / (|M| |x| + |b|)_i
};

// Power-of-two column equilibration keeps the scaling exact, then partial-pivot
// LU. Residual is checked against a loose guard; tests pin the tight contract.
inline Solve4Result solve4(const Eigen::Matrix4cd& m, const Eigen::Vector4cd& b) {
  Eigen::Vector4d scale;
  Eigen::Matrix4cd ms = m;
  for (int j = 0; j < 4; ++j) {
    const double colmax = m.col(j).cwiseAbs().maxCoeff();
    if (colmax == 0.0 || !std::isfinite(colmax))
      throw SingularSystem("boundary-condition matrix has an empty or non-finite column");
    const double s = std::exp2(-std::ilogb(colmax));
    ms.col(j) *= s;
    scale[j] = s;
  }
  const Eigen::PartialPivLU<Eigen::Matrix4cd> lu(ms);
  Eigen::Vector4cd y = lu.solve(b);
  Solve4Result out;
  out.x = y.cwiseProduct(scale.cast<Complex>());

  const Eigen::Vector4cd r = b - m * out.x;
  const Eigen::Vector4d denom =
      (m.cwiseAbs() * out.x.cwiseAbs()).eval() + b.cwiseAbs();
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double d = denom[i];
    if (d > 0.0) worst = std::max(worst, std::abs(r[i]) / d);
  }
  out.residual = worst;
  if (!std::isfinite(worst) || worst > 1e-6)
    throw SingularSystem("boundary-condition solve residual " + std::to_string(worst));
  return out;
}

}  // namespace smc::detail
