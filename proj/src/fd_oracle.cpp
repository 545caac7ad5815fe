#include "samgs/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "samgs/error.hpp"

namespace samgs {

Vector fd_gradient(const std::function<double(const ParamVector&)>& loss, const ParamVector& theta,
                   const FdConfig& cfg) {
  if (!(cfg.step > 0.0)) throw Error(ErrorKind::InvalidArgument, "fd_gradient: step must be positive");
  Vector grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    ParamVector plus = theta;
    ParamVector minus = theta;
    plus[i] += cfg.step;
    minus[i] -= cfg.step;
    const double fp = loss(plus);
    const double fm = loss(minus);
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw Error(ErrorKind::NonFinite, "fd_gradient: non-finite loss near coordinate " + std::to_string(i));
    }
    grad[i] = (fp - fm) / (plus[i] - minus[i]);
  }
  return grad;
}

double relative_error(const Vector& analytic, const Vector& numeric, double floor) {
  const double scale = std::max({l2_norm(analytic), l2_norm(numeric), floor});
  return distance(analytic, numeric) / scale;
}

}  // namespace samgs
