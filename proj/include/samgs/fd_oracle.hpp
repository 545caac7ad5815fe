#pragma once

#include <functional>

#include "samgs/numeric.hpp"

namespace samgs {

enum class FdScheme { Central };

struct FdConfig {
  double step = 1e-6;
  FdScheme scheme = FdScheme::Central;
};

/// Central-difference gradient of a scalar function. Throws NonFinite if any
/// probe evaluates to NaN/Inf, InvalidArgument for a non-positive step.
Vector fd_gradient(const std::function<double(const ParamVector&)>& loss, const ParamVector& theta,
                   const FdConfig& cfg = {});

/// |a - b| / max(|a|, |b|, floor), the comparison used against the oracle.
double relative_error(const Vector& analytic, const Vector& numeric, double floor = 1e-8);

}  // namespace samgs
