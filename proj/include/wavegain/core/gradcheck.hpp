#pragma once

// Central finite differences against analytic gradients.

#include <cmath>
#include <string>

#include "wavegain/core/tensor.hpp"

namespace wavegain {

/// Denominator floor for relative_error: entries where both gradients are
/// below this are compared on an absolute scale.
inline constexpr double kGradcheckFloor = 1e-8;

/// |a - n| / max(|a|, |n|, kGradcheckFloor).
inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), kGradcheckFloor});
  return std::abs(analytic - numeric) / scale;
}

struct GradcheckReport {
  double worst_relative = 0.0;
  double worst_absolute = 0.0;
  Index checked = 0;
  std::string worst_entry;

  bool passed(double tolerance) const { return checked > 0 && worst_relative <= tolerance; }

  void merge(const GradcheckReport& other) {
    if (other.worst_relative > worst_relative || checked == 0) {
      worst_relative = other.worst_relative;
      worst_entry = other.worst_entry;
    }
    worst_absolute = std::max(worst_absolute, other.worst_absolute);
    checked += other.checked;
  }
};

/// Perturbs each listed entry of `param` by +-step, evaluating `loss()` (which
/// must read `param` by reference) and compares with `analytic`. An empty
/// `entries` list means every entry. `param` is restored exactly.
template <typename Scalar, typename Loss>
GradcheckReport finite_difference_check(Tensor<Scalar>& param, const Tensor<Scalar>& analytic, Loss&& loss,
                                        double step, const std::string& name,
                                        const std::vector<Index>& entries = {}) {
  require_same_shape(param, analytic, "finite_difference_check");
  GradcheckReport r;
  auto check_one = [&](Index i) {
    const Scalar saved = param.data()[i];
    param.data()[i] = static_cast<Scalar>(saved + step);
    const double up = loss();
    param.data()[i] = static_cast<Scalar>(saved - step);
    const double down = loss();
    param.data()[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double a = static_cast<double>(analytic.data()[i]);
    const double rel = relative_error(a, numeric);
    r.worst_absolute = std::max(r.worst_absolute, std::abs(a - numeric));
    if (rel > r.worst_relative || r.checked == 0) {
      r.worst_relative = rel;
      r.worst_entry = name + "[" + std::to_string(i) + "]";
    }
    ++r.checked;
  };
  if (entries.empty()) {
    for (Index i = 0; i < param.size(); ++i) check_one(i);
  } else {
    for (Index i : entries) check_one(i);
  }
  return r;
}

}  // namespace wavegain
