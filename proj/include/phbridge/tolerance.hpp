#pragma once

#include <algorithm>

#include "phbridge/types.hpp"

namespace phbridge {

/// Thresholding rule shared by every rank decision in the library.
///
/// A singular value sigma of a rows x cols matrix with largest singular value
/// sigma_max is treated as zero iff
///   sigma <= max(abs_floor, rel_eps * sigma_max * max(rows, cols)).
struct TolerancePolicy {
  double rel_eps = 1e-12;
  double abs_floor = 1e-14;

  double rank_cutoff(double sigma_max, Index rows, Index cols) const {
    const double dim = static_cast<double>(std::max<Index>(std::max(rows, cols), 1));
    return std::max(abs_floor, rel_eps * sigma_max * dim);
  }

  /// Default threshold for structural residual tests (classification,
  /// validation reports). Residuals are computed from orthonormal data, so an
  /// absolute scale works.
  double structural() const { return std::max(abs_floor, 100.0 * rel_eps); }

  void validate() const {
    if (!(rel_eps > 0.0) || !(abs_floor >= 0.0)) {
      fail(ErrorCode::InvalidMatrix, "tolerance policy requires rel_eps > 0 and abs_floor >= 0");
    }
  }
};

}  // namespace phbridge
