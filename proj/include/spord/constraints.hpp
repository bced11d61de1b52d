#pragma once

#include "spord/data.hpp"
#include "spord/types.hpp"

#include <string>
#include <vector>

namespace spord {

// Weighted zero-sum constraints on the spatial effects: one row per level of
// each additive factor, with entries n_{hk} (respondent count in level h and
// area k). The projector maps onto {theta : A theta = 0} through an
// orthonormal basis of the row space, so it is idempotent to machine
// precision.
class ConstraintSet {
 public:
  ConstraintSet() = default;  // no constraints; project() is the identity

  // Rows from the observed sample. When the spec has no additive factors a
  // single row of per-area respondent counts is used, which pins the overall
  // level of theta against the cut points.
  static ConstraintSet from_cells(const CellTable& cells, const ModelSpec& spec, Index n_areas);

  // Arbitrary weight rows (e.g. population counts for synthetic truth).
  static ConstraintSet from_weights(const Mat& weights);

  Index n_areas() const { return q_.rows(); }
  Index n_rows() const { return a_.rows(); }  // nonzero rows kept
  Index rank() const { return q_.cols(); }
  Index n_dropped() const { return n_dropped_; }  // redundant rows beyond the rank

  const Mat& weights() const { return a_; }
  Vec project(const Eigen::Ref<const Vec>& theta) const;
  double max_violation(const Eigen::Ref<const Vec>& theta) const;

 private:
  Mat a_;  // nonzero weight rows
  Mat q_;  // n_areas x rank orthonormal basis of the row space
  Index n_dropped_ = 0;
};

inline Vec project_constraints(const Eigen::Ref<const Vec>& theta, const ConstraintSet& cons) {
  return cons.project(theta);
}

}  // namespace spord
