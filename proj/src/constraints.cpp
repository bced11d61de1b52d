#include "spord/constraints.hpp"

#include <Eigen/QR>

namespace spord {

ConstraintSet ConstraintSet::from_weights(const Mat& weights) {
  ConstraintSet c;
  if (weights.size() == 0) return c;

  std::vector<Index> nonzero;
  for (Index r = 0; r < weights.rows(); ++r) {
    if (weights.row(r).cwiseAbs().sum() > 0.0) nonzero.push_back(r);
  }
  if (nonzero.empty()) return c;

  c.a_.resize(static_cast<Index>(nonzero.size()), weights.cols());
  for (Index r = 0; r < c.a_.rows(); ++r) c.a_.row(r) = weights.row(nonzero[r]);

  Eigen::ColPivHouseholderQR<Mat> qr(c.a_.transpose());
  const Index rank = qr.rank();
  c.n_dropped_ = c.a_.rows() - rank;
  c.q_ = qr.householderQ() * Mat::Identity(weights.cols(), rank);
  return c;
}

ConstraintSet ConstraintSet::from_cells(const CellTable& cells, const ModelSpec& spec,
                                        Index n_areas) {
  Index n_rows = 0;
  for (const auto& name : spec.additive_factors) n_rows += spec.factor(name).n_levels();
  if (n_rows == 0) n_rows = 1;  // single row of per-area totals

  Mat weights = Mat::Zero(n_rows, n_areas);
  if (spec.additive_factors.empty()) {
    for (Index i = 0; i < cells.n_cells(); ++i)
      weights(0, cells.area[i]) += cells.cell_total[i];
  } else {
    Index row0 = 0;
    for (Index f = 0; f < spec.n_additive(); ++f) {
      for (Index i = 0; i < cells.n_cells(); ++i)
        weights(row0 + cells.add_levels[f][i], cells.area[i]) += cells.cell_total[i];
      row0 += spec.factor(spec.additive_factors[f]).n_levels();
    }
  }
  return from_weights(weights);
}

Vec ConstraintSet::project(const Eigen::Ref<const Vec>& theta) const {
  if (q_.size() == 0) return theta;
  if (theta.size() != q_.rows()) throw input_error("project: theta length mismatch");
  return theta - q_ * (q_.transpose() * theta);
}

double ConstraintSet::max_violation(const Eigen::Ref<const Vec>& theta) const {
  if (a_.size() == 0) return 0.0;
  return (a_ * theta).cwiseAbs().maxCoeff();
}

}  // namespace spord
