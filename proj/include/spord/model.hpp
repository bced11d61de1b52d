#pragma once

#include "spord/cutpoints.hpp"
#include "spord/data.hpp"
#include "spord/spatial_graph.hpp"
#include "spord/types.hpp"

#include <vector>

namespace spord {

// Full parameter vector of the model. omega/kappa have one row per cut-point
// block; alpha holds one (constraint-satisfying) effect vector per additive
// factor; theta is the spatial field. Chain-local mutable state.
struct ParameterState {
  Mat omega;               // n_groups x (J-1)
  Mat kappa;               // derived from omega row by row
  std::vector<Vec> alpha;  // per additive factor, all levels
  Vec theta;               // K
  LcarHyper hyper;

  bool all_finite() const;
};

struct CategoryProbs {
  Vec gamma;  // J-1 cumulative probabilities
  Vec pi;     // J category probabilities
};

// gamma_j = logistic(kappa_j + shift), pi by differencing. Throws
// std::domain_error when kappa is not strictly increasing.
CategoryProbs category_probs(const Eigen::Ref<const Vec>& kappa_g, double shift);

// Probabilities are floored here before taking logs, which keeps extreme
// Metropolis proposals evaluable (they get rejected, not NaN'd).
inline constexpr double kProbFloor = 1e-12;

// Collapsed-cell log likelihood: sum over cells of sum_j c_j log pi_j, with
// the cell shift = additive effects + theta. Equals the respondent-level sum.
double loglik(const ParameterState& state, const CellTable& cells, const ModelSpec& spec);

// Category probabilities for an arbitrary list of cells (sampled or not), one
// row per cell. add_factor_idx names the additive factors present in
// add_levels as positions into spec.additive_factors; absent factors
// contribute no shift (the "average level" reading under a zero-sum
// constraint).
Mat cell_probabilities(const ParameterState& state, const ModelSpec& spec,
                       const std::vector<Index>& cut_group,
                       const std::vector<Index>& add_factor_idx,
                       const std::vector<std::vector<Index>>& add_levels,
                       const std::vector<Index>& area);

// Vectorized likelihood evaluator with reusable scratch buffers. One instance
// per chain; not thread-safe.
class LoglikEvaluator {
 public:
  LoglikEvaluator(const CellTable& cells, const ModelSpec& spec);

  // Shift vector (additive effects + theta) for every cell.
  void refresh_shifts(const ParameterState& state);
  // Log likelihood of one cut group's cells, using the cached shifts.
  double group(const ParameterState& state, Index g) const;
  // Same, but against an explicit cut-point row (proposal evaluation).
  double group_with(const Eigen::Ref<const Vec>& kappa_row, Index g) const;
  // Full sum over all groups.
  double total(const ParameterState& state) const;

 private:
  double range(const Eigen::Ref<const Vec>& kappa_row, Index begin, Index end) const;
  const CellTable* cells_;
  Index n_add_;
  Arr shift_;
  mutable Arr gam_prev_, gam_cur_, buf_;
};

}  // namespace spord
