#include "spord/model.hpp"

#include <cmath>

namespace spord {

bool ParameterState::all_finite() const {
  if (!omega.allFinite() || !kappa.allFinite() || !theta.allFinite()) return false;
  for (const auto& a : alpha) {
    if (!a.allFinite()) return false;
  }
  return std::isfinite(hyper.sigma) && std::isfinite(hyper.lambda);
}

CategoryProbs category_probs(const Eigen::Ref<const Vec>& kappa_g, double shift) {
  const Index jm1 = kappa_g.size();
  if (jm1 < 1) throw std::domain_error("category_probs: need at least one cut point");
  for (Index j = 1; j < jm1; ++j) {
    if (!(kappa_g[j] > kappa_g[j - 1]))
      throw std::domain_error("category_probs: kappa must be strictly increasing");
  }
  CategoryProbs out;
  out.gamma.resize(jm1);
  out.pi.resize(jm1 + 1);
  double prev = 0.0;
  for (Index j = 0; j < jm1; ++j) {
    const double g = logistic(kappa_g[j] + shift);
    out.gamma[j] = g;
    out.pi[j] = g - prev;
    prev = g;
  }
  out.pi[jm1] = 1.0 - prev;
  return out;
}

LoglikEvaluator::LoglikEvaluator(const CellTable& cells, const ModelSpec& spec)
    : cells_(&cells), n_add_(spec.n_additive()) {
  const Index n = cells.n_cells();
  shift_.resize(n);
  gam_prev_.resize(n);
  gam_cur_.resize(n);
  buf_.resize(n);
}

void LoglikEvaluator::refresh_shifts(const ParameterState& state) {
  const Index n = cells_->n_cells();
  for (Index i = 0; i < n; ++i) {
    double s = state.theta.size() > 0 ? state.theta[cells_->area[i]] : 0.0;
    for (Index f = 0; f < n_add_; ++f) s += state.alpha[f][cells_->add_levels[f][i]];
    shift_[i] = s;
  }
}

double LoglikEvaluator::range(const Eigen::Ref<const Vec>& kappa_row, Index begin,
                              Index end) const {
  const Index n = end - begin;
  if (n <= 0) return 0.0;
  const Index j_cats = cells_->n_categories;
  auto shifts = shift_.segment(begin, n);
  double ll = 0.0;
  gam_prev_.head(n).setZero();
  for (Index j = 0; j < j_cats; ++j) {
    if (j + 1 < j_cats) {
      gam_cur_.head(n) = ((-(shifts + kappa_row[j])).exp() + 1.0).inverse();
      buf_.head(n) = gam_cur_.head(n) - gam_prev_.head(n);
    } else {
      buf_.head(n) = 1.0 - gam_prev_.head(n);
    }
    ll += (cells_->counts.col(j).segment(begin, n).array() * buf_.head(n).max(kProbFloor).log())
              .sum();
    gam_prev_.head(n).swap(gam_cur_.head(n));
  }
  return ll;
}

double LoglikEvaluator::group(const ParameterState& state, Index g) const {
  const auto [begin, end] = cells_->group_ranges[g];
  return range(state.kappa.row(g), begin, end);
}

double LoglikEvaluator::group_with(const Eigen::Ref<const Vec>& kappa_row, Index g) const {
  const auto [begin, end] = cells_->group_ranges[g];
  return range(kappa_row, begin, end);
}

double LoglikEvaluator::total(const ParameterState& state) const {
  double ll = 0.0;
  for (Index g = 0; g < cells_->n_groups; ++g) ll += group(state, g);
  return ll;
}

double loglik(const ParameterState& state, const CellTable& cells, const ModelSpec& spec) {
  if (!state.all_finite()) throw numeric_error("loglik: non-finite parameter state");
  if (cells.n_cells() == 0) return 0.0;
  LoglikEvaluator eval(cells, spec);
  eval.refresh_shifts(state);
  const double ll = eval.total(state);
  if (std::isnan(ll)) throw numeric_error("loglik: evaluation produced NaN");
  return ll;
}

Mat cell_probabilities(const ParameterState& state, const ModelSpec& spec,
                       const std::vector<Index>& cut_group,
                       const std::vector<Index>& add_factor_idx,
                       const std::vector<std::vector<Index>>& add_levels,
                       const std::vector<Index>& area) {
  const Index n = static_cast<Index>(cut_group.size());
  const Index j_cats = spec.n_categories;
  Mat pi(n, j_cats);
  for (Index i = 0; i < n; ++i) {
    const Index g = cut_group[i];
    if (g < 0 || g >= state.kappa.rows()) throw input_error("cell_probabilities: cut group out of range");
    const Index k = area[i];
    if (k < 0 || (state.theta.size() > 0 && k >= state.theta.size()))
      throw input_error("cell_probabilities: area index out of range");
    double shift = state.theta.size() > 0 ? state.theta[k] : 0.0;
    for (std::size_t f = 0; f < add_factor_idx.size(); ++f)
      shift += state.alpha[add_factor_idx[f]][add_levels[f][i]];
    pi.row(i) = category_probs(state.kappa.row(g), shift).pi;
  }
  return pi;
}

}  // namespace spord
