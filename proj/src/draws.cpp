#include "spord/draws.hpp"

namespace spord {

Index ParamLayout::alpha_col(Index f, Index h) const {
  Index off = alpha_offset;
  for (Index i = 0; i < f; ++i) off += alpha_sizes[i];
  return off + h;
}

ParamLayout ParamLayout::make(const ModelSpec& spec, const SpatialGraph& graph) {
  const CutLayout cuts(spec);
  ParamLayout layout;
  layout.n_groups = cuts.n_groups();
  layout.jm1 = spec.n_categories - 1;
  layout.n_areas = graph.size();

  layout.kappa_offset = 0;
  for (Index g = 0; g < layout.n_groups; ++g) {
    const std::string label = cuts.label(g);
    for (Index j = 0; j < layout.jm1; ++j)
      layout.names.push_back("kappa[" + label + "][" + std::to_string(j + 1) + "]");
  }
  layout.alpha_offset = static_cast<Index>(layout.names.size());
  for (const auto& fname : spec.additive_factors) {
    const auto& schema = spec.factor(fname);
    layout.alpha_sizes.push_back(schema.n_levels());
    for (const auto& level : schema.levels)
      layout.names.push_back("alpha[" + fname + "][" + level + "]");
  }
  layout.theta_offset = static_cast<Index>(layout.names.size());
  for (const auto& area : graph.area_ids()) layout.names.push_back("theta[" + area + "]");
  layout.sigma_col = static_cast<Index>(layout.names.size());
  layout.names.push_back("sigma");
  layout.lambda_col = static_cast<Index>(layout.names.size());
  layout.names.push_back("lambda");
  layout.loglik_col = static_cast<Index>(layout.names.size());
  layout.names.push_back("loglik");
  return layout;
}

void state_to_row(const ParameterState& state, const ParamLayout& layout, double loglik_value,
                  RowRef row) {
  for (Index g = 0; g < layout.n_groups; ++g)
    for (Index j = 0; j < layout.jm1; ++j) row[layout.kappa_col(g, j)] = state.kappa(g, j);
  Index off = layout.alpha_offset;
  for (std::size_t f = 0; f < state.alpha.size(); ++f) {
    row.segment(off, state.alpha[f].size()) = state.alpha[f].transpose();
    off += state.alpha[f].size();
  }
  row.segment(layout.theta_offset, layout.n_areas) = state.theta.transpose();
  row[layout.sigma_col] = state.hyper.sigma;
  row[layout.lambda_col] = state.hyper.lambda;
  row[layout.loglik_col] = loglik_value;
}

ParameterState state_from_row(const ParamLayout& layout,
                              const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  ParameterState state;
  state.kappa.resize(layout.n_groups, layout.jm1);
  for (Index g = 0; g < layout.n_groups; ++g)
    for (Index j = 0; j < layout.jm1; ++j) state.kappa(g, j) = row[layout.kappa_col(g, j)];
  // omega is recoverable from kappa but unused downstream of a stored draw
  state.omega.resize(0, 0);
  Index off = layout.alpha_offset;
  for (const Index size : layout.alpha_sizes) {
    state.alpha.push_back(row.segment(off, size).transpose());
    off += size;
  }
  state.theta = row.segment(layout.theta_offset, layout.n_areas).transpose();
  state.hyper.sigma = row[layout.sigma_col];
  state.hyper.lambda = row[layout.lambda_col];
  return state;
}

Index PosteriorDraws::total_stored() const {
  Index n = 0;
  for (const auto& c : chains) n += c.n_stored();
  return n;
}

Vec PosteriorDraws::pooled_column(Index col) const {
  Vec out(total_stored());
  Index pos = 0;
  for (const auto& c : chains) {
    out.segment(pos, c.n_stored()) = c.samples.col(col);
    pos += c.n_stored();
  }
  return out;
}

}  // namespace spord
