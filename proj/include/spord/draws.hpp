#pragma once

#include "spord/data.hpp"
#include "spord/model.hpp"
#include "spord/types.hpp"

#include <string>
#include <vector>

namespace spord {

// Column layout of a stored draw: kappa blocks, additive effects, theta,
// sigma, lambda, loglik. Names follow "kappa[<group>][j]",
// "alpha[<factor>][<level>]", "theta[<area>]".
struct ParamLayout {
  std::vector<std::string> names;
  Index n_groups = 0, jm1 = 0;
  Index kappa_offset = 0;
  Index alpha_offset = 0;
  std::vector<Index> alpha_sizes;
  Index theta_offset = 0;
  Index n_areas = 0;
  Index sigma_col = 0, lambda_col = 0, loglik_col = 0;

  Index n_cols() const { return static_cast<Index>(names.size()); }
  Index kappa_col(Index g, Index j) const { return kappa_offset + g * jm1 + j; }
  Index alpha_col(Index f, Index h) const;
  Index theta_col(Index k) const { return theta_offset + k; }

  static ParamLayout make(const ModelSpec& spec, const SpatialGraph& graph);
};

using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

void state_to_row(const ParameterState& state, const ParamLayout& layout, double loglik_value,
                  RowRef row);
ParameterState state_from_row(const ParamLayout& layout,
                              const Eigen::Ref<const Eigen::RowVectorXd>& row);

struct ChainDraws {
  std::vector<long> iterations;  // sweep index of each stored row
  Mat samples;                   // n_stored x layout.n_cols()

  // adaptation and acceptance metadata, echoed into the run manifest
  std::vector<std::string> block_names;
  std::vector<double> final_scales;
  std::vector<double> post_accept_rate;

  Index n_stored() const { return samples.rows(); }
};

struct PosteriorDraws {
  ParamLayout layout;
  std::vector<ChainDraws> chains;

  Index n_chains() const { return static_cast<Index>(chains.size()); }
  Index total_stored() const;
  // Column values across all chains, chain-major.
  Vec pooled_column(Index col) const;
};

}  // namespace spord
